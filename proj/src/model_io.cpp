#include "tussock/model_io.hpp"

#include <algorithm>
#include <bit>
#include <cstdio>
#include <cstring>

#include <json.hpp>

#include "tussock/errors.hpp"
#include "tussock/scene_io.hpp"

namespace tussock {

namespace {

using nlohmann::json;

template <typename T>
void put(std::string& out, T v) {
    using U = std::conditional_t<sizeof(T) == 8, std::uint64_t, std::uint32_t>;
    const U bits = std::bit_cast<U>(v);
    for (std::size_t i = 0; i < sizeof(T); ++i) out.push_back(static_cast<char>((bits >> (8 * i)) & 0xFF));
}

class Reader {
public:
    Reader(std::string_view bytes, std::string source) : bytes_(bytes), source_(std::move(source)) {}

    template <typename T>
    T get(const char* what) {
        using U = std::conditional_t<sizeof(T) == 8, std::uint64_t, std::uint32_t>;
        if (pos_ + sizeof(T) > bytes_.size())
            raise(ErrorCode::Parse, source_ + ": truncated payload while reading " + what);
        U bits = 0;
        for (std::size_t i = 0; i < sizeof(T); ++i)
            bits |= static_cast<U>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
        pos_ += sizeof(T);
        return std::bit_cast<T>(bits);
    }

    std::vector<double> doubles(std::size_t n, const char* what) {
        std::vector<double> out(n);
        for (auto& v : out) v = get<double>(what);
        return out;
    }

    bool at_end() const noexcept { return pos_ == bytes_.size(); }

private:
    std::string_view bytes_;
    std::string source_;
    std::size_t pos_ = 0;
};

void append_double(std::string& out, double v) {
    char buf[32];
    const int n = std::snprintf(buf, sizeof buf, "%.17g", v);
    out.append(buf, static_cast<std::size_t>(n));
}

std::vector<std::string_view> split_csv(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const auto pos = line.find(',', start);
        out.push_back(line.substr(start, pos == std::string_view::npos ? pos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

std::vector<std::string> default_classes() {
    std::vector<std::string> out;
    for (CoverClass c : kCoverClasses) out.emplace_back(cover_class_name(c));
    return out;
}

std::vector<double> transform_row(const ModelArtifact& m, std::span<const double> row) {
    std::vector<double> z(row.size());
    standardize_row(m.standardizer, row, z);
    return pca_project(m.pca, z);
}

void check_columns(const ModelArtifact& m, const FeatureMatrix& x) {
    if (x.columns() != m.columns()) {
        std::string detail;
        if (x.cols() != m.columns().size()) {
            detail = std::to_string(x.cols()) + " columns given, model expects " + std::to_string(m.columns().size());
        } else {
            for (std::size_t i = 0; i < x.cols(); ++i)
                if (x.columns()[i] != m.columns()[i]) {
                    detail = "column " + std::to_string(i + 1) + " is " + x.columns()[i] + ", model expects " +
                             m.columns()[i];
                    break;
                }
        }
        raise(ErrorCode::DimensionMismatch, "feature columns do not match model " + m.model_id + ": " + detail);
    }
}

}  // namespace

ModelArtifact fit_model(std::string model_id, const FeatureMatrix& train, const FitParams& params) {
    if (train.rows() < 2) raise(ErrorCode::EmptyInput, "model " + model_id + " needs at least two training rows");
    ModelArtifact m;
    m.model_id = std::move(model_id);
    m.classes = default_classes();
    m.standardizer = fit_standardizer(train);
    const FeatureMatrix z = apply_standardizer(m.standardizer, train);
    m.pca = fit_pca(z, params.variance_target);
    const FeatureMatrix scores = pca_transform(m.pca, z);
    m.forest = train_forest(scores, params.forest);
    return m;
}

std::vector<std::vector<double>> predict_proba(const ModelArtifact& m, const FeatureMatrix& x) {
    check_columns(m, x);
    std::vector<std::vector<double>> out;
    out.reserve(x.rows());
    for (std::size_t r = 0; r < x.rows(); ++r) out.push_back(predict_proba(m.forest, transform_row(m, x.row(r))));
    return out;
}

std::vector<int> predict_classes(const ModelArtifact& m, const FeatureMatrix& x) {
    std::vector<int> out;
    for (const auto& p : predict_proba(m, x))
        out.push_back(static_cast<int>(std::max_element(p.begin(), p.end()) - p.begin()));
    return out;
}

std::vector<Prediction> predict(const ModelArtifact& m, const FeatureMatrix& x) {
    const auto proba = predict_proba(m, x);
    std::vector<Prediction> out;
    out.reserve(x.rows());
    for (std::size_t r = 0; r < x.rows(); ++r) {
        const auto k = static_cast<std::size_t>(std::max_element(proba[r].begin(), proba[r].end()) - proba[r].begin());
        out.push_back({x.plot_ids()[r], x.survey_years()[r], std::string(cover_class_name(x.labels()[r])),
                       m.classes[k], proba[r]});
    }
    return out;
}

std::string encode_model(const ModelArtifact& m) {
    json trees = json::array();
    for (const auto& t : m.forest.trees) trees.push_back({t.nodes().size(), t.leaf_count()});
    const auto& fp = m.forest.params;
    json header = {
        {"magic", "STCM1"},
        {"model_id", m.model_id},
        {"classes", m.classes},
        {"columns", m.standardizer.columns},
        {"pca", {{"dims", m.pca.dims()}, {"retained", m.pca.retained}, {"variance_target", m.pca.variance_target}}},
        {"forest",
         {{"n_trees", fp.n_trees},
          {"seed", fp.seed},
          {"max_features", m.forest.max_features},
          {"max_features_param", fp.max_features},
          {"min_samples_leaf", fp.min_samples_leaf},
          {"max_depth", fp.max_depth},
          {"n_classes", m.forest.n_classes},
          {"n_features", m.forest.n_features}}},
        {"trees", trees}};
    std::string out = header.dump();
    out.push_back('\n');
    for (double v : m.standardizer.mean) put(out, v);
    for (double v : m.standardizer.scale) put(out, v);
    for (double v : m.pca.mean) put(out, v);
    for (Eigen::Index r = 0; r < m.pca.components.rows(); ++r)
        for (Eigen::Index c = 0; c < m.pca.components.cols(); ++c) put(out, m.pca.components(r, c));
    for (double v : m.pca.eigenvalues) put(out, v);
    for (double v : m.pca.ratios) put(out, v);
    for (const auto& t : m.forest.trees) {
        for (const auto& n : t.nodes()) {
            put(out, n.feature);
            put(out, n.threshold);
            put(out, n.left);
            put(out, n.right);
        }
        for (auto c : t.leaf_counts()) put(out, c);
    }
    return out;
}

ModelArtifact decode_model(std::string_view bytes, std::string_view source) {
    const std::string src(source);
    const auto newline = bytes.find('\n');
    if (newline == std::string_view::npos) raise(ErrorCode::Parse, src + ": missing STCM1 header terminator");
    ModelArtifact m;
    std::vector<std::pair<std::size_t, std::size_t>> tree_sizes;
    std::size_t dims = 0;
    try {
        const json h = json::parse(bytes.substr(0, newline));
        if (!h.is_object() || h.value("magic", "") != "STCM1")
            raise(ErrorCode::Parse, src + ": not an STCM1 model (bad magic)");
        m.model_id = h.at("model_id").get<std::string>();
        m.classes = h.at("classes").get<std::vector<std::string>>();
        m.standardizer.columns = h.at("columns").get<std::vector<std::string>>();
        const auto& p = h.at("pca");
        dims = p.at("dims").get<std::size_t>();
        m.pca.retained = p.at("retained").get<std::size_t>();
        m.pca.variance_target = p.at("variance_target").get<double>();
        const auto& f = h.at("forest");
        m.forest.params.n_trees = f.at("n_trees").get<int>();
        m.forest.params.seed = f.at("seed").get<std::uint64_t>();
        m.forest.params.max_features = f.at("max_features_param").get<int>();
        m.forest.params.min_samples_leaf = f.at("min_samples_leaf").get<int>();
        m.forest.params.max_depth = f.at("max_depth").get<int>();
        m.forest.max_features = f.at("max_features").get<int>();
        m.forest.n_classes = f.at("n_classes").get<int>();
        m.forest.n_features = f.at("n_features").get<std::size_t>();
        for (const auto& t : h.at("trees"))
            tree_sizes.emplace_back(t.at(0).get<std::size_t>(), t.at(1).get<std::size_t>());
    } catch (const json::exception& e) {
        raise(ErrorCode::Parse, src + ": malformed model header: " + e.what());
    }
    if (dims != m.standardizer.columns.size())
        raise(ErrorCode::Parse, src + ": PCA dimension disagrees with column count");
    if (m.pca.retained == 0 || m.pca.retained > dims || m.forest.n_features != m.pca.retained)
        raise(ErrorCode::Parse, src + ": retained component count is inconsistent");
    if (m.forest.n_classes != static_cast<int>(m.classes.size()) || tree_sizes.size() != static_cast<std::size_t>(m.forest.params.n_trees))
        raise(ErrorCode::Parse, src + ": forest header is inconsistent");

    Reader in(bytes.substr(newline + 1), src);
    m.standardizer.mean = in.doubles(dims, "standardizer mean");
    m.standardizer.scale = in.doubles(dims, "standardizer scale");
    m.pca.mean = in.doubles(dims, "PCA mean");
    m.pca.components.resize(static_cast<Eigen::Index>(dims), static_cast<Eigen::Index>(dims));
    for (std::size_t r = 0; r < dims; ++r)
        for (std::size_t c = 0; c < dims; ++c)
            m.pca.components(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = in.get<double>("PCA components");
    m.pca.eigenvalues = in.doubles(dims, "PCA eigenvalues");
    m.pca.ratios = in.doubles(dims, "PCA ratios");
    for (std::size_t t = 0; t < tree_sizes.size(); ++t) {
        const std::string what = "tree " + std::to_string(t);
        std::vector<TreeNode> nodes(tree_sizes[t].first);
        for (auto& n : nodes) {
            n.feature = in.get<std::int32_t>(what.c_str());
            n.threshold = in.get<double>(what.c_str());
            n.left = in.get<std::int32_t>(what.c_str());
            n.right = in.get<std::int32_t>(what.c_str());
        }
        std::vector<std::uint32_t> leaves(tree_sizes[t].second * m.classes.size());
        for (auto& c : leaves) c = in.get<std::uint32_t>(what.c_str());
        try {
            m.forest.trees.emplace_back(m.forest.n_classes, std::move(nodes), std::move(leaves));
        } catch (const Error& e) {
            raise(ErrorCode::Parse, src + ": " + what + ": " + e.what());
        }
    }
    if (!in.at_end()) raise(ErrorCode::Parse, src + ": trailing bytes after the last tree");
    return m;
}

ModelArtifact read_model(const std::filesystem::path& path) { return decode_model(read_file(path), path.string()); }

void write_model(const ModelArtifact& m, const std::filesystem::path& path) { write_file(path, encode_model(m)); }

std::string encode_predictions_csv(const std::vector<Prediction>& rows, const std::vector<std::string>& classes) {
    std::string out = "plot_id,survey_year,true_class,predicted_class";
    for (const auto& c : classes) out += ",p_" + c;
    out += '\n';
    for (const auto& r : rows) {
        out += r.plot_id + ',' + std::to_string(r.survey_year) + ',' + r.true_class + ',' + r.predicted_class;
        for (double p : r.proba) {
            out += ',';
            append_double(out, p);
        }
        out += '\n';
    }
    return out;
}

std::vector<Prediction> decode_predictions_csv(std::string_view text, std::string_view source) {
    const std::string src(source);
    std::vector<Prediction> out;
    std::size_t pos = 0, line_no = 0;
    std::size_t n_proba = 0;
    while (pos < text.size()) {
        auto end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = text.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.empty()) continue;
        const auto cells = split_csv(line);
        if (line_no == 1) {
            if (cells.size() < 4 || cells[0] != "plot_id" || cells[2] != "true_class" || cells[3] != "predicted_class")
                raise(ErrorCode::Parse, src + ": expected header plot_id,survey_year,true_class,predicted_class,...");
            n_proba = cells.size() - 4;
            continue;
        }
        const std::string where = src + ":" + std::to_string(line_no);
        if (cells.size() != 4 + n_proba) raise(ErrorCode::Parse, where + ": wrong number of cells");
        Prediction p;
        p.plot_id = std::string(cells[0]);
        try {
            p.survey_year = std::stoi(std::string(cells[1]));
            for (std::size_t k = 0; k < n_proba; ++k) p.proba.push_back(std::stod(std::string(cells[4 + k])));
        } catch (const std::exception&) {
            raise(ErrorCode::Parse, where + ": unparsable number");
        }
        p.true_class = std::string(cells[2]);
        p.predicted_class = std::string(cells[3]);
        if (p.predicted_class.empty()) raise(ErrorCode::Parse, where + ": empty predicted_class");
        out.push_back(std::move(p));
    }
    if (line_no == 0) raise(ErrorCode::Parse, src + ": empty predictions file");
    return out;
}

}  // namespace tussock
