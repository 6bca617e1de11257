#include "tussock/feature_matrix.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <set>

#include "tussock/errors.hpp"
#include "tussock/scene_io.hpp"

namespace tussock {

namespace {

std::vector<std::string_view> split(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        auto pos = line.find(',', start);
        out.push_back(line.substr(start, pos == std::string_view::npos ? pos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

void append_double(std::string& out, double v) {
    char buf[32];
    const int n = std::snprintf(buf, sizeof buf, "%.17g", v);
    out.append(buf, static_cast<std::size_t>(n));
}

}  // namespace

FeatureMatrix::FeatureMatrix(std::vector<std::string> columns) : columns_(std::move(columns)) {
    std::set<std::string> seen(columns_.begin(), columns_.end());
    if (seen.size() != columns_.size())
        raise(ErrorCode::InvalidArgument, "feature column names must be unique");
}

void FeatureMatrix::add_row(std::string plot_id, CoverClass label, int survey_year,
                            std::span<const double> values) {
    if (values.size() != cols())
        raise(ErrorCode::DimensionMismatch, "row for plot " + plot_id + " has " +
                                                std::to_string(values.size()) + " values, expected " +
                                                std::to_string(cols()));
    for (double v : values)
        if (!std::isfinite(v))
            raise(ErrorCode::InvalidArgument, "row for plot " + plot_id + " has a missing value");
    plot_ids_.push_back(std::move(plot_id));
    labels_.push_back(label);
    years_.push_back(survey_year);
    values_.insert(values_.end(), values.begin(), values.end());
}

FeatureMatrix FeatureMatrix::select_rows(std::span<const std::size_t> indices) const {
    FeatureMatrix out(columns_);
    for (std::size_t i : indices) {
        if (i >= rows()) raise(ErrorCode::OutOfBounds, "row index out of range");
        out.add_row(plot_ids_[i], labels_[i], years_[i], row(i));
    }
    return out;
}

std::string encode_features_csv(const FeatureMatrix& m) {
    std::string out = "plot_id,cover_class,survey_year";
    for (const auto& c : m.columns()) {
        out += ',';
        out += c;
    }
    out += '\n';
    for (std::size_t r = 0; r < m.rows(); ++r) {
        out += m.plot_ids()[r];
        out += ',';
        out += cover_class_name(m.labels()[r]);
        out += ',';
        out += std::to_string(m.survey_years()[r]);
        for (double v : m.row(r)) {
            out += ',';
            append_double(out, v);
        }
        out += '\n';
    }
    return out;
}

FeatureMatrix decode_features_csv(std::string_view text, std::string_view source) {
    const std::string src(source);
    std::size_t line_no = 0;
    std::size_t pos = 0;
    auto next_line = [&](std::string_view& line) {
        if (pos >= text.size()) return false;
        auto end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        line = text.substr(pos, end - pos);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        pos = end + 1;
        ++line_no;
        return true;
    };
    std::string_view line;
    if (!next_line(line)) raise(ErrorCode::Parse, src + ": empty feature file");
    const auto header = split(line);
    if (header.size() < 3 || header[0] != "plot_id" || header[1] != "cover_class" ||
        header[2] != "survey_year")
        raise(ErrorCode::Parse, src + ": header must start with plot_id,cover_class,survey_year");
    FeatureMatrix m(std::vector<std::string>(header.begin() + 3, header.end()));
    std::vector<double> values(m.cols());
    while (next_line(line)) {
        if (line.empty()) continue;
        const std::string where = src + " line " + std::to_string(line_no);
        const auto fields = split(line);
        if (fields.size() != header.size())
            raise(ErrorCode::Parse, where + ": wrong number of fields");
        const auto label = parse_cover_class(fields[1]);
        if (!label) raise(ErrorCode::Parse, where + ": unknown cover_class");
        int year = 0;
        auto [yp, yec] = std::from_chars(fields[2].data(), fields[2].data() + fields[2].size(), year);
        if (yec != std::errc() || yp != fields[2].data() + fields[2].size())
            raise(ErrorCode::Parse, where + ": bad survey_year");
        for (std::size_t c = 0; c < m.cols(); ++c) {
            const auto f = fields[c + 3];
            auto [p, ec] = std::from_chars(f.data(), f.data() + f.size(), values[c]);
            if (ec != std::errc() || p != f.data() + f.size() || f.empty())
                raise(ErrorCode::Parse, where + ": bad value in column " + m.columns()[c]);
        }
        m.add_row(std::string(fields[0]), *label, year, values);
    }
    return m;
}

FeatureMatrix read_features_csv(const std::filesystem::path& path) {
    return decode_features_csv(read_file(path), path.string());
}

void write_features_csv(const FeatureMatrix& m, const std::filesystem::path& path) {
    write_file(path, encode_features_csv(m));
}

}  // namespace tussock
