#include "tussock/indices.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "tussock/embedded_config.hpp"
#include "tussock/errors.hpp"

namespace tussock {

namespace {

using nlohmann::json;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

IndexDefinition parse_formula_entry(const json& entry) {
    IndexDefinition def;
    def.id = entry.at("id").get<std::string>();
    def.name = entry.at("name").get<std::string>();
    if (entry.contains("parameters"))
        def.parameters = entry.at("parameters").get<std::map<std::string, double>>();
    def.expression = Expression::compile(entry.at("formula").get<std::string>(), def.parameters);
    def.required_bands = def.expression.bands();
    std::sort(def.required_bands.begin(), def.required_bands.end());
    def.normalized = entry.value("normalized", false);
    def.reference = entry.value("reference", "");
    def.note = entry.value("note", "");
    return def;
}

std::vector<IndexDefinition> parse_list(const json& list, const char* what) {
    if (!list.is_array()) raise(ErrorCode::Configuration, std::string("'") + what + "' must be an array");
    std::vector<IndexDefinition> out;
    std::vector<const json*> deferred;
    for (const auto& entry : list) {
        if (entry.value("kind", "formula") == "neighborhood_stddev")
            deferred.push_back(&entry);
        else
            out.push_back(parse_formula_entry(entry));
    }
    for (const json* entry : deferred) {
        IndexDefinition def;
        def.id = entry->at("id").get<std::string>();
        def.name = entry->at("name").get<std::string>();
        def.kind = IndexDefinition::Kind::NeighborhoodStddev;
        def.source_id = entry->at("source").get<std::string>();
        def.window_radius = entry->value("window_radius", 1);
        def.reference = entry->value("reference", "");
        def.note = entry->value("note", "");
        auto src = std::find_if(out.begin(), out.end(),
                                [&](const IndexDefinition& d) { return d.id == def.source_id; });
        if (src == out.end())
            raise(ErrorCode::Configuration,
                  "index " + def.id + " refers to unknown source index " + def.source_id);
        if (def.window_radius < 1)
            raise(ErrorCode::Configuration, "index " + def.id + " needs window_radius >= 1");
        def.expression = src->expression;
        def.parameters = src->parameters;
        def.required_bands = src->required_bands;
        out.push_back(std::move(def));
    }
    // Restore configuration order (stddev entries were resolved last).
    std::vector<IndexDefinition> ordered;
    for (const auto& entry : list) {
        const auto id = entry.at("id").get<std::string>();
        auto it = std::find_if(out.begin(), out.end(), [&](const auto& d) { return d.id == id; });
        ordered.push_back(std::move(*it));
    }
    return ordered;
}

std::string join_bands(const std::vector<BandId>& bands) {
    std::string s;
    for (BandId b : bands) {
        if (!s.empty()) s += ' ';
        s += band_name(b);
    }
    return s;
}

std::string join_params(const std::map<std::string, double>& params) {
    std::ostringstream s;
    bool first = true;
    for (const auto& [k, v] : params) {
        if (!first) s << ' ';
        s << k << '=' << v;
        first = false;
    }
    return s.str();
}

}  // namespace

IndexRegistry IndexRegistry::from_json(std::string_view text) {
    IndexRegistry reg;
    try {
        const json doc = json::parse(text);
        reg.vegetation_ = parse_list(doc.at("vegetation"), "vegetation");
        reg.rgb_suite_ = parse_list(doc.at("rgb_suite"), "rgb_suite");
    } catch (const json::exception& e) {
        raise(ErrorCode::Configuration, std::string("index registry: ") + e.what());
    }
    std::vector<std::string> ids;
    for (const auto* list : {&reg.vegetation_, &reg.rgb_suite_})
        for (const auto& d : *list) ids.push_back(d.id);
    std::sort(ids.begin(), ids.end());
    if (std::adjacent_find(ids.begin(), ids.end()) != ids.end())
        raise(ErrorCode::Configuration, "index registry has duplicate ids");
    return reg;
}

const IndexRegistry& IndexRegistry::builtin() {
    static const IndexRegistry reg = from_json(embedded::indices_json());
    return reg;
}

const IndexDefinition& IndexRegistry::find(std::string_view id) const {
    for (const auto* list : {&vegetation_, &rgb_suite_})
        for (const auto& d : *list)
            if (d.id == id) return d;
    raise(ErrorCode::Configuration, "unknown index id '" + std::string(id) + "'");
}

bool IndexRegistry::contains(std::string_view id) const noexcept {
    for (const auto* list : {&vegetation_, &rgb_suite_})
        for (const auto& d : *list)
            if (d.id == id) return true;
    return false;
}

std::string IndexRegistry::table() const {
    std::ostringstream out;
    out << std::left << std::setw(7) << "id" << std::setw(10) << "name" << std::setw(16) << "bands"
        << std::setw(22) << "parameters" << "formula\n";
    for (const auto* list : {&vegetation_, &rgb_suite_}) {
        for (const auto& d : *list) {
            std::string formula = d.formula();
            if (d.kind == IndexDefinition::Kind::NeighborhoodStddev)
                formula = "stddev_r" + std::to_string(d.window_radius) + "(" + d.source_id + ")";
            out << std::setw(7) << d.id << std::setw(10) << d.name << std::setw(16)
                << join_bands(d.required_bands) << std::setw(22) << join_params(d.parameters)
                << formula << '\n';
        }
    }
    return out.str();
}

double evaluate_index(const IndexDefinition& def, std::span<const double> band_values) {
    if (def.kind != IndexDefinition::Kind::Formula)
        raise(ErrorCode::InvalidArgument, "index " + def.id + " is not a pointwise formula");
    return def.expression.evaluate(band_values);
}

namespace {

BandRaster evaluate_over(const Expression& expr, const std::string& index_id,
                         const SeasonalComposite& composite) {
    std::vector<const BandRaster*> inputs;
    for (BandId b : expr.bands()) {
        auto it = composite.bands.find(b);
        if (it == composite.bands.end())
            raise(ErrorCode::MissingBand, "index " + index_id + " needs band " +
                                              std::string(band_name(b)) + " missing from composite " +
                                              composite.period.token());
        inputs.push_back(&it->second);
    }
    const BandRaster& ref = *inputs.front();
    const GridSpec& grid = ref.grid();
    std::vector<double> out(grid.size());
    std::array<double, kInputBandCount> sample;
    sample.fill(kNaN);
    const auto& bands = expr.bands();
    for (std::size_t i = 0; i < grid.size(); ++i) {
        for (std::size_t k = 0; k < bands.size(); ++k) {
            const double v = inputs[k]->values()[i];
            sample[band_slot(bands[k])] = inputs[k]->is_nodata(v) ? kNaN : v;
        }
        const double r = expr.evaluate(sample);
        out[i] = std::isfinite(r) ? r : ref.nodata();
    }
    return BandRaster(grid, std::move(out), ref.nodata());
}

}  // namespace

BandRaster compute_index(const IndexDefinition& def, const SeasonalComposite& composite) {
    if (def.expression.bands().empty())
        raise(ErrorCode::Configuration, "index " + def.id + " references no bands");
    BandRaster base = evaluate_over(def.expression, def.id, composite);
    if (def.kind == IndexDefinition::Kind::NeighborhoodStddev)
        return ndvi_stddev(base, def.window_radius);
    return base;
}

BandRaster ndvi_stddev(const BandRaster& ndvi, int window_radius) {
    if (window_radius < 1) raise(ErrorCode::InvalidArgument, "window radius must be >= 1");
    const int w = ndvi.width();
    const int h = ndvi.height();
    std::vector<double> out(ndvi.grid().size(), ndvi.nodata());
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            if (!ndvi.valid(c, r)) continue;
            const int r0 = std::max(0, r - window_radius), r1 = std::min(h - 1, r + window_radius);
            const int c0 = std::max(0, c - window_radius), c1 = std::min(w - 1, c + window_radius);
            double sum = 0.0;
            int n = 0;
            for (int rr = r0; rr <= r1; ++rr)
                for (int cc = c0; cc <= c1; ++cc)
                    if (ndvi.valid(cc, rr)) {
                        sum += ndvi.at(cc, rr);
                        ++n;
                    }
            const double mean = sum / n;
            double ss = 0.0;
            for (int rr = r0; rr <= r1; ++rr)
                for (int cc = c0; cc <= c1; ++cc)
                    if (ndvi.valid(cc, rr)) {
                        const double d = ndvi.at(cc, rr) - mean;
                        ss += d * d;
                    }
            out[static_cast<std::size_t>(r) * w + c] = std::sqrt(ss / n);
        }
    }
    return BandRaster(ndvi.grid(), std::move(out), ndvi.nodata());
}

std::vector<BandRaster> rgb_index_suite(const SeasonalComposite& composite,
                                        const IndexRegistry& registry) {
    for (BandId b : {BandId::B2, BandId::B3, BandId::B4})
        if (!composite.bands.count(b))
            raise(ErrorCode::MissingBand, "RGB index suite needs band " + std::string(band_name(b)) +
                                              " missing from composite " + composite.period.token());
    std::vector<BandRaster> out;
    out.reserve(registry.rgb_suite().size());
    for (const auto& def : registry.rgb_suite()) out.push_back(compute_index(def, composite));
    return out;
}

}  // namespace tussock
