#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>

#include "tussock/errors.hpp"
#include "tussock/synth.hpp"

namespace tussock {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr int kOracleMaxSide = 64;

class DirectInterpreter {
public:
    DirectInterpreter(std::string_view text, const std::map<std::string, double>& params,
                      std::span<const double> bands)
        : s_(text), params_(params), bands_(bands) {}

    double run() {
        const double v = sum();
        space();
        if (i_ != s_.size()) raise(ErrorCode::Configuration, "trailing input in formula " + std::string(s_));
        return v;
    }

private:
    void space() {
        while (i_ < s_.size() && s_[i_] == ' ') ++i_;
    }
    bool eat(char c) {
        space();
        if (i_ < s_.size() && s_[i_] == c) {
            ++i_;
            return true;
        }
        return false;
    }
    double sum() {
        double v = product();
        for (;;) {
            if (eat('+')) v = v + product();
            else if (eat('-')) v = v - product();
            else return v;
        }
    }
    double product() {
        double v = unary();
        for (;;) {
            if (eat('*')) {
                v = v * unary();
            } else if (eat('/')) {
                const double d = unary();
                v = std::fabs(d) < 1e-12 ? kNaN : v / d;
            } else {
                return v;
            }
        }
    }
    double unary() {
        if (eat('-')) return -unary();
        if (eat('+')) return unary();
        const double base = primary();
        if (eat('^')) return std::pow(base, unary());
        return base;
    }
    double primary() {
        space();
        if (eat('(')) {
            const double v = sum();
            if (!eat(')')) raise(ErrorCode::Configuration, "missing ')' in formula");
            return v;
        }
        const std::size_t start = i_;
        if (i_ < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[i_])) || s_[i_] == '.')) {
            while (i_ < s_.size() &&
                   (std::isdigit(static_cast<unsigned char>(s_[i_])) || s_[i_] == '.' || s_[i_] == 'e' ||
                    ((s_[i_] == '-' || s_[i_] == '+') && i_ > start && s_[i_ - 1] == 'e')))
                ++i_;
            return std::stod(std::string(s_.substr(start, i_ - start)));
        }
        while (i_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[i_])) || s_[i_] == '_')) ++i_;
        const std::string name(s_.substr(start, i_ - start));
        if (name.empty()) raise(ErrorCode::Configuration, "unexpected character in formula");
        if (name == "sqrt" || name == "abs") {
            if (!eat('(')) raise(ErrorCode::Configuration, "expected '(' in formula");
            const double v = sum();
            if (!eat(')')) raise(ErrorCode::Configuration, "missing ')' in formula");
            if (name == "abs") return std::fabs(v);
            return v < 0.0 ? kNaN : std::sqrt(v);
        }
        if (auto it = params_.find(name); it != params_.end()) return it->second;
        static const char* const kNames[] = {"B2", "B3", "B4", "B5", "B6", "B7", "B8", "B8A", "B11", "B12"};
        for (std::size_t k = 0; k < 10; ++k)
            if (name == kNames[k]) return bands_[k];
        raise(ErrorCode::Configuration, "unknown name '" + name + "' in formula");
    }

    std::string_view s_;
    const std::map<std::string, double>& params_;
    std::span<const double> bands_;
    std::size_t i_ = 0;
};

bool in_period(const std::string& token, const PeriodSlot& slot, int y) {
    int yy = 0, mm = 0, dd = 0;
    if (std::sscanf(token.c_str(), "%d-%d-%d", &yy, &mm, &dd) != 3) return false;
    if (!slot.season) return yy == y && mm >= 9;
    switch (*slot.season) {
    case Season::Autumn: return yy == y && mm >= 3 && mm <= 5;
    case Season::Winter: return yy == y && mm >= 6 && mm <= 8;
    case Season::Spring: return yy == y && mm >= 9 && mm <= 11;
    case Season::Summer: return (yy == y && mm == 12) || (yy == y + 1 && mm <= 2);
    }
    return false;
}

class NaiveScene {
public:
    explicit NaiveScene(const SceneStack& s) : s_(s) {}

    double median(BandId band, const PeriodSlot& slot, int year, int col, int row) const {
        const std::size_t i = static_cast<std::size_t>(row) * s_.grid().width + col;
        std::vector<double> v;
        for (const auto& o : s_.observations()) {
            if (o.band != band || !in_period(o.date, slot, year)) continue;
            const ValidityMask* m = s_.mask_for(o.date);
            if (m && m->valid[i] == 0) continue;
            const double x = o.raster.values()[i];
            if (std::isnan(x) || x == s_.nodata()) continue;
            v.push_back(x);
        }
        if (v.empty()) return kNaN;
        std::sort(v.begin(), v.end());
        const std::size_t n = v.size();
        return n % 2 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2.0;
    }

    double formula(const IndexDefinition& def, const PeriodSlot& slot, int year, int col, int row) const {
        std::vector<double> bands(10, kNaN);
        for (std::size_t k = 0; k < kInputBandCount; ++k) {
            const BandId b = kInputBands[k];
            if (std::find(def.required_bands.begin(), def.required_bands.end(), b) != def.required_bands.end())
                bands[k] = median(b, slot, year, col, row);
        }
        return interpret_formula(def.formula(), def.parameters, bands);
    }

    double index(const IndexDefinition& def, const PeriodSlot& slot, int year, int col, int row) const {
        if (def.kind == IndexDefinition::Kind::Formula) {
            const double v = formula(def, slot, year, col, row);
            return std::isfinite(v) ? v : kNaN;
        }
        if (!std::isfinite(formula(def, slot, year, col, row))) return kNaN;
        std::vector<double> neighbourhood;
        const int r = def.window_radius;
        for (int rr = row - r; rr <= row + r; ++rr)
            for (int cc = col - r; cc <= col + r; ++cc) {
                if (rr < 0 || cc < 0 || rr >= s_.grid().height || cc >= s_.grid().width) continue;
                const double v = formula(def, slot, year, cc, rr);
                if (std::isfinite(v)) neighbourhood.push_back(v);
            }
        double mean = 0.0;
        for (double v : neighbourhood) mean += v;
        mean /= static_cast<double>(neighbourhood.size());
        double ss = 0.0;
        for (double v : neighbourhood) ss += (v - mean) * (v - mean);
        return std::sqrt(ss / static_cast<double>(neighbourhood.size()));
    }

    // Full composite raster of the mean of `members` (one member: the band).
    std::vector<double> mean_raster(const std::vector<BandId>& members, const PeriodSlot& slot, int year) const {
        const int w = s_.grid().width, h = s_.grid().height;
        std::vector<double> out(static_cast<std::size_t>(w) * h);
        for (int r = 0; r < h; ++r)
            for (int c = 0; c < w; ++c) {
                double sum = 0.0;
                bool ok = true;
                for (BandId b : members) {
                    const double v = median(b, slot, year, c, r);
                    if (std::isnan(v)) {
                        ok = false;
                        break;
                    }
                    sum += v;
                }
                out[static_cast<std::size_t>(r) * w + c] =
                    ok ? (members.size() == 1 ? sum : sum / static_cast<double>(members.size())) : kNaN;
            }
        return out;
    }

    std::array<double, 6> texture(const std::vector<double>& raster, const TextureParams& tp, int col,
                                  int row) const {
        const int w = s_.grid().width, h = s_.grid().height;
        double lo = std::numeric_limits<double>::infinity(), hi = -lo;
        for (double v : raster)
            if (!std::isnan(v)) {
                lo = std::min(lo, v);
                hi = std::max(hi, v);
            }
        const int L = tp.levels;
        auto level = [&](int c, int r) {
            const double v = raster[static_cast<std::size_t>(r) * w + c];
            if (std::isnan(v)) return -1;
            if (!(hi - lo > 0.0)) return 0;
            const int b = static_cast<int>(std::floor((v - lo) / (hi - lo) * L));
            return std::min(std::max(b, 0), L - 1);
        };
        std::vector<std::vector<double>> p(L, std::vector<double>(L, 0.0));
        double total = 0.0;
        const int rad = tp.window_radius;
        for (int r = row - rad; r <= row + rad; ++r)
            for (int c = col - rad; c <= col + rad; ++c) {
                if (r < 0 || c < 0 || r >= h || c >= w) continue;
                for (const Offset& o : tp.offsets) {
                    const int r2 = r + o.dy, c2 = c + o.dx;
                    if (r2 < row - rad || r2 > row + rad || c2 < col - rad || c2 > col + rad) continue;
                    if (r2 < 0 || c2 < 0 || r2 >= h || c2 >= w) continue;
                    const int a = level(c, r), b = level(c2, r2);
                    if (a < 0 || b < 0) continue;
                    p[a][b] += 1.0;
                    p[b][a] += 1.0;
                    total += 2.0;
                }
            }
        std::array<double, 6> out;
        if (total == 0.0) {
            out.fill(kNaN);
            return out;
        }
        double contrast = 0, dissim = 0, homog = 0, asm_ = 0, mi = 0, mj = 0;
        for (int i = 0; i < L; ++i)
            for (int j = 0; j < L; ++j) {
                const double q = p[i][j] / total;
                contrast += q * (i - j) * (i - j);
                dissim += q * std::abs(i - j);
                homog += q / (1.0 + (i - j) * (i - j));
                asm_ += q * q;
                mi += i * q;
                mj += j * q;
            }
        double vi = 0, vj = 0, cov = 0;
        for (int i = 0; i < L; ++i)
            for (int j = 0; j < L; ++j) {
                const double q = p[i][j] / total;
                vi += (i - mi) * (i - mi) * q;
                vj += (j - mj) * (j - mj) * q;
                cov += (i - mi) * (j - mj) * q;
            }
        const double corr = (std::sqrt(vi) < 1e-12 || std::sqrt(vj) < 1e-12) ? 0.0 : cov / std::sqrt(vi * vj);
        out = {contrast, dissim, homog, std::sqrt(asm_), corr, asm_};
        return out;
    }

private:
    const SceneStack& s_;
};

}  // namespace

double interpret_formula(std::string_view formula, const std::map<std::string, double>& parameters,
                         std::span<const double> band_values) {
    return DirectInterpreter(formula, parameters, band_values).run();
}

FeatureMatrix oracle_features(const SceneStack& scene, std::span<const PlotObservation> plots,
                              const ModelConfig& config, const TextureParams& texture, const IndexRegistry& indices) {
    if (scene.grid().width > kOracleMaxSide || scene.grid().height > kOracleMaxSide)
        raise(ErrorCode::InvalidArgument, "oracle_features only accepts scenes up to 64x64");
    const NaiveScene naive(scene);
    FeatureMatrix out(config.column_names());
    std::map<std::pair<std::string, int>, std::vector<double>> rasters;
    for (const auto& plot : plots) {
        const PixelIndex px = nearest_pixel(scene.grid(), plot.x, plot.y);
        std::vector<double> row;
        for (const auto& slot : config.periods) {
            for (BandId b : config.bands) row.push_back(naive.median(b, slot, plot.survey_year, px.col, px.row));
            for (const auto& id : config.indices)
                row.push_back(naive.index(indices.find(id), slot, plot.survey_year, px.col, px.row));
            if (!config.texture_bands.empty()) {
                std::vector<std::vector<BandId>> sources;
                for (BandId b : config.texture_bands) sources.push_back({b});
                sources.push_back(config.texture_bands);
                for (const auto& members : sources) {
                    std::string key(slot.name());
                    for (BandId b : members) key += std::string(" ") + std::string(band_name(b));
                    auto it = rasters.find({key, plot.survey_year});
                    if (it == rasters.end())
                        it = rasters
                                 .emplace(std::make_pair(key, plot.survey_year),
                                          naive.mean_raster(members, slot, plot.survey_year))
                                 .first;
                    for (double v : naive.texture(it->second, texture, px.col, px.row)) row.push_back(v);
                }
            }
        }
        if (std::all_of(row.begin(), row.end(), [](double v) { return std::isfinite(v); }))
            out.add_row(plot.plot_id, plot.cover_class, plot.survey_year, row);
    }
    return out;
}

}  // namespace tussock
