// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero if any fails. Usage: acceptance [work_dir]

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "tussock/experiment.hpp"
#include "tussock/forest.hpp"
#include "tussock/indices.hpp"
#include "tussock/log.hpp"
#include "tussock/metrics.hpp"
#include "tussock/reduce.hpp"
#include "tussock/registry.hpp"
#include "tussock/rng.hpp"
#include "tussock/scene_io.hpp"
#include "tussock/synth.hpp"
#include "tussock/texture.hpp"

namespace fs = std::filesystem;
using namespace tussock;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

// 1. Registry fidelity -----------------------------------------------------

Outcome registry_fidelity() {
    const std::map<std::string, std::size_t> expected = {
        {"M17", 17}, {"M24", 24}, {"M41", 41}, {"M10", 10}, {"M66", 66}, {"M76", 76},
        {"M40", 40}, {"M19", 19}, {"M76*", 76}, {"M64", 64}, {"M20", 20}};
    const auto t0 = Clock::now();
    SynthParams p;
    p.width = 64;
    p.height = 64;
    p.n_plots = 120;
    p.seed = 1;
    const auto s = generate_scene(builtin_profile("mixed-realistic"), p);
    FeatureExtractor fx(s.scene);
    std::set<std::string> seen;
    std::string mismatches;
    for (const auto& m : ModelRegistry::builtin().models()) {
        const auto x = fx.assemble(m, s.plots);
        seen.insert(m.id);
        const auto want = expected.count(m.id) ? expected.at(m.id) : 0;
        if (x.cols() != want || x.rows() != s.plots.size())
            mismatches += fmt(" %s:%zu(want %zu)", m.id.c_str(), x.cols(), want);
    }
    const double elapsed = seconds_since(t0);
    bool all_models = seen.size() == expected.size();
    for (const auto& [id, n] : expected) all_models = all_models && seen.count(id);
    Outcome o;
    o.pass = all_models && mismatches.empty() && elapsed < 10.0;
    o.detail = fmt("%zu models, counts %s, %.2f s (limit 10 s)", seen.size(),
                   mismatches.empty() ? "exact" : mismatches.c_str(), elapsed);
    return o;
}

// 2. Metric oracle -----------------------------------------------------------

struct DirectMetrics {
    double oa, ea, ok;
    std::vector<double> p, r, f1;
};

// Straight from the tabulated equations, one-vs-rest per class.
DirectMetrics direct_metrics(const std::vector<std::vector<double>>& c) {
    const std::size_t k = c.size();
    double n = 0.0, diag = 0.0;
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j) {
            n += c[i][j];
            if (i == j) diag += c[i][j];
        }
    DirectMetrics d;
    d.oa = diag / n;
    double chance = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        double row = 0.0, col = 0.0;
        for (std::size_t j = 0; j < k; ++j) {
            row += c[i][j];
            col += c[j][i];
        }
        chance += row * col;
    }
    d.ea = chance / (n * n);
    d.ok = (d.oa - d.ea) / (1.0 - d.ea);
    for (std::size_t i = 0; i < k; ++i) {
        const double tp = c[i][i];
        double fp = 0.0, fn = 0.0;
        for (std::size_t j = 0; j < k; ++j) {
            if (j == i) continue;
            fp += c[j][i];
            fn += c[i][j];
        }
        d.p.push_back(tp + fp > 0 ? tp / (tp + fp) : 0.0);
        d.r.push_back(tp + fn > 0 ? tp / (tp + fn) : 0.0);
        d.f1.push_back(2 * tp + fp + fn > 0 ? 2 * tp / (2 * tp + fp + fn) : 0.0);
    }
    return d;
}

Outcome metric_oracle() {
    Rng rng(2024);
    double worst = 0.0;
    auto track = [&](double a, double b) { worst = std::max(worst, std::fabs(a - b)); };
    for (int trial = 0; trial < 1000; ++trial) {
        std::vector<std::uint64_t> counts(16);
        std::vector<std::vector<double>> c(4, std::vector<double>(4));
        for (std::size_t i = 0; i < 16; ++i) {
            counts[i] = rng.below(trial % 10 == 0 ? 5 : 200);
            c[i / 4][i % 4] = static_cast<double>(counts[i]);
        }
        counts[0] += 1;
        c[0][0] += 1;
        ConfusionMatrix cm({"None", "Low", "Medium", "High"}, counts);
        const auto d = direct_metrics(c);
        track(overall_accuracy(cm), d.oa);
        track(expected_accuracy(cm), d.ea);
        if (d.ea < 1.0) track(kappa(cm), d.ok);
        for (std::size_t k = 0; k < 4; ++k) {
            const auto m = per_class_prf(cm, k);
            track(m.precision, d.p[k]);
            track(m.recall, d.r[k]);
            track(m.f1, d.f1[k]);
        }
    }
    // Binary form with TP/FP/FN/TN written out.
    double worst_binary = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        const double tp = 1 + rng.below(300), fn = rng.below(300), fp = rng.below(300), tn = 1 + rng.below(300);
        ConfusionMatrix cm({"pos", "neg"}, {std::uint64_t(tp), std::uint64_t(fn), std::uint64_t(fp), std::uint64_t(tn)});
        const double n = tp + fp + tn + fn;
        const double oa = (tp + tn) / n;
        const double ea = ((tp + fp) * (tp + fn) + (fn + tn) * (fp + tn)) / (n * n);
        const double ok = (oa - ea) / (1 - ea);
        const auto m = per_class_prf(cm, 0);
        for (auto [a, b] : {std::pair{overall_accuracy(cm), oa}, {expected_accuracy(cm), ea}, {kappa(cm), ok},
                            {m.precision, tp / (tp + fp)}, {m.recall, tp / (tp + fn)},
                            {m.f1, 2 * tp / (2 * tp + fp + fn)}})
            worst_binary = std::max(worst_binary, std::fabs(a - b));
    }
    Outcome o;
    o.pass = worst <= 1e-12 && worst_binary <= 1e-12;
    o.detail = fmt("1000 4x4 max |diff| %.2e, 1000 2x2 max |diff| %.2e (tol 1e-12)", worst, worst_binary);
    return o;
}

// 3. GLCM oracle -------------------------------------------------------------

Outcome glcm_oracle() {
    Rng rng(77);
    double worst = 0.0, worst_asm = 0.0;
    bool counts_ok = true;
    for (int trial = 0; trial < 200; ++trial) {
        const int levels = 2 + static_cast<int>(rng.below(31));
        QuantizedRaster q{8, 8, levels, std::vector<int>(64)};
        for (auto& v : q.values)
            v = rng.bernoulli(trial % 4 == 3 ? 0.15 : 0.0) ? QuantizedRaster::kNodata
                                                           : static_cast<int>(rng.below(levels));
        const auto& offsets = default_offsets();

        // Every ordered pixel pair, both directions counted.
        std::vector<double> pairs(static_cast<std::size_t>(levels) * levels, 0.0);
        double total = 0.0;
        for (int r = 0; r < 8; ++r)
            for (int c = 0; c < 8; ++c)
                for (const auto& off : offsets) {
                    const int r2 = r + off.dy, c2 = c + off.dx;
                    if (r2 < 0 || r2 >= 8 || c2 < 0 || c2 >= 8) continue;
                    const int a = q.values[r * 8 + c], b = q.values[r2 * 8 + c2];
                    if (a < 0 || b < 0) continue;
                    pairs[a * levels + b] += 1;
                    pairs[b * levels + a] += 1;
                    total += 2;
                }

        const auto g = glcm_window(q, 4, 4, 4, offsets);
        for (int i = 0; i < levels; ++i)
            for (int j = 0; j < levels; ++j)
                counts_ok = counts_ok && static_cast<double>(g.count(i, j)) == pairs[i * levels + j];
        if (total == 0) {
            counts_ok = counts_ok && !glcm_stats(g).has_value();
            continue;
        }

        double con = 0, dis = 0, hom = 0, asm_ = 0, mi = 0, mj = 0;
        for (int i = 0; i < levels; ++i)
            for (int j = 0; j < levels; ++j) {
                const double p = pairs[i * levels + j] / total;
                con += p * (i - j) * (i - j);
                dis += p * std::abs(i - j);
                hom += p / (1.0 + (i - j) * (i - j));
                asm_ += p * p;
                mi += p * i;
                mj += p * j;
            }
        double vi = 0, vj = 0, cov = 0;
        for (int i = 0; i < levels; ++i)
            for (int j = 0; j < levels; ++j) {
                const double p = pairs[i * levels + j] / total;
                vi += p * (i - mi) * (i - mi);
                vj += p * (j - mj) * (j - mj);
                cov += p * (i - mi) * (j - mj);
            }
        const double corr = (std::sqrt(vi) < 1e-12 || std::sqrt(vj) < 1e-12) ? 0.0 : cov / std::sqrt(vi * vj);
        const auto s = glcm_stats(g);
        if (!s) {
            counts_ok = false;
            continue;
        }
        const std::array<double, 6> want = {con, dis, hom, std::sqrt(asm_), corr, asm_};
        const auto got = s->as_array();
        for (std::size_t k = 0; k < 6; ++k) worst = std::max(worst, std::fabs(got[k] - want[k]));
        worst_asm = std::max(worst_asm, std::fabs(s->asm_ - s->energy * s->energy));
    }
    Outcome o;
    o.pass = counts_ok && worst <= 1e-9 && worst_asm <= 1e-12;
    o.detail = fmt("200 windows, counts %s, stats max |diff| %.2e (tol 1e-9), |ASM - energy^2| %.2e (tol 1e-12)",
                   counts_ok ? "identical" : "DIFFER", worst, worst_asm);
    return o;
}

// 4. PCA properties ----------------------------------------------------------

Outcome pca_properties() {
    Rng rng(4);
    double worst_orth = 0.0, worst_recon = 0.0;
    bool k_ok = true;
    std::string ks;
    for (int trial = 0; trial < 10; ++trial) {
        const std::size_t n = 200, d = 30;
        std::vector<std::string> names;
        for (std::size_t c = 0; c < d; ++c) names.push_back("f" + std::to_string(c));
        FeatureMatrix x(names);
        // Columns mix a few latent factors plus decaying independent noise.
        std::vector<std::vector<double>> load(4, std::vector<double>(d));
        for (auto& l : load)
            for (double& v : l) v = rng.normal();
        for (std::size_t r = 0; r < n; ++r) {
            std::array<double, 4> z;
            for (double& v : z) v = rng.normal() * 3.0;
            std::vector<double> row(d);
            for (std::size_t c = 0; c < d; ++c) {
                row[c] = rng.normal() * std::pow(0.7, double(c % 10)) * (trial % 2 ? 0.2 : 1.0);
                for (std::size_t f = 0; f < 4; ++f) row[c] += z[f] * load[f][c];
            }
            x.add_row("P" + std::to_string(r), CoverClass::None, 2021, row);
        }
        const auto m = fit_pca(x, 0.999);

        const Eigen::MatrixXd gram = m.components * m.components.transpose();
        worst_orth = std::max(worst_orth, (gram - Eigen::MatrixXd::Identity(d, d)).cwiseAbs().maxCoeff());

        // Explained variance measured on the projected data itself.
        std::vector<double> score_var(d, 0.0);
        double total_var = 0.0;
        std::vector<double> mean(d, 0.0);
        for (std::size_t r = 0; r < n; ++r)
            for (std::size_t c = 0; c < d; ++c) mean[c] += x.at(r, c) / n;
        for (std::size_t r = 0; r < n; ++r) {
            const auto row = x.row(r);
            const auto scores = pca_project(m, row, d);
            const auto back = pca_inverse(m, scores);
            for (std::size_t c = 0; c < d; ++c) {
                worst_recon = std::max(worst_recon, std::fabs(back[c] - row[c]));
                total_var += (row[c] - mean[c]) * (row[c] - mean[c]);
                score_var[c] += scores[c] * scores[c];
            }
        }
        double cum = 0.0, cum_before = 0.0;
        for (std::size_t c = 0; c < m.retained; ++c) {
            cum_before = cum;
            cum += score_var[c] / total_var;
        }
        k_ok = k_ok && m.retained >= 1 && cum >= 0.999 && (m.retained == 1 || cum_before < 0.999);
        ks += (ks.empty() ? "" : ",") + std::to_string(m.retained);
    }
    Outcome o;
    o.pass = worst_orth <= 1e-9 && worst_recon <= 1e-6 && k_ok;
    o.detail = fmt("10 matrices 200x30, orthonormality %.2e (tol 1e-9), reconstruction %.2e (tol 1e-6), "
                   "retained k {%s} %s",
                   worst_orth, worst_recon, ks.c_str(), k_ok ? "minimal for 0.999" : "WRONG");
    return o;
}

// 5. Index oracles -----------------------------------------------------------

Outcome index_oracles() {
    const auto& reg = IndexRegistry::builtin();
    const int side = 100;  // 10,000 pixels
    const GridSpec grid{side, side, 0.0, side * 10.0, 10.0};
    Rng rng(55);
    SeasonalComposite comp{CompositePeriod::survey(2021), {}};
    std::map<BandId, std::vector<double>> values;
    for (BandId b : kInputBands) {
        auto& v = values[b];
        v.resize(grid.size());
        for (double& x : v) {
            const double u = rng.uniform();
            x = u < 0.01 ? 0.0 : rng.uniform();
        }
        comp.bands.emplace(b, BandRaster(grid, v, kDefaultNodata));
    }
    auto pixel = [&](std::size_t i) {
        std::array<double, kInputBandCount> px;
        for (BandId b : kInputBands) px[band_slot(b)] = values[b][i];
        return px;
    };

    double worst = 0.0;
    bool nan_agree = true, bounded = true;
    std::size_t undefined = 0;
    std::vector<double> ndvi(grid.size());
    for (const auto& def : reg.vegetation()) {
        const auto raster = compute_index(def, comp);
        if (def.kind == IndexDefinition::Kind::NeighborhoodStddev) continue;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const auto px = pixel(i);
            const double want = interpret_formula(def.formula(), def.parameters, px);
            const double got = evaluate_index(def, px);
            const double from_raster = raster.values()[i];
            if (def.id == "ID1") ndvi[i] = want;
            if (!std::isfinite(want)) {
                ++undefined;
                nan_agree = nan_agree && !std::isfinite(got) && raster.is_nodata(from_raster);
                continue;
            }
            worst = std::max({worst, std::fabs(got - want), std::fabs(from_raster - want)});
            if (def.normalized) bounded = bounded && got >= -1.0 && got <= 1.0;
        }
    }
    // ID6: population deviation of interpreted NDVI over the 3x3 neighbourhood.
    const auto& id6 = reg.find("ID6");
    const auto sd = compute_index(id6, comp);
    const int r = id6.window_radius;
    for (int row = 0; row < side; ++row)
        for (int col = 0; col < side; ++col) {
            const double centre = ndvi[row * side + col];
            if (!std::isfinite(centre)) {
                nan_agree = nan_agree && !sd.valid(col, row);
                continue;
            }
            std::vector<double> w;
            for (int dr = -r; dr <= r; ++dr)
                for (int dc = -r; dc <= r; ++dc) {
                    const int rr = row + dr, cc = col + dc;
                    if (rr < 0 || rr >= side || cc < 0 || cc >= side) continue;
                    if (std::isfinite(ndvi[rr * side + cc])) w.push_back(ndvi[rr * side + cc]);
                }
            const double mean = std::accumulate(w.begin(), w.end(), 0.0) / w.size();
            double ss = 0.0;
            for (double v : w) ss += (v - mean) * (v - mean);
            worst = std::max(worst, std::fabs(sd.at(col, row) - std::sqrt(ss / w.size())));
        }
    Outcome o;
    o.pass = worst <= 1e-9 && nan_agree && bounded;
    o.detail = fmt("ID1-ID9 on 10000 pixels, max |diff| %.2e (tol 1e-9), %zu undefined values %s, "
                   "normalized indices %s",
                   worst, undefined, nan_agree ? "agree" : "DISAGREE", bounded ? "within [-1,1]" : "OUT OF RANGE");
    return o;
}

// 6. Determinism across thread counts --------------------------------------

int run_cli(const std::string& args) {
    const std::string cmd = std::string("\"") + TUSSOCK_CLI_PATH + "\" " + args + " > /dev/null 2>&1";
    return std::system(cmd.c_str());
}

std::map<std::string, std::string> read_tree(const fs::path& dir) {
    std::map<std::string, std::string> out;
    for (const auto& e : fs::recursive_directory_iterator(dir))
        if (e.is_regular_file()) out[fs::relative(e.path(), dir).string()] = read_file(e.path());
    return out;
}

Outcome determinism(const fs::path& work) {
    const auto dir = work / "determinism";
    fs::remove_all(dir);
    fs::create_directories(dir);
    Outcome o;
    if (run_cli("synth --preset mixed-realistic --width 64 --height 64 --n-plots 120 --seed 7 --out " +
                (dir / "scene").string()) != 0) {
        o.detail = "synth failed";
        return o;
    }
    const std::string inputs = "--scene " + (dir / "scene" / "scene.stck").string() + " --plots " +
                               (dir / "scene" / "plots.csv").string();
    std::vector<std::map<std::string, std::string>> outputs;
    const std::vector<int> threads = {1, 4, 0};
    for (int t : threads) {
        const auto out = dir / ("threads" + std::to_string(t));
        if (run_cli("compare " + inputs + " --all --seed 7 --threads " + std::to_string(t) + " --out " +
                    out.string()) != 0) {
            o.detail = "compare failed";
            return o;
        }
        outputs.push_back(read_tree(out));
    }
    bool same = true;
    for (std::size_t i = 1; i < outputs.size(); ++i) same = same && outputs[i] == outputs[0];
    std::size_t models = 0;
    for (const auto& [name, _] : outputs[0]) models += name.rfind("model_", 0) == 0;
    o.pass = same && models == 11 && outputs[0].count("comparison.json");
    o.detail = fmt("compare --all --seed 7 under --threads 1, 4, 0: %zu files (%zu model artifacts) %s",
                   outputs[0].size(), models, same ? "byte-identical" : "DIFFER");
    return o;
}

// 7. Directional reproduction ----------------------------------------------

Outcome directional() {
    const auto& survey_model = ModelRegistry::builtin().find("M19");
    const auto& seasonal_model = ModelRegistry::builtin().find("M76*");
    double sum_gap = 0.0, slowest = 0.0;
    std::string per_seed;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const auto t0 = Clock::now();
        SynthParams p;
        p.width = 256;
        p.height = 256;
        p.n_plots = 2000;
        p.cloud_fraction = 0.1;
        p.seed = seed;
        const auto s = generate_scene(builtin_profile("phenology-only"), p);
        FeatureExtractor fx(s.scene);
        ExperimentParams ep;
        ep.seed = seed;
        ep.n_trees = 300;
        const auto a = run_experiment(seasonal_model, fx, s.plots, ep);
        const auto b = run_experiment(survey_model, fx, s.plots, ep);
        const double elapsed = seconds_since(t0);
        slowest = std::max(slowest, elapsed);
        sum_gap += a.report.oa - b.report.oa;
        per_seed += fmt(" %.0f/%.0f", a.report.oa * 100, b.report.oa * 100);
    }
    const double mean_gap = sum_gap / 5.0 * 100.0;
    Outcome o;
    o.pass = mean_gap >= 10.0 && slowest < 60.0;
    o.detail = fmt("phenology-only, 5 seeds, M76*/M19 OA%%:%s, mean gap %.1f pp (need >= 10), slowest seed %.1f s "
                   "(limit 60 s)",
                   per_seed.c_str(), mean_gap, slowest);
    return o;
}

// 8. Degenerate sanity -------------------------------------------------------

Outcome degenerate() {
    double worst_oa = 0.0, worst_ok = 0.0;
    std::string worst_oa_at, worst_ok_at;
    std::size_t failing = 0, runs = 0;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        SynthParams p;
        p.width = 256;
        p.height = 256;
        p.n_plots = 2600;
        p.seed = seed;
        const auto s = generate_scene(builtin_profile("degenerate"), p);
        FeatureExtractor fx(s.scene);
        ExperimentParams ep;
        ep.seed = seed;
        for (const auto& m : ModelRegistry::builtin().models()) {
            const auto r = run_experiment(m, fx, s.plots, ep);
            const auto& cm = r.report.confusion;
            std::uint64_t majority = 0;
            for (std::size_t i = 0; i < cm.size(); ++i) majority = std::max(majority, cm.row_total(i));
            const double rate = static_cast<double>(majority) / static_cast<double>(cm.total());
            const double d_oa = std::fabs(r.report.oa - rate);
            const double d_ok = std::fabs(r.report.kappa);
            ++runs;
            if (d_oa > 0.05 || d_ok > 0.1) ++failing;
            if (d_oa > worst_oa) {
                worst_oa = d_oa;
                worst_oa_at = fmt("%s seed %llu", m.id.c_str(), static_cast<unsigned long long>(seed));
            }
            if (d_ok > worst_ok) {
                worst_ok = d_ok;
                worst_ok_at = fmt("%s seed %llu", m.id.c_str(), static_cast<unsigned long long>(seed));
            }
        }
    }
    Outcome o;
    o.pass = failing == 0;
    o.detail = fmt("%zu model runs (11 models x 5 seeds), %zu outside bounds; worst |OA - majority| %.1f pp (%s, "
                   "limit 5), worst |OK| %.3f (%s, limit 0.1)",
                   runs, failing, worst_oa * 100, worst_oa_at.c_str(), worst_ok, worst_ok_at.c_str());
    return o;
}

// 9. Split protocol ----------------------------------------------------------

Outcome split_protocol() {
    bool ok = true;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto s = split_train_validation(6879, 0.8, seed);
        std::vector<std::size_t> all = s.train;
        all.insert(all.end(), s.validation.begin(), s.validation.end());
        std::sort(all.begin(), all.end());
        std::vector<std::size_t> expect(6879);
        std::iota(expect.begin(), expect.end(), 0);
        ok = ok && s.train.size() == 5503 && s.validation.size() == 1376 && all == expect;
    }
    Outcome o;
    o.pass = ok;
    o.detail = ok ? "6879 plots -> 5503 train / 1376 validation, disjoint and complete (10 seeds)"
                  : "split sizes or partition WRONG";
    return o;
}

}  // namespace

int main(int argc, char** argv) {
    const fs::path work = argc > 1 ? fs::path(argv[1]) : fs::path("acceptance_work");
    fs::create_directories(work);
    set_log_verbosity(0);

    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"1 registry fidelity", registry_fidelity},
        {"2 metric oracle", metric_oracle},
        {"3 GLCM oracle", glcm_oracle},
        {"4 PCA properties", pca_properties},
        {"5 index oracles", index_oracles},
        {"6 determinism", [&] { return determinism(work); }},
        {"7 directional reproduction", directional},
        {"8 degenerate sanity", degenerate},
        {"9 split protocol", split_protocol},
    };
    int failed = 0;
    for (const auto& [name, check] : criteria) {
        Outcome o;
        try {
            o = check();
        } catch (const std::exception& e) {
            o.detail = std::string("error: ") + e.what();
        }
        failed += !o.pass;
        std::printf("%s  %-28s %s\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
