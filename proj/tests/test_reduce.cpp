#include <doctest.h>

#include <cmath>
#include <numeric>

#include "tussock/errors.hpp"
#include "tussock/reduce.hpp"
#include "tussock/rng.hpp"

using namespace tussock;

namespace {

FeatureMatrix matrix(std::size_t cols, const std::vector<std::vector<double>>& rows) {
    std::vector<std::string> names;
    for (std::size_t c = 0; c < cols; ++c) names.push_back("f" + std::to_string(c));
    FeatureMatrix m(names);
    for (std::size_t r = 0; r < rows.size(); ++r)
        m.add_row("P" + std::to_string(r), CoverClass::None, 2021, rows[r]);
    return m;
}

FeatureMatrix random_matrix(std::size_t n, std::size_t d, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<std::vector<double>> rows(n, std::vector<double>(d));
    for (auto& row : rows) {
        const double shared = rng.normal();
        for (std::size_t c = 0; c < d; ++c) row[c] = rng.normal() * (1.0 + c) + shared * 0.5 * c;
    }
    return matrix(d, rows);
}

}  // namespace

TEST_CASE("standardizer uses population deviation") {
    const auto m = matrix(2, {{1, 5}, {2, 5}, {3, 5}});
    const auto s = fit_standardizer(m);
    CHECK(s.mean[0] == 2.0);
    CHECK(s.scale[0] == doctest::Approx(std::sqrt(2.0 / 3.0)));
    CHECK(s.scale[1] == 1.0);
    const auto z = apply_standardizer(s, m);
    CHECK(z.at(0, 0) == doctest::Approx(-1.2247).epsilon(1e-4));
    CHECK(z.at(1, 0) == 0.0);
    CHECK(z.at(2, 0) == doctest::Approx(1.2247).epsilon(1e-4));
    for (std::size_t r = 0; r < 3; ++r) CHECK(z.at(r, 1) == 0.0);
}

TEST_CASE("standardizer checks columns") {
    const auto s = fit_standardizer(matrix(2, {{1, 2}, {3, 4}}));
    CHECK_THROWS_AS(apply_standardizer(s, matrix(3, {{1, 2, 3}})), Error);
    CHECK_THROWS_AS(fit_standardizer(matrix(2, {})), Error);
}

TEST_CASE("pca on correlated data") {
    const auto x = random_matrix(200, 8, 3);
    const auto p = fit_pca(x, 0.95);
    const auto& w = p.components;
    const Eigen::MatrixXd gram = w * w.transpose();
    CHECK((gram - Eigen::MatrixXd::Identity(8, 8)).cwiseAbs().maxCoeff() < 1e-9);

    for (std::size_t k = 1; k < p.eigenvalues.size(); ++k) CHECK(p.eigenvalues[k - 1] >= p.eigenvalues[k]);
    CHECK(std::accumulate(p.ratios.begin(), p.ratios.end(), 0.0) == doctest::Approx(1.0));

    const double upto = std::accumulate(p.ratios.begin(), p.ratios.begin() + p.retained, 0.0);
    const double before = std::accumulate(p.ratios.begin(), p.ratios.begin() + p.retained - 1, 0.0);
    CHECK(upto >= 0.95);
    CHECK(before < 0.95);

    const auto row = x.row(17);
    const auto scores = pca_project(p, row, 8);
    const auto back = pca_inverse(p, scores);
    for (std::size_t c = 0; c < 8; ++c) CHECK(back[c] == doctest::Approx(row[c]).epsilon(1e-9));

    const auto t = pca_transform(p, x);
    CHECK(t.cols() == p.retained);
    CHECK(t.columns().front() == "PC1");
    CHECK(t.plot_ids() == x.plot_ids());
}

TEST_CASE("pca sign convention and determinism") {
    const auto x = random_matrix(50, 5, 11);
    const auto a = fit_pca(x);
    const auto b = fit_pca(x);
    CHECK(a == b);
    for (Eigen::Index r = 0; r < a.components.rows(); ++r) {
        Eigen::Index at = 0;
        a.components.row(r).cwiseAbs().maxCoeff(&at);
        CHECK(a.components(r, at) > 0.0);
    }
}

TEST_CASE("pca of a rank-one matrix keeps one component") {
    std::vector<std::vector<double>> rows;
    for (int i = 0; i < 10; ++i) rows.push_back({double(i), 2.0 * i, -1.0 * i});
    const auto p = fit_pca(matrix(3, rows));
    CHECK(p.retained == 1);
    CHECK(p.ratios[0] == doctest::Approx(1.0));
}
