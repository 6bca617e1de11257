#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <set>

#include "tussock/errors.hpp"
#include "tussock/forest.hpp"
#include "tussock/rng.hpp"

using namespace tussock;

namespace {

struct Blobs {
    std::vector<double> x;
    std::vector<int> y;
    std::size_t n = 0;
    std::size_t d = 3;
};

// Three classes separated along the first feature; the others are noise.
Blobs blobs(std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    Blobs b;
    b.n = n;
    for (std::size_t i = 0; i < n; ++i) {
        const int label = static_cast<int>(i % 3);
        b.y.push_back(label);
        b.x.push_back(label * 4.0 + rng.normal() * 0.3);
        b.x.push_back(rng.normal());
        b.x.push_back(rng.normal());
    }
    return b;
}

}  // namespace

TEST_CASE("forest learns separated classes") {
    const auto train = blobs(150, 1);
    const auto test = blobs(60, 2);
    ForestParams p;
    p.n_trees = 50;
    p.seed = 5;
    const auto m = train_forest(train.x, train.n, train.d, train.y, 3, p);
    CHECK(m.trees.size() == 50);
    CHECK(m.max_features == 2);
    int correct = 0;
    for (std::size_t i = 0; i < test.n; ++i) {
        const std::span<const double> row(test.x.data() + i * 3, 3);
        const auto proba = predict_proba(m, row);
        CHECK(std::accumulate(proba.begin(), proba.end(), 0.0) == doctest::Approx(1.0));
        correct += predict_class(m, row) == test.y[i];
    }
    CHECK(correct >= 58);
}

TEST_CASE("forest does not depend on the thread count") {
    const auto data = blobs(90, 3);
    ForestParams p;
    p.n_trees = 20;
    p.seed = 9;
    p.threads = 1;
    const auto a = train_forest(data.x, data.n, data.d, data.y, 3, p);
    p.threads = 4;
    const auto b = train_forest(data.x, data.n, data.d, data.y, 3, p);
    CHECK(a.trees == b.trees);
    p.seed = 10;
    const auto c = train_forest(data.x, data.n, data.d, data.y, 3, p);
    CHECK_FALSE(a.trees == c.trees);
}

TEST_CASE("single-label training gives a constant predictor") {
    const std::vector<double> x = {0, 1, 2, 3};
    const std::vector<int> y = {3, 3, 3, 3};
    ForestParams p;
    p.n_trees = 5;
    const auto m = train_forest(x, 4, 1, y, 4, p);
    const double probe[] = {10.0};
    CHECK(predict_class(m, probe) == 3);
}

TEST_CASE("forest argument checks") {
    const std::vector<double> x = {0, 1};
    CHECK_THROWS_AS(train_forest(x, 2, 1, std::vector<int>{0}, 2, {}), Error);
    CHECK_THROWS_AS(train_forest(x, 2, 1, std::vector<int>{0, 2}, 2, {}), Error);
    ForestParams none;
    none.n_trees = 0;
    CHECK_THROWS_AS(train_forest(x, 2, 1, std::vector<int>{0, 1}, 2, none), Error);
}

TEST_CASE("train/validation split") {
    const auto s = split_train_validation(6879, 0.8, 1);
    CHECK(s.train.size() == 5503);
    CHECK(s.validation.size() == 1376);
    std::set<std::size_t> all(s.train.begin(), s.train.end());
    all.insert(s.validation.begin(), s.validation.end());
    CHECK(all.size() == 6879);
    CHECK(std::is_sorted(s.train.begin(), s.train.end()));

    CHECK(split_train_validation(100, 0.8, 1).train == split_train_validation(100, 0.8, 1).train);
    CHECK_FALSE(split_train_validation(100, 0.8, 1).train == split_train_validation(100, 0.8, 2).train);
    CHECK_THROWS_AS(split_train_validation(10, 1.0, 1), Error);
}

TEST_CASE("a single stump votes its leaf majority") {
    // Root splits on f0 <= 0.5; left leaf {None 3, Low 1}, right leaf {Low 1, High 4}.
    std::vector<TreeNode> nodes(3);
    nodes[0] = {0, 0.5, 1, 2};
    nodes[1] = {-1, 0.0, 0, -1};
    nodes[2] = {-1, 0.0, 1, -1};
    ForestModel m;
    m.n_classes = 4;
    m.n_features = 1;
    m.trees.emplace_back(4, nodes, std::vector<std::uint32_t>{3, 1, 0, 0, 0, 1, 0, 4});
    const double low[] = {0.2};
    const double high[] = {0.9};
    CHECK(predict_class(m, low) == 0);
    CHECK(predict_class(m, high) == 3);
    CHECK(predict_proba(m, low)[0] == doctest::Approx(0.75));
    CHECK(predict_proba(m, high)[1] == doctest::Approx(0.2));
}

TEST_CASE("two clusters are learned perfectly") {
    std::vector<double> x;
    std::vector<int> y;
    for (int i = 0; i < 100; ++i) {
        x.push_back(i < 50 ? 0.0 : 1.0);
        y.push_back(i < 50 ? 0 : 1);
    }
    ForestParams p;
    p.seed = 11;
    p.n_trees = 300;
    const auto m = train_forest(x, 100, 1, y, 2, p);
    for (int i = 0; i < 100; ++i) CHECK(predict_class(m, std::span<const double>(&x[i], 1)) == y[i]);
    Rng rng(4);
    for (int i = 0; i < 50; ++i) {
        const double a = rng.uniform() * 0.4;
        const double b = 0.6 + rng.uniform() * 0.4;
        CHECK(predict_class(m, std::span<const double>(&a, 1)) == 0);
        CHECK(predict_class(m, std::span<const double>(&b, 1)) == 1);
    }
}

TEST_CASE("duplicated noiseless rows are fitted exactly") {
    const auto base = blobs(40, 6);
    Blobs twice = base;
    twice.x.insert(twice.x.end(), base.x.begin(), base.x.end());
    twice.y.insert(twice.y.end(), base.y.begin(), base.y.end());
    twice.n = 2 * base.n;
    ForestParams p;
    p.n_trees = 100;
    p.seed = 2;
    const auto m = train_forest(twice.x, twice.n, twice.d, twice.y, 3, p);
    for (std::size_t i = 0; i < twice.n; ++i)
        CHECK(predict_class(m, std::span<const double>(twice.x.data() + i * 3, 3)) == twice.y[i]);
}

TEST_CASE("forest prediction matches per-tree vote counting") {
    // Four overlapping classes so that the trees disagree.
    Rng rng(12);
    const std::size_t n = 200, d = 4;
    std::vector<double> x;
    std::vector<int> y;
    for (std::size_t i = 0; i < n; ++i) {
        const int label = static_cast<int>(rng.below(4));
        y.push_back(label);
        for (std::size_t j = 0; j < d; ++j) x.push_back(label * 0.5 * (j == 0) + rng.normal());
    }
    ForestParams p;
    p.n_trees = 60;
    p.seed = 13;
    const auto m = train_forest(x, n, d, y, 4, p);

    int split_votes = 0;
    for (int r = 0; r < 1000; ++r) {
        std::vector<double> row(d);
        for (double& v : row) v = rng.normal() * 2.0;
        const auto proba = predict_proba(m, row);
        CHECK(std::accumulate(proba.begin(), proba.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-9));
        if (r >= 100) continue;
        std::vector<int> votes(4, 0);
        for (const auto& t : m.trees) ++votes[static_cast<std::size_t>(t.predict(row))];
        const int majority = static_cast<int>(std::max_element(votes.begin(), votes.end()) - votes.begin());
        CHECK(predict_class(m, row) == majority);
        split_votes += *std::max_element(votes.begin(), votes.end()) < p.n_trees;
    }
    CHECK(split_votes > 50);
}

TEST_CASE("small split sizes") {
    const auto s = split_train_validation(10, 0.8, 3);
    CHECK(s.train.size() == 8);
    CHECK(s.validation.size() == 2);
}
