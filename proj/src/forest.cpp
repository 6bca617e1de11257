#include "tussock/forest.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "tussock/errors.hpp"
#include "tussock/parallel.hpp"
#include "tussock/rng.hpp"

namespace tussock {

namespace {

constexpr std::uint64_t kSplitStream = 0x5350'4C49'5400ULL;

struct SplitCandidate {
    bool valid = false;
    double score = 0.0;  // sum of squared child class weights over child weight
    int feature = -1;
    double threshold = 0.0;
};

class TreeBuilder {
public:
    TreeBuilder(std::span<const double> columns, std::size_t n, std::size_t d, std::span<const int> labels,
                int n_classes, const ForestParams& params, int max_features, std::uint64_t seed)
        : cols_(columns), n_(n), d_(d), labels_(labels), k_(n_classes), params_(params),
          mtry_(max_features), rng_(seed), features_(d) {
        std::iota(features_.begin(), features_.end(), 0);
    }

    DecisionTree build() {
        std::vector<std::uint32_t> weight(n_, 0);
        for (std::size_t i = 0; i < n_; ++i) ++weight[rng_.below(n_)];
        weight_ = std::move(weight);
        for (std::size_t i = 0; i < n_; ++i)
            if (weight_[i] > 0) samples_.push_back(static_cast<int>(i));

        struct Task {
            std::int32_t node;
            std::size_t begin, end;
            int depth;
        };
        std::vector<Task> stack{{0, 0, samples_.size(), 0}};
        nodes_.emplace_back();
        std::vector<double> counts(static_cast<std::size_t>(k_));
        while (!stack.empty()) {
            const Task t = stack.back();
            stack.pop_back();
            class_weights(t.begin, t.end, counts);
            const std::size_t unique = t.end - t.begin;
            const bool pure = std::count_if(counts.begin(), counts.end(), [](double c) { return c > 0; }) <= 1;
            const bool depth_capped = params_.max_depth > 0 && t.depth >= params_.max_depth;
            SplitCandidate split;
            if (!pure && !depth_capped && unique >= 2 * static_cast<std::size_t>(params_.min_samples_leaf))
                split = find_split(t.begin, t.end, counts);
            if (!split.valid) {
                make_leaf(t.node, counts);
                continue;
            }
            const auto mid = std::partition(
                samples_.begin() + static_cast<std::ptrdiff_t>(t.begin),
                samples_.begin() + static_cast<std::ptrdiff_t>(t.end), [&](int s) {
                    return value(split.feature, s) <= split.threshold;
                });
            const auto split_at = static_cast<std::size_t>(mid - samples_.begin());
            const auto left = static_cast<std::int32_t>(nodes_.size());
            nodes_.emplace_back();
            const auto right = static_cast<std::int32_t>(nodes_.size());
            nodes_.emplace_back();
            nodes_[static_cast<std::size_t>(t.node)] = {split.feature, split.threshold, left, right};
            stack.push_back({right, split_at, t.end, t.depth + 1});
            stack.push_back({left, t.begin, split_at, t.depth + 1});
        }
        return DecisionTree(k_, std::move(nodes_), std::move(leaf_counts_));
    }

private:
    double value(int feature, int sample) const noexcept {
        return cols_[static_cast<std::size_t>(feature) * n_ + static_cast<std::size_t>(sample)];
    }

    void class_weights(std::size_t begin, std::size_t end, std::vector<double>& counts) const {
        std::fill(counts.begin(), counts.end(), 0.0);
        for (std::size_t i = begin; i < end; ++i) {
            const int s = samples_[i];
            counts[static_cast<std::size_t>(labels_[static_cast<std::size_t>(s)])] += weight_[static_cast<std::size_t>(s)];
        }
    }

    void make_leaf(std::int32_t node, const std::vector<double>& counts) {
        const auto leaf = static_cast<std::int32_t>(leaf_counts_.size() / static_cast<std::size_t>(k_));
        for (double c : counts) leaf_counts_.push_back(static_cast<std::uint32_t>(c));
        nodes_[static_cast<std::size_t>(node)] = {-1, 0.0, leaf, -1};
    }

    SplitCandidate best_for_feature(int f, std::size_t begin, std::size_t end,
                                    const std::vector<double>& total) {
        sorted_.clear();
        for (std::size_t i = begin; i < end; ++i) sorted_.emplace_back(value(f, samples_[i]), samples_[i]);
        std::sort(sorted_.begin(), sorted_.end());
        SplitCandidate best;
        if (sorted_.front().first == sorted_.back().first) return best;

        left_.assign(static_cast<std::size_t>(k_), 0.0);
        double w_left = 0.0;
        double w_total = 0.0;
        for (double c : total) w_total += c;
        const std::size_t m = sorted_.size();
        const auto min_leaf = static_cast<std::size_t>(params_.min_samples_leaf);
        for (std::size_t i = 0; i + 1 < m; ++i) {
            const auto s = static_cast<std::size_t>(sorted_[i].second);
            const double w = weight_[s];
            left_[static_cast<std::size_t>(labels_[s])] += w;
            w_left += w;
            if (sorted_[i].first == sorted_[i + 1].first) continue;
            if (i + 1 < min_leaf || m - i - 1 < min_leaf) continue;
            const double w_right = w_total - w_left;
            double sl = 0.0, sr = 0.0;
            for (std::size_t c = 0; c < left_.size(); ++c) {
                const double r = total[c] - left_[c];
                sl += left_[c] * left_[c];
                sr += r * r;
            }
            const double score = sl / w_left + sr / w_right;
            if (!best.valid || score > best.score) {
                const double a = sorted_[i].first, b = sorted_[i + 1].first;
                double t = (a + b) / 2.0;
                if (t >= b) t = a;
                best = {true, score, f, t};
            }
        }
        return best;
    }

    SplitCandidate find_split(std::size_t begin, std::size_t end, const std::vector<double>& total) {
        // Draw features without replacement; beyond mtry, keep drawing only
        // while every drawn feature has been constant in this node.
        SplitCandidate best;
        std::vector<SplitCandidate> found;
        for (std::size_t i = 0; i < d_; ++i) {
            if (i >= static_cast<std::size_t>(mtry_) && !found.empty()) break;
            const std::size_t j = i + rng_.below(d_ - i);
            std::swap(features_[i], features_[j]);
            auto c = best_for_feature(features_[i], begin, end, total);
            if (c.valid) found.push_back(c);
        }
        std::sort(found.begin(), found.end(),
                  [](const SplitCandidate& a, const SplitCandidate& b) { return a.feature < b.feature; });
        for (const auto& c : found)
            if (!best.valid || c.score > best.score) best = c;
        return best;
    }

    std::span<const double> cols_;
    std::size_t n_, d_;
    std::span<const int> labels_;
    int k_;
    const ForestParams& params_;
    int mtry_;
    Rng rng_;
    std::vector<int> features_;
    std::vector<std::uint32_t> weight_;
    std::vector<int> samples_;
    std::vector<std::pair<double, int>> sorted_;
    std::vector<double> left_;
    std::vector<TreeNode> nodes_;
    std::vector<std::uint32_t> leaf_counts_;
};

}  // namespace

DecisionTree::DecisionTree(int n_classes, std::vector<TreeNode> nodes, std::vector<std::uint32_t> leaf_counts)
    : n_classes_(n_classes), nodes_(std::move(nodes)), leaf_counts_(std::move(leaf_counts)) {
    if (n_classes_ < 1 || nodes_.empty())
        raise(ErrorCode::InvalidArgument, "a tree needs at least one node and one class");
    const std::size_t leaves = leaf_counts_.size() / static_cast<std::size_t>(n_classes_);
    if (leaf_counts_.size() % static_cast<std::size_t>(n_classes_) != 0)
        raise(ErrorCode::InvalidArgument, "leaf count table is not a multiple of the class count");
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        const TreeNode& node = nodes_[i];
        if (node.is_leaf()) {
            if (node.left < 0 || static_cast<std::size_t>(node.left) >= leaves)
                raise(ErrorCode::InvalidArgument, "leaf node references a missing count block");
        } else if (node.left <= static_cast<std::int32_t>(i) || node.right <= static_cast<std::int32_t>(i) ||
                   static_cast<std::size_t>(node.left) >= nodes_.size() ||
                   static_cast<std::size_t>(node.right) >= nodes_.size()) {
            // Children always follow their parent, which also rules out cycles.
            raise(ErrorCode::InvalidArgument, "internal node has invalid children");
        }
    }
}

std::span<const std::uint32_t> DecisionTree::leaf_for(std::span<const double> row) const noexcept {
    std::size_t i = 0;
    while (!nodes_[i].is_leaf()) {
        const TreeNode& node = nodes_[i];
        i = static_cast<std::size_t>(row[static_cast<std::size_t>(node.feature)] <= node.threshold ? node.left
                                                                                                   : node.right);
    }
    const auto k = static_cast<std::size_t>(n_classes_);
    return {leaf_counts_.data() + static_cast<std::size_t>(nodes_[i].left) * k, k};
}

int DecisionTree::predict(std::span<const double> row) const noexcept {
    const auto counts = leaf_for(row);
    return static_cast<int>(std::max_element(counts.begin(), counts.end()) - counts.begin());
}

ForestModel train_forest(std::span<const double> x, std::size_t n, std::size_t d,
                         std::span<const int> labels, int n_classes, const ForestParams& params) {
    if (n == 0 || d == 0) raise(ErrorCode::EmptyInput, "cannot train a forest on an empty matrix");
    if (x.size() != n * d || labels.size() != n)
        raise(ErrorCode::DimensionMismatch, "feature matrix and label vector sizes disagree");
    if (params.n_trees < 1) raise(ErrorCode::InvalidArgument, "forest needs at least one tree");
    if (params.min_samples_leaf < 1) raise(ErrorCode::InvalidArgument, "min_samples_leaf must be >= 1");
    for (int y : labels)
        if (y < 0 || y >= n_classes) raise(ErrorCode::InvalidArgument, "label outside class range");

    std::vector<double> columns(n * d);
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < d; ++c) columns[c * n + r] = x[r * d + c];

    ForestModel m;
    m.n_classes = n_classes;
    m.n_features = d;
    m.params = params;
    m.max_features = params.max_features > 0
                         ? std::min(params.max_features, static_cast<int>(d))
                         : static_cast<int>(std::ceil(std::sqrt(static_cast<double>(d))));
    m.trees.resize(static_cast<std::size_t>(params.n_trees));
    parallel_for(m.trees.size(), params.threads, [&](std::size_t t) {
        TreeBuilder builder(columns, n, d, labels, n_classes, params, m.max_features,
                            derive_seed(params.seed, t));
        m.trees[t] = builder.build();
    });
    return m;
}

ForestModel train_forest(const FeatureMatrix& x, const ForestParams& params) {
    std::vector<int> labels;
    labels.reserve(x.rows());
    for (CoverClass c : x.labels()) labels.push_back(static_cast<int>(c));
    return train_forest(x.data(), x.rows(), x.cols(), labels, static_cast<int>(kCoverClasses.size()), params);
}

std::vector<double> predict_proba(const ForestModel& m, std::span<const double> row) {
    if (row.size() != m.n_features)
        raise(ErrorCode::DimensionMismatch, "row has " + std::to_string(row.size()) +
                                                " features, forest expects " + std::to_string(m.n_features));
    std::vector<double> proba(static_cast<std::size_t>(m.n_classes), 0.0);
    for (const auto& tree : m.trees) {
        const auto counts = tree.leaf_for(row);
        double total = 0.0;
        for (auto c : counts) total += c;
        for (std::size_t k = 0; k < counts.size(); ++k) proba[k] += counts[k] / total;
    }
    for (double& p : proba) p /= static_cast<double>(m.trees.size());
    return proba;
}

int predict_class(const ForestModel& m, std::span<const double> row) {
    const auto proba = predict_proba(m, row);
    return static_cast<int>(std::max_element(proba.begin(), proba.end()) - proba.begin());
}

TrainValidationSplit split_train_validation(std::size_t n, double fraction, std::uint64_t seed) {
    if (!(fraction > 0.0 && fraction < 1.0))
        raise(ErrorCode::InvalidArgument, "split fraction must lie in (0, 1)");
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    Rng rng(derive_seed(seed, kSplitStream));
    for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
    const auto n_train = static_cast<std::size_t>(std::floor(static_cast<double>(n) * fraction + 1e-9));
    TrainValidationSplit s;
    s.train.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
    s.validation.assign(order.begin() + static_cast<std::ptrdiff_t>(n_train), order.end());
    std::sort(s.train.begin(), s.train.end());
    std::sort(s.validation.begin(), s.validation.end());
    return s;
}

}  // namespace tussock
