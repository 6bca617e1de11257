#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "tussock/feature_matrix.hpp"

namespace tussock {

struct ForestParams {
    int n_trees = 300;
    std::uint64_t seed = 0;
    int max_features = 0;      // 0: ceil(sqrt(d))
    int min_samples_leaf = 1;  // unique samples per leaf
    int max_depth = 0;         // 0: unlimited
    int threads = 0;           // 0: hardware concurrency

    bool operator==(const ForestParams&) const = default;
};

// Internal nodes send rows with x[feature] <= threshold left. Leaves have
// feature == -1 and `left` indexing their class-count block.
struct TreeNode {
    std::int32_t feature = -1;
    double threshold = 0.0;
    std::int32_t left = -1;
    std::int32_t right = -1;

    bool is_leaf() const noexcept { return feature < 0; }
    bool operator==(const TreeNode&) const = default;
};

class DecisionTree {
public:
    DecisionTree() = default;
    DecisionTree(int n_classes, std::vector<TreeNode> nodes, std::vector<std::uint32_t> leaf_counts);

    int n_classes() const noexcept { return n_classes_; }
    const std::vector<TreeNode>& nodes() const noexcept { return nodes_; }
    const std::vector<std::uint32_t>& leaf_counts() const noexcept { return leaf_counts_; }
    std::size_t leaf_count() const noexcept { return leaf_counts_.size() / static_cast<std::size_t>(n_classes_); }

    // Class counts of the leaf reached by the row.
    std::span<const std::uint32_t> leaf_for(std::span<const double> row) const noexcept;
    // Majority class of that leaf, ties to the lower class index.
    int predict(std::span<const double> row) const noexcept;

    bool operator==(const DecisionTree&) const = default;

private:
    int n_classes_ = 0;
    std::vector<TreeNode> nodes_;
    std::vector<std::uint32_t> leaf_counts_;
};

// Bootstrapped CART ensemble with Gini splits. Tree t draws from its own
// stream derive_seed(seed, t), so results do not depend on the thread count.
struct ForestModel {
    std::vector<DecisionTree> trees;
    int n_classes = 0;
    std::size_t n_features = 0;
    int max_features = 0;
    ForestParams params;

    bool operator==(const ForestModel&) const = default;
};

// x is row-major n x d; labels are class indices in [0, n_classes).
ForestModel train_forest(std::span<const double> x, std::size_t n, std::size_t d,
                         std::span<const int> labels, int n_classes, const ForestParams& params);
ForestModel train_forest(const FeatureMatrix& x, const ForestParams& params);

// Mean over trees of the normalized leaf class counts; sums to 1.
std::vector<double> predict_proba(const ForestModel& m, std::span<const double> row);
// argmax of predict_proba, ties to the lower class index.
int predict_class(const ForestModel& m, std::span<const double> row);

struct TrainValidationSplit {
    std::vector<std::size_t> train;
    std::vector<std::size_t> validation;
};

// Random partition of [0, n): floor(n * fraction) training indices and the
// remainder for validation, both ascending. Deterministic per seed.
TrainValidationSplit split_train_validation(std::size_t n, double fraction, std::uint64_t seed);

}  // namespace tussock
