#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace tussock {

// Rows are the true class, columns the predicted class.
class ConfusionMatrix {
public:
    ConfusionMatrix() = default;
    ConfusionMatrix(std::vector<std::string> classes, std::vector<std::uint64_t> counts);
    explicit ConfusionMatrix(std::vector<std::string> classes);

    const std::vector<std::string>& classes() const noexcept { return classes_; }
    std::size_t size() const noexcept { return classes_.size(); }
    std::uint64_t count(std::size_t truth, std::size_t predicted) const noexcept {
        return counts_[truth * size() + predicted];
    }
    const std::vector<std::uint64_t>& counts() const noexcept { return counts_; }
    std::uint64_t total() const noexcept;
    std::uint64_t row_total(std::size_t i) const noexcept;
    std::uint64_t col_total(std::size_t j) const noexcept;
    std::size_t class_index(std::string_view name) const;

    void add(std::size_t truth, std::size_t predicted) noexcept { ++counts_[truth * size() + predicted]; }

    bool operator==(const ConfusionMatrix&) const = default;

private:
    std::vector<std::string> classes_;
    std::vector<std::uint64_t> counts_;
};

ConfusionMatrix confusion(std::span<const std::string> y_true, std::span<const std::string> y_pred,
                          std::vector<std::string> classes);
ConfusionMatrix confusion(std::span<const int> y_true, std::span<const int> y_pred,
                          std::vector<std::string> classes);

// OA = trace / total.
double overall_accuracy(const ConfusionMatrix& cm);
// EA = sum_i row_i * col_i / total^2 (chance agreement from the marginals).
double expected_accuracy(const ConfusionMatrix& cm);
// Cohen's kappa (OA - EA) / (1 - EA); when EA = 1 it is 1 if OA = 1, else 0.
double kappa(const ConfusionMatrix& cm);

struct ClassMetrics {
    std::string name;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    std::uint64_t support = 0;    // true count
    std::uint64_t predicted = 0;  // predicted count
    bool zero_division = false;   // a denominator was zero and the metric set to 0
};

// One-vs-rest precision, recall and F1 (2TP / (2TP + FP + FN)).
ClassMetrics per_class_prf(const ConfusionMatrix& cm, std::string_view class_name);
ClassMetrics per_class_prf(const ConfusionMatrix& cm, std::size_t class_index);

}  // namespace tussock
