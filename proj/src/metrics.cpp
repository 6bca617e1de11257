#include "tussock/metrics.hpp"

#include <algorithm>

#include "tussock/errors.hpp"

namespace tussock {

ConfusionMatrix::ConfusionMatrix(std::vector<std::string> classes, std::vector<std::uint64_t> counts)
    : classes_(std::move(classes)), counts_(std::move(counts)) {
    if (classes_.empty()) raise(ErrorCode::EmptyInput, "confusion matrix needs at least one class");
    if (counts_.size() != classes_.size() * classes_.size())
        raise(ErrorCode::DimensionMismatch, "confusion counts must be K x K");
}

ConfusionMatrix::ConfusionMatrix(std::vector<std::string> classes)
    : ConfusionMatrix(classes, std::vector<std::uint64_t>(classes.size() * classes.size(), 0)) {}

std::uint64_t ConfusionMatrix::total() const noexcept {
    std::uint64_t t = 0;
    for (auto c : counts_) t += c;
    return t;
}

std::uint64_t ConfusionMatrix::row_total(std::size_t i) const noexcept {
    std::uint64_t t = 0;
    for (std::size_t j = 0; j < size(); ++j) t += count(i, j);
    return t;
}

std::uint64_t ConfusionMatrix::col_total(std::size_t j) const noexcept {
    std::uint64_t t = 0;
    for (std::size_t i = 0; i < size(); ++i) t += count(i, j);
    return t;
}

std::size_t ConfusionMatrix::class_index(std::string_view name) const {
    auto it = std::find(classes_.begin(), classes_.end(), name);
    if (it == classes_.end()) raise(ErrorCode::InvalidArgument, "unknown class '" + std::string(name) + "'");
    return static_cast<std::size_t>(it - classes_.begin());
}

ConfusionMatrix confusion(std::span<const std::string> y_true, std::span<const std::string> y_pred,
                          std::vector<std::string> classes) {
    if (y_true.size() != y_pred.size())
        raise(ErrorCode::DimensionMismatch, "truth and prediction lengths differ");
    ConfusionMatrix cm(std::move(classes));
    for (std::size_t i = 0; i < y_true.size(); ++i) cm.add(cm.class_index(y_true[i]), cm.class_index(y_pred[i]));
    return cm;
}

ConfusionMatrix confusion(std::span<const int> y_true, std::span<const int> y_pred,
                          std::vector<std::string> classes) {
    if (y_true.size() != y_pred.size())
        raise(ErrorCode::DimensionMismatch, "truth and prediction lengths differ");
    ConfusionMatrix cm(std::move(classes));
    const auto k = static_cast<int>(cm.size());
    for (std::size_t i = 0; i < y_true.size(); ++i) {
        if (y_true[i] < 0 || y_true[i] >= k || y_pred[i] < 0 || y_pred[i] >= k)
            raise(ErrorCode::InvalidArgument, "label index outside the class list");
        cm.add(static_cast<std::size_t>(y_true[i]), static_cast<std::size_t>(y_pred[i]));
    }
    return cm;
}

namespace {

double checked_total(const ConfusionMatrix& cm) {
    const auto t = cm.total();
    if (t == 0) raise(ErrorCode::EmptyInput, "confusion matrix is empty");
    return static_cast<double>(t);
}

}  // namespace

double overall_accuracy(const ConfusionMatrix& cm) {
    const double total = checked_total(cm);
    std::uint64_t trace = 0;
    for (std::size_t i = 0; i < cm.size(); ++i) trace += cm.count(i, i);
    return static_cast<double>(trace) / total;
}

double expected_accuracy(const ConfusionMatrix& cm) {
    const double total = checked_total(cm);
    double sum = 0.0;
    for (std::size_t i = 0; i < cm.size(); ++i)
        sum += static_cast<double>(cm.row_total(i)) * static_cast<double>(cm.col_total(i));
    return sum / (total * total);
}

double kappa(const ConfusionMatrix& cm) {
    const double oa = overall_accuracy(cm);
    const double ea = expected_accuracy(cm);
    if (ea == 1.0) return oa == 1.0 ? 1.0 : 0.0;
    return (oa - ea) / (1.0 - ea);
}

ClassMetrics per_class_prf(const ConfusionMatrix& cm, std::size_t i) {
    if (i >= cm.size()) raise(ErrorCode::InvalidArgument, "class index out of range");
    ClassMetrics m;
    m.name = cm.classes()[i];
    const std::uint64_t tp = cm.count(i, i);
    m.support = cm.row_total(i);
    m.predicted = cm.col_total(i);
    const std::uint64_t fp = m.predicted - tp;
    const std::uint64_t fn = m.support - tp;
    if (tp + fp == 0 || tp + fn == 0) m.zero_division = true;
    m.precision = tp + fp == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fp);
    m.recall = tp + fn == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fn);
    m.f1 = tp == 0 ? 0.0 : 2.0 * static_cast<double>(tp) / static_cast<double>(2 * tp + fp + fn);
    return m;
}

ClassMetrics per_class_prf(const ConfusionMatrix& cm, std::string_view class_name) {
    return per_class_prf(cm, cm.class_index(class_name));
}

}  // namespace tussock
