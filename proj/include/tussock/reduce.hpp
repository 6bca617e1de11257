#pragma once

#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "tussock/feature_matrix.hpp"

namespace tussock {

// Training-set column statistics. Population standard deviation; columns
// that are constant in training get scale 1 so they map to zero there and
// stay finite elsewhere.
struct Standardizer {
    std::vector<std::string> columns;
    std::vector<double> mean;
    std::vector<double> scale;

    bool operator==(const Standardizer&) const = default;
};

inline constexpr double kScaleFloor = 1e-12;

Standardizer fit_standardizer(const FeatureMatrix& x);
FeatureMatrix apply_standardizer(const Standardizer& s, const FeatureMatrix& x);
void standardize_row(const Standardizer& s, std::span<const double> in, std::span<double> out);

inline constexpr double kDefaultVarianceTarget = 0.999;

// Principal components of the (n-1)-normalized sample covariance. All d
// components are kept (rows of `components`, descending eigenvalue) so the
// full-rank inverse is available; `retained` is the smallest k whose
// cumulative explained-variance ratio reaches the target. Each component's
// largest-magnitude entry is positive.
struct PcaModel {
    std::vector<double> mean;
    Eigen::MatrixXd components;  // d x d, row-orthonormal
    std::vector<double> eigenvalues;
    std::vector<double> ratios;
    std::size_t retained = 0;
    double variance_target = kDefaultVarianceTarget;

    std::size_t dims() const noexcept { return mean.size(); }
    bool operator==(const PcaModel& o) const {
        return mean == o.mean && components == o.components && eigenvalues == o.eigenvalues &&
               ratios == o.ratios && retained == o.retained && variance_target == o.variance_target;
    }
};

PcaModel fit_pca(const FeatureMatrix& x, double variance_target = kDefaultVarianceTarget);

// Projection on the first `k` components (default: retained).
std::vector<double> pca_project(const PcaModel& m, std::span<const double> row);
std::vector<double> pca_project(const PcaModel& m, std::span<const double> row, std::size_t k);
// Reconstruction from the leading scores.size() component scores.
std::vector<double> pca_inverse(const PcaModel& m, std::span<const double> scores);

// k-column matrix "PC1".."PCk" carrying the input's row labels.
FeatureMatrix pca_transform(const PcaModel& m, const FeatureMatrix& x);

}  // namespace tussock
