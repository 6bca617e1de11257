#include "tussock/reduce.hpp"

#include <algorithm>
#include <cmath>

#include "tussock/errors.hpp"

namespace tussock {

Standardizer fit_standardizer(const FeatureMatrix& x) {
    if (x.rows() < 2) raise(ErrorCode::EmptyInput, "standardizer needs at least two rows");
    const std::size_t n = x.rows(), d = x.cols();
    Standardizer s{x.columns(), std::vector<double>(d, 0.0), std::vector<double>(d, 1.0)};
    for (std::size_t c = 0; c < d; ++c) {
        double lo = x.at(0, c), hi = lo, sum = 0.0;
        for (std::size_t r = 0; r < n; ++r) {
            const double v = x.at(r, c);
            lo = std::min(lo, v);
            hi = std::max(hi, v);
            sum += v;
        }
        if (lo == hi) {
            s.mean[c] = lo;
            continue;
        }
        const double mean = sum / static_cast<double>(n);
        double ss = 0.0;
        for (std::size_t r = 0; r < n; ++r) {
            const double dv = x.at(r, c) - mean;
            ss += dv * dv;
        }
        const double sd = std::sqrt(ss / static_cast<double>(n));
        s.mean[c] = mean;
        s.scale[c] = sd < kScaleFloor ? 1.0 : sd;
    }
    return s;
}

void standardize_row(const Standardizer& s, std::span<const double> in, std::span<double> out) {
    if (in.size() != s.mean.size() || out.size() != in.size())
        raise(ErrorCode::DimensionMismatch, "row has " + std::to_string(in.size()) +
                                                " features, standardizer expects " +
                                                std::to_string(s.mean.size()));
    for (std::size_t c = 0; c < in.size(); ++c) out[c] = (in[c] - s.mean[c]) / s.scale[c];
}

FeatureMatrix apply_standardizer(const Standardizer& s, const FeatureMatrix& x) {
    if (x.cols() != s.mean.size())
        raise(ErrorCode::DimensionMismatch, "feature matrix has " + std::to_string(x.cols()) +
                                                " columns, standardizer expects " +
                                                std::to_string(s.mean.size()));
    FeatureMatrix out(x.columns());
    std::vector<double> buf(x.cols());
    for (std::size_t r = 0; r < x.rows(); ++r) {
        standardize_row(s, x.row(r), buf);
        out.add_row(x.plot_ids()[r], x.labels()[r], x.survey_years()[r], buf);
    }
    return out;
}

PcaModel fit_pca(const FeatureMatrix& x, double variance_target) {
    if (x.rows() < 2) raise(ErrorCode::EmptyInput, "PCA needs at least two rows");
    if (!(variance_target > 0.0 && variance_target <= 1.0))
        raise(ErrorCode::InvalidArgument, "variance target must lie in (0, 1]");
    const auto n = static_cast<Eigen::Index>(x.rows());
    const auto d = static_cast<Eigen::Index>(x.cols());
    Eigen::MatrixXd data(n, d);
    for (Eigen::Index r = 0; r < n; ++r)
        for (Eigen::Index c = 0; c < d; ++c) data(r, c) = x.at(static_cast<std::size_t>(r), static_cast<std::size_t>(c));

    const Eigen::RowVectorXd mean = data.colwise().mean();
    data.rowwise() -= mean;
    const Eigen::MatrixXd cov = (data.transpose() * data) / static_cast<double>(n - 1);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
    if (solver.info() != Eigen::Success) raise(ErrorCode::Internal, "eigendecomposition failed");

    PcaModel m;
    m.variance_target = variance_target;
    m.mean.assign(mean.data(), mean.data() + d);
    m.components.resize(d, d);
    m.eigenvalues.resize(static_cast<std::size_t>(d));
    for (Eigen::Index k = 0; k < d; ++k) {
        const Eigen::Index src = d - 1 - k;  // solver sorts ascending
        m.eigenvalues[static_cast<std::size_t>(k)] = std::max(0.0, solver.eigenvalues()(src));
        Eigen::VectorXd v = solver.eigenvectors().col(src);
        Eigen::Index arg = 0;
        for (Eigen::Index i = 1; i < d; ++i)
            if (std::fabs(v(i)) > std::fabs(v(arg))) arg = i;
        if (v(arg) < 0.0) v = -v;
        m.components.row(k) = v.transpose();
    }
    double total = 0.0;
    for (double l : m.eigenvalues) total += l;
    if (!(total > 0.0)) raise(ErrorCode::InvalidArgument, "PCA on a degenerate (zero-variance) matrix retains no components");
    m.ratios.resize(m.eigenvalues.size());
    for (std::size_t k = 0; k < m.ratios.size(); ++k) m.ratios[k] = m.eigenvalues[k] / total;
    double cumulative = 0.0;
    m.retained = m.ratios.size();
    for (std::size_t k = 0; k < m.ratios.size(); ++k) {
        cumulative += m.ratios[k];
        if (cumulative >= variance_target) {
            m.retained = k + 1;
            break;
        }
    }
    return m;
}

std::vector<double> pca_project(const PcaModel& m, std::span<const double> row, std::size_t k) {
    if (row.size() != m.dims())
        raise(ErrorCode::DimensionMismatch, "row has " + std::to_string(row.size()) +
                                                " features, PCA expects " + std::to_string(m.dims()));
    if (k > m.dims()) raise(ErrorCode::InvalidArgument, "more components requested than fitted");
    std::vector<double> out(k, 0.0);
    for (std::size_t j = 0; j < k; ++j) {
        double s = 0.0;
        for (std::size_t c = 0; c < row.size(); ++c)
            s += m.components(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(c)) * (row[c] - m.mean[c]);
        out[j] = s;
    }
    return out;
}

std::vector<double> pca_project(const PcaModel& m, std::span<const double> row) {
    return pca_project(m, row, m.retained);
}

std::vector<double> pca_inverse(const PcaModel& m, std::span<const double> scores) {
    if (scores.size() > m.dims()) raise(ErrorCode::DimensionMismatch, "too many component scores");
    std::vector<double> out(m.mean);
    for (std::size_t j = 0; j < scores.size(); ++j)
        for (std::size_t c = 0; c < out.size(); ++c)
            out[c] += scores[j] * m.components(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(c));
    return out;
}

FeatureMatrix pca_transform(const PcaModel& m, const FeatureMatrix& x) {
    if (x.cols() != m.dims())
        raise(ErrorCode::DimensionMismatch, "feature matrix has " + std::to_string(x.cols()) +
                                                " columns, PCA expects " + std::to_string(m.dims()));
    std::vector<std::string> names;
    for (std::size_t k = 0; k < m.retained; ++k) names.push_back("PC" + std::to_string(k + 1));
    FeatureMatrix out(std::move(names));
    for (std::size_t r = 0; r < x.rows(); ++r)
        out.add_row(x.plot_ids()[r], x.labels()[r], x.survey_years()[r], pca_project(m, x.row(r)));
    return out;
}

}  // namespace tussock
