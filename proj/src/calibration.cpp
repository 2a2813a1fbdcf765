#include "adopt/calibration.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace adopt {

void CorrMatrix::validate() const {
    const int m = n();
    if (rho.cols() != m) throw std::invalid_argument("correlation matrix not square");
    if (!keywords.empty() && static_cast<int>(keywords.size()) != m)
        throw std::invalid_argument("keyword labels do not match matrix size");
    for (int i = 0; i < m; ++i) {
        if (std::abs(rho(i, i) - 1.0) > 1e-12)
            throw std::invalid_argument("correlation diagonal must be 1");
        for (int j = 0; j < i; ++j) {
            if (std::abs(rho(i, j) - rho(j, i)) > 1e-12)
                throw std::invalid_argument("correlation matrix not symmetric");
            if (rho(i, j) < -1.0 - 1e-12 || rho(i, j) > 1.0 + 1e-12)
                throw std::invalid_argument("correlation entry outside [-1, 1]");
        }
    }
}

CorrMatrix CorrMatrix::identity(int n) {
    CorrMatrix c;
    c.rho = Eigen::MatrixXd::Identity(n, n);
    return c;
}

GbmParams estimate_sigma(const LogReturnSeries& returns) {
    const auto& ys = returns.returns;
    const std::size_t n = ys.size();
    if (n < 8)
        throw std::invalid_argument("need at least 8 returns for '" + returns.keyword_id + "'");
    double mean = 0.0;
    for (const auto& r : ys) mean += r.y;
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (const auto& r : ys) ss += (r.y - mean) * (r.y - mean);
    const double daily_sd = std::sqrt(ss / static_cast<double>(n - 1));

    GbmParams p;
    p.keyword_id = returns.keyword_id;
    p.sigma = daily_sd * std::sqrt(kDaysPerYear);
    p.zero_variance = (daily_sd == 0.0);
    p.mu = mean / kDt + 0.5 * p.sigma * p.sigma;
    if (!std::isfinite(p.mu) || !std::isfinite(p.sigma))
        throw std::runtime_error("non-finite GBM parameters for '" + returns.keyword_id + "'");
    return p;
}

CorrMatrix estimate_corr(const std::vector<LogReturnSeries>& returns) {
    const int n = static_cast<int>(returns.size());
    if (n == 0) throw std::invalid_argument("no return series");
    const std::size_t len = returns[0].returns.size();
    if (len < 8) throw std::invalid_argument("need at least 8 returns");
    for (const auto& s : returns) {
        if (s.returns.size() != len)
            throw std::invalid_argument("misaligned return series '" + s.keyword_id + "'");
        for (std::size_t k = 0; k < len; ++k)
            if (s.returns[k].date != returns[0].returns[k].date)
                throw std::invalid_argument("misaligned dates in series '" + s.keyword_id + "'");
    }

    Eigen::MatrixXd y(len, n);
    for (int j = 0; j < n; ++j) {
        double mean = 0.0;
        for (std::size_t k = 0; k < len; ++k) mean += returns[j].returns[k].y;
        mean /= static_cast<double>(len);
        for (std::size_t k = 0; k < len; ++k) y(k, j) = returns[j].returns[k].y - mean;
        if (y.col(j).squaredNorm() == 0.0)
            throw std::invalid_argument("zero-variance series '" + returns[j].keyword_id +
                                        "' makes correlations undefined");
    }

    CorrMatrix c;
    c.rho = Eigen::MatrixXd::Identity(n, n);
    for (const auto& s : returns) c.keywords.push_back(s.keyword_id);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < i; ++j) {
            const double r = y.col(i).dot(y.col(j)) / (y.col(i).norm() * y.col(j).norm());
            c.rho(i, j) = c.rho(j, i) = std::clamp(r, -1.0, 1.0);
        }
    return check_psd(c).corr;
}

PsdResult check_psd(const CorrMatrix& corr) {
    corr.validate();
    PsdResult out;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(corr.rho);
    if (es.info() != Eigen::Success) throw std::runtime_error("eigendecomposition failed");
    if (es.eigenvalues().minCoeff() >= -1e-10) {
        out.corr = corr;
        return out;
    }
    Eigen::VectorXd clipped = es.eigenvalues().cwiseMax(0.0);
    Eigen::MatrixXd a = es.eigenvectors() * clipped.asDiagonal() * es.eigenvectors().transpose();
    Eigen::VectorXd d = a.diagonal().cwiseMax(1e-300).cwiseSqrt().cwiseInverse();
    Eigen::MatrixXd repaired = d.asDiagonal() * a * d.asDiagonal();
    repaired = 0.5 * (repaired + repaired.transpose());
    repaired.diagonal().setOnes();

    out.corr.keywords = corr.keywords;
    out.corr.rho = repaired.cwiseMax(-1.0).cwiseMin(1.0);
    out.repaired = true;
    return out;
}

}  // namespace adopt
