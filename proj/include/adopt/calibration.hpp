#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "adopt/market_data.hpp"

namespace adopt {

// Per-keyword GBM drift (per year) and volatility (per sqrt-year).
struct GbmParams {
    std::string keyword_id;
    double mu = 0.0;
    double sigma = 0.0;
    bool zero_variance = false;
};

struct CorrMatrix {
    std::vector<std::string> keywords;
    Eigen::MatrixXd rho;

    int n() const { return static_cast<int>(rho.rows()); }
    void validate() const;

    static CorrMatrix identity(int n);
};

struct PsdResult {
    CorrMatrix corr;
    bool repaired = false;
};

// sigma = annualized sample standard deviation of daily log returns,
// mu = mean(return)/dt + sigma^2/2 (inversion of the GBM log-return mean).
GbmParams estimate_sigma(const LogReturnSeries& returns);

// Pairwise Pearson correlation of aligned return series, with PSD repair.
CorrMatrix estimate_corr(const std::vector<LogReturnSeries>& returns);

// Clips negative eigenvalues to zero and rescales the diagonal back to one.
PsdResult check_psd(const CorrMatrix& corr);

}  // namespace adopt
