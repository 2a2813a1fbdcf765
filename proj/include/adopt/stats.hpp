#pragma once

#include <span>
#include <vector>

#include "adopt/normal.hpp"

namespace adopt {

// Regularized lower incomplete gamma P(a, x).
double gamma_p(double a, double x);
inline double gamma_q(double a, double x) { return 1.0 - gamma_p(a, x); }
inline double chi2_cdf(double x, double dof) { return gamma_p(0.5 * dof, 0.5 * x); }

// Royston's approximation to the Shapiro-Wilk W test, 8 <= n <= 5000.
// A constant sample yields p = 0 (degenerate by convention).
double shapiro_wilk(std::span<const double> sample);

// Portmanteau test of serial independence; Q against chi-square(lags).
double ljung_box(std::span<const double> sample, int lags);

inline int default_ljung_box_lags(std::size_t n) {
    const int by_n = static_cast<int>(n / 5);
    return std::max(1, std::min(10, by_n));
}

// Biased-denominator autocorrelations for lags 0..max_lag (lag 0 = 1).
std::vector<double> acf(std::span<const double> sample, int max_lag);

struct RankTestReport {
    double wilcoxon_p = 0.0;
    double ansari_bradley_p = 0.0;
    double ks_p = 0.0;
    double ks_statistic = 0.0;
};

// Wilcoxon rank-sum, Ansari-Bradley and two-sample Kolmogorov-Smirnov,
// all two-sided with normal/asymptotic approximations.
RankTestReport rank_tests(std::span<const double> a, std::span<const double> b);

double wilcoxon_rank_sum(std::span<const double> a, std::span<const double> b);
double ansari_bradley(std::span<const double> a, std::span<const double> b);
double ks_two_sample(std::span<const double> a, std::span<const double> b,
                     double* statistic = nullptr);

struct GofReport {
    double shapiro_wilk_p = 0.0;
    double ljung_box_p = 0.0;
    int ljung_box_lags = 0;
    std::vector<double> acf;
    bool degenerate = false;
    bool gbm_ok = false;
};

GofReport gof_report(std::span<const double> log_return_sample, double alpha = 0.05,
                     int acf_max_lag = 10);

// Fraction of simulated samples each similarity test fails to reject when
// compared against the actual sample at level alpha.
struct SimilarityReport {
    int n_simulations = 0;
    double frac_wilcoxon = 0.0;
    double frac_ansari_bradley = 0.0;
    double frac_ks = 0.0;
};

SimilarityReport similarity_protocol(std::span<const double> actual,
                                     const std::vector<std::vector<double>>& simulated,
                                     double alpha = 0.05);

}  // namespace adopt
