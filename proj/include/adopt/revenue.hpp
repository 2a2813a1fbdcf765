#pragma once

#include <cstdint>
#include <vector>

#include "adopt/pricing.hpp"

namespace adopt {

// Growth-rate-drift terminal value C(0) e^{(r - sigma^2/2) T}, the reference
// point the revenue analysis compares F against.
inline double reference_terminal_cpc(double c0, double sigma, double r, double t) {
    return c0 * std::exp((r - 0.5 * sigma * sigma) * t);
}

// Closed-form seller revenue difference for a 1-keyword 1-click option.
double revenue_diff_1d(double c0, double sigma, double r, double t, double f);

struct RevenueEstimate {
    double d = 0.0;
    double std_error = 0.0;
};

// Monte Carlo revenue difference for n keywords on common random numbers.
RevenueEstimate revenue_diff_mc(const OptionSpec& spec, const std::vector<double>& c0,
                                const std::vector<double>& sigma, const CorrMatrix& corr,
                                long n_paths, std::uint64_t seed);

struct RevenuePoint {
    std::vector<double> fixed_cpc;
    double d = 0.0;
    double std_error = 0.0;
    bool boundary = false;
};

struct RevenueCurve {
    std::vector<RevenuePoint> grid;
    int argmax = -1;
    RevenuePoint reference;  // F_i at the per-keyword reference terminal CPC
};

struct GridSpec {
    std::vector<double> lo;       // per keyword
    std::vector<double> hi;
    std::vector<int> n_points;    // per keyword; product <= 10^4
};

RevenueCurve revenue_surface(const OptionSpec& spec, const std::vector<double>& c0,
                             const std::vector<double>& sigma, const CorrMatrix& corr,
                             const GridSpec& grid, long n_paths, std::uint64_t seed);

}  // namespace adopt
