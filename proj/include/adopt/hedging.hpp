#pragma once

#include <cstdint>
#include <vector>

#include "adopt/pricing.hpp"

namespace adopt {

enum class DeltaMethod { closed_form, pathwise_mc, fd_mc };

struct DeltaVector {
    std::vector<double> delta;
    std::vector<double> std_error;  // zero for closed form
    DeltaMethod method = DeltaMethod::closed_form;
};

// N[(ln(C0/F) + (r + sigma^2/2) T) / (sigma sqrt(T))] for the 1-keyword option.
DeltaVector delta_closed(const OptionSpec& spec, double c0, double sigma);

// Pathwise estimator: discounted winner-indicator times C_i(T)/C_i(0).
DeltaVector delta_mc(const OptionSpec& spec, const std::vector<double>& c0,
                     const std::vector<double>& sigma, const CorrMatrix& corr, long n_paths,
                     std::uint64_t seed);

// Central differences on common random numbers, cross-check for delta_mc.
DeltaVector delta_fd(const OptionSpec& spec, const std::vector<double>& c0,
                     const std::vector<double>& sigma, const CorrMatrix& corr, long n_paths,
                     std::uint64_t seed, double rel_bump = 1e-2);

enum class Verdict { no_arbitrage, buy_side_arbitrage, sell_side_arbitrage, degenerate };

const char* verdict_name(Verdict v);

// Excess return beyond the tolerance band; zero inside it.
double identified_arbitrage(double gamma_tilde, double r_tilde, double epsilon);
Verdict classify_arbitrage(double gamma_tilde, double r_tilde, double epsilon);

struct HedgeConfig {
    double epsilon = 0.05;
    int d_conv = 30;  // day count in the benchmark conversion exp(r*d_conv/365)-1
    long pricer_paths = 20000;
    std::uint64_t seed = 1;
};

struct HedgeReport {
    std::vector<double> pi_series;                 // value-difference process per day
    std::vector<double> value_series;              // per-click option value per day
    std::vector<std::vector<double>> delta_series; // per day, per keyword
    double gamma_tilde = 0.0;
    double r_tilde = 0.0;
    double epsilon = 0.0;
    double alpha = 0.0;
    Verdict verdict = Verdict::no_arbitrage;
};

// Daily-rebalanced delta hedge over an observed CPC path; observed[k] holds
// the CPC vector on day k and the option expires on the last day.
HedgeReport backtest_hedge(const OptionSpec& spec,
                           const std::vector<std::vector<double>>& observed,
                           const std::vector<double>& sigma, const CorrMatrix& corr,
                           const HedgeConfig& cfg);

}  // namespace adopt
