#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "adopt/sde.hpp"

namespace adopt {

enum class MatchType { exact, broad };

// Candidate -> weighted sub-keyword exposure for broad match payoffs.
struct BroadWeights {
    // weights[j] lists (underlying index, weight >= 0) for candidate j
    std::vector<std::vector<std::pair<int, double>>> weights;
};

struct OptionSpec {
    std::vector<std::string> keywords;
    std::vector<double> fixed_cpc;  // F, one per candidate keyword
    long clicks = 1;                // m
    double maturity = 0.0;          // T, years
    double rate = 0.0;              // r, continuously compounded
    MatchType match = MatchType::exact;
    BroadWeights broad;

    int n() const { return static_cast<int>(fixed_cpc.size()); }
    // Number of underlying CPC processes (sub-keywords under broad match).
    int n_underlying() const;
    void validate() const;
};

enum class PriceMethod { mc, bsm_closed, dual_strike_closed, quadrature };

struct PriceQuote {
    double pi = 0.0;
    double per_click = 0.0;
    PriceMethod method = PriceMethod::mc;
    double mc_std_error = 0.0;
    long n_paths = 0;
    std::uint64_t seed = 0;
};

const char* price_method_name(PriceMethod m);

double payoff_exact(std::span<const double> c, std::span<const double> fixed_cpc);
double payoff_broad(std::span<const double> c, const BroadWeights& broad,
                    std::span<const double> fixed_cpc);
double payoff(const OptionSpec& spec, std::span<const double> c);

// Terminal-only Monte Carlo pricer under the risk-neutral measure.
PriceQuote price_mc(const OptionSpec& spec, const std::vector<double>& c0,
                    const std::vector<double>& sigma, const CorrMatrix& corr, long n_paths,
                    std::uint64_t seed);

PriceQuote price_bsm_closed(const OptionSpec& spec, double c0, double sigma);

PriceQuote price_dual_strike_closed(const OptionSpec& spec, const std::vector<double>& c0,
                                    const std::vector<double>& sigma, double rho);

// Direct numerical integration oracle, n <= 3.
PriceQuote price_quadrature(const OptionSpec& spec, const std::vector<double>& c0,
                            const std::vector<double>& sigma, const CorrMatrix& corr,
                            double tol = 1e-7);

struct ExerciseCheck {
    double immediate = 0.0;     // per-click payoff at time t
    double continuation = 0.0;  // discounted MC continuation value per click
    double std_error = 0.0;
    bool holds = false;  // immediate <= continuation + 3 * std_error
};

ExerciseCheck check_no_early_exercise(const OptionSpec& spec, const std::vector<double>& c_t,
                                      const std::vector<double>& sigma, const CorrMatrix& corr,
                                      double t, long n_paths, std::uint64_t seed);

}  // namespace adopt
