#include "adopt/revenue.hpp"

#include <cmath>
#include <stdexcept>

#include "adopt/normal.hpp"

namespace adopt {

double revenue_diff_1d(double c0, double sigma, double r, double t, double f) {
    if (!(c0 > 0.0 && f > 0.0 && t > 0.0)) throw std::invalid_argument("need c0, F, T > 0");
    if (!(sigma > 0.0)) {
        // deterministic limit: option and auction revenue coincide
        return 0.0;
    }
    const double sq = sigma * std::sqrt(t);
    const double zeta1 = (std::log(c0 / f) + (r + 0.5 * sigma * sigma) * t) / sq;
    const double zeta2 = zeta1 - sq;
    const double ref = reference_terminal_cpc(c0, sigma, r, t);
    return c0 * std_normal_cdf(zeta1) - std::exp(-r * t) * f * std_normal_cdf(zeta2) -
           std::exp(-r * t) * (ref - f) * std_normal_cdf(zeta2);
}

RevenueEstimate revenue_diff_mc(const OptionSpec& spec, const std::vector<double>& c0,
                                const std::vector<double>& sigma, const CorrMatrix& corr,
                                long n_paths, std::uint64_t seed) {
    spec.validate();
    if (spec.match != MatchType::exact)
        throw std::invalid_argument("revenue analysis covers exact-match options");
    const int n = spec.n();
    if (static_cast<int>(c0.size()) != n || static_cast<int>(sigma.size()) != n || corr.n() != n)
        throw std::invalid_argument("dimension mismatch");
    if (n_paths < 1000) throw std::invalid_argument("revenue_diff_mc needs n_paths >= 1000");

    SdeModel model;
    model.kind = SdeKind::gbm;
    for (double s : sigma) model.params.push_back({0.0, s, 0.0});
    const Eigen::MatrixXd terminal =
        simulate_terminal_gbm(c0, model, corr, spec.maturity, DriftMode::risk_neutral, spec.rate,
                              static_cast<int>(n_paths), seed);

    // Per-path batch accounting of option payoff, exercise fixed fee, and the
    // log of the counterfactual auction CPC (argmax keyword, keyword 1 when
    // the option is not exercised). Batch means give the standard error.
    constexpr int kBatches = 32;
    const long per_batch = n_paths / kBatches;
    if (per_batch < 1) throw std::invalid_argument("too few paths for batching");
    const long used = per_batch * kBatches;
    const double disc = std::exp(-spec.rate * spec.maturity);

    std::vector<double> batch_d(kBatches);
    std::vector<double> c(n);
    for (int bi = 0; bi < kBatches; ++bi) {
        double sum_payoff = 0.0, sum_fee = 0.0, sum_log_cf = 0.0;
        long n_ex = 0;
        for (long p = bi * per_batch; p < (bi + 1) * per_batch; ++p) {
            int am = 0;
            double best = -1e300;
            for (int i = 0; i < n; ++i) {
                c[i] = terminal(p, i);
                const double v = c[i] - spec.fixed_cpc[i];
                if (v > best) {
                    best = v;
                    am = i;
                }
            }
            const bool exercised = best > 0.0;
            sum_payoff += std::max(best, 0.0);
            if (exercised) {
                sum_fee += spec.fixed_cpc[am];
                ++n_ex;
                sum_log_cf += std::log(c[am]);
            } else {
                sum_log_cf += std::log(c[0]);
            }
        }
        const double nb = static_cast<double>(per_batch);
        const double p_ex = static_cast<double>(n_ex) / nb;
        const double ref = std::exp(sum_log_cf / nb);  // geometric-mean counterfactual CPC
        const double mean_payoff = sum_payoff / nb;
        const double mean_fee = sum_fee / nb;
        // D = pi/m + e^{-rT}(fee + (1-P)ref) - e^{-rT} ref
        batch_d[bi] = disc * (mean_payoff + mean_fee + (1.0 - p_ex) * ref - ref);
    }

    double mean = 0.0;
    for (double v : batch_d) mean += v;
    mean /= kBatches;
    double ss = 0.0;
    for (double v : batch_d) ss += (v - mean) * (v - mean);

    RevenueEstimate est;
    est.d = mean;
    est.std_error = std::sqrt(ss / (kBatches - 1.0) / kBatches);
    (void)used;
    return est;
}

RevenueCurve revenue_surface(const OptionSpec& spec, const std::vector<double>& c0,
                             const std::vector<double>& sigma, const CorrMatrix& corr,
                             const GridSpec& grid, long n_paths, std::uint64_t seed) {
    spec.validate();
    const int n = spec.n();
    if (static_cast<int>(grid.lo.size()) != n || static_cast<int>(grid.hi.size()) != n ||
        static_cast<int>(grid.n_points.size()) != n)
        throw std::invalid_argument("grid spec dimension mismatch");
    long total = 1;
    for (int i = 0; i < n; ++i) {
        if (!(grid.lo[i] > 0.0) || grid.hi[i] < grid.lo[i] || grid.n_points[i] < 1)
            throw std::invalid_argument("grid bounds must be positive and ordered");
        total *= grid.n_points[i];
        if (total > 10000) throw std::invalid_argument("grid too large (max 10^4 points)");
    }

    RevenueCurve curve;
    std::vector<int> idx(n, 0);
    for (long flat = 0; flat < total; ++flat) {
        RevenuePoint pt;
        pt.fixed_cpc.resize(n);
        long rem = flat;
        for (int i = 0; i < n; ++i) {
            idx[i] = static_cast<int>(rem % grid.n_points[i]);
            rem /= grid.n_points[i];
            pt.fixed_cpc[i] =
                grid.n_points[i] == 1
                    ? grid.lo[i]
                    : grid.lo[i] + (grid.hi[i] - grid.lo[i]) * idx[i] / (grid.n_points[i] - 1.0);
            pt.boundary = pt.boundary || idx[i] == 0 || idx[i] == grid.n_points[i] - 1;
        }
        OptionSpec at = spec;
        at.fixed_cpc = pt.fixed_cpc;
        if (n == 1 && sigma[0] > 0.0) {
            pt.d = revenue_diff_1d(c0[0], sigma[0], spec.rate, spec.maturity, pt.fixed_cpc[0]);
            pt.std_error = 0.0;
        } else {
            const auto est = revenue_diff_mc(at, c0, sigma, corr, n_paths, seed);
            pt.d = est.d;
            pt.std_error = est.std_error;
        }
        curve.grid.push_back(std::move(pt));
    }

    curve.argmax = 0;
    for (int i = 1; i < static_cast<int>(curve.grid.size()); ++i)
        if (curve.grid[i].d > curve.grid[curve.argmax].d) curve.argmax = i;

    curve.reference.fixed_cpc.resize(n);
    for (int i = 0; i < n; ++i)
        curve.reference.fixed_cpc[i] =
            reference_terminal_cpc(c0[i], sigma[i], spec.rate, spec.maturity);
    OptionSpec at_ref = spec;
    at_ref.fixed_cpc = curve.reference.fixed_cpc;
    if (n == 1 && sigma[0] > 0.0) {
        curve.reference.d =
            revenue_diff_1d(c0[0], sigma[0], spec.rate, spec.maturity, at_ref.fixed_cpc[0]);
    } else {
        const auto est = revenue_diff_mc(at_ref, c0, sigma, corr, n_paths, seed);
        curve.reference.d = est.d;
        curve.reference.std_error = est.std_error;
    }
    return curve;
}

}  // namespace adopt
