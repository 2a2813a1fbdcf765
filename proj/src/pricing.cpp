#include "adopt/pricing.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "adopt/normal.hpp"
#include "adopt/quadrature.hpp"

namespace adopt {

int OptionSpec::n_underlying() const {
    if (match == MatchType::exact) return n();
    int max_idx = -1;
    for (const auto& cand : broad.weights)
        for (const auto& [idx, w] : cand) max_idx = std::max(max_idx, idx);
    return max_idx + 1;
}

void OptionSpec::validate() const {
    if (fixed_cpc.empty()) throw std::invalid_argument("option needs at least one keyword");
    if (!keywords.empty() && keywords.size() != fixed_cpc.size())
        throw std::invalid_argument("keyword labels do not match F");
    for (double f : fixed_cpc)
        if (!(f >= 0.0) || !std::isfinite(f)) throw std::invalid_argument("fixed CPC must be >= 0");
    if (clicks < 1) throw std::invalid_argument("click count m must be >= 1");
    if (!(maturity > 0.0)) throw std::invalid_argument("maturity must be positive");
    if (!std::isfinite(rate)) throw std::invalid_argument("rate must be finite");
    if (match == MatchType::broad) {
        if (broad.weights.size() != fixed_cpc.size())
            throw std::invalid_argument("broad weights must cover every candidate");
        for (const auto& cand : broad.weights)
            for (const auto& [idx, w] : cand) {
                if (idx < 0) throw std::invalid_argument("negative sub-keyword index");
                if (w < 0.0) throw std::invalid_argument("broad weights must be >= 0");
            }
    }
}

const char* price_method_name(PriceMethod m) {
    switch (m) {
        case PriceMethod::mc: return "mc";
        case PriceMethod::bsm_closed: return "bsm_closed";
        case PriceMethod::dual_strike_closed: return "dual_strike_closed";
        case PriceMethod::quadrature: return "quadrature";
    }
    return "?";
}

double payoff_exact(std::span<const double> c, std::span<const double> fixed_cpc) {
    if (c.size() != fixed_cpc.size()) throw std::invalid_argument("payoff dimension mismatch");
    double best = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i) best = std::max(best, c[i] - fixed_cpc[i]);
    return best;
}

double payoff_broad(std::span<const double> c, const BroadWeights& broad,
                    std::span<const double> fixed_cpc) {
    if (broad.weights.size() != fixed_cpc.size())
        throw std::invalid_argument("payoff dimension mismatch");
    double best = 0.0;
    for (std::size_t j = 0; j < fixed_cpc.size(); ++j) {
        double basket = 0.0;
        for (const auto& [idx, w] : broad.weights[j]) {
            if (idx < 0 || static_cast<std::size_t>(idx) >= c.size())
                throw std::invalid_argument("missing sub-keyword in broad payoff");
            basket += w * c[idx];
        }
        best = std::max(best, basket - fixed_cpc[j]);
    }
    return best;
}

double payoff(const OptionSpec& spec, std::span<const double> c) {
    return spec.match == MatchType::exact ? payoff_exact(c, spec.fixed_cpc)
                                          : payoff_broad(c, spec.broad, spec.fixed_cpc);
}

PriceQuote price_mc(const OptionSpec& spec, const std::vector<double>& c0,
                    const std::vector<double>& sigma, const CorrMatrix& corr, long n_paths,
                    std::uint64_t seed) {
    spec.validate();
    const int nu = spec.n_underlying();
    if (static_cast<int>(c0.size()) != nu || static_cast<int>(sigma.size()) != nu ||
        corr.n() != nu)
        throw std::invalid_argument("pricing inputs do not match underlying dimension");
    if (n_paths < 1000) throw std::invalid_argument("price_mc needs n_paths >= 1000");

    SdeModel model;
    model.kind = SdeKind::gbm;
    for (double s : sigma) model.params.push_back({0.0, s, 0.0});
    const Eigen::MatrixXd terminal =
        simulate_terminal_gbm(c0, model, corr, spec.maturity, DriftMode::risk_neutral, spec.rate,
                              static_cast<int>(n_paths), seed);

    std::vector<double> payoffs(n_paths);
    parallel_for(n_paths, [&](std::int64_t b, std::int64_t e) {
        std::vector<double> c(nu);
        for (std::int64_t p = b; p < e; ++p) {
            for (int i = 0; i < nu; ++i) c[i] = terminal(p, i);
            payoffs[p] = payoff(spec, c);
        }
    });

    double mean = 0.0;
    for (double v : payoffs) mean += v;
    mean /= static_cast<double>(n_paths);
    double ss = 0.0;
    for (double v : payoffs) ss += (v - mean) * (v - mean);
    const double sd = n_paths > 1 ? std::sqrt(ss / static_cast<double>(n_paths - 1)) : 0.0;

    const double disc = std::exp(-spec.rate * spec.maturity);
    PriceQuote q;
    q.method = PriceMethod::mc;
    q.per_click = disc * mean;
    q.pi = static_cast<double>(spec.clicks) * q.per_click;
    q.mc_std_error =
        static_cast<double>(spec.clicks) * disc * sd / std::sqrt(static_cast<double>(n_paths));
    q.n_paths = n_paths;
    q.seed = seed;
    return q;
}

PriceQuote price_bsm_closed(const OptionSpec& spec, double c0, double sigma) {
    spec.validate();
    if (spec.n() != 1 || spec.match != MatchType::exact)
        throw std::invalid_argument("closed form requires a 1-keyword exact-match option");
    if (!(sigma > 0.0)) throw std::domain_error("sigma = 0: use the deterministic limit");
    const double f = spec.fixed_cpc[0];
    if (!(f > 0.0)) throw std::invalid_argument("F must be positive");
    const double t = spec.maturity;
    const double sq = sigma * std::sqrt(t);
    const double zeta1 = (std::log(c0 / f) + (spec.rate + 0.5 * sigma * sigma) * t) / sq;
    const double zeta2 = zeta1 - sq;
    PriceQuote q;
    q.method = PriceMethod::bsm_closed;
    q.per_click = c0 * std_normal_cdf(zeta1) - f * std::exp(-spec.rate * t) * std_normal_cdf(zeta2);
    q.pi = static_cast<double>(spec.clicks) * q.per_click;
    return q;
}

PriceQuote price_dual_strike_closed(const OptionSpec& spec, const std::vector<double>& c0,
                                    const std::vector<double>& sigma, double rho) {
    spec.validate();
    if (spec.n() != 2 || spec.match != MatchType::exact)
        throw std::invalid_argument("dual-strike form requires a 2-keyword exact-match option");
    if (!(sigma[0] > 0.0 && sigma[1] > 0.0)) throw std::domain_error("sigma must be positive");
    if (std::abs(rho) >= 1.0)
        throw std::domain_error("|rho| = 1 degenerate; use the Monte Carlo pricer");

    const double t = spec.maturity;
    const double r = spec.rate;
    const double sq1 = sigma[0] * std::sqrt(t);
    const double sq2 = sigma[1] * std::sqrt(t);
    const double a1 = (r - 0.5 * sigma[0] * sigma[0]) * t;
    const double a2 = (r - 0.5 * sigma[1] * sigma[1]) * t;
    const double f1 = spec.fixed_cpc[0];
    const double f2 = spec.fixed_cpc[1];
    const double zeta1 = (std::log(c0[0] / f1) + a1) / sq1;
    const double zeta2 = (std::log(c0[1] / f2) + a2) / sq2;
    const double den = std::sqrt(1.0 - rho * rho);

    // Terminal value of the other keyword entering each exercise boundary. A
    // non-positive threshold means the competing keyword can never win there;
    // the boundary sits at -inf and the inner normal CDF evaluates to 0.
    auto q1 = [&](double u) {
        const double thr = f2 - f1 + c0[0] * std::exp(a1 - u * sq1);
        if (!(thr > 0.0)) return -std::numeric_limits<double>::infinity();
        return (std::log(thr / c0[1]) - a2) / sq2;
    };
    auto q2 = [&](double v) {
        const double thr = f1 - f2 + c0[1] * std::exp(a2 - v * sq2);
        if (!(thr > 0.0)) return -std::numeric_limits<double>::infinity();
        return (std::log(thr / c0[0]) - a1) / sq1;
    };

    constexpr double kTail = -8.0;  // standard-normal mass below is < 1e-15
    constexpr double kTol = 1e-9;
    const double asset1 = integrate(
        [&](double u) {
            return std_normal_pdf(u) * std_normal_cdf((q1(u - sq1) - rho * sq1 + rho * u) / den);
        },
        kTail, zeta1 + sq1, kTol);
    const double asset2 = integrate(
        [&](double v) {
            return std_normal_pdf(v) * std_normal_cdf((q2(v - sq2) - rho * sq2 + rho * v) / den);
        },
        kTail, zeta2 + sq2, kTol);
    const double strike1 = integrate(
        [&](double u) { return std_normal_pdf(u) * std_normal_cdf((q1(u) + rho * u) / den); },
        kTail, zeta1, kTol);
    const double strike2 = integrate(
        [&](double v) { return std_normal_pdf(v) * std_normal_cdf((q2(v) + rho * v) / den); },
        kTail, zeta2, kTol);

    PriceQuote q;
    q.method = PriceMethod::dual_strike_closed;
    q.per_click = c0[0] * asset1 + c0[1] * asset2 -
                  std::exp(-r * t) * (f1 * strike1 + f2 * strike2);
    q.pi = static_cast<double>(spec.clicks) * q.per_click;
    return q;
}

namespace {

// Nested adaptive integration of the discounted payoff density over
// independent normal coordinates; the correlation enters via the factor.
double quad_payoff_recursive(const OptionSpec& spec, const std::vector<double>& c0,
                             const std::vector<double>& sigma, const Eigen::MatrixXd& factor,
                             std::vector<double>& w, int level, double tol) {
    const int n = static_cast<int>(c0.size());
    if (level == n) {
        std::vector<double> c(n);
        const double t = spec.maturity;
        for (int i = 0; i < n; ++i) {
            double z = 0.0;
            for (int k = 0; k <= i; ++k) z += factor(i, k) * w[k];
            c[i] = c0[i] *
                   std::exp((spec.rate - 0.5 * sigma[i] * sigma[i]) * t + sigma[i] * std::sqrt(t) * z);
        }
        return payoff(spec, c);
    }
    return integrate(
        [&](double wi) {
            w[level] = wi;
            return std_normal_pdf(wi) *
                   quad_payoff_recursive(spec, c0, sigma, factor, w, level + 1, tol * 0.05);
        },
        -8.0, 8.0, tol);
}

}  // namespace

PriceQuote price_quadrature(const OptionSpec& spec, const std::vector<double>& c0,
                            const std::vector<double>& sigma, const CorrMatrix& corr, double tol) {
    spec.validate();
    const int n = spec.n_underlying();
    if (n > 3) throw std::invalid_argument("quadrature oracle supports n <= 3");
    if (static_cast<int>(c0.size()) != n || static_cast<int>(sigma.size()) != n || corr.n() != n)
        throw std::invalid_argument("dimension mismatch");
    for (double s : sigma)
        if (!(s > 0.0)) throw std::domain_error("sigma = 0 degenerate for quadrature");

    const Eigen::MatrixXd factor = corr_factor(corr);
    std::vector<double> w(n);
    const double expectation = quad_payoff_recursive(spec, c0, sigma, factor, w, 0, tol);
    PriceQuote q;
    q.method = PriceMethod::quadrature;
    q.per_click = std::exp(-spec.rate * spec.maturity) * expectation;
    q.pi = static_cast<double>(spec.clicks) * q.per_click;
    return q;
}

ExerciseCheck check_no_early_exercise(const OptionSpec& spec, const std::vector<double>& c_t,
                                      const std::vector<double>& sigma, const CorrMatrix& corr,
                                      double t, long n_paths, std::uint64_t seed) {
    spec.validate();
    if (t < 0.0 || t >= spec.maturity) throw std::invalid_argument("need 0 <= t < T");
    OptionSpec remaining = spec;
    remaining.maturity = spec.maturity - t;
    remaining.clicks = 1;
    const PriceQuote cont = price_mc(remaining, c_t, sigma, corr, n_paths, seed);
    ExerciseCheck chk;
    chk.immediate = payoff(spec, c_t);
    chk.continuation = cont.per_click;
    chk.std_error = cont.mc_std_error;
    chk.holds = chk.immediate <= chk.continuation + 3.0 * chk.std_error;
    return chk;
}

}  // namespace adopt
