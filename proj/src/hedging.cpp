#include "adopt/hedging.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

#include "adopt/dates.hpp"
#include "adopt/normal.hpp"

namespace adopt {

DeltaVector delta_closed(const OptionSpec& spec, double c0, double sigma) {
    spec.validate();
    if (spec.n() != 1 || spec.match != MatchType::exact)
        throw std::invalid_argument("closed-form delta requires a 1-keyword exact-match option");
    if (!(sigma > 0.0))
        throw std::domain_error("sigma = 0 degenerate: delta is a step function of moneyness");
    const double f = spec.fixed_cpc[0];
    const double t = spec.maturity;
    const double zeta1 =
        (std::log(c0 / f) + (spec.rate + 0.5 * sigma * sigma) * t) / (sigma * std::sqrt(t));
    DeltaVector d;
    d.method = DeltaMethod::closed_form;
    d.delta = {std_normal_cdf(zeta1)};
    d.std_error = {0.0};
    return d;
}

namespace {

// Winning candidate index for a terminal CPC vector, or -1 if the payoff is
// zero. Ties break to the lowest index (probability zero under continuous
// marginals).
int winner(const OptionSpec& spec, std::span<const double> c) {
    int best = -1;
    double best_val = 0.0;
    for (int j = 0; j < spec.n(); ++j) {
        double v;
        if (spec.match == MatchType::exact) {
            v = c[j] - spec.fixed_cpc[j];
        } else {
            v = -spec.fixed_cpc[j];
            for (const auto& [idx, w] : spec.broad.weights[j]) v += w * c[idx];
        }
        if (v > best_val) {
            best_val = v;
            best = j;
        }
    }
    return best;
}

}  // namespace

DeltaVector delta_mc(const OptionSpec& spec, const std::vector<double>& c0,
                     const std::vector<double>& sigma, const CorrMatrix& corr, long n_paths,
                     std::uint64_t seed) {
    spec.validate();
    const int nu = spec.n_underlying();
    if (static_cast<int>(c0.size()) != nu || static_cast<int>(sigma.size()) != nu ||
        corr.n() != nu)
        throw std::invalid_argument("delta inputs do not match underlying dimension");

    SdeModel model;
    model.kind = SdeKind::gbm;
    for (double s : sigma) model.params.push_back({0.0, s, 0.0});
    const Eigen::MatrixXd terminal =
        simulate_terminal_gbm(c0, model, corr, spec.maturity, DriftMode::risk_neutral, spec.rate,
                              static_cast<int>(n_paths), seed);

    std::vector<double> sum(nu, 0.0), sumsq(nu, 0.0);
    std::vector<double> c(nu), contrib(nu);
    for (long p = 0; p < n_paths; ++p) {
        for (int i = 0; i < nu; ++i) c[i] = terminal(p, i);
        std::fill(contrib.begin(), contrib.end(), 0.0);
        const int j = winner(spec, c);
        if (j >= 0) {
            if (spec.match == MatchType::exact) {
                contrib[j] = c[j] / c0[j];
            } else {
                for (const auto& [idx, w] : spec.broad.weights[j])
                    contrib[idx] += w * c[idx] / c0[idx];
            }
        }
        for (int i = 0; i < nu; ++i) {
            sum[i] += contrib[i];
            sumsq[i] += contrib[i] * contrib[i];
        }
    }

    const double disc = std::exp(-spec.rate * spec.maturity);
    const double np = static_cast<double>(n_paths);
    DeltaVector d;
    d.method = DeltaMethod::pathwise_mc;
    d.delta.resize(nu);
    d.std_error.resize(nu);
    for (int i = 0; i < nu; ++i) {
        const double mean = sum[i] / np;
        const double var = std::max(0.0, sumsq[i] / np - mean * mean);
        d.delta[i] = disc * mean;
        d.std_error[i] = disc * std::sqrt(var / np);
    }
    return d;
}

DeltaVector delta_fd(const OptionSpec& spec, const std::vector<double>& c0,
                     const std::vector<double>& sigma, const CorrMatrix& corr, long n_paths,
                     std::uint64_t seed, double rel_bump) {
    spec.validate();
    const int nu = spec.n_underlying();
    SdeModel model;
    model.kind = SdeKind::gbm;
    for (double s : sigma) model.params.push_back({0.0, s, 0.0});
    // Terminal values scale multiplicatively in C_i(0), so one noise set
    // serves both bumps (common random numbers).
    const Eigen::MatrixXd terminal =
        simulate_terminal_gbm(c0, model, corr, spec.maturity, DriftMode::risk_neutral, spec.rate,
                              static_cast<int>(n_paths), seed);

    const double disc = std::exp(-spec.rate * spec.maturity);
    DeltaVector d;
    d.method = DeltaMethod::fd_mc;
    d.delta.resize(nu);
    d.std_error.resize(nu);
    std::vector<double> up(nu), dn(nu);
    for (int i = 0; i < nu; ++i) {
        const double h = rel_bump * c0[i];
        double sum = 0.0, sumsq = 0.0;
        for (long p = 0; p < n_paths; ++p) {
            for (int k = 0; k < nu; ++k) up[k] = dn[k] = terminal(p, k);
            up[i] *= (c0[i] + h) / c0[i];
            dn[i] *= (c0[i] - h) / c0[i];
            const double diff = (payoff(spec, up) - payoff(spec, dn)) / (2.0 * h);
            sum += diff;
            sumsq += diff * diff;
        }
        const double np = static_cast<double>(n_paths);
        const double mean = sum / np;
        const double var = std::max(0.0, sumsq / np - mean * mean);
        d.delta[i] = disc * mean;
        d.std_error[i] = disc * std::sqrt(var / np);
    }
    return d;
}

const char* verdict_name(Verdict v) {
    switch (v) {
        case Verdict::no_arbitrage: return "no_arbitrage";
        case Verdict::buy_side_arbitrage: return "buy_side_arbitrage";
        case Verdict::sell_side_arbitrage: return "sell_side_arbitrage";
        case Verdict::degenerate: return "degenerate";
    }
    return "?";
}

double identified_arbitrage(double gamma_tilde, double r_tilde, double epsilon) {
    if (gamma_tilde < r_tilde - epsilon) return gamma_tilde - (r_tilde - epsilon);
    if (gamma_tilde > r_tilde + epsilon) return gamma_tilde - (r_tilde + epsilon);
    return 0.0;
}

Verdict classify_arbitrage(double gamma_tilde, double r_tilde, double epsilon) {
    if (gamma_tilde > r_tilde + epsilon) return Verdict::buy_side_arbitrage;
    if (gamma_tilde < r_tilde - epsilon) return Verdict::sell_side_arbitrage;
    return Verdict::no_arbitrage;
}

namespace {

struct ValueDelta {
    double value = 0.0;  // per click
    std::vector<double> delta;
};

ValueDelta value_and_delta(const OptionSpec& spec, const std::vector<double>& c,
                           const std::vector<double>& sigma, const CorrMatrix& corr,
                           double remaining, const HedgeConfig& cfg, std::uint64_t day_seed) {
    const int nu = spec.n_underlying();
    ValueDelta out;
    out.delta.assign(nu, 0.0);

    if (remaining <= 1e-12) {  // expiry: intrinsic value, winner-indicator delta
        out.value = payoff(spec, c);
        const int j = winner(spec, c);
        if (j >= 0) {
            if (spec.match == MatchType::exact)
                out.delta[j] = 1.0;
            else
                for (const auto& [idx, w] : spec.broad.weights[j]) out.delta[idx] += w;
        }
        return out;
    }

    OptionSpec live = spec;
    live.maturity = remaining;
    live.clicks = 1;

    const bool all_zero_sigma =
        std::all_of(sigma.begin(), sigma.end(), [](double s) { return s == 0.0; });
    if (all_zero_sigma) {  // deterministic limit
        std::vector<double> fwd(c);
        const double grow = std::exp(spec.rate * remaining);
        for (double& v : fwd) v *= grow;
        out.value = std::exp(-spec.rate * remaining) * payoff(spec, fwd);
        const int j = winner(spec, fwd);
        if (j >= 0) {
            if (spec.match == MatchType::exact)
                out.delta[j] = 1.0;
            else
                for (const auto& [idx, w] : spec.broad.weights[j]) out.delta[idx] += w;
        }
        return out;
    }

    if (spec.n() == 1 && spec.match == MatchType::exact && sigma[0] > 0.0) {
        out.value = price_bsm_closed(live, c[0], sigma[0]).per_click;
        out.delta = delta_closed(live, c[0], sigma[0]).delta;
        return out;
    }
    out.value = price_mc(live, c, sigma, corr, cfg.pricer_paths, day_seed).per_click;
    out.delta = delta_mc(live, c, sigma, corr, cfg.pricer_paths, day_seed).delta;
    return out;
}

}  // namespace

HedgeReport backtest_hedge(const OptionSpec& spec,
                           const std::vector<std::vector<double>>& observed,
                           const std::vector<double>& sigma, const CorrMatrix& corr,
                           const HedgeConfig& cfg) {
    spec.validate();
    const int d = static_cast<int>(observed.size());
    if (d < 2) throw std::invalid_argument("backtest needs at least 2 daily observations");
    const int nu = spec.n_underlying();
    for (const auto& day : observed)
        if (static_cast<int>(day.size()) != nu)
            throw std::invalid_argument("missing observations in backtest window");

    HedgeReport rep;
    rep.epsilon = cfg.epsilon;
    rep.r_tilde = std::exp(spec.rate * cfg.d_conv / kDaysPerYear) - 1.0;

    // Pi accumulates the hedged increments dV - sum_i Delta_i dC_i with each
    // day's delta held fixed over the following day, starting from the cash
    // position V(0) - sum_i Delta_i(0) C_i(0). Under correct dynamics the
    // increments are risk-less and Pi compounds at the risk-less rate.
    const double m = static_cast<double>(spec.clicks);
    double pi = 0.0;
    std::vector<double> prev_delta;
    double prev_value = 0.0;
    for (int k = 0; k < d; ++k) {
        const double remaining = spec.maturity - k * kDt;
        const std::uint64_t day_seed = cfg.seed + 0x9E3779B97F4A7C15ull * (k + 1);
        const auto vd = value_and_delta(spec, observed[k], sigma, corr, remaining, cfg, day_seed);
        if (k == 0) {
            double hedge = 0.0;
            for (int i = 0; i < nu; ++i) hedge += vd.delta[i] * observed[0][i];
            pi = m * (vd.value - hedge);
        } else {
            double incr = vd.value - prev_value;
            for (int i = 0; i < nu; ++i)
                incr -= prev_delta[i] * (observed[k][i] - observed[k - 1][i]);
            pi += m * incr;
        }
        rep.value_series.push_back(vd.value);
        rep.delta_series.push_back(vd.delta);
        rep.pi_series.push_back(pi);
        prev_delta = vd.delta;
        prev_value = vd.value;
    }

    const double pi0 = rep.pi_series.front();
    const double c0_mean =
        std::accumulate(observed[0].begin(), observed[0].end(), 0.0) / static_cast<double>(nu);
    if (std::abs(pi0) < 1e-6 * m * c0_mean) {
        rep.verdict = Verdict::degenerate;
        return rep;
    }
    rep.gamma_tilde = (rep.pi_series.back() - pi0) / pi0;
    rep.alpha = identified_arbitrage(rep.gamma_tilde, rep.r_tilde, cfg.epsilon);
    rep.verdict = classify_arbitrage(rep.gamma_tilde, rep.r_tilde, cfg.epsilon);
    return rep;
}

}  // namespace adopt
