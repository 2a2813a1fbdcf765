#include "adopt/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace adopt {

namespace {

double gamma_p_series(double a, double x) {
    double ap = a;
    double sum = 1.0 / a;
    double del = sum;
    for (int i = 0; i < 500; ++i) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::abs(del) < std::abs(sum) * 1e-16) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

double gamma_q_contfrac(double a, double x) {
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= 500; ++i) {
        const double an = -static_cast<double>(i) * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < 1e-16) break;
    }
    return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

}  // namespace

double gamma_p(double a, double x) {
    if (a <= 0.0 || x < 0.0) throw std::domain_error("gamma_p: invalid arguments");
    if (x == 0.0) return 0.0;
    if (x < a + 1.0) return gamma_p_series(a, x);
    return 1.0 - gamma_q_contfrac(a, x);
}

double shapiro_wilk(std::span<const double> sample) {
    const int n = static_cast<int>(sample.size());
    if (n < 8 || n > 5000) throw std::invalid_argument("shapiro_wilk: n must be in [8, 5000]");

    std::vector<double> x(sample.begin(), sample.end());
    std::sort(x.begin(), x.end());
    if (x.front() == x.back()) return 0.0;  // constant sample, degenerate

    std::vector<double> m(n);
    double ssumm2 = 0.0;
    for (int i = 0; i < n; ++i) {
        m[i] = std_normal_inv((i + 1 - 0.375) / (n + 0.25));
        ssumm2 += m[i] * m[i];
    }
    const double rsn = 1.0 / std::sqrt(static_cast<double>(n));
    auto poly = [](const double* c, int order, double v) {
        double r = c[0];
        double p = 1.0;
        for (int i = 1; i <= order; ++i) {
            p *= v;
            r += c[i] * p;
        }
        return r;
    };
    static const double c1[6] = {0.0, 0.221157, -0.147981, -2.071190, 4.434685, -2.706056};
    static const double c2[6] = {0.0, 0.042981, -0.293762, -1.752461, 5.682633, -3.582633};

    std::vector<double> a(n, 0.0);
    const double an = poly(c1, 5, rsn) + m[n - 1] / std::sqrt(ssumm2);
    const double an1 = poly(c2, 5, rsn) + m[n - 2] / std::sqrt(ssumm2);
    const double phi = (ssumm2 - 2.0 * m[n - 1] * m[n - 1] - 2.0 * m[n - 2] * m[n - 2]) /
                       (1.0 - 2.0 * an * an - 2.0 * an1 * an1);
    a[n - 1] = an;
    a[n - 2] = an1;
    a[0] = -an;
    a[1] = -an1;
    const double sqrt_phi = std::sqrt(phi);
    for (int i = 2; i < n - 2; ++i) a[i] = m[i] / sqrt_phi;

    const double mean = std::accumulate(x.begin(), x.end(), 0.0) / n;
    double num = 0.0, den = 0.0;
    for (int i = 0; i < n; ++i) {
        num += a[i] * x[i];
        den += (x[i] - mean) * (x[i] - mean);
    }
    double w = num * num / den;
    w = std::min(w, 1.0);

    double z;
    if (n <= 11) {
        const double g = -2.273 + 0.459 * n;
        const double mu = 0.5440 - 0.39978 * n + 0.025054 * n * n - 0.0006714 * n * n * n;
        const double sig = std::exp(1.3822 - 0.77857 * n + 0.062767 * n * n - 0.0020322 * n * n * n);
        z = (-std::log(g - std::log1p(-w)) - mu) / sig;
    } else {
        const double ln = std::log(static_cast<double>(n));
        const double mu = -1.5861 - 0.31082 * ln - 0.083751 * ln * ln + 0.0038915 * ln * ln * ln;
        const double sig = std::exp(-0.4803 - 0.082676 * ln + 0.0030302 * ln * ln);
        z = (std::log1p(-w) - mu) / sig;
    }
    return std::clamp(1.0 - std_normal_cdf(z), 0.0, 1.0);
}

std::vector<double> acf(std::span<const double> sample, int max_lag) {
    const int n = static_cast<int>(sample.size());
    if (max_lag < 0 || n <= max_lag) throw std::invalid_argument("acf: need n > max_lag >= 0");
    const double mean = std::accumulate(sample.begin(), sample.end(), 0.0) / n;
    double c0 = 0.0;
    for (double v : sample) c0 += (v - mean) * (v - mean);
    std::vector<double> out(max_lag + 1, 0.0);
    out[0] = 1.0;
    if (c0 == 0.0) return out;  // constant sample, higher lags undefined -> 0
    for (int k = 1; k <= max_lag; ++k) {
        double ck = 0.0;
        for (int t = k; t < n; ++t) ck += (sample[t] - mean) * (sample[t - k] - mean);
        out[k] = ck / c0;
    }
    return out;
}

double ljung_box(std::span<const double> sample, int lags) {
    const int n = static_cast<int>(sample.size());
    if (lags < 1 || n <= lags) throw std::invalid_argument("ljung_box: need n > lags >= 1");
    const auto r = acf(sample, lags);
    double q = 0.0;
    for (int k = 1; k <= lags; ++k) q += r[k] * r[k] / (n - k);
    q *= n * (n + 2.0);
    return std::clamp(gamma_q(0.5 * lags, 0.5 * q), 0.0, 1.0);
}

namespace {

// Midranks of the pooled sample; returns ranks aligned with the pooled order
// and the pooled sorted values for tie handling.
std::vector<double> midranks(const std::vector<double>& pooled_sorted) {
    const std::size_t n = pooled_sorted.size();
    std::vector<double> rank(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && pooled_sorted[j + 1] == pooled_sorted[i]) ++j;
        const double mid = 0.5 * (static_cast<double>(i + 1) + static_cast<double>(j + 1));
        for (std::size_t k = i; k <= j; ++k) rank[k] = mid;
        i = j + 1;
    }
    return rank;
}

struct PooledRanks {
    std::vector<double> rank_a;  // midrank of each element of a in the pooled sample
    std::vector<double> all_ranks;
};

PooledRanks pool_and_rank(std::span<const double> a, std::span<const double> b) {
    std::vector<std::pair<double, int>> pooled;
    pooled.reserve(a.size() + b.size());
    for (double v : a) pooled.emplace_back(v, 0);
    for (double v : b) pooled.emplace_back(v, 1);
    std::sort(pooled.begin(), pooled.end());
    std::vector<double> values(pooled.size());
    for (std::size_t i = 0; i < pooled.size(); ++i) values[i] = pooled[i].first;
    auto ranks = midranks(values);
    PooledRanks out;
    out.all_ranks = ranks;
    for (std::size_t i = 0; i < pooled.size(); ++i)
        if (pooled[i].second == 0) out.rank_a.push_back(ranks[i]);
    return out;
}

double two_sided_p(double z) { return std::clamp(2.0 * (1.0 - std_normal_cdf(std::abs(z))), 0.0, 1.0); }

void require_samples(std::span<const double> a, std::span<const double> b) {
    if (a.size() < 8 || b.size() < 8)
        throw std::invalid_argument("rank tests need at least 8 points per sample");
}

}  // namespace

double wilcoxon_rank_sum(std::span<const double> a, std::span<const double> b) {
    require_samples(a, b);
    const double m = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    const double big_n = m + nb;
    const auto pr = pool_and_rank(a, b);
    const double r = std::accumulate(pr.rank_a.begin(), pr.rank_a.end(), 0.0);
    const double mean = m * (big_n + 1.0) / 2.0;
    // tie correction
    double tie_sum = 0.0;
    {
        std::size_t i = 0;
        const auto& ranks = pr.all_ranks;
        while (i < ranks.size()) {
            std::size_t j = i;
            while (j + 1 < ranks.size() && ranks[j + 1] == ranks[i]) ++j;
            const double t = static_cast<double>(j - i + 1);
            tie_sum += t * t * t - t;
            i = j + 1;
        }
    }
    const double var =
        m * nb * (big_n + 1.0) / 12.0 - m * nb * tie_sum / (12.0 * big_n * (big_n - 1.0));
    if (var <= 0.0) throw std::domain_error("wilcoxon: degenerate all-tied samples");
    const double z = (std::abs(r - mean) - 0.5) / std::sqrt(var);
    return two_sided_p(z);
}

double ansari_bradley(std::span<const double> a, std::span<const double> b) {
    require_samples(a, b);
    const double m = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    const double big_n = m + nb;
    const auto pr = pool_and_rank(a, b);
    // scores from both ends; midrank-compatible
    auto score = [big_n](double rank) { return std::min(rank, big_n + 1.0 - rank); };
    double ab = 0.0;
    for (double r : pr.rank_a) ab += score(r);
    double s_sum = 0.0, s_sq = 0.0;
    for (double r : pr.all_ranks) {
        const double s = score(r);
        s_sum += s;
        s_sq += s * s;
    }
    const double s_bar = s_sum / big_n;
    const double mean = m * s_bar;
    const double var = m * nb / (big_n * (big_n - 1.0)) * (s_sq - big_n * s_bar * s_bar);
    if (var <= 0.0) throw std::domain_error("ansari_bradley: degenerate all-tied samples");
    const double z = (ab - mean) / std::sqrt(var);
    return two_sided_p(z);
}

double ks_two_sample(std::span<const double> a, std::span<const double> b, double* statistic) {
    require_samples(a, b);
    std::vector<double> xa(a.begin(), a.end()), xb(b.begin(), b.end());
    std::sort(xa.begin(), xa.end());
    std::sort(xb.begin(), xb.end());
    const double m = static_cast<double>(xa.size());
    const double nb = static_cast<double>(xb.size());
    double d = 0.0;
    std::size_t i = 0, j = 0;
    while (i < xa.size() && j < xb.size()) {
        const double v = std::min(xa[i], xb[j]);
        while (i < xa.size() && xa[i] <= v) ++i;
        while (j < xb.size() && xb[j] <= v) ++j;
        d = std::max(d, std::abs(i / m - j / nb));
    }
    if (statistic) *statistic = d;
    const double en = std::sqrt(m * nb / (m + nb));
    const double lambda = (en + 0.12 + 0.11 / en) * d;
    if (lambda < 1e-3) return 1.0;
    double p = 0.0;
    double sign = 1.0;
    for (int k = 1; k <= 100; ++k) {
        const double term = std::exp(-2.0 * k * k * lambda * lambda);
        p += sign * term;
        sign = -sign;
        if (term < 1e-12) break;
    }
    return std::clamp(2.0 * p, 0.0, 1.0);
}

RankTestReport rank_tests(std::span<const double> a, std::span<const double> b) {
    RankTestReport r;
    r.wilcoxon_p = wilcoxon_rank_sum(a, b);
    r.ansari_bradley_p = ansari_bradley(a, b);
    r.ks_p = ks_two_sample(a, b, &r.ks_statistic);
    return r;
}

GofReport gof_report(std::span<const double> log_return_sample, double alpha, int acf_max_lag) {
    GofReport g;
    const int n = static_cast<int>(log_return_sample.size());
    g.ljung_box_lags = default_ljung_box_lags(log_return_sample.size());
    g.acf = acf(log_return_sample, std::min(acf_max_lag, n - 1));
    g.shapiro_wilk_p = shapiro_wilk(log_return_sample);
    g.ljung_box_p = ljung_box(log_return_sample, g.ljung_box_lags);
    g.degenerate = (g.shapiro_wilk_p == 0.0);
    g.gbm_ok = !g.degenerate && g.shapiro_wilk_p > alpha && g.ljung_box_p > alpha;
    return g;
}

SimilarityReport similarity_protocol(std::span<const double> actual,
                                     const std::vector<std::vector<double>>& simulated,
                                     double alpha) {
    SimilarityReport rep;
    rep.n_simulations = static_cast<int>(simulated.size());
    if (simulated.empty()) return rep;
    int ok_w = 0, ok_ab = 0, ok_ks = 0;
    for (const auto& sim : simulated) {
        const auto r = rank_tests(actual, sim);
        if (r.wilcoxon_p > alpha) ++ok_w;
        if (r.ansari_bradley_p > alpha) ++ok_ab;
        if (r.ks_p > alpha) ++ok_ks;
    }
    const double n = static_cast<double>(rep.n_simulations);
    rep.frac_wilcoxon = ok_w / n;
    rep.frac_ansari_bradley = ok_ab / n;
    rep.frac_ks = ok_ks / n;
    return rep;
}

}  // namespace adopt
