#include <cmath>
#include <random>

#include "adopt/normal.hpp"
#include "adopt/stats.hpp"
#include "doctest.h"
#include "test_util.hpp"

using namespace adopt;

TEST_CASE("standard normal cdf basics") {
    CHECK(std_normal_cdf(0.0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(std_normal_cdf(1.959964) == doctest::Approx(0.975).epsilon(1e-6));
    CHECK(std_normal_cdf(-1.959964) == doctest::Approx(0.025).epsilon(1e-4));

    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> dist(-6.0, 6.0);
    double prev_x = -1e9, prev_p = 0.0;
    for (int i = 0; i < 500; ++i) {
        const double x = dist(rng);
        CHECK(std::abs(std_normal_cdf(x) + std_normal_cdf(-x) - 1.0) < 1e-14);
        if (x > prev_x) {
            CHECK(std_normal_cdf(x) >= prev_p);
        }
        prev_x = x;
        prev_p = std_normal_cdf(x);
    }
}

TEST_CASE("normal inverse round-trips the cdf") {
    for (double p : {1e-8, 1e-4, 0.02, 0.31, 0.5, 0.77, 0.975, 0.9999, 1.0 - 1e-9}) {
        const double x = std_normal_inv(p);
        CHECK(std_normal_cdf(x) == doctest::Approx(p).epsilon(1e-9));
    }
}

TEST_CASE("regularized incomplete gamma against erf identity") {
    // P(1/2, x) = erf(sqrt(x))
    for (double x : {0.01, 0.3, 1.0, 2.5, 10.0, 40.0}) {
        CHECK(gamma_p(0.5, x) == doctest::Approx(std::erf(std::sqrt(x))).epsilon(1e-12));
    }
    CHECK(gamma_p(2.0, 0.0) == 0.0);
    // chi-square quantile spot checks
    CHECK(chi2_cdf(3.841458820694124, 1.0) == doctest::Approx(0.95).epsilon(1e-10));
    CHECK(chi2_cdf(18.307038053275146, 10.0) == doctest::Approx(0.95).epsilon(1e-10));
    CHECK_THROWS_AS(gamma_p(-1.0, 1.0), std::domain_error);
}

TEST_CASE("shapiro-wilk size is calibrated and degenerate input flagged") {
    std::mt19937_64 rng(101);
    const int trials = 10000;
    int rejections = 0;
    for (int t = 0; t < trials; ++t) {
        const auto x = testutil::normal_sample(rng, 30);
        if (shapiro_wilk(x) < 0.05) ++rejections;
    }
    const double rate = static_cast<double>(rejections) / trials;
    CHECK(std::abs(rate - 0.05) < 0.01);

    CHECK(shapiro_wilk(std::vector<double>(20, 3.0)) == 0.0);
    CHECK_THROWS_AS(shapiro_wilk(std::vector<double>(5, 0.0)), std::invalid_argument);
}

TEST_CASE("shapiro-wilk rejects heavy-tailed samples") {
    std::mt19937_64 rng(77);
    std::student_t_distribution<double> heavy(2.0);
    const int trials = 200;
    int rejections = 0;
    for (int t = 0; t < trials; ++t) {
        std::vector<double> x(100);
        for (auto& v : x) v = heavy(rng);
        if (shapiro_wilk(x) < 0.05) ++rejections;
    }
    CHECK(static_cast<double>(rejections) / trials > 0.9);
}

TEST_CASE("ljung-box size and power") {
    std::mt19937_64 rng(55);
    const int trials = 10000;
    int rejections = 0;
    for (int t = 0; t < trials; ++t) {
        const auto x = testutil::normal_sample(rng, 100);
        if (ljung_box(x, 10) < 0.05) ++rejections;
    }
    CHECK(std::abs(static_cast<double>(rejections) / trials - 0.05) < 0.01);

    int ar_rejections = 0;
    std::normal_distribution<double> eps(0.0, 1.0);
    for (int t = 0; t < 200; ++t) {
        std::vector<double> x(200);
        double prev = 0.0;
        for (auto& v : x) {
            v = 0.8 * prev + eps(rng);
            prev = v;
        }
        if (ljung_box(x, 10) < 0.05) ++ar_rejections;
    }
    CHECK(ar_rejections / 200.0 > 0.95);

    CHECK_THROWS_AS(ljung_box(std::vector<double>(10, 1.0), 0), std::invalid_argument);
    CHECK(default_ljung_box_lags(100) == 10);
    CHECK(default_ljung_box_lags(30) == 6);
    CHECK(default_ljung_box_lags(6) == 1);
}

TEST_CASE("acf basics and Bartlett bound") {
    std::vector<double> alt(64);
    for (std::size_t i = 0; i < alt.size(); ++i) alt[i] = (i % 2 == 0) ? 1.0 : -1.0;
    const auto r_alt = acf(alt, 2);
    CHECK(r_alt[0] == 1.0);
    CHECK(r_alt[1] == doctest::Approx(-1.0).epsilon(0.05));

    std::mt19937_64 rng(8);
    int inside = 0, total = 0;
    const int n = 400;
    for (int t = 0; t < 50; ++t) {
        const auto x = testutil::normal_sample(rng, n);
        const auto r = acf(x, 10);
        for (int k = 1; k <= 10; ++k) {
            ++total;
            if (std::abs(r[k]) <= 2.0 / std::sqrt(static_cast<double>(n))) ++inside;
        }
    }
    const double frac = static_cast<double>(inside) / total;
    CHECK(frac > 0.88);  // ~95% expected under the Bartlett bound
}

TEST_CASE("identical samples give KS statistic 0 and p = 1") {
    std::mt19937_64 rng(4);
    const auto x = testutil::normal_sample(rng, 50);
    double stat = -1.0;
    CHECK(ks_two_sample(x, x, &stat) == 1.0);
    CHECK(stat == 0.0);
}

TEST_CASE("rank test size calibration") {
    std::mt19937_64 rng(202);
    const int trials = 4000;
    int rej_w = 0, rej_ab = 0, rej_ks = 0;
    for (int t = 0; t < trials; ++t) {
        const auto a = testutil::normal_sample(rng, 60);
        const auto b = testutil::normal_sample(rng, 60);
        const auto r = rank_tests(a, b);
        if (r.wilcoxon_p < 0.05) ++rej_w;
        if (r.ansari_bradley_p < 0.05) ++rej_ab;
        if (r.ks_p < 0.05) ++rej_ks;
    }
    CHECK(std::abs(rej_w / static_cast<double>(trials) - 0.05) < 0.015);
    CHECK(std::abs(rej_ab / static_cast<double>(trials) - 0.05) < 0.015);
    // asymptotic two-sample KS is conservative at moderate n
    CHECK(rej_ks / static_cast<double>(trials) < 0.065);
    CHECK(rej_ks > 0);
}

TEST_CASE("wilcoxon detects a one-sd location shift") {
    std::mt19937_64 rng(303);
    int rejections = 0;
    const int trials = 200;
    for (int t = 0; t < trials; ++t) {
        const auto a = testutil::normal_sample(rng, 100, 0.0);
        const auto b = testutil::normal_sample(rng, 100, 1.0);
        if (wilcoxon_rank_sum(a, b) < 0.05) ++rejections;
    }
    CHECK(rejections / static_cast<double>(trials) > 0.99);
}

TEST_CASE("ansari-bradley detects a scale change") {
    std::mt19937_64 rng(404);
    int rejections = 0;
    const int trials = 200;
    for (int t = 0; t < trials; ++t) {
        const auto a = testutil::normal_sample(rng, 100, 0.0, 1.0);
        const auto b = testutil::normal_sample(rng, 100, 0.0, 3.0);
        if (ansari_bradley(a, b) < 0.05) ++rejections;
    }
    CHECK(rejections / static_cast<double>(trials) > 0.9);
}

TEST_CASE("KS and wilcoxon are invariant under monotone maps") {
    std::mt19937_64 rng(606);
    const auto a = testutil::normal_sample(rng, 40);
    const auto b = testutil::normal_sample(rng, 55, 0.4);
    auto mapped = [](std::vector<double> v) {
        for (auto& x : v) x = std::exp(0.5 * x) + x;  // strictly increasing
        return v;
    };
    const auto ma = mapped(a), mb = mapped(b);
    double s1, s2;
    CHECK(ks_two_sample(a, b, &s1) == doctest::Approx(ks_two_sample(ma, mb, &s2)).epsilon(1e-12));
    CHECK(s1 == s2);
    CHECK(wilcoxon_rank_sum(a, b) ==
          doctest::Approx(wilcoxon_rank_sum(ma, mb)).epsilon(1e-12));
}

TEST_CASE("degenerate all-tied samples are rejected by the rank tests") {
    const std::vector<double> ties(12, 1.0);
    CHECK_THROWS_AS(wilcoxon_rank_sum(ties, ties), std::domain_error);
    CHECK_THROWS_AS(ansari_bradley(ties, ties), std::domain_error);
}

TEST_CASE("gof report flags and verdicts") {
    std::mt19937_64 rng(909);
    const auto good = testutil::normal_sample(rng, 200, 0.0, 0.02);
    const auto g = gof_report(good);
    CHECK_FALSE(g.degenerate);
    CHECK(g.ljung_box_lags == 10);
    CHECK(g.acf[0] == 1.0);
    CHECK(g.shapiro_wilk_p >= 0.0);
    CHECK(g.shapiro_wilk_p <= 1.0);
    CHECK(g.gbm_ok == (g.shapiro_wilk_p > 0.05 && g.ljung_box_p > 0.05));

    const auto flat = gof_report(std::vector<double>(30, 0.0));
    CHECK(flat.degenerate);
    CHECK_FALSE(flat.gbm_ok);
}

TEST_CASE("similarity protocol separates same and shifted distributions") {
    std::mt19937_64 rng(111);
    const auto actual = testutil::normal_sample(rng, 80);
    std::vector<std::vector<double>> same, shifted;
    for (int i = 0; i < 60; ++i) {
        same.push_back(testutil::normal_sample(rng, 80));
        shifted.push_back(testutil::normal_sample(rng, 80, 2.5));
    }
    const auto rep_same = similarity_protocol(actual, same);
    const auto rep_shift = similarity_protocol(actual, shifted);
    CHECK(rep_same.n_simulations == 60);
    CHECK(rep_same.frac_wilcoxon > 0.8);
    CHECK(rep_same.frac_ks > 0.8);
    CHECK(rep_shift.frac_wilcoxon < 0.1);
    CHECK(rep_shift.frac_ks < 0.1);
}
