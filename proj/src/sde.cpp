#include "adopt/sde.hpp"

#include <atomic>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <thread>

#include "adopt/rng.hpp"

namespace adopt {

namespace {
std::atomic<int> g_threads{1};
}

void set_thread_count(int n) { g_threads = n < 1 ? 1 : n; }
int thread_count() { return g_threads.load(); }

void parallel_for(std::int64_t n, const std::function<void(std::int64_t, std::int64_t)>& body) {
    const int nt = thread_count();
    if (nt <= 1 || n < 2048) {
        body(0, n);
        return;
    }
    const std::int64_t chunk = (n + nt - 1) / nt;
    std::vector<std::thread> workers;
    for (int t = 0; t < nt; ++t) {
        const std::int64_t b = t * chunk;
        const std::int64_t e = std::min(n, b + chunk);
        if (b >= e) break;
        workers.emplace_back([&body, b, e] { body(b, e); });
    }
    for (auto& w : workers) w.join();
}

Eigen::MatrixXd corr_factor(const CorrMatrix& corr) {
    corr.validate();
    const int n = corr.n();
    Eigen::MatrixXd l = Eigen::MatrixXd::Zero(n, n);
    for (int j = 0; j < n; ++j) {
        double d = corr.rho(j, j);
        for (int k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
        if (d < -1e-8)
            throw std::runtime_error("correlation matrix indefinite; PSD repair required");
        if (d < 1e-12) {
            l(j, j) = 0.0;  // degenerate direction, dependent coordinates
            continue;
        }
        l(j, j) = std::sqrt(d);
        for (int i = j + 1; i < n; ++i) {
            double s = corr.rho(i, j);
            for (int k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
            l(i, j) = s / l(j, j);
        }
    }
    return l;
}

namespace {

// Correlated draw for one (path, step) into z[0..n).
inline void draw_correlated(const Eigen::MatrixXd& factor, std::uint64_t seed, std::int64_t path,
                            std::uint32_t step, double* z) {
    const int n = static_cast<int>(factor.rows());
    double w[64];
    double* wp = w;
    std::vector<double> heap;
    if (n > 64) {
        heap.resize(n);
        wp = heap.data();
    }
    for (int i = 0; i < n; ++i)
        wp[i] = counter_normal(seed, static_cast<std::uint64_t>(path), step,
                               static_cast<std::uint32_t>(i));
    for (int i = 0; i < n; ++i) {
        double s = 0.0;
        for (int k = 0; k <= i; ++k) s += factor(i, k) * wp[k];
        z[i] = s;
    }
}

}  // namespace

std::vector<double> sample_correlated_normals(const CorrMatrix& corr, int n_paths, int n_steps,
                                              std::uint64_t seed) {
    const Eigen::MatrixXd factor = corr_factor(corr);
    const int n = corr.n();
    std::vector<double> out(static_cast<std::size_t>(n_paths) * n_steps * n);
    parallel_for(n_paths, [&](std::int64_t b, std::int64_t e) {
        for (std::int64_t p = b; p < e; ++p)
            for (int s = 0; s < n_steps; ++s)
                draw_correlated(factor, seed, p, static_cast<std::uint32_t>(s),
                                &out[(static_cast<std::size_t>(p) * n_steps + s) * n]);
    });
    return out;
}

Eigen::MatrixXd simulate_terminal_gbm(const std::vector<double>& c0, const SdeModel& model,
                                      const CorrMatrix& corr, double T, DriftMode mode, double r,
                                      int n_paths, std::uint64_t seed) {
    if (model.kind != SdeKind::gbm) throw std::invalid_argument("terminal sampling is GBM-only");
    const int n = static_cast<int>(c0.size());
    if (static_cast<int>(model.params.size()) != n || corr.n() != n)
        throw std::invalid_argument("dimension mismatch");
    if (T <= 0.0) throw std::invalid_argument("T must be positive");
    for (double c : c0)
        if (c <= 0.0) throw std::invalid_argument("initial CPC must be positive");

    const Eigen::MatrixXd factor = corr_factor(corr);
    const double sqrt_t = std::sqrt(T);
    std::vector<double> log_drift(n), vol(n);
    for (int i = 0; i < n; ++i) {
        const double drift = mode == DriftMode::risk_neutral ? r : model.params[i].mu;
        vol[i] = model.params[i].sigma;
        log_drift[i] = (drift - 0.5 * vol[i] * vol[i]) * T;
    }

    Eigen::MatrixXd terminal(n_paths, n);
    parallel_for(n_paths, [&](std::int64_t b, std::int64_t e) {
        std::vector<double> z(n);
        for (std::int64_t p = b; p < e; ++p) {
            draw_correlated(factor, seed, p, 0, z.data());
            for (int i = 0; i < n; ++i)
                terminal(p, i) = c0[i] * std::exp(log_drift[i] + vol[i] * z[i] * sqrt_t);
        }
    });
    return terminal;
}

PathSet simulate_path(const std::vector<double>& c0, const SdeModel& model, const CorrMatrix& corr,
                      double T, int n_steps, DriftMode mode, double r, int n_paths,
                      std::uint64_t seed) {
    const int n = static_cast<int>(c0.size());
    if (static_cast<int>(model.params.size()) != n || corr.n() != n)
        throw std::invalid_argument("dimension mismatch");
    if (n_steps < 1) throw std::invalid_argument("n_steps must be >= 1");
    if (T <= 0.0) throw std::invalid_argument("T must be positive");

    const Eigen::MatrixXd factor = corr_factor(corr);
    const double dt = T / n_steps;
    const double sqrt_dt = std::sqrt(dt);

    PathSet ps;
    ps.n_keywords = n;
    ps.n_paths = n_paths;
    ps.n_steps = n_steps;
    ps.dt = dt;
    ps.seed = seed;
    ps.values.resize(static_cast<std::size_t>(n_paths) * (n_steps + 1) * n);

    parallel_for(n_paths, [&](std::int64_t b, std::int64_t e) {
        std::vector<double> z(n), x(n);
        for (std::int64_t p = b; p < e; ++p) {
            double* row = &ps.values[static_cast<std::size_t>(p) * (n_steps + 1) * n];
            for (int i = 0; i < n; ++i) {
                x[i] = c0[i];
                row[i] = c0[i];
            }
            for (int s = 0; s < n_steps; ++s) {
                draw_correlated(factor, seed, p, static_cast<std::uint32_t>(s), z.data());
                for (int i = 0; i < n; ++i) {
                    const auto& par = model.params[i];
                    const double growth =
                        mode == DriftMode::risk_neutral ? r : par.mu;
                    double next;
                    switch (model.kind) {
                        case SdeKind::gbm:
                            // same operation order as the terminal sampler so a
                            // 1-step path is bit-identical to it
                            next = x[i] * std::exp((growth - 0.5 * par.sigma * par.sigma) * dt +
                                                   par.sigma * z[i] * sqrt_dt);
                            break;
                        case SdeKind::cev:
                            next = x[i] + growth * x[i] * dt +
                                   par.sigma * std::sqrt(std::max(x[i], 0.0)) * sqrt_dt * z[i];
                            next = std::max(next, 0.0);
                            break;
                        case SdeKind::mrd:
                            next = x[i] + par.k * (par.mu - x[i]) * dt +
                                   par.sigma * std::sqrt(std::max(x[i], 0.0)) * sqrt_dt * z[i];
                            next = std::max(next, 0.0);
                            break;
                        case SdeKind::cir:
                            next = x[i] + par.k * (par.mu - x[i]) * dt +
                                   std::sqrt(par.sigma) * std::max(x[i], 0.0) * sqrt_dt * z[i];
                            next = std::max(next, 0.0);
                            break;
                        case SdeKind::hwv:
                            next = x[i] + par.k * (par.mu - x[i]) * dt + par.sigma * sqrt_dt * z[i];
                            break;
                        default:
                            throw std::logic_error("unknown SDE kind");
                    }
                    x[i] = next;
                    row[(s + 1) * n + i] = next;
                }
            }
        }
    });
    return ps;
}

}  // namespace adopt
