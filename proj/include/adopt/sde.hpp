#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "adopt/calibration.hpp"

namespace adopt {

enum class SdeKind { gbm, cev, mrd, cir, hwv };

struct SdeParams {
    double mu = 0.0;     // growth rate (gbm, cev) or mean-reversion level (mrd, cir, hwv)
    double sigma = 0.0;
    double k = 0.0;      // mean-reversion speed (mrd, cir, hwv)
};

struct SdeModel {
    SdeKind kind = SdeKind::gbm;
    std::vector<SdeParams> params;  // one per keyword
};

// Risk-neutral mode replaces the growth rate with r for gbm/cev; the
// mean-reverting kinds keep their level drift (they are only simulated
// under the real-world measure in the experiments).
enum class DriftMode { real, risk_neutral };

struct PathSet {
    int n_keywords = 0;
    int n_paths = 0;
    int n_steps = 0;
    double dt = 0.0;  // years per step
    std::uint64_t seed = 0;
    std::vector<double> values;  // [path][step 0..n_steps][keyword]

    double at(int path, int step, int kw) const {
        return values[(static_cast<std::size_t>(path) * (n_steps + 1) + step) * n_keywords + kw];
    }
};

// Lower-triangular square root of the correlation matrix. Tolerates exact
// degeneracy (zero pivots); throws if the matrix is indefinite beyond
// round-off, which the PSD repair should have removed.
Eigen::MatrixXd corr_factor(const CorrMatrix& corr);

// Correlated standard normals laid out [path][step][keyword].
std::vector<double> sample_correlated_normals(const CorrMatrix& corr, int n_paths, int n_steps,
                                              std::uint64_t seed);

// Exact one-step log-normal terminal sampling; rows are paths.
Eigen::MatrixXd simulate_terminal_gbm(const std::vector<double>& c0, const SdeModel& model,
                                      const CorrMatrix& corr, double T, DriftMode mode, double r,
                                      int n_paths, std::uint64_t seed);

// Euler-Maruyama paths with shared correlated noise. GBM steps in log space;
// square-root diffusions use full truncation and states clamped at zero.
PathSet simulate_path(const std::vector<double>& c0, const SdeModel& model, const CorrMatrix& corr,
                      double T, int n_steps, DriftMode mode, double r, int n_paths,
                      std::uint64_t seed);

// Chunked parallel loop over [0, n); deterministic output requires the body
// to write disjoint slots only.
void parallel_for(std::int64_t n, const std::function<void(std::int64_t, std::int64_t)>& body);

void set_thread_count(int n);
int thread_count();

}  // namespace adopt
