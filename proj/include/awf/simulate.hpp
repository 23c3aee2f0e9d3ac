#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "awf/boundary.hpp"
#include "awf/pl_fn.hpp"

namespace awf {

struct SimConfig {
    std::size_t d = 1;
    double grid_resolution = 64.0;  // grid points per unit time, >= 2
    std::size_t n_paths = 10000;
    std::uint64_t seed = 0;
    std::size_t chunk_size = 8192;  // fixed work-unit size; never affects results
};

struct MCEstimate {
    double p_hat = 0.0;
    double stderr_value = 0.0;
    std::size_t n_paths = 0;
    double grid_resolution = 0.0;
    std::uint64_t seed = 0;
    std::string method;  // "plain" | "separable_fast" | "girsanov"
};

// Worker cap: the AWF_THREADS environment variable when set (must be a
// positive integer), otherwise the hardware concurrency.  Thread count never
// changes any estimate: work is split into fixed chunks keyed by path index
// and partials are folded in chunk order.
std::size_t effective_threads();

// One axis worth of discrete Wiener paths on the uniform grid over
// [0, horizon]: row-major n_paths x points, W(0) = 0, increments N(0, dt).
struct PathBatch {
    std::size_t n_paths = 0;
    std::size_t points = 0;
    double dt = 0.0;
    std::vector<double> w;

    double at(std::size_t path, std::size_t k) const { return w[path * points + k]; }
};

PathBatch sample_component_paths(const SimConfig& config, double horizon,
                                 std::size_t axis);

struct CovarianceCheck {
    std::vector<double> s, t;
    double expected = 0.0;
    double empirical = 0.0;
    double z = 0.0;
};

struct CovarianceReport {
    bool pass = true;
    std::vector<CovarianceCheck> checks;
};

// Empirical covariance of the summed field at probe pairs against
// sum_i min(s_i, t_i); probe coordinates snap to the simulation grid.
CovarianceReport covariance_selftest(
    const SimConfig& config, double horizon,
    const std::vector<std::pair<std::vector<double>, std::vector<double>>>& probes);

// Indicator estimate of P(W + f <= u at every grid point of [0,T]^d).
// Constant and SumSeparable boundaries use the separable reduction (the grid
// event equals: sum_i max_k (W_i + f_i - u_i)(t_k) <= c); Tabulated boundaries
// are checked on the full product grid (d <= 3).
MCEstimate noncross_mc(const AdditiveFn& f, const Boundary& u, const SimConfig& config);

// Full product-grid check regardless of boundary kind (d <= 3): validation
// reference for the separable reduction.
MCEstimate noncross_mc_fullgrid(const AdditiveFn& f, const Boundary& u,
                                const SimConfig& config);

// Importance-sampled estimate: driftless paths, the no-trend indicator, and
// the change-of-measure weight exp(sum_ij f_i'(cell_j) dW_ij - qv/2) with qv
// the discrete quadratic variation sum_ij f_i'(cell_j)^2 dt, which makes the
// estimator unbiased for the same grid event as noncross_mc.
MCEstimate girsanov_estimator(const AdditiveFn& f, const Boundary& u,
                              const SimConfig& config);

// Per-path indicators (diagnostics; single-threaded).
std::vector<std::uint8_t> noncross_indicators(const AdditiveFn& f, const Boundary& u,
                                              const SimConfig& config, bool full_grid);

// Closed-form checks.
double oracle_bm_max(double u, double T);                       // P(max W <= u)
double oracle_drifted_noncross(double u, double c, double T);   // P(max W + ct <= u)
double oracle_additive2_const(double u, double T1, double T2);  // P(M1 + M2 <= u)

}  // namespace awf
