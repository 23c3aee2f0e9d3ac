#include "awf/simulate.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "awf/normal.hpp"
#include "awf/philox.hpp"

namespace awf {

std::size_t effective_threads() {
    if (const char* env = std::getenv("AWF_THREADS")) {
        char* end = nullptr;
        const unsigned long long v = std::strtoull(env, &end, 10);
        if (end == env || *end != '\0' || v == 0)
            throw std::invalid_argument("AWF_THREADS must be a positive integer");
        return std::size_t(v);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

namespace {

void validate_config(const SimConfig& config) {
    if (config.d == 0) throw std::invalid_argument("dimension must be positive");
    if (!(config.grid_resolution >= 2.0))
        throw std::invalid_argument("grid_resolution must be at least 2 per unit time");
    if (config.n_paths == 0) throw std::invalid_argument("n_paths must be positive");
    if (config.chunk_size == 0) throw std::invalid_argument("chunk_size must be positive");
}

std::string gib_string(double bytes) {
    std::ostringstream os;
    os.precision(2);
    os << std::fixed << bytes / (1024.0 * 1024.0 * 1024.0) << " GiB";
    return os.str();
}

// Uniform simulation grid: steps cells of width horizon/steps.
std::size_t grid_steps(double horizon, double resolution) {
    if (!(horizon > 0.0)) throw std::invalid_argument("horizon must be positive");
    const long long m = std::llround(horizon * resolution);
    return std::size_t(std::max(1ll, m));
}

// Everything an estimator needs, tabulated once on the simulation grid.
struct RunSetup {
    double T = 0.0;
    std::size_t steps = 0;  // grid has steps+1 points
    double dt = 0.0;
    double sqrt_dt = 0.0;
    std::size_t d = 0;
    bool separable = false;
    double level = 0.0;                          // c for the separable event
    std::vector<std::vector<double>> drift;      // f_i - u_i per grid point (separable)
    std::vector<std::vector<double>> trend;      // f_i per grid point (full grid)
    std::vector<double> boundary_grid;           // u on the product grid (full grid)
    std::vector<std::vector<double>> cell_slope; // f_i' per cell (girsanov)
    double quad_var = 0.0;                       // sum_ij f_i'(cell)^2 dt
};

double max_horizon(const AdditiveFn& f, const Boundary& u) {
    double T = u.horizon();
    for (const auto& c : f.components) T = std::max(T, c.horizon());
    return T;
}

RunSetup prepare(const AdditiveFn& f, const Boundary& u, const SimConfig& config,
                 bool force_full_grid, bool with_slopes) {
    validate_config(config);
    if (config.d != f.dim())
        throw std::invalid_argument("config dimension does not match the trend");
    if (const auto bd = u.dimension(); bd && *bd != f.dim())
        throw std::invalid_argument("boundary dimension does not match the trend");

    RunSetup s;
    s.d = f.dim();
    s.T = max_horizon(f, u);
    s.steps = grid_steps(s.T, config.grid_resolution);
    s.dt = s.T / double(s.steps);
    s.sqrt_dt = std::sqrt(s.dt);
    s.separable = !force_full_grid && u.kind != Boundary::Kind::Tabulated;

    const std::size_t points = s.steps + 1;
    if (s.separable) {
        s.level = u.c;
        s.drift.assign(s.d, std::vector<double>(points));
        for (std::size_t i = 0; i < s.d; ++i)
            for (std::size_t k = 0; k < points; ++k) {
                const double t = double(k) * s.dt;
                double v = eval_scalar(f.components[i], t);
                if (u.kind == Boundary::Kind::SumSeparable)
                    v -= eval_scalar(u.profiles[i], t);
                s.drift[i][k] = v;
            }
    } else {
        if (s.d > 3)
            throw std::invalid_argument("full-grid check supports at most 3 axes");
        const double cells = std::pow(double(points), double(s.d));
        const double bytes = cells * sizeof(double);
        if (bytes > double(std::size_t(1) << 30))
            throw std::runtime_error("full-grid boundary table needs about " +
                                     gib_string(bytes) +
                                     "; exceeds 1.00 GiB - reduce grid_resolution");
        s.trend.assign(s.d, std::vector<double>(points));
        for (std::size_t i = 0; i < s.d; ++i)
            for (std::size_t k = 0; k < points; ++k)
                s.trend[i][k] = eval_scalar(f.components[i], double(k) * s.dt);
        s.boundary_grid.resize(std::size_t(cells));
        std::vector<double> t(s.d, 0.0);
        std::vector<std::size_t> idx(s.d, 0);
        for (std::size_t flat = 0; flat < s.boundary_grid.size(); ++flat) {
            std::size_t rem = flat;
            for (std::size_t i = s.d; i-- > 0;) {
                idx[i] = rem % points;
                rem /= points;
                t[i] = double(idx[i]) * s.dt;
            }
            s.boundary_grid[flat] = u.evaluate(t);
        }
    }

    if (with_slopes) {
        s.cell_slope.assign(s.d, std::vector<double>(s.steps));
        for (std::size_t i = 0; i < s.d; ++i) {
            const StepFunction st = derivative_steps(f.components[i]);
            std::size_t piece = 0;
            for (std::size_t k = 0; k < s.steps; ++k) {
                const double left = double(k) * s.dt;
                while (piece + 1 < st.breakpoints.size() &&
                       st.breakpoints[piece + 1] <= left)
                    ++piece;
                s.cell_slope[i][k] = st.slopes[piece];
                s.quad_var += st.slopes[piece] * st.slopes[piece] * s.dt;
            }
        }
    }
    return s;
}

// Runs fn(chunk_index, first_path, last_path) over fixed chunks, claimed by an
// atomic cursor across at most effective_threads() workers.
template <typename Fn>
void run_chunks(std::size_t n_paths, std::size_t chunk_size, const Fn& fn) {
    const std::size_t n_chunks = (n_paths + chunk_size - 1) / chunk_size;
    const std::size_t workers = std::min(effective_threads(), n_chunks);
    std::atomic<std::size_t> cursor{0};
    const auto worker = [&] {
        for (;;) {
            const std::size_t c = cursor.fetch_add(1);
            if (c >= n_chunks) return;
            const std::size_t first = c * chunk_size;
            const std::size_t last = std::min(n_paths, first + chunk_size);
            fn(c, first, last);
        }
    };
    if (workers <= 1) {
        worker();
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t i = 0; i < workers; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
}

// Separable event statistic: sum over axes of the running maximum of
// W_i + drift_i on the grid.  Returns the per-path indicator.
bool separable_indicator(const RunSetup& s, std::uint64_t seed, std::size_t path) {
    double total = 0.0;
    for (std::size_t i = 0; i < s.d; ++i) {
        NormalStream ns(seed, path * s.d + i);
        const double* drift = s.drift[i].data();
        double w = 0.0, best = drift[0];
        for (std::size_t k = 1; k <= s.steps; ++k) {
            w += s.sqrt_dt * ns.next_normal();
            const double v = w + drift[k];
            if (v > best) best = v;
        }
        total += best;
    }
    return total <= s.level;
}

// Full product-grid indicator for W + trend <= boundary.
bool fullgrid_indicator(const RunSetup& s, std::uint64_t seed, std::size_t path,
                        std::vector<double>& scratch) {
    const std::size_t points = s.steps + 1;
    scratch.resize(s.d * points);
    for (std::size_t i = 0; i < s.d; ++i) {
        NormalStream ns(seed, path * s.d + i);
        double* a = scratch.data() + i * points;
        double w = 0.0;
        a[0] = s.trend[i][0];
        for (std::size_t k = 1; k <= s.steps; ++k) {
            w += s.sqrt_dt * ns.next_normal();
            a[k] = w + s.trend[i][k];
        }
    }
    const double* u = s.boundary_grid.data();
    if (s.d == 1) {
        const double* a = scratch.data();
        for (std::size_t k = 0; k < points; ++k)
            if (a[k] > u[k]) return false;
        return true;
    }
    if (s.d == 2) {
        const double* a0 = scratch.data();
        const double* a1 = scratch.data() + points;
        for (std::size_t k0 = 0; k0 < points; ++k0) {
            const double base = a0[k0];
            const double* row = u + k0 * points;
            for (std::size_t k1 = 0; k1 < points; ++k1)
                if (base + a1[k1] > row[k1]) return false;
        }
        return true;
    }
    const double* a0 = scratch.data();
    const double* a1 = scratch.data() + points;
    const double* a2 = scratch.data() + 2 * points;
    for (std::size_t k0 = 0; k0 < points; ++k0)
        for (std::size_t k1 = 0; k1 < points; ++k1) {
            const double base = a0[k0] + a1[k1];
            const double* row = u + (k0 * points + k1) * points;
            for (std::size_t k2 = 0; k2 < points; ++k2)
                if (base + a2[k2] > row[k2]) return false;
        }
    return true;
}

MCEstimate indicator_estimate(const AdditiveFn& f, const Boundary& u,
                              const SimConfig& config, bool force_full_grid) {
    const RunSetup s = prepare(f, u, config, force_full_grid, false);
    const std::size_t n_chunks = (config.n_paths + config.chunk_size - 1) / config.chunk_size;
    std::vector<std::uint64_t> hits(n_chunks, 0);

    run_chunks(config.n_paths, config.chunk_size,
               [&](std::size_t c, std::size_t first, std::size_t last) {
                   std::uint64_t h = 0;
                   std::vector<double> scratch;
                   for (std::size_t p = first; p < last; ++p) {
                       const bool ok = s.separable
                                           ? separable_indicator(s, config.seed, p)
                                           : fullgrid_indicator(s, config.seed, p, scratch);
                       h += ok ? 1 : 0;
                   }
                   hits[c] = h;
               });

    std::uint64_t total = 0;
    for (std::uint64_t h : hits) total += h;  // integer fold: order-independent

    MCEstimate est;
    est.p_hat = double(total) / double(config.n_paths);
    est.stderr_value =
        std::sqrt(est.p_hat * (1.0 - est.p_hat) / double(config.n_paths));
    est.n_paths = config.n_paths;
    est.grid_resolution = config.grid_resolution;
    est.seed = config.seed;
    est.method = s.separable ? "separable_fast" : "plain";
    return est;
}

}  // namespace

PathBatch sample_component_paths(const SimConfig& config, double horizon,
                                 std::size_t axis) {
    validate_config(config);
    if (axis >= config.d) throw std::invalid_argument("axis index out of range");
    const std::size_t steps = grid_steps(horizon, config.grid_resolution);
    const std::size_t points = steps + 1;
    const double bytes = double(config.n_paths) * double(points) * sizeof(double);
    if (bytes > double(std::size_t(2) << 30))
        throw std::runtime_error("path batch needs about " + gib_string(bytes) +
                                 "; exceeds 2.00 GiB - reduce n_paths or "
                                 "grid_resolution");

    PathBatch batch;
    batch.n_paths = config.n_paths;
    batch.points = points;
    batch.dt = horizon / double(steps);
    batch.w.assign(config.n_paths * points, 0.0);
    const double sdt = std::sqrt(batch.dt);

    run_chunks(config.n_paths, config.chunk_size,
               [&](std::size_t, std::size_t first, std::size_t last) {
                   for (std::size_t p = first; p < last; ++p) {
                       NormalStream ns(config.seed, p * config.d + axis);
                       double* row = batch.w.data() + p * points;
                       double w = 0.0;
                       for (std::size_t k = 1; k < points; ++k) {
                           w += sdt * ns.next_normal();
                           row[k] = w;
                       }
                   }
               });
    return batch;
}

CovarianceReport covariance_selftest(
    const SimConfig& config, double horizon,
    const std::vector<std::pair<std::vector<double>, std::vector<double>>>& probes) {
    validate_config(config);
    const std::size_t steps = grid_steps(horizon, config.grid_resolution);
    const double dt = horizon / double(steps);

    // Snap every probe coordinate to the grid.
    const auto snap = [&](double t) {
        const long long k = std::llround(t / dt);
        return std::size_t(std::clamp(k, 0ll, (long long)steps));
    };

    struct ProbeIdx {
        std::vector<std::size_t> s, t;
        double expected = 0.0;
    };
    std::vector<ProbeIdx> idx(probes.size());
    for (std::size_t q = 0; q < probes.size(); ++q) {
        const auto& [ps, pt] = probes[q];
        if (ps.size() != config.d || pt.size() != config.d)
            throw std::invalid_argument("probe dimension mismatch");
        idx[q].s.resize(config.d);
        idx[q].t.resize(config.d);
        for (std::size_t i = 0; i < config.d; ++i) {
            idx[q].s[i] = snap(ps[i]);
            idx[q].t[i] = snap(pt[i]);
            idx[q].expected +=
                std::min(double(idx[q].s[i]), double(idx[q].t[i])) * dt;
        }
    }

    // Accumulate sum of X(s)X(t) per probe, chunk by chunk.
    const std::size_t n_chunks = (config.n_paths + config.chunk_size - 1) / config.chunk_size;
    std::vector<std::vector<double>> partial(n_chunks,
                                             std::vector<double>(probes.size(), 0.0));
    run_chunks(config.n_paths, config.chunk_size,
               [&](std::size_t cidx, std::size_t first, std::size_t last) {
                   std::vector<double> xs(probes.size()), xt(probes.size());
                   std::vector<double> wpath(steps + 1);
                   for (std::size_t p = first; p < last; ++p) {
                       std::fill(xs.begin(), xs.end(), 0.0);
                       std::fill(xt.begin(), xt.end(), 0.0);
                       for (std::size_t i = 0; i < config.d; ++i) {
                           NormalStream ns(config.seed, p * config.d + i);
                           double w = 0.0;
                           wpath[0] = 0.0;
                           for (std::size_t k = 1; k <= steps; ++k) {
                               w += std::sqrt(dt) * ns.next_normal();
                               wpath[k] = w;
                           }
                           for (std::size_t q = 0; q < probes.size(); ++q) {
                               xs[q] += wpath[idx[q].s[i]];
                               xt[q] += wpath[idx[q].t[i]];
                           }
                       }
                       for (std::size_t q = 0; q < probes.size(); ++q)
                           partial[cidx][q] += xs[q] * xt[q];
                   }
               });

    CovarianceReport rep;
    for (std::size_t q = 0; q < probes.size(); ++q) {
        double sum = 0.0;
        for (std::size_t cidx = 0; cidx < n_chunks; ++cidx) sum += partial[cidx][q];
        CovarianceCheck chk;
        chk.s = probes[q].first;
        chk.t = probes[q].second;
        chk.expected = idx[q].expected;
        chk.empirical = sum / double(config.n_paths);
        double var_ss = 0.0, var_tt = 0.0;
        for (std::size_t i = 0; i < config.d; ++i) {
            var_ss += double(idx[q].s[i]) * dt;
            var_tt += double(idx[q].t[i]) * dt;
        }
        const double var_product = var_ss * var_tt + chk.expected * chk.expected;
        const double se = std::sqrt(var_product / double(config.n_paths));
        chk.z = se > 0.0 ? (chk.empirical - chk.expected) / se : 0.0;
        if (std::abs(chk.z) > 5.0) rep.pass = false;
        rep.checks.push_back(std::move(chk));
    }
    return rep;
}

MCEstimate noncross_mc(const AdditiveFn& f, const Boundary& u, const SimConfig& config) {
    return indicator_estimate(f, u, config, false);
}

MCEstimate noncross_mc_fullgrid(const AdditiveFn& f, const Boundary& u,
                                const SimConfig& config) {
    return indicator_estimate(f, u, config, true);
}

MCEstimate girsanov_estimator(const AdditiveFn& f, const Boundary& u,
                              const SimConfig& config) {
    // Indicator of the no-trend event, weighted by the discrete
    // change-of-measure density of the trend shift.
    const AdditiveFn zero = zero_like(f);
    const RunSetup s = prepare(f, u, config, false, true);
    const RunSetup s0 = prepare(zero, u, config, false, false);

    const std::size_t n_chunks = (config.n_paths + config.chunk_size - 1) / config.chunk_size;
    std::vector<double> sum_q(n_chunks, 0.0), sum_q2(n_chunks, 0.0);

    run_chunks(config.n_paths, config.chunk_size,
               [&](std::size_t c, std::size_t first, std::size_t last) {
                   double sq = 0.0, sq2 = 0.0;
                   std::vector<double> scratch;
                   for (std::size_t p = first; p < last; ++p) {
                       double log_w = -0.5 * s.quad_var;
                       bool inside;
                       if (s0.separable) {
                           double total = 0.0;
                           for (std::size_t i = 0; i < s0.d; ++i) {
                               NormalStream ns(config.seed, p * s0.d + i);
                               const double* drift = s0.drift[i].data();
                               const double* slope = s.cell_slope[i].data();
                               double w = 0.0, best = drift[0];
                               for (std::size_t k = 1; k <= s0.steps; ++k) {
                                   const double dw = s0.sqrt_dt * ns.next_normal();
                                   w += dw;
                                   log_w += slope[k - 1] * dw;
                                   const double v = w + drift[k];
                                   if (v > best) best = v;
                               }
                               total += best;
                           }
                           inside = total <= s0.level;
                       } else {
                           // Full-grid indicator on driftless paths; weight
                           // accumulated from the same increments.
                           const std::size_t points = s0.steps + 1;
                           scratch.resize(s0.d * points);
                           for (std::size_t i = 0; i < s0.d; ++i) {
                               NormalStream ns(config.seed, p * s0.d + i);
                               double* a = scratch.data() + i * points;
                               const double* slope = s.cell_slope[i].data();
                               double w = 0.0;
                               a[0] = 0.0;
                               for (std::size_t k = 1; k <= s0.steps; ++k) {
                                   const double dw = s0.sqrt_dt * ns.next_normal();
                                   w += dw;
                                   log_w += slope[k - 1] * dw;
                                   a[k] = w;
                               }
                           }
                           inside = true;
                           const double* ug = s0.boundary_grid.data();
                           const std::size_t points_n = points;
                           if (s0.d == 1) {
                               for (std::size_t k = 0; k < points_n && inside; ++k)
                                   if (scratch[k] > ug[k]) inside = false;
                           } else if (s0.d == 2) {
                               const double* a0 = scratch.data();
                               const double* a1 = scratch.data() + points_n;
                               for (std::size_t k0 = 0; k0 < points_n && inside; ++k0) {
                                   const double* row = ug + k0 * points_n;
                                   for (std::size_t k1 = 0; k1 < points_n; ++k1)
                                       if (a0[k0] + a1[k1] > row[k1]) {
                                           inside = false;
                                           break;
                                       }
                               }
                           } else {
                               const double* a0 = scratch.data();
                               const double* a1 = scratch.data() + points_n;
                               const double* a2 = scratch.data() + 2 * points_n;
                               for (std::size_t k0 = 0; k0 < points_n && inside; ++k0)
                                   for (std::size_t k1 = 0; k1 < points_n && inside; ++k1) {
                                       const double base = a0[k0] + a1[k1];
                                       const double* row =
                                           ug + (k0 * points_n + k1) * points_n;
                                       for (std::size_t k2 = 0; k2 < points_n; ++k2)
                                           if (base + a2[k2] > row[k2]) {
                                               inside = false;
                                               break;
                                           }
                                   }
                           }
                       }
                       const double q = inside ? std::exp(log_w) : 0.0;
                       sq += q;
                       sq2 += q * q;
                   }
                   sum_q[c] = sq;
                   sum_q2[c] = sq2;
               });

    double sq = 0.0, sq2 = 0.0;
    for (std::size_t c = 0; c < n_chunks; ++c) {  // fixed fold order
        sq += sum_q[c];
        sq2 += sum_q2[c];
    }
    const double n = double(config.n_paths);
    MCEstimate est;
    est.p_hat = sq / n;
    const double var =
        config.n_paths > 1 ? std::max(0.0, (sq2 - n * est.p_hat * est.p_hat) / (n - 1.0))
                           : 0.0;
    est.stderr_value = std::sqrt(var / n);
    est.n_paths = config.n_paths;
    est.grid_resolution = config.grid_resolution;
    est.seed = config.seed;
    est.method = "girsanov";
    return est;
}

std::vector<std::uint8_t> noncross_indicators(const AdditiveFn& f, const Boundary& u,
                                              const SimConfig& config, bool full_grid) {
    const RunSetup s = prepare(f, u, config, full_grid, false);
    std::vector<std::uint8_t> out(config.n_paths);
    std::vector<double> scratch;
    for (std::size_t p = 0; p < config.n_paths; ++p)
        out[p] = s.separable ? separable_indicator(s, config.seed, p)
                             : fullgrid_indicator(s, config.seed, p, scratch);
    return out;
}

double oracle_bm_max(double u, double T) {
    if (!(u > 0.0) || !(T > 0.0))
        throw std::invalid_argument("oracle needs positive level and horizon");
    return 2.0 * normal_cdf(u / std::sqrt(T)) - 1.0;
}

double oracle_drifted_noncross(double u, double c, double T) {
    if (!(u > 0.0) || !(T > 0.0))
        throw std::invalid_argument("oracle needs positive level and horizon");
    const double rt = std::sqrt(T);
    return normal_cdf((u - c * T) / rt) -
           std::exp(2.0 * c * u) * normal_cdf((-u - c * T) / rt);
}

namespace {

// Adaptive Simpson quadrature with strict depth cap.
double simpson(double a, double b, double fa, double fm, double fb) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

template <typename F>
double adaptive_simpson(const F& fn, double a, double fa, double b, double fb, double m,
                        double fm, double whole, double tol, int depth) {
    if (depth > 48) throw std::runtime_error("quadrature failed to reach tolerance");
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = fn(lm), frm = fn(rm);
    const double left = simpson(a, m, fa, flm, fm);
    const double right = simpson(m, b, fm, frm, fb);
    if (std::abs(left + right - whole) <= 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return adaptive_simpson(fn, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth + 1) +
           adaptive_simpson(fn, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth + 1);
}

}  // namespace

double oracle_additive2_const(double u, double T1, double T2) {
    if (!(u > 0.0) || !(T1 > 0.0) || !(T2 > 0.0))
        throw std::invalid_argument("oracle needs positive level and horizons");
    const double s1 = std::sqrt(T1), s2 = std::sqrt(T2);
    // Density of max W on [0,T1] is half-normal; convolve with the CDF of the
    // second axis maximum.
    const auto fn = [&](double x) {
        return (2.0 / s1) * normal_pdf(x / s1) *
               (2.0 * normal_cdf((u - x) / s2) - 1.0);
    };
    const double a = 0.0, b = u, m = 0.5 * u;
    const double fa = fn(a), fb = fn(b), fm = fn(m);
    const double whole = simpson(a, b, fa, fm, fb);
    return adaptive_simpson(fn, a, fa, b, fb, m, fm, whole, 1e-10, 0);
}

}  // namespace awf
