#include "awf/cone.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <vector>

namespace awf {

ScalarPLF lcm_scalar(const ScalarPLF& f) {
    const auto& kx = f.grid.knots;
    const auto& fy = f.values;
    const std::size_t n = kx.size();
    constexpr double kSlopeTol = 1e-12;

    // Upper convex hull of the knot points; (0,0) is the anchor and is never
    // popped.  Popping on near-equal slopes keeps the sparsest vertex set.
    std::vector<std::size_t> hull;
    hull.reserve(n);
    hull.push_back(0);
    for (std::size_t i = 1; i < n; ++i) {
        while (hull.size() >= 2) {
            const std::size_t b = hull.back(), a = hull[hull.size() - 2];
            const double s_ab = (fy[b] - fy[a]) / (kx[b] - kx[a]);
            const double s_bi = (fy[i] - fy[b]) / (kx[i] - kx[b]);
            if (s_bi >= s_ab - kSlopeTol)
                hull.pop_back();  // b lies on or below the chord a -> i
            else
                break;
        }
        hull.push_back(i);
    }

    // Hull slopes decrease left to right, so the vertex values are unimodal.
    // Cut at the first vertex attaining the maximum and extend flat: this is
    // the cheapest way to force a non-negative derivative.
    std::size_t peak = 0;
    for (std::size_t h = 1; h < hull.size(); ++h)
        if (fy[hull[h]] > fy[hull[peak]]) peak = h;

    std::vector<double> gk, gv;
    gk.reserve(peak + 2);
    gv.reserve(peak + 2);
    for (std::size_t h = 0; h <= peak; ++h) {
        gk.push_back(kx[hull[h]]);
        gv.push_back(fy[hull[h]]);
    }
    if (gk.back() < kx.back()) {
        gk.push_back(kx.back());
        gv.push_back(gv.back());
    }
    return ScalarPLF{Grid{std::move(gk)}, std::move(gv)};
}

ScalarPLF polar_scalar(const ScalarPLF& f) {
    const ScalarPLF g = lcm_scalar(f);
    std::vector<double> vals(f.values.size());
    for (std::size_t i = 0; i < f.values.size(); ++i)
        vals[i] = f.values[i] - eval_scalar(g, f.grid.knots[i]);
    vals[0] = 0.0;
    return ScalarPLF{f.grid, std::move(vals)};
}

ConeDecomposition project_additive(const AdditiveFn& f) {
    if (f.dim() == 0)
        throw std::invalid_argument("additive function needs at least one component");
    ConeDecomposition d;
    d.majorant.components.reserve(f.dim());
    d.polar.components.reserve(f.dim());
    for (const auto& c : f.components) {
        d.majorant.components.push_back(lcm_scalar(c));
        d.polar.components.push_back(polar_scalar(c));
    }
    d.norm_majorant = norm_additive(d.majorant);
    d.norm_polar = norm_additive(d.polar);
    d.orthogonality_residual = std::abs(inner_additive(d.majorant, d.polar));
    return d;
}

namespace {

// Dense row-major matrix of constraint gradients for the oracle QP.
struct QpProblem {
    std::size_t m = 0;               // number of slope variables
    std::vector<double> delta;       // cell widths (diag(Q) = 2*delta)
    std::vector<std::vector<double>> rows;  // constraint gradients a_i
    std::vector<double> rhs;                // constraints a_i . s >= rhs_i
};

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
    return acc;
}

// Solve the equality-constrained subproblem min s.Q.s/2 with A_W s = b_W via
// the Schur complement A_W Q^-1 A_W^T (SPD while the working set stays
// independent, which blocking-constraint selection guarantees).
void solve_working_set(const QpProblem& qp, const std::vector<std::size_t>& ws,
                       std::vector<double>& s_star, std::vector<double>& lambda) {
    const std::size_t p = ws.size();
    s_star.assign(qp.m, 0.0);
    lambda.assign(p, 0.0);
    if (p == 0) return;

    std::vector<double> schur(p * p, 0.0);
    for (std::size_t r = 0; r < p; ++r)
        for (std::size_t c = 0; c <= r; ++c) {
            double acc = 0.0;
            const auto& ar = qp.rows[ws[r]];
            const auto& ac = qp.rows[ws[c]];
            for (std::size_t j = 0; j < qp.m; ++j)
                acc += ar[j] * ac[j] / (2.0 * qp.delta[j]);
            schur[r * p + c] = acc;
            schur[c * p + r] = acc;
        }

    // In-place Cholesky.
    double max_diag = 0.0;
    for (std::size_t i = 0; i < p; ++i) max_diag = std::max(max_diag, schur[i * p + i]);
    for (std::size_t i = 0; i < p; ++i) {
        for (std::size_t jc = 0; jc <= i; ++jc) {
            double acc = schur[i * p + jc];
            for (std::size_t kk = 0; kk < jc; ++kk)
                acc -= schur[i * p + kk] * schur[jc * p + kk];
            if (i == jc) {
                if (acc <= 1e-13 * std::max(1.0, max_diag))
                    throw std::runtime_error(
                        "projection oracle: degenerate working set");
                schur[i * p + i] = std::sqrt(acc);
            } else {
                schur[i * p + jc] = acc / (schur[jc * p + jc]);
            }
        }
    }

    for (std::size_t i = 0; i < p; ++i) lambda[i] = qp.rhs[ws[i]];
    for (std::size_t i = 0; i < p; ++i) {
        double acc = lambda[i];
        for (std::size_t jc = 0; jc < i; ++jc) acc -= schur[i * p + jc] * lambda[jc];
        lambda[i] = acc / schur[i * p + i];
    }
    for (std::size_t ii = p; ii-- > 0;) {
        double acc = lambda[ii];
        for (std::size_t jc = ii + 1; jc < p; ++jc) acc -= schur[jc * p + ii] * lambda[jc];
        lambda[ii] = acc / schur[ii * p + ii];
    }

    for (std::size_t r = 0; r < p; ++r)
        for (std::size_t j = 0; j < qp.m; ++j)
            s_star[j] += qp.rows[ws[r]][j] * lambda[r];
    for (std::size_t j = 0; j < qp.m; ++j) s_star[j] /= 2.0 * qp.delta[j];
}

}  // namespace

ScalarPLF qp_oracle_projection(const ScalarPLF& f, double tolerance) {
    const auto& kx = f.grid.knots;
    const auto& fy = f.values;
    const std::size_t n = kx.size();
    if (n > 64) throw std::invalid_argument("projection oracle accepts at most 64 knots");
    if (!(tolerance > 0.0)) throw std::invalid_argument("tolerance must be positive");
    const std::size_t m = n - 1;

    QpProblem qp;
    qp.m = m;
    qp.delta.resize(m);
    for (std::size_t j = 0; j < m; ++j) qp.delta[j] = kx[j + 1] - kx[j];
    // Non-increasing slopes, final slope >= 0, running integral >= f at knots.
    for (std::size_t j = 0; j + 1 < m; ++j) {
        std::vector<double> row(m, 0.0);
        row[j] = 1.0;
        row[j + 1] = -1.0;
        qp.rows.push_back(std::move(row));
        qp.rhs.push_back(0.0);
    }
    {
        std::vector<double> row(m, 0.0);
        row[m - 1] = 1.0;
        qp.rows.push_back(std::move(row));
        qp.rhs.push_back(0.0);
    }
    for (std::size_t kknot = 1; kknot < n; ++kknot) {
        std::vector<double> row(m, 0.0);
        for (std::size_t j = 0; j < kknot; ++j) row[j] = qp.delta[j];
        qp.rows.push_back(std::move(row));
        qp.rhs.push_back(fy[kknot]);
    }
    const std::size_t nc = qp.rows.size();

    // Feasible start: the best constant slope.
    double s0 = 0.0;
    for (std::size_t kknot = 1; kknot < n; ++kknot)
        s0 = std::max(s0, fy[kknot] / kx[kknot]);
    std::vector<double> s(m, s0);

    std::vector<std::size_t> ws;
    std::vector<bool> in_ws(nc, false);
    std::vector<double> s_star, lambda, p_dir(m);

    const std::size_t max_iters = 100 * (m + 2);
    for (std::size_t iter = 0; iter < max_iters; ++iter) {
        solve_working_set(qp, ws, s_star, lambda);

        double step_norm = 0.0;
        for (std::size_t j = 0; j < m; ++j) {
            p_dir[j] = s_star[j] - s[j];
            step_norm = std::max(step_norm, std::abs(p_dir[j]));
        }

        const double scale = 1.0 + std::abs(s0);
        if (step_norm <= 1e-13 * scale) {
            // Stationary on the working set: check multiplier signs.
            double worst = -tolerance;
            std::size_t worst_idx = nc;
            for (std::size_t r = 0; r < ws.size(); ++r)
                if (lambda[r] < worst) {
                    worst = lambda[r];
                    worst_idx = r;
                }
            if (worst_idx == nc) {
                std::vector<double> vals(n, 0.0);
                for (std::size_t kknot = 1; kknot < n; ++kknot)
                    vals[kknot] = vals[kknot - 1] + s[kknot - 1] * qp.delta[kknot - 1];
                return ScalarPLF{f.grid, std::move(vals)};
            }
            in_ws[ws[worst_idx]] = false;
            ws.erase(ws.begin() + std::ptrdiff_t(worst_idx));
            continue;
        }

        // Largest feasible step toward the subproblem solution.
        double alpha = 1.0;
        std::size_t blocking = nc;
        for (std::size_t i = 0; i < nc; ++i) {
            if (in_ws[i]) continue;
            const double adp = dot(qp.rows[i], p_dir);
            if (adp >= -1e-12 * scale) continue;
            const double slack = dot(qp.rows[i], s) - qp.rhs[i];
            const double t = std::max(0.0, slack) / (-adp);
            if (t < alpha) {
                alpha = t;
                blocking = i;
            }
        }
        for (std::size_t j = 0; j < m; ++j) s[j] += alpha * p_dir[j];
        if (blocking != nc) {
            ws.push_back(blocking);
            in_ws[blocking] = true;
        }
    }
    throw std::runtime_error("projection oracle failed to converge");
}

bool is_in_V1(const ScalarPLF& f, double slope_tol) {
    const StepFunction s = derivative_steps(f);
    for (std::size_t j = 0; j + 1 < s.slopes.size(); ++j)
        if (s.slopes[j] < s.slopes[j + 1] - slope_tol) return false;
    for (double sl : s.slopes)
        if (sl < -slope_tol) return false;
    return true;
}

bool is_in_polar_V1(const ScalarPLF& f, const std::vector<ScalarPLF>& probes,
                    double tol) {
    for (const auto& v : probes)
        if (inner_scalar(f, v) > tol) return false;
    return true;
}

}  // namespace awf
