#pragma once

#include <vector>

#include "awf/pl_fn.hpp"

namespace awf {

// Orthogonal splitting of a trend into its least-concave-majorant part and
// the non-positive remainder.
struct ConeDecomposition {
    AdditiveFn majorant;  // per-component least concave majorants
    AdditiveFn polar;     // f - majorant, <= 0 everywhere
    double norm_majorant = 0.0;
    double norm_polar = 0.0;
    double orthogonality_residual = 0.0;  // |<majorant, polar>|
};

// Least concave majorant with non-decreasing values: the pointwise-smallest
// g >= f whose derivative is non-increasing and non-negative, with g(0) = 0.
// Output knots are a subset of the input knots (hull vertices plus the
// flattening point); collinear vertices are merged at 1e-12 slope tolerance.
ScalarPLF lcm_scalar(const ScalarPLF& f);

// f - lcm_scalar(f), represented on f's grid; <= 0 everywhere.
ScalarPLF polar_scalar(const ScalarPLF& f);

ConeDecomposition project_additive(const AdditiveFn& f);

// Independent check of lcm_scalar: minimizes sum_j s_j^2 * cell_j over slope
// vectors s that are non-increasing, non-negative, and whose running integral
// dominates f at every knot, by a primal active-set quadratic solver.
// Requires <= 64 knots; throws on failure to converge.
ScalarPLF qp_oracle_projection(const ScalarPLF& f, double tolerance);

// Membership tests: non-increasing non-negative slopes, and the necessary
// polar condition <f, v> <= tol against each supplied probe v.
bool is_in_V1(const ScalarPLF& f, double slope_tol = 1e-12);
bool is_in_polar_V1(const ScalarPLF& f, const std::vector<ScalarPLF>& probes,
                    double tol = 1e-10);

}  // namespace awf
