#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "awf/pl_fn.hpp"

namespace awf {

// Non-negative boundary field u on [0,T]^d in one of three shapes:
//   Constant      u(t) = c, any dimension
//   SumSeparable  u(t) = c + sum_i profile_i(t_i)
//   Tabulated     multilinear interpolation of a d-dimensional table (d <= 3),
//                 clamped to the table range beyond it
// Construct through the boundary_* factories, which validate non-negativity.
struct Boundary {
    enum class Kind { Constant, SumSeparable, Tabulated };

    Kind kind = Kind::Constant;
    double c = 0.0;                          // Constant level / SumSeparable offset
    std::vector<ScalarPLF> profiles;         // SumSeparable only
    std::vector<std::vector<double>> grids;  // Tabulated: per-axis knots
    std::vector<double> table;               // Tabulated: row-major values

    // nullopt means the boundary is dimension-agnostic (Constant).
    std::optional<std::size_t> dimension() const;
    double evaluate(const std::vector<double>& t) const;
    double axis_profile(std::size_t axis, double t) const;
    // Largest time any shape component reaches (0 for Constant).
    double horizon() const;
    double sup_value() const;
    double min_value() const;
    bool bounded_above() const;
    bool all_finite() const;
};

Boundary boundary_constant(double c);
Boundary boundary_sum_separable(double c, std::vector<ScalarPLF> profiles);
// table_row_major is indexed with the last axis fastest.
Boundary boundary_tabulated(std::vector<std::vector<double>> grids,
                            std::vector<double> table_row_major);

}  // namespace awf
