#pragma once

#include <cstddef>
#include <vector>

namespace awf {

// Strictly increasing time knots starting at 0.  The last knot is the
// horizon; functions built on a grid extend as constants beyond it.
struct Grid {
    std::vector<double> knots;

    double horizon() const { return knots.back(); }
    std::size_t size() const { return knots.size(); }
};

// Piecewise-linear trend component: h(0) = 0, h' piecewise constant on the
// grid cells and identically zero beyond the horizon, so every inner product
// below is an exact finite sum.
struct ScalarPLF {
    Grid grid;
    std::vector<double> values;  // same length as knots, values[0] == 0

    double horizon() const { return grid.horizon(); }
};

// d-tuple of scalar components, evaluating as f(t) = sum_i f_i(t_i).  The
// stored components are the axis restrictions f(0,...,t_i,...,0), which makes
// the decomposition canonical.
struct AdditiveFn {
    std::vector<ScalarPLF> components;

    std::size_t dim() const { return components.size(); }
};

// Piecewise-constant derivative: slopes[j] holds on
// [breakpoints[j], breakpoints[j+1]) and slopes.back() == 0 holds from the
// horizon on (breakpoints and slopes have equal length).
struct StepFunction {
    std::vector<double> breakpoints;
    std::vector<double> slopes;
};

ScalarPLF make_scalar(std::vector<double> knots, std::vector<double> values);
ScalarPLF zero_scalar(double horizon);
double eval_scalar(const ScalarPLF& f, double t);
StepFunction derivative_steps(const ScalarPLF& f);
double inner_scalar(const ScalarPLF& f, const ScalarPLF& g);
double norm_scalar(const ScalarPLF& f);
ScalarPLF scale_scalar(const ScalarPLF& f, double gamma);

AdditiveFn make_additive(std::vector<ScalarPLF> components);
double eval_additive(const AdditiveFn& f, const std::vector<double>& t);
double inner_additive(const AdditiveFn& f, const AdditiveFn& g);
double norm_additive(const AdditiveFn& f);
AdditiveFn scale(const AdditiveFn& f, double gamma);

// Zero trend on the same component horizons (the no-trend baseline for
// common-random-number comparisons).
AdditiveFn zero_like(const AdditiveFn& f);

}  // namespace awf
