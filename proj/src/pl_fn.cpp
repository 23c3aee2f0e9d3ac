#include "awf/pl_fn.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace awf {

namespace {

void validate_knots(const std::vector<double>& knots) {
    if (knots.size() < 2) throw std::invalid_argument("grid needs at least 2 knots");
    for (double k : knots)
        if (!std::isfinite(k)) throw std::invalid_argument("grid knots must be finite");
    if (knots.front() != 0.0) throw std::invalid_argument("first knot must be 0");
    for (std::size_t i = 0; i + 1 < knots.size(); ++i)
        if (!(knots[i] < knots[i + 1]))
            throw std::invalid_argument("knots must be strictly increasing");
}

void validate_scalar(const ScalarPLF& f) {
    validate_knots(f.grid.knots);
    if (f.values.size() != f.grid.knots.size())
        throw std::invalid_argument("values and knots must have equal length");
    for (double v : f.values)
        if (!std::isfinite(v)) throw std::invalid_argument("values must be finite");
    if (f.values.front() != 0.0) throw std::invalid_argument("first value must be 0");
}

double cell_slope(const ScalarPLF& f, std::size_t j) {
    return (f.values[j + 1] - f.values[j]) / (f.grid.knots[j + 1] - f.grid.knots[j]);
}

}  // namespace

ScalarPLF make_scalar(std::vector<double> knots, std::vector<double> values) {
    ScalarPLF f{Grid{std::move(knots)}, std::move(values)};
    validate_scalar(f);
    return f;
}

ScalarPLF zero_scalar(double horizon) {
    return make_scalar({0.0, horizon}, {0.0, 0.0});
}

double eval_scalar(const ScalarPLF& f, double t) {
    if (!(t >= 0.0)) throw std::invalid_argument("evaluation time must be >= 0");
    const auto& kx = f.grid.knots;
    if (t >= kx.back()) return f.values.back();
    const auto it = std::upper_bound(kx.begin(), kx.end(), t);
    const std::size_t j = std::size_t(it - kx.begin()) - 1;  // kx[j] <= t < kx[j+1]
    const double a = (t - kx[j]) / (kx[j + 1] - kx[j]);
    return f.values[j] + a * (f.values[j + 1] - f.values[j]);
}

StepFunction derivative_steps(const ScalarPLF& f) {
    StepFunction s;
    s.breakpoints = f.grid.knots;
    s.slopes.resize(f.grid.knots.size());
    for (std::size_t j = 0; j + 1 < f.grid.knots.size(); ++j) s.slopes[j] = cell_slope(f, j);
    s.slopes.back() = 0.0;
    return s;
}

double inner_scalar(const ScalarPLF& f, const ScalarPLF& g) {
    // Exact quadrature of f'g' on the merged knot grid; both derivatives
    // vanish beyond their horizons, so integration stops at the smaller one.
    const double stop = std::min(f.horizon(), g.horizon());
    double acc = 0.0, x = 0.0;
    std::size_t i = 0, j = 0;
    while (x < stop) {
        const double xf = f.grid.knots[i + 1];
        const double xg = g.grid.knots[j + 1];
        const double nx = std::min(xf, xg);
        acc += cell_slope(f, i) * cell_slope(g, j) * (nx - x);
        if (xf == nx) ++i;
        if (xg == nx) ++j;
        x = nx;
    }
    return acc;
}

double norm_scalar(const ScalarPLF& f) { return std::sqrt(inner_scalar(f, f)); }

ScalarPLF scale_scalar(const ScalarPLF& f, double gamma) {
    if (!(gamma > 0.0) || !std::isfinite(gamma))
        throw std::invalid_argument("scale factor must be positive and finite");
    ScalarPLF out = f;
    for (double& v : out.values) v *= gamma;
    return out;
}

AdditiveFn make_additive(std::vector<ScalarPLF> components) {
    if (components.empty())
        throw std::invalid_argument("additive function needs at least one component");
    for (const auto& c : components) validate_scalar(c);
    return AdditiveFn{std::move(components)};
}

double eval_additive(const AdditiveFn& f, const std::vector<double>& t) {
    if (t.size() != f.dim())
        throw std::invalid_argument("evaluation point dimension mismatch");
    double acc = 0.0;
    for (std::size_t i = 0; i < f.dim(); ++i) acc += eval_scalar(f.components[i], t[i]);
    return acc;
}

double inner_additive(const AdditiveFn& f, const AdditiveFn& g) {
    if (f.dim() != g.dim()) throw std::invalid_argument("dimension mismatch");
    double acc = 0.0;
    for (std::size_t i = 0; i < f.dim(); ++i)
        acc += inner_scalar(f.components[i], g.components[i]);
    return acc;
}

double norm_additive(const AdditiveFn& f) { return std::sqrt(inner_additive(f, f)); }

AdditiveFn scale(const AdditiveFn& f, double gamma) {
    if (!(gamma > 0.0) || !std::isfinite(gamma))
        throw std::invalid_argument("scale factor must be positive and finite");
    AdditiveFn out = f;
    for (auto& c : out.components)
        for (double& v : c.values) v *= gamma;
    return out;
}

AdditiveFn zero_like(const AdditiveFn& f) {
    AdditiveFn out;
    out.components.reserve(f.dim());
    for (const auto& c : f.components) out.components.push_back(zero_scalar(c.horizon()));
    return out;
}

}  // namespace awf
