#include "awf/boundary.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace awf {

namespace {

void validate_axis_grid(const std::vector<double>& knots) {
    if (knots.size() < 2)
        throw std::invalid_argument("boundary axis grid needs at least 2 knots");
    for (double k : knots)
        if (!std::isfinite(k))
            throw std::invalid_argument("boundary axis knots must be finite");
    if (knots.front() != 0.0)
        throw std::invalid_argument("boundary axis grid must start at 0");
    for (std::size_t i = 0; i + 1 < knots.size(); ++i)
        if (!(knots[i] < knots[i + 1]))
            throw std::invalid_argument("boundary axis knots must be strictly increasing");
}

// Clamped cell lookup + interpolation weight along one tabulated axis.
void locate(const std::vector<double>& knots, double t, std::size_t& cell, double& w) {
    if (t <= knots.front()) {
        cell = 0;
        w = 0.0;
        return;
    }
    if (t >= knots.back()) {
        cell = knots.size() - 2;
        w = 1.0;
        return;
    }
    const auto it = std::upper_bound(knots.begin(), knots.end(), t);
    cell = std::size_t(it - knots.begin()) - 1;
    w = (t - knots[cell]) / (knots[cell + 1] - knots[cell]);
}

}  // namespace

std::optional<std::size_t> Boundary::dimension() const {
    switch (kind) {
        case Kind::Constant: return std::nullopt;
        case Kind::SumSeparable: return profiles.size();
        case Kind::Tabulated: return grids.size();
    }
    return std::nullopt;
}

double Boundary::evaluate(const std::vector<double>& t) const {
    for (double ti : t)
        if (!(ti >= 0.0))
            throw std::invalid_argument("boundary evaluation time must be >= 0");
    switch (kind) {
        case Kind::Constant:
            return c;
        case Kind::SumSeparable: {
            if (t.size() != profiles.size())
                throw std::invalid_argument("boundary evaluation dimension mismatch");
            double acc = c;
            for (std::size_t i = 0; i < profiles.size(); ++i)
                acc += eval_scalar(profiles[i], t[i]);
            return acc;
        }
        case Kind::Tabulated: {
            const std::size_t d = grids.size();
            if (t.size() != d)
                throw std::invalid_argument("boundary evaluation dimension mismatch");
            std::size_t cell[3] = {0, 0, 0};
            double w[3] = {0.0, 0.0, 0.0};
            for (std::size_t i = 0; i < d; ++i) locate(grids[i], t[i], cell[i], w[i]);
            std::size_t stride[3] = {1, 1, 1};
            for (std::size_t i = d; i-- > 1;)
                stride[i - 1] = stride[i] * grids[i].size();
            double acc = 0.0;
            for (std::size_t corner = 0; corner < (std::size_t(1) << d); ++corner) {
                double weight = 1.0;
                std::size_t idx = 0;
                for (std::size_t i = 0; i < d; ++i) {
                    const bool hi = (corner >> i) & 1;
                    weight *= hi ? w[i] : 1.0 - w[i];
                    idx += (cell[i] + (hi ? 1 : 0)) * stride[i];
                }
                if (weight != 0.0) acc += weight * table[idx];
            }
            return acc;
        }
    }
    throw std::logic_error("unreachable boundary kind");
}

double Boundary::axis_profile(std::size_t axis, double t) const {
    const auto d = dimension();
    if (d && axis >= *d) throw std::invalid_argument("axis index out of range");
    if (kind == Kind::Constant) {
        if (!(t >= 0.0))
            throw std::invalid_argument("boundary evaluation time must be >= 0");
        return c;
    }
    std::vector<double> point(*d, 0.0);
    point[axis] = t;
    return evaluate(point);
}

double Boundary::horizon() const {
    double h = 0.0;
    if (kind == Kind::SumSeparable)
        for (const auto& p : profiles) h = std::max(h, p.horizon());
    if (kind == Kind::Tabulated)
        for (const auto& g : grids) h = std::max(h, g.back());
    return h;
}

double Boundary::sup_value() const {
    switch (kind) {
        case Kind::Constant:
            return c;
        case Kind::SumSeparable: {
            double acc = c;
            for (const auto& p : profiles)
                acc += *std::max_element(p.values.begin(), p.values.end());
            return acc;
        }
        case Kind::Tabulated:
            return *std::max_element(table.begin(), table.end());
    }
    throw std::logic_error("unreachable boundary kind");
}

double Boundary::min_value() const {
    switch (kind) {
        case Kind::Constant:
            return c;
        case Kind::SumSeparable: {
            double acc = c;
            for (const auto& p : profiles)
                acc += *std::min_element(p.values.begin(), p.values.end());
            return acc;
        }
        case Kind::Tabulated:
            return *std::min_element(table.begin(), table.end());
    }
    throw std::logic_error("unreachable boundary kind");
}

bool Boundary::bounded_above() const { return std::isfinite(sup_value()); }

bool Boundary::all_finite() const {
    if (kind == Kind::Tabulated)
        for (double v : table)
            if (!std::isfinite(v)) return false;
    return true;
}

Boundary boundary_constant(double c) {
    if (!std::isfinite(c) || c < 0.0)
        throw std::invalid_argument("constant boundary level must be finite and >= 0");
    Boundary u;
    u.kind = Boundary::Kind::Constant;
    u.c = c;
    return u;
}

Boundary boundary_sum_separable(double c, std::vector<ScalarPLF> profiles) {
    if (!std::isfinite(c))
        throw std::invalid_argument("boundary offset must be finite");
    if (profiles.empty())
        throw std::invalid_argument("separable boundary needs at least one profile");
    // Revalidate profiles through the library constructor.
    for (auto& p : profiles) p = make_scalar(p.grid.knots, p.values);
    Boundary u;
    u.kind = Boundary::Kind::SumSeparable;
    u.c = c;
    u.profiles = std::move(profiles);
    if (u.min_value() < 0.0)
        throw std::invalid_argument("boundary takes negative values");
    return u;
}

Boundary boundary_tabulated(std::vector<std::vector<double>> grids,
                            std::vector<double> table_row_major) {
    if (grids.empty() || grids.size() > 3)
        throw std::invalid_argument("tabulated boundary supports 1 to 3 axes");
    std::size_t expect = 1;
    for (const auto& g : grids) {
        validate_axis_grid(g);
        expect *= g.size();
    }
    if (table_row_major.size() != expect)
        throw std::invalid_argument("tabulated boundary value count does not match grids");
    for (double v : table_row_major) {
        if (std::isnan(v))
            throw std::invalid_argument("tabulated boundary values must not be NaN");
        if (v < 0.0) throw std::invalid_argument("boundary takes negative values");
    }
    Boundary u;
    u.kind = Boundary::Kind::Tabulated;
    u.grids = std::move(grids);
    u.table = std::move(table_row_major);
    return u;
}

}  // namespace awf
