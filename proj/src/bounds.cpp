#include "awf/bounds.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

#include "awf/normal.hpp"

namespace awf {

namespace {

// Shortest round-trip decimal text for a double; "nan"/"inf" pass through.
std::string format_double(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

}  // namespace

double alpha_from_p0(double p0) {
    if (!(p0 > 0.0 && p0 < 1.0))
        throw std::invalid_argument("p0 must lie strictly inside (0,1)");
    return normal_quantile(p0);
}

double kuelbs_li_gap(double norm_f) {
    if (!(norm_f >= 0.0)) throw std::invalid_argument("norm must be >= 0");
    return norm_f * kInvSqrt2Pi;
}

std::pair<double, double> sandwich(double alpha, double norm_f, double norm_g) {
    if (!(norm_f >= 0.0) || !(norm_g >= 0.0))
        throw std::invalid_argument("norms must be >= 0");
    return {normal_cdf(alpha - norm_g), normal_cdf(alpha + norm_f)};
}

double stieltjes_axis_integral(const Boundary& u, std::size_t axis,
                               const ScalarPLF& majorant_i) {
    if (!is_in_V1(majorant_i))
        throw std::invalid_argument(
            "stieltjes integral needs non-increasing, non-negative slopes");
    const StepFunction s = derivative_steps(majorant_i);
    // d(slope) is a non-positive atom wherever the step function drops,
    // including the drop to zero at the horizon (the final appended piece).
    double acc = 0.0;
    for (std::size_t j = 0; j + 1 < s.slopes.size(); ++j) {
        const double atom = s.slopes[j + 1] - s.slopes[j];
        if (atom != 0.0) acc += u.axis_profile(axis, s.breakpoints[j + 1]) * atom;
    }
    return acc;
}

Condition31Report check_condition_31(const Boundary& u, const AdditiveFn& majorant) {
    Condition31Report rep;
    rep.axis_ok.resize(majorant.dim(), true);
    for (std::size_t i = 0; i < majorant.dim(); ++i) {
        if (!is_in_V1(majorant.components[i]))
            throw std::invalid_argument("majorant component has increasing slopes");
        // Slopes vanish beyond the horizon by construction; what can fail is
        // finiteness of the boundary along the axis.
        const auto& comp = majorant.components[i];
        bool ok = true;
        for (double t : comp.grid.knots)
            if (!std::isfinite(u.axis_profile(i, t))) ok = false;
        if (u.kind == Boundary::Kind::Tabulated)
            for (double t : u.grids[i])
                if (!std::isfinite(u.axis_profile(i, t))) ok = false;
        rep.axis_ok[i] = ok;
        if (!ok) {
            rep.ok = false;
            rep.diagnostic = "boundary is not finite along axis " + std::to_string(i);
        }
    }
    if (!u.all_finite()) {
        rep.ok = false;
        if (rep.diagnostic.empty())
            rep.diagnostic = "boundary table contains non-finite entries";
    }
    return rep;
}

double theorem31_upper(const AdditiveFn& f, const Boundary& u, double p_polar) {
    if (!(p_polar > 0.0 && p_polar <= 1.0))
        throw std::invalid_argument("p_polar must lie in (0,1]");
    const ConeDecomposition dec = project_additive(f);
    const Condition31Report cond = check_condition_31(u, dec.majorant);
    if (!cond.ok)
        throw std::invalid_argument("boundary fails the axis-limit condition: " +
                                    cond.diagnostic);
    double atoms = 0.0;
    for (std::size_t i = 0; i < f.dim(); ++i)
        atoms += stieltjes_axis_integral(u, i, dec.majorant.components[i]);
    const double exponent = -atoms - 0.5 * dec.norm_majorant * dec.norm_majorant;
    return p_polar * std::exp(exponent);
}

double log_asymptote(double majorant_norm, double gamma) {
    if (!(gamma > 0.0)) throw std::invalid_argument("gamma must be positive");
    if (!(majorant_norm >= 0.0)) throw std::invalid_argument("norm must be >= 0");
    return -0.5 * gamma * gamma * majorant_norm * majorant_norm;
}

std::vector<SweepRow> gamma_sweep(const AdditiveFn& f, const Boundary& u,
                                  const std::vector<double>& gammas,
                                  const PEstimator& estimator) {
    if (!u.bounded_above())
        throw std::invalid_argument("sweep needs a boundary bounded above");
    if (gammas.empty()) throw std::invalid_argument("gamma list must not be empty");
    for (std::size_t i = 0; i < gammas.size(); ++i) {
        if (!(gammas[i] > 0.0)) throw std::invalid_argument("gammas must be positive");
        if (i > 0 && !(gammas[i] > gammas[i - 1]))
            throw std::invalid_argument("gammas must be strictly increasing");
    }
    const ConeDecomposition dec = project_additive(f);
    const double nm = dec.norm_majorant;
    const double qnan = std::numeric_limits<double>::quiet_NaN();

    std::vector<SweepRow> rows;
    rows.reserve(gammas.size());
    for (double g : gammas) {
        SweepRow row;
        row.gamma = g;
        row.asymptote = log_asymptote(nm, g);
        const auto [p, se] = estimator(scale(f, g), u);
        if (!(p >= 0.0))
            throw std::invalid_argument("estimator returned a negative probability");
        if (p == 0.0) {
            row.flag = "underflow";
            row.ln_p_hat = qnan;
            row.stderr_ln = qnan;
            row.ratio = qnan;
        } else {
            row.ln_p_hat = std::log(p);
            row.stderr_ln = se / p;
            if (nm == 0.0) {
                row.flag = "degenerate";
                row.ratio = qnan;
            } else {
                row.ratio = row.ln_p_hat / row.asymptote;
            }
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
    std::string out = "gamma,ln_p_hat,stderr_ln,asymptote,ratio,flag\n";
    for (const auto& r : rows) {
        out += format_double(r.gamma);
        out += ',';
        out += format_double(r.ln_p_hat);
        out += ',';
        out += format_double(r.stderr_ln);
        out += ',';
        out += format_double(r.asymptote);
        out += ',';
        out += format_double(r.ratio);
        out += ',';
        out += r.flag;
        out += '\n';
    }
    return out;
}

BoundsReport make_bounds_report(const AdditiveFn& f, const Boundary& u, double gamma,
                                double p0, double p0_stderr, const std::string& p0_source,
                                double p_polar, double p_polar_stderr,
                                const std::string& p_polar_source) {
    if (!(gamma > 0.0)) throw std::invalid_argument("gamma must be positive");
    BoundsReport rep;
    rep.trend = f;
    rep.boundary = u;
    rep.gamma = gamma;
    rep.alpha = alpha_from_p0(p0);
    rep.p0_value = p0;
    rep.p0_stderr = p0_stderr;
    rep.p0_source = p0_source;

    const AdditiveFn fg = gamma == 1.0 ? f : scale(f, gamma);
    const ConeDecomposition dec = project_additive(fg);
    rep.kuelbs_li_gap_value = kuelbs_li_gap(norm_additive(fg));
    const auto [lo, hi] = sandwich(rep.alpha, norm_additive(fg), dec.norm_majorant);
    rep.sandwich_lower = lo;
    rep.sandwich_upper = hi;
    rep.condition31_ok = check_condition_31(u, dec.majorant).ok;
    rep.thm31_upper = rep.condition31_ok ? theorem31_upper(fg, u, p_polar)
                                         : std::numeric_limits<double>::quiet_NaN();
    rep.p_polar_value = p_polar;
    rep.p_polar_stderr = p_polar_stderr;
    rep.p_polar_source = p_polar_source;
    // Asymptote reported for the unscaled trend's majorant at this gamma.
    rep.log_asymptote_value = log_asymptote(project_additive(f).norm_majorant, gamma);
    return rep;
}

}  // namespace awf
