#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "awf/boundary.hpp"
#include "awf/cone.hpp"
#include "awf/pl_fn.hpp"

namespace awf {

// alpha = Phi^-1(p0); finite only for p0 in (0,1).
double alpha_from_p0(double p0);

// |P_f - P_0| <= ||f|| / sqrt(2*pi).
double kuelbs_li_gap(double norm_f);

// (Phi(alpha - norm_g), Phi(alpha + norm_f)): bracket for P_f when g >= f
// (typically g = majorant of f, so norm_g = ||majorant||).
std::pair<double, double> sandwich(double alpha, double norm_f, double norm_g);

// Integral of the axis profile of u against d(majorant_i'): a finite sum of
// non-positive atoms at the slope breakpoints and at the horizon.  Requires
// majorant_i to have non-increasing, non-negative slopes.
double stieltjes_axis_integral(const Boundary& u, std::size_t axis,
                               const ScalarPLF& majorant_i);

struct Condition31Report {
    bool ok = true;
    std::vector<bool> axis_ok;
    std::string diagnostic;  // empty when ok
};

// The exponential upper bound needs each axis to satisfy: the majorant slope
// vanishes beyond the horizon (structural for compactly supported slopes) and
// the boundary is finite along the axis.
Condition31Report check_condition_31(const Boundary& u, const AdditiveFn& majorant);

// p_polar * exp(-sum_i integral_i - ||majorant||^2 / 2) where p_polar
// estimates the non-crossing probability of the trend f - majorant(f).
double theorem31_upper(const AdditiveFn& f, const Boundary& u, double p_polar);

// -gamma^2 * majorant_norm^2 / 2: the large-trend log-probability equivalent.
double log_asymptote(double majorant_norm, double gamma);

struct SweepRow {
    double gamma = 0.0;
    double ln_p_hat = 0.0;
    double stderr_ln = 0.0;
    double asymptote = 0.0;
    double ratio = 0.0;
    std::string flag;  // "", "underflow", or "degenerate"
};

// Estimator callback: (scaled trend, boundary) -> (estimate, stderr).
using PEstimator =
    std::function<std::pair<double, double>(const AdditiveFn&, const Boundary&)>;

// Evaluates ln P(gamma * f) against the asymptote per gamma.  Boundary must be
// bounded above; gammas must be positive and strictly increasing.  Rows with a
// zero estimate are flagged "underflow", never extrapolated; a zero-majorant
// trend flags every row "degenerate".
std::vector<SweepRow> gamma_sweep(const AdditiveFn& f, const Boundary& u,
                                  const std::vector<double>& gammas,
                                  const PEstimator& estimator);

// CSV with header gamma,ln_p_hat,stderr_ln,asymptote,ratio,flag.
std::string sweep_csv(const std::vector<SweepRow>& rows);

// Full analytic report for one (f, u, gamma) instance; p0 and p_polar are
// supplied (explicit or estimated) together with their standard errors.
struct BoundsReport {
    double alpha = 0.0;
    double p0_value = 0.0, p0_stderr = 0.0;
    std::string p0_source;  // "explicit" or "mc"
    double kuelbs_li_gap_value = 0.0;
    double sandwich_lower = 0.0, sandwich_upper = 0.0;
    double thm31_upper = 0.0;
    double p_polar_value = 0.0, p_polar_stderr = 0.0;
    std::string p_polar_source;
    bool condition31_ok = false;
    double log_asymptote_value = 0.0;
    AdditiveFn trend;  // unscaled
    Boundary boundary;
    double gamma = 1.0;
};

BoundsReport make_bounds_report(const AdditiveFn& f, const Boundary& u, double gamma,
                                double p0, double p0_stderr, const std::string& p0_source,
                                double p_polar, double p_polar_stderr,
                                const std::string& p_polar_source);

}  // namespace awf
