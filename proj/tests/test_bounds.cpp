#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "awf/boundary.hpp"
#include "awf/bounds.hpp"
#include "awf/cone.hpp"
#include "awf/normal.hpp"
#include "awf/pl_fn.hpp"
#include "awf/simulate.hpp"

using namespace awf;

namespace {

const double kInf = std::numeric_limits<double>::infinity();

ScalarPLF ramp01() { return make_scalar({0.0, 1.0}, {0.0, 1.0}); }

Boundary inf_tabulated() {
    return boundary_tabulated({{0.0, 1.0}}, {1.0, kInf});
}

}  // namespace

TEST_CASE("quantile of the baseline probability") {
    CHECK(alpha_from_p0(0.5) == 0.0);
    CHECK(std::abs(alpha_from_p0(0.682689) - 0.4754) <= 2e-4);
    CHECK(alpha_from_p0(0.682689) ==
          doctest::Approx(0.4752314681704502).epsilon(1e-12));
    CHECK_THROWS_AS(alpha_from_p0(0.0), std::invalid_argument);
    CHECK_THROWS_AS(alpha_from_p0(1.0), std::invalid_argument);
}

TEST_CASE("gap bound scales linearly in the trend norm") {
    CHECK(kuelbs_li_gap(0.0) == 0.0);
    CHECK(kuelbs_li_gap(1.0) == doctest::Approx(0.398942).epsilon(1e-6));
    CHECK(kuelbs_li_gap(2.0) == doctest::Approx(0.797885).epsilon(1e-6));
    CHECK(kuelbs_li_gap(1.0) == doctest::Approx(kInvSqrt2Pi).epsilon(1e-15));
    CHECK_THROWS_AS(kuelbs_li_gap(-0.1), std::invalid_argument);
}

TEST_CASE("two-sided normal sandwich") {
    const auto [lo0, hi0] = sandwich(0.0, 0.0, 0.0);
    CHECK(lo0 == 0.5);
    CHECK(hi0 == 0.5);

    const auto [lo1, hi1] = sandwich(0.0, 1.0, 1.0);
    CHECK(lo1 == doctest::Approx(0.15865525393145707).epsilon(1e-12));
    CHECK(hi1 == doctest::Approx(0.8413447460685429).epsilon(1e-12));

    for (double a : {-1.0, 0.0, 0.7, 2.0})
        for (double nf : {0.0, 0.5, 1.5}) {
            const auto [lo, hi] = sandwich(a, nf, nf);
            CHECK(lo <= hi);
            CHECK(lo >= 0.0);
            CHECK(hi <= 1.0);
        }
    CHECK_THROWS_AS(sandwich(0.0, -1.0, 0.0), std::invalid_argument);
}

TEST_CASE("boundary integral against the majorant slope measure") {
    // Single atom -1 at t=1 against u = 2.
    const Boundary u2 = boundary_constant(2.0);
    CHECK(stieltjes_axis_integral(u2, 0, ramp01()) == doctest::Approx(-2.0).epsilon(1e-14));

    // Slopes [2,1] breaking at t=1, flat after t=2, u = 1: atoms -1 and -1.
    const ScalarPLF two_piece = make_scalar({0, 1, 2}, {0, 2, 3});
    const Boundary u1 = boundary_constant(1.0);
    CHECK(stieltjes_axis_integral(u1, 0, two_piece) == doctest::Approx(-2.0).epsilon(1e-14));

    const Boundary u0 = boundary_constant(0.0);
    CHECK(stieltjes_axis_integral(u0, 0, two_piece) == 0.0);

    // Non-cone input is rejected.
    const ScalarPLF convex = make_scalar({0, 1, 2}, {0, 0.2, 1});
    CHECK_THROWS_AS(stieltjes_axis_integral(u1, 0, convex), std::invalid_argument);

    // Sign: never positive against a non-negative boundary.
    const ScalarPLF cone3 = make_scalar({0, 0.5, 1.2, 2}, {0, 1.5, 2.2, 2.6});
    CHECK(stieltjes_axis_integral(u2, 0, cone3) <= 0.0);
}

TEST_CASE("axis-limit condition reporting") {
    const AdditiveFn m = make_additive({ramp01()});
    const Condition31Report ok = check_condition_31(boundary_constant(1.0), m);
    CHECK(ok.ok);
    CHECK(ok.diagnostic.empty());
    REQUIRE(ok.axis_ok.size() == 1);
    CHECK(ok.axis_ok[0]);

    const AdditiveFn z = make_additive({zero_scalar(1.0)});
    CHECK(check_condition_31(boundary_constant(0.5), z).ok);

    const Condition31Report bad = check_condition_31(inf_tabulated(), m);
    CHECK_FALSE(bad.ok);
    CHECK_FALSE(bad.diagnostic.empty());

    // The majorant argument must be in the cone.
    const AdditiveFn convex = make_additive({make_scalar({0, 1, 2}, {0, 0.2, 1})});
    CHECK_THROWS_AS(check_condition_31(boundary_constant(1.0), convex),
                    std::invalid_argument);
}

TEST_CASE("exponential upper bound reproduces the worked instance") {
    // f = 3 * ramp on [0,1], u = 1: atom -3 at t=1, ||majorant||^2 = 9,
    // exponent = -(-3) - 4.5 = -1.5.
    const AdditiveFn f = make_additive({make_scalar({0, 1}, {0, 3})});
    const Boundary u = boundary_constant(1.0);
    const double p0 = oracle_bm_max(1.0, 1.0);
    const double bound = theorem31_upper(f, u, p0);
    CHECK(bound == doctest::Approx(0.1523286157121982).epsilon(1e-12));
    CHECK(bound == doctest::Approx(p0 * std::exp(-1.5)).epsilon(1e-14));

    // The bound sits above the exact drifted-crossing probability.
    const double truth = oracle_drifted_noncross(1.0, 3.0, 1.0);
    CHECK(truth == doctest::Approx(0.009973041067026997).epsilon(1e-12));
    CHECK(bound >= truth);

    // Zero trend: exponent vanishes, the bound degenerates to p_polar.
    const AdditiveFn z = make_additive({zero_scalar(1.0)});
    CHECK(theorem31_upper(z, u, 0.25) == 0.25);

    CHECK_THROWS_AS(theorem31_upper(f, u, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(theorem31_upper(f, u, 1.5), std::invalid_argument);
    CHECK_THROWS_AS(theorem31_upper(f, inf_tabulated(), 0.5), std::invalid_argument);
}

TEST_CASE("log-probability equivalent") {
    CHECK(log_asymptote(1.0, 6.0) == -18.0);
    CHECK(log_asymptote(0.0, 3.0) == 0.0);
    CHECK(log_asymptote(1.3, 4.0) == doctest::Approx(4.0 * log_asymptote(1.3, 2.0)).epsilon(1e-15));
    CHECK_THROWS_AS(log_asymptote(1.0, 0.0), std::invalid_argument);
}

TEST_CASE("closed-form sweep matches the drift oracle ratios") {
    const AdditiveFn f = make_additive({ramp01()});
    const Boundary u = boundary_constant(1.0);
    const PEstimator oracle = [](const AdditiveFn& g, const Boundary&) {
        const double slope = derivative_steps(g.components[0]).slopes[0];
        return std::make_pair(oracle_drifted_noncross(1.0, slope, 1.0), 0.0);
    };
    const std::vector<double> gammas{1, 2, 4, 6, 8, 10};
    const auto rows = gamma_sweep(f, u, gammas, oracle);
    REQUIRE(rows.size() == 6);

    const std::vector<double> expected_ratio{2.20585517974,  1.23282668273,
                                             0.951267691343, 0.909000219564,
                                             0.903593389704, 0.907011444468};
    for (std::size_t k = 0; k < rows.size(); ++k) {
        CHECK(rows[k].gamma == gammas[k]);
        CHECK(rows[k].flag.empty());
        CHECK(rows[k].asymptote == doctest::Approx(-gammas[k] * gammas[k] / 2.0).epsilon(1e-15));
        CHECK(rows[k].ratio == doctest::Approx(expected_ratio[k]).epsilon(1e-9));
        CHECK(rows[k].stderr_ln == 0.0);
    }
    CHECK(std::abs(rows[3].ratio - 0.909) <= 0.005);
}

TEST_CASE("sweep flags degenerate and underflowing rows") {
    const Boundary u = boundary_constant(1.0);

    // Estimator that underflows to zero for gamma >= 2 (slope >= 2).
    const PEstimator flaky = [](const AdditiveFn& g, const Boundary&) {
        const double slope = derivative_steps(g.components[0]).slopes[0];
        return std::make_pair(slope >= 2.0 ? 0.0 : 0.3, 0.01);
    };
    const AdditiveFn f = make_additive({ramp01()});
    const auto rows = gamma_sweep(f, u, {1.0, 2.0, 3.0}, flaky);
    REQUIRE(rows.size() == 3);
    CHECK(rows[0].flag.empty());
    CHECK(rows[1].flag == "underflow");
    CHECK(rows[2].flag == "underflow");
    CHECK(std::isnan(rows[1].ln_p_hat));
    CHECK(std::isnan(rows[1].ratio));

    // Non-positive trend: the majorant vanishes, every row is degenerate.
    const AdditiveFn neg = make_additive({make_scalar({0, 1}, {0, -1})});
    const PEstimator constp = [](const AdditiveFn&, const Boundary&) {
        return std::make_pair(0.4, 0.0);
    };
    const auto drows = gamma_sweep(neg, u, {1.0, 2.0}, constp);
    for (const auto& r : drows) {
        CHECK(r.flag == "degenerate");
        CHECK(r.asymptote == 0.0);
    }

    CHECK_THROWS_AS(gamma_sweep(f, inf_tabulated(), {1.0}, constp), std::invalid_argument);
    CHECK_THROWS_AS(gamma_sweep(f, u, {}, constp), std::invalid_argument);
    CHECK_THROWS_AS(gamma_sweep(f, u, {2.0, 1.0}, constp), std::invalid_argument);
    CHECK_THROWS_AS(gamma_sweep(f, u, {-1.0, 1.0}, constp), std::invalid_argument);
}

TEST_CASE("CSV header and row shape") {
    SweepRow row;
    row.gamma = 2.0;
    row.ln_p_hat = -1.5;
    row.stderr_ln = 0.25;
    row.asymptote = -2.0;
    row.ratio = 0.75;
    const std::string csv = sweep_csv({row});
    CHECK(csv.substr(0, csv.find('\n')) == "gamma,ln_p_hat,stderr_ln,asymptote,ratio,flag");
    CHECK(csv.find("\n2,-1.5,0.25,-2,0.75,\n") != std::string::npos);
}

TEST_CASE("boundary factories validate shape and sign") {
    CHECK_THROWS_AS(boundary_constant(-0.5), std::invalid_argument);
    CHECK_THROWS_AS(boundary_constant(kInf), std::invalid_argument);
    CHECK(boundary_constant(0.0).bounded_above());

    // Offset plus profiles dipping below zero is rejected.
    const ScalarPLF dip = make_scalar({0, 1}, {0, -0.5});
    CHECK_THROWS_AS(boundary_sum_separable(0.1, {dip}), std::invalid_argument);
    const Boundary ss = boundary_sum_separable(0.6, {dip});
    CHECK(ss.min_value() == doctest::Approx(0.1).epsilon(1e-14));
    CHECK(ss.evaluate({0.5}) == doctest::Approx(0.35).epsilon(1e-14));
    CHECK(ss.axis_profile(0, 0.5) == doctest::Approx(0.35).epsilon(1e-14));
    CHECK(ss.horizon() == 1.0);

    CHECK_THROWS_AS(boundary_tabulated({{0.0, 1.0}}, {1.0, -0.25}), std::invalid_argument);
    CHECK_THROWS_AS(boundary_tabulated({{0.0, 1.0}}, {1.0, std::nan("")}),
                    std::invalid_argument);
    CHECK_THROWS_AS(boundary_tabulated({{0.5, 1.0}}, {1.0, 1.0}), std::invalid_argument);
    CHECK_THROWS_AS(boundary_tabulated({{0.0, 1.0}}, {1.0, 1.0, 1.0}),
                    std::invalid_argument);

    // +inf entries are allowed but mark the boundary unbounded.
    const Boundary inf_b = inf_tabulated();
    CHECK_FALSE(inf_b.bounded_above());
    CHECK_FALSE(inf_b.all_finite());

    // Bilinear interpolation on a 2x2 table.
    const Boundary tab =
        boundary_tabulated({{0.0, 1.0}, {0.0, 2.0}}, {1.0, 2.0, 3.0, 4.0});
    CHECK(tab.evaluate({0.0, 0.0}) == 1.0);
    CHECK(tab.evaluate({0.0, 2.0}) == 2.0);
    CHECK(tab.evaluate({1.0, 0.0}) == 3.0);
    CHECK(tab.evaluate({1.0, 2.0}) == 4.0);
    CHECK(tab.evaluate({0.5, 1.0}) == doctest::Approx(2.5).epsilon(1e-14));
    CHECK(tab.evaluate({3.0, 5.0}) == 4.0);  // clamped beyond the table
    CHECK(tab.axis_profile(1, 1.0) == doctest::Approx(1.5).epsilon(1e-14));
    CHECK(tab.horizon() == 2.0);
    CHECK(tab.sup_value() == 4.0);
    CHECK_THROWS_AS(tab.evaluate({0.5}), std::invalid_argument);
    CHECK_THROWS_AS(tab.evaluate({-0.1, 0.0}), std::invalid_argument);
}

TEST_CASE("full report wires the pieces together") {
    const AdditiveFn f = make_additive({make_scalar({0, 1}, {0, 3})});
    const Boundary u = boundary_constant(1.0);
    const double p0 = oracle_bm_max(1.0, 1.0);
    const BoundsReport rep =
        make_bounds_report(f, u, 1.0, p0, 0.0, "explicit", p0, 0.0, "explicit");
    CHECK(rep.alpha == doctest::Approx(normal_quantile(p0)).epsilon(1e-14));
    CHECK(rep.condition31_ok);
    CHECK(rep.thm31_upper == doctest::Approx(0.1523286157121982).epsilon(1e-12));
    CHECK(rep.sandwich_lower >= 0.0);
    CHECK(rep.sandwich_lower <= rep.sandwich_upper);
    CHECK(rep.sandwich_upper <= 1.0);
    CHECK(rep.kuelbs_li_gap_value == doctest::Approx(3.0 * kInvSqrt2Pi).epsilon(1e-12));
    CHECK(rep.log_asymptote_value == doctest::Approx(-4.5).epsilon(1e-14));
    CHECK(rep.gamma == 1.0);
}
