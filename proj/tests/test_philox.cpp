#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "awf/normal.hpp"
#include "awf/philox.hpp"

using namespace awf;

TEST_CASE("counter-block known answers") {
    // Reference vectors for the 10-round 4x32 counter cipher.
    const auto zero = Philox4x32::block({0u, 0u, 0u, 0u}, {0u, 0u});
    CHECK(zero[0] == 0x6627e8d5u);
    CHECK(zero[1] == 0xe169c58du);
    CHECK(zero[2] == 0xbc57ac4cu);
    CHECK(zero[3] == 0x9b00dbd8u);

    const std::uint32_t ff = 0xffffffffu;
    const auto ones = Philox4x32::block({ff, ff, ff, ff}, {ff, ff});
    CHECK(ones[0] == 0x408f276du);
    CHECK(ones[1] == 0x41c83b0eu);
    CHECK(ones[2] == 0xa20bc7c6u);
    CHECK(ones[3] == 0x6d5451fdu);

    const auto pi = Philox4x32::block({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
                                      {0xa4093822u, 0x299f31d0u});
    CHECK(pi[0] == 0xd16cfe09u);
    CHECK(pi[1] == 0x94fdccebu);
    CHECK(pi[2] == 0x5001e420u);
    CHECK(pi[3] == 0x24126ea1u);
}

TEST_CASE("streams are reproducible and distinct") {
    NormalStream a(42, 7), b(42, 7), c(42, 8), d(43, 7);
    bool differs_c = false, differs_d = false;
    for (int k = 0; k < 1000; ++k) {
        const std::uint64_t va = a.next_u64();
        CHECK(va == b.next_u64());
        differs_c |= va != c.next_u64();
        differs_d |= va != d.next_u64();
    }
    CHECK(differs_c);
    CHECK(differs_d);
}

TEST_CASE("unit draws live in (0, 1]") {
    NormalStream s(1, 0);
    for (int k = 0; k < 100000; ++k) {
        const double u = s.next_unit();
        CHECK(u > 0.0);
        CHECK(u <= 1.0);
    }
}

TEST_CASE("layer tables close the recursion at the known tail split") {
    const auto& z = detail::ZigguratTables::instance();
    // 256-layer tail threshold for the standard normal density kernel.
    CHECK(z.r == doctest::Approx(3.6541528853610088).epsilon(1e-12));
    CHECK(z.y[0] == 1.0);
    for (int i = 1; i < 256; ++i) CHECK(z.x[i] > z.x[i - 1]);
    CHECK(z.x[255] == z.r);
}

TEST_CASE("normal moments match the standard normal") {
    const std::size_t n = 4000000;
    NormalStream s(2024, 0);
    double m1 = 0.0, m2 = 0.0, m3 = 0.0, m4 = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double x = s.next_normal();
        m1 += x;
        m2 += x * x;
        m3 += x * x * x;
        m4 += x * x * x * x;
    }
    const double inv = 1.0 / double(n);
    m1 *= inv;
    m2 *= inv;
    m3 *= inv;
    m4 *= inv;
    const double rn = std::sqrt(double(n));
    CHECK(std::abs(m1) <= 5.0 / rn);                      // sd of mean = 1/sqrt(n)
    CHECK(std::abs(m2 - 1.0) <= 5.0 * std::sqrt(2.0) / rn);
    CHECK(std::abs(m3) <= 5.0 * std::sqrt(15.0) / rn);    // Var x^3 = 15
    CHECK(std::abs(m4 - 3.0) <= 5.0 * std::sqrt(96.0) / rn);
}

TEST_CASE("tail frequencies match the normal law") {
    const std::size_t n = 4000000;
    NormalStream s(555, 3);
    std::size_t over2 = 0, over_r = 0, negative = 0;
    const double r = detail::ZigguratTables::instance().r;
    for (std::size_t k = 0; k < n; ++k) {
        const double x = s.next_normal();
        if (x < 0.0) ++negative;
        if (std::abs(x) > 2.0) ++over2;
        if (std::abs(x) > r) ++over_r;
    }
    const auto binom_ok = [n](std::size_t hits, double p) {
        const double mean = double(n) * p;
        const double sd = std::sqrt(double(n) * p * (1.0 - p));
        return std::abs(double(hits) - mean) <= 5.0 * sd;
    };
    CHECK(binom_ok(negative, 0.5));
    CHECK(binom_ok(over2, 2.0 * normal_cdf(-2.0)));
    CHECK(binom_ok(over_r, 2.0 * normal_cdf(-r)));  // exercises the tail branch
}

TEST_CASE("empirical CDF stays near the normal CDF") {
    const std::size_t n = 100000;
    NormalStream s(99, 11);
    std::vector<double> xs(n);
    for (auto& x : xs) x = s.next_normal();
    std::sort(xs.begin(), xs.end());
    double dmax = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double F = normal_cdf(xs[k]);
        dmax = std::max(dmax, std::abs(F - double(k) / double(n)));
        dmax = std::max(dmax, std::abs(F - double(k + 1) / double(n)));
    }
    // Kolmogorov-Smirnov: reject level ~1e-4 sits near 1.95/sqrt(n).
    CHECK(dmax <= 2.2 / std::sqrt(double(n)));
}

TEST_CASE("quantile function inverts the CDF") {
    CHECK(normal_quantile(0.5) == 0.0);
    for (double p : {1e-12, 1e-6, 0.02, 0.3, 0.682689, 0.9, 0.999999, 1 - 1e-12}) {
        const double x = normal_quantile(p);
        CHECK(normal_cdf(x) == doctest::Approx(p).epsilon(1e-11));
    }
    CHECK(normal_quantile(0.682689) == doctest::Approx(0.4752314681704502).epsilon(1e-12));
    CHECK_THROWS_AS(normal_quantile(0.0), std::invalid_argument);
    CHECK_THROWS_AS(normal_quantile(1.0), std::invalid_argument);
    CHECK_THROWS_AS(normal_quantile(-0.5), std::invalid_argument);
    CHECK_THROWS_AS(normal_quantile(std::nan("")), std::invalid_argument);
}
