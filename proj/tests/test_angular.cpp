#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ckn/angular.hpp"
#include "ckn/errors.hpp"
#include "ckn/quadrature.hpp"
#include "ckn/random.hpp"

#include <cmath>

using namespace ckn;

namespace {
constexpr double kPi = 3.141592653589793238462643383279502884;
}

TEST_CASE("constant profile closed forms") {
    const auto b = AngularProfile::constant(3.0);
    CHECK(b.value(0.7) == 3.0);
    CHECK(b.derivative(0.7) == 0.0);
    CHECK(b.integral_abs_pow(1.0).value == doctest::Approx(6.0 * kPi).epsilon(1e-14));
    CHECK(b.integral_abs_pow(2.0).value == doctest::Approx(18.0 * kPi).epsilon(1e-14));
    CHECK(b.integral_abs_derivative().value == 0.0);
}

TEST_CASE("singular profile mass matches independent quadrature") {
    for (double s : {0.3, 0.6, 0.75}) {
        const auto b = AngularProfile::singular_power(s);
        CHECK(b.value(0.5) == doctest::Approx(std::pow(0.5, -s)).epsilon(1e-14));
        // wrapped distance beyond the cut
        CHECK(b.value(3.0) == doctest::Approx(std::pow(3.0, -s)).epsilon(1e-14));

        const auto direct = integrate_power_singular(
            [](double) { return 1.0; }, s, 0.0, 0.0, kPi);
        CHECK(b.integral_abs_pow(1.0).value ==
              doctest::Approx(2.0 * direct.value).epsilon(1e-10));

        // p s < 1: closed form against substitution quadrature
        const double p = 0.5 / s;
        const auto direct_p = integrate_power_singular(
            [](double) { return 1.0; }, p * s, 0.0, 0.0, kPi);
        CHECK(b.integral_abs_pow(p).value ==
              doctest::Approx(2.0 * direct_p.value).epsilon(1e-10));
    }
}

TEST_CASE("divergent singular integrals are refused") {
    const auto b = AngularProfile::singular_power(0.6);
    CHECK_THROWS_AS((void)b.integral_abs_pow(2.0), hypothesis_error); // q s = 1.2
    CHECK_THROWS_AS((void)b.integral_abs_derivative(), hypothesis_error);
    CHECK_THROWS_AS((void)AngularProfile::singular_power(0.0), spec_error);
    CHECK_THROWS_AS((void)AngularProfile::singular_power(1.0), spec_error);
}

TEST_CASE("mollification validation") {
    const auto base = AngularProfile::singular_power(0.6);
    CHECK_THROWS_AS((void)AngularProfile::mollified(base, 1), spec_error);
    const auto m = AngularProfile::mollified(base, 16);
    CHECK_THROWS_AS((void)AngularProfile::mollified(m, 32), spec_error);
    CHECK(m.width() == doctest::Approx(1.0 / 16.0).epsilon(1e-15));
    CHECK(m.exponent() == 0.6);
}

TEST_CASE("mollified profiles are even and finite at the pole") {
    const auto b = AngularProfile::mollified(AngularProfile::singular_power(0.75), 16);
    Rng rng(7u);
    for (int i = 0; i < 20; ++i) {
        const double t = rng.uniform(0.0, kPi);
        CHECK(b.value(t) == doctest::Approx(b.value(-t)).epsilon(1e-12));
        CHECK(b.derivative(t) == doctest::Approx(-b.derivative(-t)).epsilon(1e-10));
    }
    CHECK(std::isfinite(b.value(0.0)));
    CHECK(b.value(0.0) > std::pow(1.0 / 16.0, -0.75)); // concentrates above 1/width^s
}

TEST_CASE("mollification preserves total mass") {
    for (double s : {0.6, 0.75}) {
        const double exact = 2.0 * std::pow(kPi, 1.0 - s) / (1.0 - s);
        for (long long m : {8LL, 64LL}) {
            const auto b =
                AngularProfile::mollified(AngularProfile::singular_power(s), m);
            const auto mass = b.integral_abs_pow(1.0);
            CHECK(mass.value == doctest::Approx(exact).epsilon(1e-6));
        }
    }
}

TEST_CASE("mollified profiles converge to the base in L1") {
    const auto base = AngularProfile::singular_power(0.75);
    double prev = -1.0;
    double first = 0.0;
    for (long long m : {8LL, 64LL, 512LL}) {
        const auto b = AngularProfile::mollified(base, m);
        const double d = b.l1_distance_to_base().value;
        CHECK(d > 0.0);
        if (prev > 0.0)
            CHECK(d < prev);
        else
            first = d;
        prev = d;
    }
    // expected decay ~ width^(1-s): ratio (1/64)^(1/4) ~ 0.35
    CHECK(prev < 0.5 * first);
}

TEST_CASE("q-mass grows as the mollification sharpens") {
    // q s > 1: the base q-integral diverges, the mollified one grows like
    // width^(1 - q s)
    const double q = 2.0, s = 0.75;
    double prev = 0.0;
    for (long long m : {8LL, 64LL, 512LL}) {
        const auto b = AngularProfile::mollified(AngularProfile::singular_power(s), m);
        const double g = b.integral_abs_pow(q).value;
        if (prev > 0.0) CHECK(g > 2.0 * prev); // 8^(q s - 1) = 8^(1/2) per step
        prev = g;
    }
}

TEST_CASE("derivative matches finite differences away from the kernel edge") {
    const auto b = AngularProfile::mollified(AngularProfile::singular_power(0.6), 16);
    for (double t : {0.02, 0.2, 1.0, 2.5}) {
        const double h = 1e-5;
        const double fd = (b.value(t + h) - b.value(t - h)) / (2.0 * h);
        const double d = b.derivative(t);
        CHECK(std::abs(fd - d) <= 1e-4 * (1.0 + std::abs(d)));
    }
}

TEST_CASE("node rule integrates cached values consistently") {
    const auto b = AngularProfile::mollified(AngularProfile::singular_power(0.75), 64);
    const auto nodes = b.nodes();
    REQUIRE(nodes.theta.size() == nodes.weight.size());
    REQUIRE(nodes.theta.size() == nodes.B.size());
    REQUIRE(nodes.theta.size() == nodes.dB.size());

    double total = 0.0, mass = 0.0, qmass = 0.0, dmass = 0.0;
    for (std::size_t i = 0; i < nodes.theta.size(); ++i) {
        total += nodes.weight[i];
        mass += nodes.weight[i] * nodes.B[i];
        qmass += nodes.weight[i] * nodes.B[i] * nodes.B[i];
        dmass += nodes.weight[i] * std::abs(nodes.dB[i]);
    }
    CHECK(total == doctest::Approx(2.0 * kPi).epsilon(1e-11));
    CHECK(mass == doctest::Approx(b.integral_abs_pow(1.0).value).epsilon(1e-8));
    CHECK(qmass == doctest::Approx(b.integral_abs_pow(2.0).value).epsilon(1e-8));
    CHECK(dmass == doctest::Approx(b.integral_abs_derivative().value).epsilon(1e-8));

    // node values are the profile's
    for (std::size_t i = 0; i < nodes.theta.size(); i += 97)
        CHECK(nodes.B[i] == doctest::Approx(b.value(nodes.theta[i])).epsilon(1e-12));
}
