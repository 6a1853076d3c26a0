#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ckn/envelope.hpp"
#include "ckn/errors.hpp"
#include "ckn/functionals.hpp"
#include "ckn/ndc.hpp"
#include "ckn/quadrature.hpp"
#include "ckn/weight.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

using namespace ckn;

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

EnvelopeResult envelope_for(const WeightSpec& w, double q,
                            std::size_t n = 4096) {
    return compute_envelope(w, classify(w), Grid::log_uniform(1e-8, 1.0, n), q);
}

TestFunction1D tent() {
    return TestFunction1D::piecewise_linear({0.25, 0.5, 0.75}, {0.0, 1.0, 0.0});
}

} // namespace

TEST_CASE("tent against the linear weight: exact functional values") {
    const auto w = WeightSpec::power(1.0);
    const auto u = tent();

    // int |u'| t dt = 4 * (t^2/2 over both ramps) = 1
    const auto lhs = lhs_1d(u, w);
    CHECK(lhs.value == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(lhs.est_error <= 1e-10);

    // q = 1: dual density d(v)/dt = 1, so rhs = tent area = 1/4
    const auto env1 = envelope_for(w, 1.0);
    CHECK(rhs_1d(u, env1).value == doctest::Approx(0.25).epsilon(1e-9));

    // q = 2: int u^2 d(t^2) = 1/6, up to the cell-constant density (~h^2)
    const auto env2 = envelope_for(w, 2.0);
    CHECK(rhs_1d_power(u, env2).value == doctest::Approx(1.0 / 6.0).epsilon(1e-5));
    CHECK(rhs_1d(u, env2).value ==
          doctest::Approx(1.0 / std::sqrt(6.0)).epsilon(1e-5));
}

TEST_CASE("test function validation") {
    CHECK_THROWS_AS((void)TestFunction1D::piecewise_linear({0.5, 0.25}, {0.0, 0.0}),
                    spec_error);
    CHECK_THROWS_AS((void)TestFunction1D::piecewise_linear({0.25, 0.75}, {1.0, 0.0}),
                    support_error); // support must close
    CHECK_THROWS_AS((void)TestFunction1D::piecewise_linear({0.25}, {0.0}), spec_error);

    const auto w = WeightSpec::power(1.0);
    const auto env = envelope_for(w, 2.0, 512);
    // active range touching eta is refused
    const auto touching =
        TestFunction1D::piecewise_linear({0.5, 0.9, 1.0}, {0.0, 1.0, 0.0});
    CHECK_THROWS_AS((void)lhs_1d(touching, w), support_error);
    CHECK_THROWS_AS((void)rhs_1d(touching, env), support_error);
}

TEST_CASE("bump functions integrate smoothly") {
    const auto w = WeightSpec::power(2.0);
    const auto u = TestFunction1D::bump(0.5, 0.4);
    CHECK(u.value(0.5) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(u.value(0.3) == 0.0);
    CHECK(u.value(0.7) == 0.0);
    CHECK(u.is_smooth());
    const double h = 1e-6;
    for (double t : {0.42, 0.5, 0.61}) {
        const double fd = (u.value(t + h) - u.value(t - h)) / (2.0 * h);
        CHECK(std::abs(fd - u.derivative(t)) <= 1e-5 * (1.0 + std::abs(u.derivative(t))));
    }
    const auto lhs = lhs_1d(u, w);
    CHECK(lhs.value > 0.0);
    CHECK(lhs.est_error <= 1e-5 * (1.0 + lhs.value));
    // quotient respects the inequality with constant one
    const auto env = envelope_for(w, 2.0);
    CHECK(lhs.value / rhs_1d(u, env).value >= 1.0 - 1e-9);
}

TEST_CASE("smoothed indicator carries a flat tail to the origin") {
    const auto u = TestFunction1D::smoothed_indicator(0.5, 0.1);
    CHECK(u.extends_left());
    CHECK_FALSE(u.extends_right());
    CHECK(u.support_lo() == 0.0);
    CHECK(u.support_hi() == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(u.value(0.01) == 1.0);
    CHECK(u.value(0.4) == 1.0);
    CHECK(u.value(0.45) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(u.value(0.6) == 0.0);
    CHECK(u.derivative(0.42) == doctest::Approx(-10.0).epsilon(1e-12));

    // gradient mass against t^2: int_{0.4}^{0.5} 10 t^2 dt = (0.125-0.064)/3*10
    const auto lhs = lhs_1d(u, WeightSpec::power(2.0));
    CHECK(lhs.value == doctest::Approx(10.0 * (0.125 - 0.064) / 3.0).epsilon(1e-10));
}

TEST_CASE("sphere areas") {
    CHECK(sphere_area(1) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(sphere_area(2) == doctest::Approx(2.0 * kPi).epsilon(1e-14));
    CHECK(sphere_area(3) == doctest::Approx(4.0 * kPi).epsilon(1e-14));
    CHECK(sphere_area(4) == doctest::Approx(2.0 * kPi * kPi).epsilon(1e-14));
    CHECK_THROWS_AS((void)sphere_area(0), spec_error);
}

TEST_CASE("polar functionals factor over constant angular profiles") {
    const auto w = WeightSpec::power(1.0);
    const auto env = envelope_for(w, 2.0);
    const PolarTestFunction u{tent(), AngularProfile::constant(3.0)};

    const auto lp = lhs_polar(u, w, 2);
    CHECK(lp.value == doctest::Approx(2.0 * kPi * 3.0 * 1.0).epsilon(1e-10));
    const auto rp = rhs_polar(u, env, 2);
    const double r1 = rhs_1d(tent(), env).value;
    CHECK(rp.value ==
          doctest::Approx(std::sqrt(2.0 * kPi) * 3.0 * r1).epsilon(1e-9));

    // same factorization in dimension 3
    const auto env15 = envelope_for(w, 1.5);
    const PolarTestFunction u3{tent(), AngularProfile::constant(1.0)};
    CHECK(lhs_polar(u3, w, 3).value == doctest::Approx(4.0 * kPi).epsilon(1e-9));
    CHECK(rhs_polar(u3, env15, 3).value ==
          doctest::Approx(std::pow(4.0 * kPi, 1.0 / 1.5) *
                          rhs_1d(tent(), env15).value)
              .epsilon(1e-9));
}

TEST_CASE("planar tensor quotient sits between the separable bounds") {
    const auto w = WeightSpec::power(1.0);
    const auto B = AngularProfile::mollified(AngularProfile::singular_power(0.6), 16);
    const PolarTestFunction u{tent(), B};

    const double ib = B.integral_abs_pow(1.0).value;
    const double idb = B.integral_abs_derivative().value;
    // int (A/r) w dr = tent area for w = r
    const double amass = 0.25;

    const auto lp = lhs_polar(u, w, 2);
    CHECK(lp.value >= 1.0 * ib - 1e-8);
    CHECK(lp.value <= 1.0 * ib + amass * idb + 1e-8);

    // non-constant profiles are planar-only
    CHECK_THROWS_AS((void)lhs_polar(u, w, 3), hypothesis_error);
}

TEST_CASE("localized window maximizes the quotient") {
    const auto w = WeightSpec::power(1.0);
    const auto env = envelope_for(w, 2.0);
    const double x = 0.5, h = 1e-3;
    const auto u = make_localized(env, x, h);
    CHECK(u.extends_left());
    CHECK(u.support_lo() == 0.0);
    CHECK(u.active_lo() == doctest::Approx(x).epsilon(1e-12));
    CHECK(u.active_hi() == doctest::Approx(x + h).epsilon(1e-12));
    CHECK_FALSE(u.plateau_window());

    const double quotient = lhs_1d(u, w).value / rhs_1d(u, env).value;
    const double predicted = h / (x * std::log1p(h / x));
    CHECK(quotient >= 1.0 - 1e-3);
    CHECK(quotient <= predicted + 1e-3);

    const auto family = make_localized_family(env, x, {1e-2, 1e-3});
    REQUIRE(family.size() == 2);
    // narrower windows push the quotient down toward one
    const double q0 = lhs_1d(family[0], w).value / rhs_1d(family[0], env).value;
    const double q1 = lhs_1d(family[1], w).value / rhs_1d(family[1], env).value;
    CHECK(q1 < q0);

    CHECK_THROWS_AS((void)make_localized(env, 0.9999, 1e-2), support_error);
    CHECK_THROWS_AS((void)make_localized(env, 1e-9, 1e-3), support_error);
}

TEST_CASE("localized window on the blow-up branch") {
    const auto w = WeightSpec::power(-1.0);
    const auto env = envelope_for(w, 2.0);
    CHECK(env.kind == EnvelopeKind::Decreasing);
    const auto u = make_localized(env, 0.5, 1e-2);
    CHECK(u.extends_right()); // constant tail toward eta
    CHECK(u.active_hi() == doctest::Approx(0.5).epsilon(1e-12));
    const double quotient = lhs_1d(u, w).value / rhs_1d(u, env).value;
    CHECK(quotient >= 1.0 - 1e-3);
    // finite eta leaves a residual: the window at x sees only the dual mass
    // in (x, eta), so the limit is 1/sqrt(1 - (x/eta)^2), not one
    CHECK(quotient <= (1.0 / std::sqrt(1.0 - 0.25)) * 1.01);
}

TEST_CASE("divergence profile is normalized") {
    const auto w = WeightSpec::exp_inv_power(-1, 1.0);
    const auto env = envelope_for(w, 2.0);
    const auto a = counterexample_bump(env);
    CHECK(a.increasing);
    CHECK(a.lo == doctest::Approx(0.25 * env.eta_tilde).epsilon(1e-12));
    CHECK(a.hi == doctest::Approx(0.75 * env.eta_tilde).epsilon(1e-12));
    CHECK(bump_gradient_mass(a).value == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(a.value(a.lo) == 0.0);
    CHECK(a.value(a.hi) == 0.0);
    CHECK(a.value(0.5 * (a.lo + a.hi)) > 0.0);
}

TEST_CASE("sequence construction enforces its hypotheses") {
    const auto sat = WeightSpec::power(2.0);
    const auto env_sat = envelope_for(sat, 2.0, 1024);
    const auto ndc_sat = ndc_report(sat, classify(sat), env_sat);
    CHECK_THROWS_AS(
        (void)make_counterexample_sequence(sat, env_sat, ndc_sat, 2.0, 3),
        hypothesis_error);

    const auto w = WeightSpec::exp_inv_power(-1, 1.0);
    const auto env = envelope_for(w, 2.0, 1024);
    const auto ndc = ndc_report(w, classify(w), env);
    REQUIRE(ndc.verdict == NdcVerdict::ViolatedLimsupZero);
    CHECK_THROWS_AS((void)make_counterexample_sequence(w, env, ndc, 1.0, 3),
                    hypothesis_error);
    CHECK_THROWS_AS((void)make_counterexample_sequence(w, env, ndc, 3.0, 3),
                    hypothesis_error);
    CHECK_THROWS_AS((void)make_counterexample_sequence(w, env, ndc, 2.0, 0),
                    spec_error);
    CHECK_THROWS_AS((void)make_counterexample_sequence(w, env, ndc, 2.0, 3, 0.4),
                    hypothesis_error); // s <= 1/q
}

TEST_CASE("sequence terms agree with direct integration in the dual variable") {
    const auto w = WeightSpec::exp_inv_power(-1, 1.0);
    const auto env = envelope_for(w, 2.0);
    const auto ndc = ndc_report(w, classify(w), env);
    const double q = 2.0;
    const auto seq = make_counterexample_sequence(w, env, ndc, q, 1);
    REQUIRE(seq.terms.size() == 1);
    const auto& t = seq.terms[0];
    CHECK(t.moll_index == 16); // 2 * 8^j
    CHECK(seq.s == doctest::Approx((1.0 / q + 1.0) / 2.0).epsilon(1e-14));
    REQUIRE(t.eps > 0.0);

    const auto B = AngularProfile::mollified(
        AngularProfile::singular_power(seq.s), t.moll_index);
    CHECK(t.angular_mass == doctest::Approx(B.integral_abs_pow(1.0).value).epsilon(1e-10));
    CHECK(t.angular_q_mass == doctest::Approx(B.integral_abs_pow(q).value).epsilon(1e-10));

    const auto a = counterexample_bump(env);

    // dual side: rhs = (q * int A^q s^(q-1) ds * int B^q)^(1/q)
    const double rhs_direct =
        std::pow(q * bump_q_mass(a, q).value * t.angular_q_mass, 1.0 / q);
    CHECK(t.rhs == doctest::Approx(rhs_direct).epsilon(1e-8));

    // gradient side: tensor integral in sigma = rho / eps
    const auto nodes = B.nodes();
    const double eps = t.eps;
    auto f = [&](double sigma) {
        const double Av = a.value(sigma);
        const double Ad = a.derivative(sigma);
        const double r = env.inverse_log(std::log(eps * sigma));
        const double H = k_gauge(w, r);
        double sum = 0.0;
        for (std::size_t i = 0; i < nodes.theta.size(); ++i) {
            const double grad = Ad * nodes.B[i];
            const double ang = H * Av / sigma * nodes.dB[i];
            sum += nodes.weight[i] * std::sqrt(grad * grad + ang * ang);
        }
        return sum * sigma;
    };
    const double mid = 0.5 * (a.lo + a.hi);
    std::vector<double> breaks;
    for (int i = 0; i <= 24; ++i)
        breaks.push_back(a.lo + (a.hi - a.lo) * i / 24.0);
    breaks.push_back(mid); // duplicate removed by sort below
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
    const auto lhs_direct = integrate_gl(f, breaks);
    CHECK(t.lhs == doctest::Approx(lhs_direct.value).epsilon(1e-5));

    CHECK(t.quotient == doctest::Approx(t.lhs / t.rhs).epsilon(1e-12));
}
