#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ckn/certify.hpp"
#include "ckn/envelope.hpp"
#include "ckn/errors.hpp"
#include "ckn/functionals.hpp"
#include "ckn/weight.hpp"

#include <cmath>

using namespace ckn;

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

EnvelopeResult envelope_for(const WeightSpec& w, double q,
                            std::size_t n = 4096) {
    return compute_envelope(w, classify(w), Grid::log_uniform(1e-8, 1.0, n), q);
}

} // namespace

TEST_CASE("closed-form constants") {
    const auto c22 = sharp_constants(2, 2.0, 1.0);
    CHECK(c22.omega_n == doctest::Approx(2.0 * kPi).epsilon(1e-14));
    CHECK(c22.s_1q == doctest::Approx(2.0 * std::sqrt(kPi)).epsilon(1e-14));
    CHECK(c22.s_1q == doctest::Approx(3.5449077018110318).epsilon(1e-15));
    CHECK(c22.s_radial == doctest::Approx(3.5449077018110318).epsilon(1e-15));

    // q = 1 erases the area factor; the radial constant is |gamma|
    const auto c12 = sharp_constants(2, 1.0, 2.0);
    CHECK(c12.s_1q == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(c12.s_radial == doctest::Approx(2.0).epsilon(1e-14));

    // |gamma| enters through its q-th root only
    const auto cm = sharp_constants(2, 2.0, -1.5);
    const auto cp = sharp_constants(2, 2.0, 1.5);
    CHECK(cm.s_radial == doctest::Approx(cp.s_radial).epsilon(1e-15));
    CHECK(cp.s_radial ==
          doctest::Approx(2.0 * std::sqrt(kPi) * std::sqrt(1.5)).epsilon(1e-14));

    CHECK_THROWS_AS((void)sharp_constants(2, 3.0, 1.0), hypothesis_error);
    CHECK_THROWS_AS((void)sharp_constants(2, 0.5, 1.0), hypothesis_error);
    CHECK_THROWS_AS((void)sharp_constants(2, 2.0, 0.0), hypothesis_error);
    CHECK_THROWS_AS((void)sharp_constants(0, 2.0, 1.0), spec_error);
}

TEST_CASE("quotient assessment rule") {
    const QuadratureResult good{1.0, 1e-9, 0};
    const QuadratureResult unit{1.0, 1e-9, 0};
    auto rep = assess_quotient(good, unit, 1.0, "src", "label");
    CHECK(rep.pass);
    CHECK(rep.quotient == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(rep.label == "label");
    CHECK(rep.theory_source == "src");

    const QuadratureResult low{0.99, 1e-9, 0};
    CHECK_FALSE(assess_quotient(low, unit, 1.0, "src", "l").pass);

    // a shaky estimate widens the accepted band
    const QuadratureResult shaky{0.99, 0.01, 0};
    CHECK(assess_quotient(shaky, unit, 1.0, "src", "l").pass);

    // degenerate dual side passes with an infinite quotient
    const QuadratureResult zero{0.0, 0.0, 0};
    const auto deg = assess_quotient(good, zero, 1.0, "src", "l");
    CHECK(deg.pass);
    CHECK(std::isinf(deg.quotient));
}

TEST_CASE("tent quotient against the linear weight is sqrt(6)") {
    const auto w = WeightSpec::power(1.0);
    const auto env = envelope_for(w, 2.0);
    const auto u = TestFunction1D::piecewise_linear({0.25, 0.5, 0.75},
                                                    {0.0, 1.0, 0.0});
    const double quotient = lhs_1d(u, w).value / rhs_1d(u, env).value;
    // the density behind rhs_1d is cell-averaged, so the quotient carries
    // an O(h^2) grid error on top of the closed form
    CHECK(quotient == doctest::Approx(std::sqrt(6.0)).epsilon(1e-5));
}

TEST_CASE("one-dimensional battery holds for vanishing and blowing-up weights") {
    for (const char* text : {"pow(1)", "pow(-1)", "expinv(1,-)"}) {
        const auto w = parse_weight(text);
        const auto env = envelope_for(w, 2.0, 2048);
        const auto rep = verify_battery(w, env, nullptr, 1, 12, 99u);
        CHECK(rep.theory_constant == 1.0);
        CHECK(rep.entries.size() >= 12); // battery plus localized members
        CHECK(rep.all_pass);
        CHECK(rep.min_quotient >= 1.0 - 1e-3);
    }
}

TEST_CASE("battery is deterministic in the seed") {
    const auto w = WeightSpec::power(1.0);
    const auto env = envelope_for(w, 2.0, 1024);
    const auto a = verify_battery(w, env, nullptr, 1, 6, 42u);
    const auto b = verify_battery(w, env, nullptr, 1, 6, 42u);
    REQUIRE(a.entries.size() == b.entries.size());
    for (std::size_t i = 0; i < a.entries.size(); ++i) {
        CHECK(a.entries[i].lhs == b.entries[i].lhs);
        CHECK(a.entries[i].rhs == b.entries[i].rhs);
        CHECK(a.entries[i].label == b.entries[i].label);
    }
    const auto c = verify_battery(w, env, nullptr, 1, 6, 43u);
    bool any_moved = false;
    for (std::size_t i = 0; i < std::min(a.entries.size(), c.entries.size()); ++i)
        any_moved = any_moved || a.entries[i].lhs != c.entries[i].lhs;
    CHECK(any_moved);
}

TEST_CASE("planar battery runs against the gauge constant") {
    const auto w = WeightSpec::power(1.0);
    const auto env = envelope_for(w, 2.0, 2048);
    const auto ndc = ndc_report(w, classify(w), env);
    REQUIRE(ndc.verdict == NdcVerdict::Satisfied);

    const auto rep = verify_battery(w, env, &ndc, 2, 8, 5u);
    // theory: min(C0, 1) * omega^(1-1/q) with C0 = 1
    CHECK(rep.theory_constant == doctest::Approx(std::sqrt(2.0 * kPi)).epsilon(1e-12));
    CHECK(rep.all_pass);

    // without a gauge report the planar battery refuses to run
    CHECK_THROWS_AS((void)verify_battery(w, env, nullptr, 2, 4, 5u),
                    hypothesis_error);
    // supercritical exponent
    const auto env3 = envelope_for(w, 2.0, 512);
    const auto ndc3 = ndc_report(w, classify(w), env3);
    CHECK_THROWS_AS((void)verify_battery(w, env3, &ndc3, 3, 4, 5u),
                    hypothesis_error);
}

TEST_CASE("planar battery with a collapsing gauge requires q = 1") {
    const auto w = WeightSpec::exp_inv_power(-1, 1.0);
    const auto env = envelope_for(w, 2.0, 2048);
    const auto ndc = ndc_report(w, classify(w), env);
    REQUIRE(ndc.verdict == NdcVerdict::ViolatedLimsupZero);
    CHECK_THROWS_AS((void)verify_battery(w, env, &ndc, 2, 4, 5u),
                    hypothesis_error);

    const auto env1 = envelope_for(w, 1.0, 2048);
    const auto rep = verify_battery(w, env1, &ndc, 2, 6, 5u);
    CHECK(rep.all_pass); // q = 1 stands regardless of the gauge
}

TEST_CASE("localized sweep approaches the sharp constant one") {
    for (const char* text : {"pow(1)", "pow(2)", "expinv(1,-)"}) {
        const auto w = parse_weight(text);
        const auto env = envelope_for(w, 2.0);
        const auto rep =
            estimate_best_constant_1d(w, env, 0.5, {1e-1, 1e-2, 1e-3});
        CHECK(rep.theory == 1.0);
        CHECK(rep.anchor == 0.5);
        REQUIRE(rep.sweep.size() == 3);
        for (std::size_t i = 1; i < rep.sweep.size(); ++i)
            CHECK(rep.sweep[i].quotient <= rep.sweep[i - 1].quotient + 1e-6);
        CHECK(rep.constant >= 1.0 - 1e-3);
        CHECK(rep.constant <= 1.0 + 1e-2);
    }
}

TEST_CASE("radial sweep brackets the closed-form constant") {
    const auto rep = estimate_best_constant_radial(2, 2.0, 1.0, 1.0,
                                                   {0.05, 0.02, 0.01});
    const double s = rep.constants.s_radial;
    CHECK(s == doctest::Approx(2.0 * std::sqrt(kPi)).epsilon(1e-14));
    REQUIRE(rep.sweep.size() == 3);
    for (const auto& p : rep.sweep) {
        CHECK(p.quotient >= s * (1.0 - 1e-6));
        CHECK(p.quotient <= s * 1.02);
    }
    // smoothing scale controls the excess linearly
    CHECK(rep.sweep[2].quotient - s < 0.3 * (rep.sweep[0].quotient - s));
    CHECK(rep.constant == rep.sweep[2].quotient);

    // blow-up side: same constant for mirrored exponents
    const auto plus = estimate_best_constant_radial(2, 2.0, 1.5, 1.0, {0.02});
    const auto minus = estimate_best_constant_radial(2, 2.0, -1.5, 1.0, {0.02});
    CHECK(plus.constant ==
          doctest::Approx(minus.constant).epsilon(0.01));

    CHECK_THROWS_AS(
        (void)estimate_best_constant_radial(2, 2.0, 1.0, 1.0, {0.9}),
        spec_error); // eps must stay below R/2
}

TEST_CASE("divergence run shows the documented signature") {
    const auto w = WeightSpec::exp_inv_power(-1, 1.0);
    const auto env = envelope_for(w, 2.0);
    const auto ndc = ndc_report(w, classify(w), env);
    const auto a = run_counterexample(w, env, ndc, 2.0, 4);
    REQUIRE(a.seq.terms.size() == 4);
    CHECK(a.lhs_bounded);
    CHECK(a.rhs_increasing);
    CHECK(a.quotient_decreasing);
    CHECK(a.lhs_spread <= 5.0);
    CHECK(a.rhs_growth > 1.0);
    for (std::size_t i = 1; i < a.seq.terms.size(); ++i) {
        CHECK(a.seq.terms[i].rhs > a.seq.terms[i - 1].rhs);
        CHECK(a.seq.terms[i].quotient < a.seq.terms[i - 1].quotient);
        CHECK(a.seq.terms[i].log10_eps < a.seq.terms[i - 1].log10_eps);
    }
}
