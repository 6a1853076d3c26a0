#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ckn/envelope.hpp"
#include "ckn/ndc.hpp"
#include "ckn/weight.hpp"

#include <cmath>
#include <vector>

using namespace ckn;

namespace {

NdcReport report_for(const WeightSpec& w, std::size_t grid_points = 4096) {
    const auto cls = classify(w);
    const Grid grid = Grid::log_uniform(1e-8, 1.0, grid_points);
    const auto env = compute_envelope(w, cls, grid, 2.0);
    return ndc_report(w, cls, env);
}

} // namespace

TEST_CASE("power weights have constant gauge 1/|gamma|") {
    for (double g : {0.5, -0.5, 1.0, -1.0, 2.0}) {
        const auto w = WeightSpec::power(g);
        const auto rep = report_for(w, 2048);
        CHECK(rep.verdict == NdcVerdict::Satisfied);
        CHECK(rep.C0 == doctest::Approx(1.0 / std::abs(g)).epsilon(1e-10));
        for (const auto& s : rep.profile.samples)
            CHECK(s.K == doctest::Approx(1.0 / std::abs(g)).epsilon(1e-10));
        REQUIRE(rep.fitted_alpha.has_value());
        CHECK(std::abs(*rep.fitted_alpha) <= 1e-8);
        CHECK(rep.profile.n_flagged == 0);
    }
}

TEST_CASE("exponential weights collapse with the right slope") {
    for (double a : {0.5, 1.0, 2.0}) {
        for (int sign : {-1, +1}) {
            const auto rep = report_for(WeightSpec::exp_inv_power(sign, a));
            CHECK(rep.verdict == NdcVerdict::ViolatedLimsupZero);
            REQUIRE(rep.fitted_alpha.has_value());
            CHECK(*rep.fitted_alpha == doctest::Approx(a).epsilon(0.05));
            CHECK(rep.infinite_order);
            CHECK(rep.order.status == InfiniteOrderStatus::Yes);
            // witness radii strictly decrease with the order
            for (std::size_t i = 1; i < rep.order.witness.size(); ++i)
                CHECK(rep.order.witness[i].r < rep.order.witness[i - 1].r);
        }
    }
}

TEST_CASE("composite weight inherits the exponential collapse") {
    const auto w = WeightSpec::product(WeightSpec::power(1.0),
                                       WeightSpec::exp_inv_power(-1, 1.0));
    const auto rep = report_for(w);
    CHECK(rep.verdict == NdcVerdict::ViolatedLimsupZero);
    // ln w = ln t - 1/t, so K = t/(1+t) ~ t near zero
    REQUIRE(rep.fitted_alpha.has_value());
    CHECK(*rep.fitted_alpha == doctest::Approx(1.0).epsilon(0.05));
    CHECK(rep.infinite_order);
}

TEST_CASE("scaling does not move the gauge") {
    const auto rep = report_for(WeightSpec::scale(2.0, WeightSpec::power(1.0)));
    CHECK(rep.verdict == NdcVerdict::Satisfied);
    CHECK(rep.C0 == doctest::Approx(1.0).epsilon(1e-10));
    CHECK_FALSE(rep.infinite_order);
}

TEST_CASE("finite-order vanishing is recognized as finite") {
    const auto w = WeightSpec::power(3.0);
    const Grid grid = Grid::log_uniform(1e-8, 1.0, 1024);
    const auto rep = infinite_order_detect(w, classify(w), grid);
    CHECK(rep.status == InfiniteOrderStatus::No);
    // the normalized exponent tops out at 3
    CHECK(rep.witness.size() == 3);
}

TEST_CASE("slowly escalating order is left undecided") {
    // ln w = -0.8 (ln r)^2: the normalized exponent 0.8 ln(1/r) is still
    // rising when an 8-decade grid runs out, without reaching order 16
    const Grid grid = Grid::log_uniform(1e-8, 1.0, 512);
    std::vector<double> knots = grid.points, values(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double lr = std::log(knots[i]);
        values[i] = std::exp(-0.8 * lr * lr);
    }
    const auto w = WeightSpec::table(knots, values, 1.0);
    const auto rep = infinite_order_detect(w, WeightClass::w0(), grid);
    CHECK(rep.status == InfiniteOrderStatus::Inconclusive);
    CHECK(rep.witness.size() >= 10);
}

TEST_CASE("threshold above the infimum is inconclusive without decay") {
    const auto w = WeightSpec::power(2.0); // constant gauge 1/2
    const auto cls = classify(w);
    const Grid grid = Grid::log_uniform(1e-8, 1.0, 1024);
    const auto env = compute_envelope(w, cls, grid, 2.0);
    const auto prof = k_profile(w, env);
    CHECK(ndc_check(prof, 1.0, 1e-6).verdict == NdcVerdict::Satisfied);
    CHECK(ndc_check(prof, 1.0, 0.7).verdict == NdcVerdict::Inconclusive);
    CHECK(ndc_check(prof, 1.0, 0.7).C0 == doctest::Approx(0.5).epsilon(1e-10));
}

TEST_CASE("flat segments are flagged, not sampled") {
    const auto w = WeightSpec::table({0.25, 0.5, 1.0}, {1.0, 2.0, 2.0}, 1.0);
    const Grid grid = Grid::from_points({0.25, 0.5, 0.75, 1.0});
    const auto env = compute_envelope(w, WeightClass::w0(), grid, 2.0);
    const auto prof = k_profile(w, env);
    CHECK(prof.n_cells == 3);
    CHECK(prof.n_flagged == 2);
    REQUIRE(prof.samples.size() == 1);
    CHECK(ndc_check(prof, 1.0).verdict == NdcVerdict::Satisfied);
}

TEST_CASE("satisfied gauge pins the envelope above the power bound") {
    // v(r) >= v(eta) (r/eta)^(1/C0) for weights with a positive gauge floor
    for (double g : {0.5, 1.0, 2.0}) {
        const auto w = WeightSpec::power(g);
        const auto cls = classify(w);
        const Grid grid = Grid::log_uniform(1e-8, 1.0, 1024);
        const auto env = compute_envelope(w, cls, grid, 2.0);
        const auto rep = ndc_report(w, cls, env);
        REQUIRE(rep.verdict == NdcVerdict::Satisfied);
        const double inv_c0 = 1.0 / rep.C0;
        for (std::size_t i = 0; i < grid.size(); i += 41) {
            const double bound =
                env.log_eta_tilde + inv_c0 * std::log(grid.points[i] / grid.eta());
            CHECK(env.log_v[i] >= bound - 0.01 * (1.0 + std::abs(bound)));
        }
    }
}
