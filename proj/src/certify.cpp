#include "ckn/certify.hpp"
#include "ckn/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace ckn {

SharpConstants sharp_constants(int n, double q, double gamma) {
    if (n < 1) throw spec_error("dimension must be at least 1");
    if (!(q >= 1.0) || !std::isfinite(q))
        throw hypothesis_error("exponent q must satisfy q >= 1");
    if (gamma == 0.0 || !std::isfinite(gamma))
        throw hypothesis_error("gamma must be finite and nonzero");
    const double tau = 1.0 - 1.0 / q;
    if (!(tau <= 1.0 / n + 1e-12))
        throw hypothesis_error("constraint 0 <= 1 - 1/q <= 1/n violated");
    SharpConstants sc;
    sc.n = n;
    sc.q = q;
    sc.gamma = gamma;
    sc.omega_n = sphere_area(n);
    sc.tau_1q = tau;
    sc.s_1q = std::pow(sc.omega_n, tau) * std::pow(q, 1.0 / q);
    sc.s_radial = sc.s_1q * std::pow(std::fabs(gamma), 1.0 / q);
    return sc;
}

QuotientReport assess_quotient(const QuadratureResult& lhs,
                               const QuadratureResult& rhs, double theory,
                               std::string source, std::string label) {
    QuotientReport r;
    r.label = std::move(label);
    r.lhs = lhs.value;
    r.rhs = rhs.value;
    r.theory_constant = theory;
    r.theory_source = std::move(source);
    if (!(rhs.value > 0.0)) {
        r.quotient = std::numeric_limits<double>::infinity();
        r.est_error = 0.0;
        r.pass = true; // degenerate dual side; the bound holds trivially
        return r;
    }
    r.quotient = lhs.value / rhs.value;
    r.est_error = (lhs.est_error + r.quotient * rhs.est_error) / rhs.value;
    r.pass = r.quotient >= theory * (1.0 - 1e-3) - 3.0 * r.est_error;
    return r;
}

namespace {

TestFunction1D random_test_function(Rng& rng, double lo, double hi,
                                    std::size_t index) {
    if (index % 4 == 3) {
        const double center = rng.uniform(lo + 0.25 * (hi - lo), hi - 0.25 * (hi - lo));
        const double cap = 2.0 * std::min(center - lo, hi - center);
        const double width = cap * rng.uniform(0.3, 0.95);
        const double shape = rng.uniform(0.5, 2.0);
        return TestFunction1D::bump(center, width, shape);
    }
    const int k = 3 + static_cast<int>(rng.below(5));
    std::vector<double> kn(static_cast<std::size_t>(k) + 2);
    std::vector<double> vals(kn.size(), 0.0);
    const double span = std::log(hi / lo);
    kn.front() = lo;
    kn.back() = hi;
    for (int j = 1; j <= k; ++j) {
        const double p = (j + 0.45 + 0.9 * (rng.next_double() - 0.5)) / (k + 1);
        kn[static_cast<std::size_t>(j)] = lo * std::exp(p * span);
    }
    for (int j = 1; j <= k; ++j)
        vals[static_cast<std::size_t>(j)] = rng.uniform(-1.0, 1.0);
    return TestFunction1D::piecewise_linear(std::move(kn), std::move(vals));
}

AngularProfile battery_angular(std::size_t index, int n) {
    if (n != 2) return AngularProfile::constant(1.0);
    switch (index % 3) {
    case 1:
        return AngularProfile::mollified(AngularProfile::singular_power(0.6), 16);
    case 2:
        return AngularProfile::mollified(AngularProfile::singular_power(0.75), 64);
    default:
        return AngularProfile::constant(1.0);
    }
}

std::string indexed_label(const char* stem, std::size_t i) {
    std::ostringstream os;
    os << stem << "-" << i;
    return os.str();
}

} // namespace

BatteryReport verify_battery(const WeightSpec& w, const EnvelopeResult& env,
                             const NdcReport* ndc, int n, std::size_t count,
                             std::uint64_t seed) {
    if (n < 1) throw spec_error("dimension must be at least 1");
    double theory = 1.0;
    std::string source = "1d_best_constant";
    if (n >= 2) {
        if (ndc == nullptr)
            throw hypothesis_error("the polar battery needs a gauge report");
        const double q_cap = static_cast<double>(n) / (n - 1);
        if (!(env.q >= 1.0) || env.q > q_cap + 1e-12)
            throw hypothesis_error("polar battery requires 1 <= q <= n/(n-1)");
        if (env.q > 1.0 && ndc->verdict != NdcVerdict::Satisfied)
            throw hypothesis_error(
                "polar battery with q > 1 requires a satisfied gauge verdict");
        theory = std::min(ndc->C0, 1.0) *
                 std::pow(sphere_area(n), 1.0 - 1.0 / env.q);
        source = "nd_ndc_constant";
    }

    const double eta = env.grid.eta();
    const double lo = 0.1 * eta, hi = 0.9 * eta;

    BatteryReport rep;
    rep.theory_constant = theory;
    Rng rng(seed);
    for (std::size_t i = 0; i < count; ++i) {
        const TestFunction1D u = random_test_function(rng, lo, hi, i);
        if (n == 1) {
            rep.entries.push_back(assess_quotient(lhs_1d(u, w), rhs_1d(u, env),
                                                  theory, source,
                                                  indexed_label("random", i)));
        } else {
            PolarTestFunction pu{u, battery_angular(i, n)};
            rep.entries.push_back(
                assess_quotient(lhs_polar(pu, w, n), rhs_polar(pu, env, n),
                                theory, source, indexed_label("product", i)));
        }
    }
    if (n == 1) {
        for (double h : {0.04 * eta, 0.01 * eta}) {
            const TestFunction1D u = make_localized(env, 0.5 * eta, h);
            std::ostringstream label;
            label << "localized-h" << h;
            rep.entries.push_back(assess_quotient(lhs_1d(u, w), rhs_1d(u, env),
                                                  theory, source, label.str()));
        }
    }

    rep.min_quotient = std::numeric_limits<double>::infinity();
    rep.all_pass = true;
    for (const auto& e : rep.entries) {
        rep.min_quotient = std::min(rep.min_quotient, e.quotient);
        rep.all_pass = rep.all_pass && e.pass;
    }
    return rep;
}

BestConstantReport estimate_best_constant_1d(const WeightSpec& w,
                                             const EnvelopeResult& env, double x,
                                             const std::vector<double>& h_sweep) {
    if (h_sweep.empty()) throw spec_error("the width sweep must be nonempty");
    BestConstantReport rep;
    rep.anchor = x;
    rep.theory = 1.0;
    rep.constant = std::numeric_limits<double>::infinity();
    bool any_clean = false;
    for (double h : h_sweep) {
        const TestFunction1D u = make_localized(env, x, h);
        const auto qr = assess_quotient(lhs_1d(u, w), rhs_1d(u, env), 1.0,
                                        "1d_best_constant", "");
        rep.sweep.push_back({h, qr.quotient, qr.est_error, u.plateau_window()});
        rep.constant = std::min(rep.constant, qr.quotient);
        any_clean = any_clean || !u.plateau_window();
    }
    if (!any_clean)
        throw plateau_image_error(
            "every window overlaps a plateau; anchor the sweep elsewhere");
    return rep;
}

namespace {

// integral of |u|^q r^{qg-1} dr over the support, with constant runs of u
// integrated in closed form (the density is a pure power)
QuadratureResult power_q_norm(const TestFunction1D& u, double q, double qg) {
    QuadratureResult total{0.0, 0.0, 0};
    const auto& kn = u.knots();
    const auto& vals = u.values();
    if (u.extends_left()) {
        if (!(qg > 0.0))
            throw hypothesis_error(
                "a flat tail at the origin needs an integrable power density");
        total.value += std::pow(vals.front(), q) * std::pow(kn.front(), qg) / qg;
    }
    for (std::size_t i = 0; i + 1 < kn.size(); ++i) {
        if (vals[i] == vals[i + 1]) {
            total.value += std::pow(std::fabs(vals[i]), q) *
                           (std::pow(kn[i + 1], qg) - std::pow(kn[i], qg)) / qg;
            continue;
        }
        total += integrate_gl(
            [&](double t) {
                return std::pow(std::fabs(u.value(t)), q) * std::pow(t, qg - 1.0);
            },
            linear_breaks(kn[i], kn[i + 1], 4));
    }
    return total;
}

} // namespace

RadialBestConstantReport estimate_best_constant_radial(
    int n, double q, double gamma, double R,
    const std::vector<double>& eps_sweep) {
    if (!(R > 0.0) || !std::isfinite(R)) throw spec_error("R must be positive");
    if (eps_sweep.empty()) throw spec_error("the smoothing sweep must be nonempty");
    RadialBestConstantReport rep;
    rep.constants = sharp_constants(n, q, gamma);
    rep.constant = std::numeric_limits<double>::infinity();

    const double area = sphere_area(n);
    const WeightSpec w = gamma > 0.0 ? WeightSpec::power(gamma, 2.0 * R)
                                     : WeightSpec::power(gamma, 256.0 * R);
    for (double eps : eps_sweep) {
        if (!(eps > 0.0) || !(eps < 0.5 * R))
            throw spec_error("smoothing scales must lie in (0, R/2)");
        TestFunction1D u =
            gamma > 0.0
                ? TestFunction1D::smoothed_indicator(R, eps)
                : TestFunction1D::piecewise_linear(
                      {R, R + eps, 100.0 * R, 200.0 * R}, {0.0, 1.0, 1.0, 0.0});
        QuadratureResult lhs = lhs_1d(u, w);
        lhs.value *= area;
        lhs.est_error *= area;
        QuadratureResult rhs = power_q_norm(u, q, q * gamma);
        rhs.value *= area;
        rhs.est_error *= area;
        if (rhs.value > 0.0) {
            const double root = std::pow(rhs.value, 1.0 / q);
            rhs.est_error = rhs.est_error / q * root / rhs.value;
            rhs.value = root;
        }
        const auto qr = assess_quotient(lhs, rhs, rep.constants.s_radial,
                                        "radial_ckn_constant", "");
        rep.sweep.push_back({eps, qr.quotient, qr.est_error, false});
        rep.constant = std::min(rep.constant, qr.quotient);
    }
    return rep;
}

CounterexampleAssessment run_counterexample(const WeightSpec& w,
                                            const EnvelopeResult& env,
                                            const NdcReport& ndc, double q,
                                            int j_count, double s) {
    CounterexampleAssessment a;
    a.seq = make_counterexample_sequence(w, env, ndc, q, j_count, s);
    double lhs_min = std::numeric_limits<double>::infinity(), lhs_max = 0.0;
    a.rhs_increasing = true;
    a.quotient_decreasing = true;
    const CounterexampleTerm* prev = nullptr;
    for (const auto& term : a.seq.terms) {
        lhs_min = std::min(lhs_min, term.lhs);
        lhs_max = std::max(lhs_max, term.lhs);
        if (prev != nullptr) {
            a.rhs_increasing = a.rhs_increasing && term.rhs > prev->rhs;
            a.quotient_decreasing =
                a.quotient_decreasing && term.quotient < prev->quotient;
        }
        prev = &term;
    }
    a.lhs_spread = lhs_min > 0.0 ? lhs_max / lhs_min
                                 : std::numeric_limits<double>::infinity();
    a.rhs_growth = a.seq.terms.size() > 1 && a.seq.terms.front().rhs > 0.0
                       ? a.seq.terms.back().rhs / a.seq.terms.front().rhs
                       : 1.0;
    a.lhs_bounded = a.lhs_spread <= 5.0;
    return a;
}

} // namespace ckn
