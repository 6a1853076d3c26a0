#ifndef CKN_CERTIFY_HPP
#define CKN_CERTIFY_HPP

#include "ckn/functionals.hpp"
#include "ckn/ndc.hpp"
#include "ckn/random.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace ckn {

// Closed-form constants of the power-weight model on R^n.
struct SharpConstants {
    int n = 2;
    double q = 2.0;
    double gamma = 1.0;
    double omega_n = 0.0;  // sphere area
    double tau_1q = 0.0;   // 1 - 1/q
    double s_1q = 0.0;     // omega_n^{1-1/q} q^{1/q}
    double s_radial = 0.0; // s_1q |gamma|^{1/q}
};

// Requires gamma != 0 and 0 <= 1 - 1/q <= 1/n.
SharpConstants sharp_constants(int n, double q, double gamma);

struct QuotientReport {
    std::string label;
    double lhs = 0.0, rhs = 0.0;
    double quotient = 0.0; // infinity when rhs vanishes
    double est_error = 0.0;
    double theory_constant = 0.0;
    std::string theory_source;
    bool pass = false;
};

// pass iff quotient >= theory * (1 - 1e-3) - 3 * est_error (degenerate rhs
// passes trivially)
QuotientReport assess_quotient(const QuadratureResult& lhs,
                               const QuadratureResult& rhs, double theory,
                               std::string source, std::string label);

struct BatteryReport {
    std::vector<QuotientReport> entries;
    double theory_constant = 0.0;
    double min_quotient = 0.0;
    bool all_pass = false;
};

// Seeded battery of admissible test functions.  n = 1 runs the 1D quotient
// (theory constant 1) and appends the localized family; n >= 2 runs the
// polar quotient with theory constant min(C0,1) * omega_n^{1-1/q} and
// requires a satisfied gauge verdict.  Supports are kept in the central
// band [0.1 eta, 0.9 eta], away from cell-scale weight variation.
BatteryReport verify_battery(const WeightSpec& w, const EnvelopeResult& env,
                             const NdcReport* ndc, int n, std::size_t count,
                             std::uint64_t seed);

struct BestConstantPoint {
    double h = 0.0; // window width, resp. smoothing scale
    double quotient = 0.0;
    double est_error = 0.0;
    bool plateau_window = false;
};

struct BestConstantReport {
    std::vector<BestConstantPoint> sweep;
    double constant = 0.0; // smallest observed quotient
    double theory = 1.0;
    double anchor = 0.0; // window anchor x
};

// Localized-family sweep; quotients decrease toward the sharp constant 1.
// The decreasing branch is sharp only for eta = infinity; run it on a
// truncated weight and read the residual from the report.
BestConstantReport estimate_best_constant_1d(const WeightSpec& w,
                                             const EnvelopeResult& env, double x,
                                             const std::vector<double>& h_sweep);

struct RadialBestConstantReport {
    SharpConstants constants;
    std::vector<BestConstantPoint> sweep; // h = smoothing scale epsilon
    double constant = 0.0;                // smallest observed quotient
};

// Smoothed-indicator sweep for the radial sharp constant; the indicator of
// a centered ball (gamma > 0) or of its complement capped far out
// (gamma < 0) is asymptotically extremal.
RadialBestConstantReport estimate_best_constant_radial(
    int n, double q, double gamma, double R,
    const std::vector<double>& eps_sweep);

struct CounterexampleAssessment {
    CounterexampleSequence seq;
    double lhs_spread = 0.0; // max lhs / min lhs
    double rhs_growth = 0.0; // last rhs / first rhs
    bool lhs_bounded = false;
    bool rhs_increasing = false;
    bool quotient_decreasing = false;
};

// Runs the divergence construction and checks its signature: bounded lhs,
// strictly growing rhs, strictly falling quotient.
CounterexampleAssessment run_counterexample(const WeightSpec& w,
                                            const EnvelopeResult& env,
                                            const NdcReport& ndc, double q,
                                            int j_count, double s = 0.0);

} // namespace ckn

#endif
