#ifndef CKN_FUNCTIONALS_HPP
#define CKN_FUNCTIONALS_HPP

#include "ckn/angular.hpp"
#include "ckn/envelope.hpp"
#include "ckn/ndc.hpp"
#include "ckn/weight.hpp"

#include <iosfwd>
#include <vector>

namespace ckn {

// Admissible test function on (0, eta): either a smooth bump or a piecewise
// linear function with compact support.  Localized quotient-maximizing
// functions carry a constant tail toward one endpoint; the tail holds no
// derivative mass, so the gradient functional stays finite.
class TestFunction1D {
public:
    static TestFunction1D bump(double center, double width, double shape = 1.0);
    static TestFunction1D piecewise_linear(std::vector<double> knots,
                                           std::vector<double> values);
    // one on (0, edge - eps], falling linearly to zero at edge; admissible
    // for increasing envelopes, where functions need not vanish at the origin
    static TestFunction1D smoothed_indicator(double edge, double eps);

    double value(double t) const;
    double derivative(double t) const; // right-hand slope at knots

    // closure of {u != 0}; a flat tail extends it to 0 or +infinity
    double support_lo() const;
    double support_hi() const;
    // smallest interval carrying the derivative
    double active_lo() const { return knots_.front(); }
    double active_hi() const { return knots_.back(); }

    bool is_smooth() const { return kind_ == Kind::Bump; }
    bool extends_left() const { return extends_left_; }
    bool extends_right() const { return extends_right_; }
    // set when a localized window overlaps a plateau of the envelope
    bool plateau_window() const { return plateau_window_; }

    const std::vector<double>& knots() const { return knots_; }
    const std::vector<double>& values() const { return values_; }

    void write_csv(std::ostream& os) const;

private:
    enum class Kind { Bump, PiecewiseLinear };
    friend TestFunction1D make_localized(const EnvelopeResult&, double, double);

    TestFunction1D() = default;
    Kind kind_ = Kind::PiecewiseLinear;
    double center_ = 0.0, width_ = 0.0, shape_ = 1.0;
    std::vector<double> knots_, values_;
    bool extends_left_ = false, extends_right_ = false, plateau_window_ = false;
};

// Product test function in polar coordinates, u(r, theta) = A(r) B(theta).
struct PolarTestFunction {
    TestFunction1D radial;
    AngularProfile angular = AngularProfile::constant();
};

// surface measure of the unit sphere S^{n-1}
double sphere_area(int n);

// gradient side: integral of |u'| w over (0, eta)
QuadratureResult lhs_1d(const TestFunction1D& u, const WeightSpec& w);
// dual side before the root: sum over cells of Vq * integral of |u|^q
QuadratureResult rhs_1d_power(const TestFunction1D& u, const EnvelopeResult& env);
// dual side: the q-th root of the above
QuadratureResult rhs_1d(const TestFunction1D& u, const EnvelopeResult& env);

// polar functionals for product functions; non-constant angular profiles are
// supported on the circle (n = 2)
QuadratureResult lhs_polar(const PolarTestFunction& u, const WeightSpec& w, int n);
QuadratureResult rhs_polar(const PolarTestFunction& u, const EnvelopeResult& env, int n);

// quotient-maximizing function localized on a window of width h anchored at x:
// the derivative equals the reciprocal envelope on the window and the function
// continues with a constant tail toward the monotone end
TestFunction1D make_localized(const EnvelopeResult& env, double x, double h);
std::vector<TestFunction1D> make_localized_family(const EnvelopeResult& env,
                                                  double x,
                                                  const std::vector<double>& h_sweep);

// Fixed radial profile of the divergence construction, expressed in the
// transplanted variable sigma = rho / eps.  Supported on (lo, hi) and
// normalized so the gradient mass against the branch measure is one.
struct RadialBump {
    double lo = 0.0, hi = 0.0, amp = 1.0;
    bool increasing = true; // branch measure: sigma d sigma vs dsigma/sigma

    double value(double sigma) const;
    double derivative(double sigma) const;
};

// the normalized profile on (eta_tilde/4, 3 eta_tilde/4)
RadialBump counterexample_bump(const EnvelopeResult& env);
// integral of |A'(s)| s^{+/-1} ds (equals one after normalization)
QuadratureResult bump_gradient_mass(const RadialBump& a);
// integral of |A(s)|^q s^{q-1} ds, resp. |A|^q s^{-q-1} ds on the other branch
QuadratureResult bump_q_mass(const RadialBump& a, double q);

struct CounterexampleTerm {
    int j = 0;
    long long moll_index = 0;  // angular mollification index
    double log10_eps = 0.0;    // concentration scale, exact in log10
    double eps = 0.0;          // materialized scale; 0 when below double range
    bool eps_clamped = false;  // tightened to keep the sequence decreasing
    double lhs = 0.0, rhs = 0.0, quotient = 0.0;
    double angular_mass = 0.0;       // ∫|B_j|
    double angular_q_mass = 0.0;     // ∫|B_j|^q
    double angular_deriv_mass = 0.0; // ∫|B_j'|
    double lhs_gradient_part = 0.0;  // separable bound pieces
    double lhs_angular_part = 0.0;
};

struct CounterexampleSequence {
    double q = 2.0;
    double s = 0.75;             // angular singularity exponent
    double log_eta_tilde = 0.0;  // transplanted outer level, natural log
    bool increasing = true;
    std::vector<CounterexampleTerm> terms;
};

// Concentrating product sequence driving the polar quotient to zero when the
// gauge collapses near the origin.  Requires a violated-limsup verdict and
// 1 < q <= 2; s = 0 selects the default exponent (1/q + 1)/2.
CounterexampleSequence make_counterexample_sequence(const WeightSpec& w,
                                                    const EnvelopeResult& env,
                                                    const NdcReport& ndc,
                                                    double q, int j_count,
                                                    double s = 0.0);

} // namespace ckn

#endif
