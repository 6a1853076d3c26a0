#ifndef CKN_QUADRATURE_HPP
#define CKN_QUADRATURE_HPP

#include <functional>
#include <vector>

namespace ckn {

struct QuadratureResult {
    double value = 0.0;
    double est_error = 0.0; // absolute error estimate
    long n_evals = 0;

    QuadratureResult& operator+=(const QuadratureResult& o) {
        value += o.value;
        est_error += o.est_error;
        n_evals += o.n_evals;
        return *this;
    }
};

using Fn = std::function<double(double)>;

// Fixed-order Gauss-Legendre on each panel [breaks[i], breaks[i+1]].
// The error estimate compares the 16-point value against the embedded
// 8-point value per panel.
QuadratureResult integrate_gl(const Fn& f, const std::vector<double>& breaks);

// Composite trapezoid over the given breakpoints, each panel subdivided
// 2^levels times; est_error is the Richardson comparison of the last two
// refinement levels, value is the finer one.
QuadratureResult integrate_trapezoid(const Fn& f, const std::vector<double>& breaks,
                                     int levels = 3);

// Integral of g(x) * |x - anchor|^(-s) over [a, b] where g is smooth,
// 0 <= s < 1 and anchor <= a or anchor >= b.  The singular factor is
// absorbed exactly by the substitution u = |x - anchor|^(1 - s).
QuadratureResult integrate_power_singular(const Fn& g, double s, double anchor,
                                          double a, double b, int panels = 8);

// Breakpoint builders.
std::vector<double> linear_breaks(double a, double b, int n);
std::vector<double> log_breaks(double a, double b, int n);
// Panels refined geometrically toward `a`: [a, a+scale], doubling away
// until b is reached.
std::vector<double> graded_breaks(double a, double b, double scale);

} // namespace ckn

#endif
