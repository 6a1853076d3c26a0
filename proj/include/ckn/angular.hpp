#ifndef CKN_ANGULAR_HPP
#define CKN_ANGULAR_HPP

#include "ckn/quadrature.hpp"

#include <memory>
#include <vector>

namespace ckn {

// Quadrature rule on the circle [-pi, pi] with profile values cached at the
// nodes, for tensor integrals against radial factors.
struct AngularNodes {
    std::vector<double> theta;
    std::vector<double> weight;
    std::vector<double> B;  // profile value
    std::vector<double> dB; // profile derivative
};

// Angular factor on the unit circle.
//   constant(c)        B = c
//   singular_power(s)  B = |theta|^-s, 0 < s < 1 (integrable, not in L^q
//                      once q s >= 1)
//   mollified(base,m)  convolution of the base with a smooth bump kernel of
//                      width 1/m; smooth and periodic for any base
class AngularProfile {
public:
    enum class Kind { Constant, SingularPower, Mollified };

    static AngularProfile constant(double value = 1.0);
    static AngularProfile singular_power(double s);
    static AngularProfile mollified(const AngularProfile& base, long long index);

    Kind kind() const { return kind_; }
    double exponent() const { return s_; }      // singular/mollified-of-singular
    double width() const { return width_; }     // mollified only
    long long index() const { return index_; }

    double value(double theta) const;
    double derivative(double theta) const;

    // integral of |B|^p over the circle; throws hypothesis_error when the
    // integral diverges (p * s >= 1 for the raw singular profile)
    QuadratureResult integral_abs_pow(double p) const;
    // integral of |B'| over the circle; diverges for the raw singular profile
    QuadratureResult integral_abs_derivative() const;
    // L1 distance between a mollified profile and its base
    QuadratureResult l1_distance_to_base() const;

    // nodes adapted to the profile scale, with cached values
    AngularNodes nodes(std::size_t min_panels = 32) const;

private:
    AngularProfile() = default;
    Kind kind_ = Kind::Constant;
    double c_ = 1.0;    // constant value
    double s_ = 0.0;    // base exponent
    double width_ = 0.0;
    long long index_ = 0;
};

} // namespace ckn

#endif
