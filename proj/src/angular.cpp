#include "ckn/angular.hpp"
#include "ckn/errors.hpp"

#include <algorithm>
#include <cmath>

namespace ckn {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

// smooth bump on (-1, 1), peak value e^0 = 1/e at 0 before normalization
double bump01(double z) {
    const double d = 1.0 - z * z;
    if (!(d > 0.0)) return 0.0;
    return std::exp(-1.0 / d);
}

double bump01_deriv(double z) {
    const double d = 1.0 - z * z;
    if (!(d > 0.0)) return 0.0;
    return std::exp(-1.0 / d) * (-2.0 * z / (d * d));
}

// mass of bump01 over (-1, 1); fixed so kernels integrate to one
double bump01_mass() {
    static const double mass = [] {
        return integrate_gl([](double z) { return bump01(z); },
                            linear_breaks(-1.0, 1.0, 16))
            .value;
    }();
    return mass;
}

// base profile value with periodic wrap; only |x| <= pi + width occurs
double wrapped_abs(double x) {
    if (x > kPi) return 2.0 * kPi - x;
    if (x < -kPi) return x + 2.0 * kPi;
    return std::fabs(x);
}

} // namespace

AngularProfile AngularProfile::constant(double value) {
    if (!std::isfinite(value))
        throw spec_error("angular constant must be finite");
    AngularProfile p;
    p.kind_ = Kind::Constant;
    p.c_ = value;
    return p;
}

AngularProfile AngularProfile::singular_power(double s) {
    if (!(s > 0.0) || !(s < 1.0))
        throw spec_error("singular angular exponent must lie in (0,1)");
    AngularProfile p;
    p.kind_ = Kind::SingularPower;
    p.s_ = s;
    return p;
}

AngularProfile AngularProfile::mollified(const AngularProfile& base, long long index) {
    if (index < 2)
        throw spec_error("mollification index must be at least 2");
    if (base.kind_ == Kind::Mollified)
        throw spec_error("mollifying an already mollified profile is not supported");
    AngularProfile p;
    p.kind_ = Kind::Mollified;
    p.c_ = base.c_;
    p.s_ = base.kind_ == Kind::SingularPower ? base.s_ : 0.0;
    p.width_ = 1.0 / static_cast<double>(index);
    p.index_ = index;
    return p;
}

double AngularProfile::value(double theta) const {
    switch (kind_) {
    case Kind::Constant:
        return c_;
    case Kind::SingularPower: {
        const double a = wrapped_abs(theta);
        return std::pow(a, -s_);
    }
    case Kind::Mollified:
        break;
    }
    if (s_ == 0.0) return c_; // mollified constant is the constant itself

    const double delta = width_;
    const double norm = 1.0 / (delta * bump01_mass());
    const auto kernel = [&](double tau) { return norm * bump01(tau / delta); };

    // segment the convolution window at the singularity and the wrap kinks
    std::vector<double> cuts{theta - delta, theta + delta};
    for (double c : {-kPi, 0.0, kPi})
        if (c > cuts.front() && c < cuts.back()) cuts.push_back(c);
    std::sort(cuts.begin(), cuts.end());

    double total = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double a = cuts[i], b = cuts[i + 1];
        if (!(b > a)) continue;
        if (b <= -kPi || a >= kPi) {
            // wrapped branch: base is smooth there
            total += integrate_gl(
                         [&](double x) {
                             return kernel(theta - x) * std::pow(wrapped_abs(x), -s_);
                         },
                         linear_breaks(a, b, 4))
                         .value;
        } else {
            total += integrate_power_singular(
                         [&](double x) { return kernel(theta - x); }, s_, 0.0, a, b)
                         .value;
        }
    }
    return total;
}

double AngularProfile::derivative(double theta) const {
    switch (kind_) {
    case Kind::Constant:
        return 0.0;
    case Kind::SingularPower: {
        const double a = wrapped_abs(theta);
        if (a == 0.0) throw domain_error("derivative of singular profile at its pole");
        // d/dtheta |theta|^-s, with orientation flipped on the wrapped branch
        double d = -s_ * std::pow(a, -s_ - 1.0);
        if (theta > kPi || (theta < 0.0 && theta > -kPi)) d = -d;
        return d;
    }
    case Kind::Mollified:
        break;
    }
    if (s_ == 0.0) return 0.0;

    const double delta = width_;
    const double norm = 1.0 / (delta * delta * bump01_mass());
    const auto kernel_d = [&](double tau) { return norm * bump01_deriv(tau / delta); };

    std::vector<double> cuts{theta - delta, theta + delta};
    for (double c : {-kPi, 0.0, kPi})
        if (c > cuts.front() && c < cuts.back()) cuts.push_back(c);
    std::sort(cuts.begin(), cuts.end());

    double total = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double a = cuts[i], b = cuts[i + 1];
        if (!(b > a)) continue;
        if (b <= -kPi || a >= kPi) {
            total += integrate_gl(
                         [&](double x) {
                             return kernel_d(theta - x) * std::pow(wrapped_abs(x), -s_);
                         },
                         linear_breaks(a, b, 4))
                         .value;
        } else {
            total += integrate_power_singular(
                         [&](double x) { return kernel_d(theta - x); }, s_, 0.0, a, b)
                         .value;
        }
    }
    return total;
}

namespace {

// panel boundaries on [0, pi] refined geometrically toward 0 at a given scale
std::vector<double> half_circle_breaks(double scale) {
    std::vector<double> b;
    b.push_back(0.0);
    double t = std::max(scale, 1e-14);
    t = std::min(t, kPi / 4.0);
    b.push_back(t / 4.0);
    b.push_back(t / 2.0);
    while (t < kPi) {
        b.push_back(t);
        t *= 2.0;
    }
    b.push_back(kPi);
    std::sort(b.begin(), b.end());
    b.erase(std::unique(b.begin(), b.end()), b.end());
    return b;
}

} // namespace

QuadratureResult AngularProfile::integral_abs_pow(double p) const {
    if (!(p > 0.0)) throw hypothesis_error("integral power must be positive");
    switch (kind_) {
    case Kind::Constant:
        return {2.0 * kPi * std::pow(std::fabs(c_), p), 0.0, 0};
    case Kind::SingularPower: {
        const double e = p * s_;
        if (e >= 1.0)
            throw hypothesis_error("profile power is not integrable on the circle");
        return {2.0 * std::pow(kPi, 1.0 - e) / (1.0 - e), 0.0, 0};
    }
    case Kind::Mollified:
        break;
    }
    if (s_ == 0.0) return {2.0 * kPi * std::pow(std::fabs(c_), p), 0.0, 0};
    auto r = integrate_gl([&](double th) { return std::pow(value(th), p); },
                          half_circle_breaks(width_));
    r.value *= 2.0; // profile is even
    r.est_error *= 2.0;
    return r;
}

QuadratureResult AngularProfile::integral_abs_derivative() const {
    switch (kind_) {
    case Kind::Constant:
        return {0.0, 0.0, 0};
    case Kind::SingularPower:
        throw hypothesis_error(
            "derivative of the raw singular profile is not integrable");
    case Kind::Mollified:
        break;
    }
    if (s_ == 0.0) return {0.0, 0.0, 0};
    auto r = integrate_gl([&](double th) { return std::fabs(derivative(th)); },
                          half_circle_breaks(width_));
    r.value *= 2.0; // |B'| is even
    r.est_error *= 2.0;
    return r;
}

QuadratureResult AngularProfile::l1_distance_to_base() const {
    if (kind_ != Kind::Mollified)
        throw hypothesis_error("l1 distance is defined for mollified profiles");
    if (s_ == 0.0) return {0.0, 0.0, 0};

    QuadratureResult total{0.0, 0.0, 0};
    // near the pole the difference inherits the base singularity; absorb it
    total += integrate_power_singular(
        [&](double x) {
            return std::fabs(value(x) * std::pow(x, s_) - 1.0);
        },
        s_, 0.0, 0.0, 2.0 * width_);
    std::vector<double> tail;
    for (double t = 2.0 * width_; t < kPi; t *= 2.0) tail.push_back(t);
    tail.push_back(kPi);
    if (tail.size() < 2) tail.insert(tail.begin(), width_);
    total += integrate_gl(
        [&](double th) { return std::fabs(value(th) - std::pow(th, -s_)); },
        tail);
    total.value *= 2.0;
    total.est_error *= 2.0;
    return total;
}

AngularNodes AngularProfile::nodes(std::size_t min_panels) const {
    std::vector<double> half;
    switch (kind_) {
    case Kind::Constant:
        half = linear_breaks(0.0, kPi, std::max<std::size_t>(min_panels / 2, 4));
        break;
    case Kind::SingularPower:
        half = half_circle_breaks(1e-10);
        break;
    case Kind::Mollified:
        half = half_circle_breaks(s_ == 0.0 ? kPi / 8.0 : width_);
        break;
    }
    // mirror onto [-pi, pi]
    std::vector<double> breaks;
    for (auto it = half.rbegin(); it != half.rend(); ++it) breaks.push_back(-*it);
    for (std::size_t i = 1; i < half.size(); ++i) breaks.push_back(half[i]);

    static const double gx[16] = {
        -0.9894009349916499, -0.9445750230732326, -0.8656312023878318,
        -0.7554044083550030, -0.6178762444026438, -0.4580167776572274,
        -0.2816035507792589, -0.0950125098376374, 0.0950125098376374,
        0.2816035507792589,  0.4580167776572274,  0.6178762444026438,
        0.7554044083550030,  0.8656312023878318,  0.9445750230732326,
        0.9894009349916499};
    static const double gw[16] = {
        0.0271524594117541, 0.0622535239386479, 0.0951585116824928,
        0.1246289712555339, 0.1495959888165767, 0.1691565193950025,
        0.1826034150449236, 0.1894506104550685, 0.1894506104550685,
        0.1826034150449236, 0.1691565193950025, 0.1495959888165767,
        0.1246289712555339, 0.0951585116824928, 0.0622535239386479,
        0.0271524594117541};

    AngularNodes out;
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
        const double a = breaks[i], b = breaks[i + 1];
        if (!(b > a)) continue;
        const double mid = 0.5 * (a + b), hw = 0.5 * (b - a);
        for (int k = 0; k < 16; ++k) {
            const double th = mid + hw * gx[k];
            out.theta.push_back(th);
            out.weight.push_back(hw * gw[k]);
            out.B.push_back(value(th));
            out.dB.push_back(derivative(th));
        }
    }
    return out;
}

} // namespace ckn
