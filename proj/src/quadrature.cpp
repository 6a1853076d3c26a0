#include "ckn/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ckn {

namespace {

// Gauss-Legendre nodes/weights on [-1, 1].
constexpr int kGl16 = 16;
constexpr double gl16_x[kGl16] = {
    -0.9894009349916499, -0.9445750230732326, -0.8656312023878318,
    -0.7554044083550030, -0.6178762444026438, -0.4580167776572274,
    -0.2816035507792589, -0.0950125098376374, 0.0950125098376374,
    0.2816035507792589,  0.4580167776572274,  0.6178762444026438,
    0.7554044083550030,  0.8656312023878318,  0.9445750230732326,
    0.9894009349916499};
constexpr double gl16_w[kGl16] = {
    0.0271524594117541, 0.0622535239386479, 0.0951585116824928,
    0.1246289712555339, 0.1495959888165767, 0.1691565193950025,
    0.1826034150449236, 0.1894506104550685, 0.1894506104550685,
    0.1826034150449236, 0.1691565193950025, 0.1495959888165767,
    0.1246289712555339, 0.0951585116824928, 0.0622535239386479,
    0.0271524594117541};

constexpr int kGl8 = 8;
constexpr double gl8_x[kGl8] = {
    -0.9602898564975363, -0.7966664774136267, -0.5255324099163290,
    -0.1834346424956498, 0.1834346424956498,  0.5255324099163290,
    0.7966664774136267,  0.9602898564975363};
constexpr double gl8_w[kGl8] = {
    0.1012285362903763, 0.2223810344533745, 0.3137066458778873,
    0.3626837833783620, 0.3626837833783620, 0.3137066458778873,
    0.2223810344533745, 0.1012285362903763};

void check_breaks(const std::vector<double>& breaks) {
    if (breaks.size() < 2)
        throw std::invalid_argument("quadrature: need at least two breakpoints");
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i)
        if (!(breaks[i] < breaks[i + 1]))
            throw std::invalid_argument("quadrature: breakpoints must increase");
}

} // namespace

QuadratureResult integrate_gl(const Fn& f, const std::vector<double>& breaks) {
    check_breaks(breaks);
    QuadratureResult res;
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
        const double a = breaks[i], b = breaks[i + 1];
        const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
        double v16 = 0.0, v8 = 0.0;
        for (int k = 0; k < kGl16; ++k)
            v16 += gl16_w[k] * f(mid + half * gl16_x[k]);
        for (int k = 0; k < kGl8; ++k)
            v8 += gl8_w[k] * f(mid + half * gl8_x[k]);
        v16 *= half;
        v8 *= half;
        res.value += v16;
        res.est_error += std::abs(v16 - v8);
        res.n_evals += kGl16 + kGl8;
    }
    return res;
}

QuadratureResult integrate_trapezoid(const Fn& f, const std::vector<double>& breaks,
                                     int levels) {
    check_breaks(breaks);
    if (levels < 1) levels = 1;
    QuadratureResult res;
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
        const double a = breaks[i], b = breaks[i + 1];
        const double fa = f(a), fb = f(b);
        long n = 1;
        double sum_interior = 0.0; // f at interior nodes of the current level
        double coarse = 0.5 * (fa + fb) * (b - a);
        double fine = coarse;
        for (int lev = 0; lev < levels; ++lev) {
            coarse = fine;
            n *= 2;
            const double h = (b - a) / static_cast<double>(n);
            // new nodes are the odd multiples of h
            for (long k = 1; k < n; k += 2) {
                sum_interior += f(a + h * static_cast<double>(k));
                ++res.n_evals;
            }
            fine = h * (0.5 * (fa + fb) + sum_interior);
        }
        res.value += fine;
        res.est_error += std::abs(fine - coarse) / 3.0;
        res.n_evals += 2;
    }
    return res;
}

QuadratureResult integrate_power_singular(const Fn& g, double s, double anchor,
                                          double a, double b, int panels) {
    if (!(s >= 0.0 && s < 1.0))
        throw std::invalid_argument("integrate_power_singular: need 0 <= s < 1");
    if (!(a < b))
        throw std::invalid_argument("integrate_power_singular: need a < b");
    if (anchor > a && anchor < b)
        throw std::invalid_argument("integrate_power_singular: anchor inside interval");
    const double p = 1.0 - s;
    // x > anchor branch: u = (x - anchor)^p, x = anchor + u^(1/p),
    // dx = u^(1/p - 1) / p du and (x - anchor)^(-s) dx = du / p.
    // Mirrored for x < anchor.
    const bool right = anchor <= a;
    const double ua = std::pow(std::abs((right ? a : b) - anchor), p);
    const double ub = std::pow(std::abs((right ? b : a) - anchor), p);
    auto h = [&](double u) {
        const double x = right ? anchor + std::pow(u, 1.0 / p)
                               : anchor - std::pow(u, 1.0 / p);
        return g(x) / p;
    };
    QuadratureResult r = integrate_gl(h, linear_breaks(ua, ub, panels));
    return r;
}

std::vector<double> linear_breaks(double a, double b, int n) {
    if (n < 1) n = 1;
    std::vector<double> v(static_cast<std::size_t>(n) + 1);
    for (int i = 0; i <= n; ++i)
        v[static_cast<std::size_t>(i)] = a + (b - a) * static_cast<double>(i) / n;
    v.front() = a;
    v.back() = b;
    return v;
}

std::vector<double> log_breaks(double a, double b, int n) {
    if (!(a > 0.0 && b > a))
        throw std::invalid_argument("log_breaks: need 0 < a < b");
    if (n < 1) n = 1;
    std::vector<double> v(static_cast<std::size_t>(n) + 1);
    const double la = std::log(a), lb = std::log(b);
    for (int i = 0; i <= n; ++i)
        v[static_cast<std::size_t>(i)] = std::exp(la + (lb - la) * static_cast<double>(i) / n);
    v.front() = a;
    v.back() = b;
    return v;
}

std::vector<double> graded_breaks(double a, double b, double scale) {
    if (!(b > a))
        throw std::invalid_argument("graded_breaks: need a < b");
    if (!(scale > 0.0))
        throw std::invalid_argument("graded_breaks: need scale > 0");
    std::vector<double> v{a};
    double step = scale;
    double x = a;
    while (x + step < b) {
        x += step;
        v.push_back(x);
        step *= 2.0;
    }
    v.push_back(b);
    return v;
}

} // namespace ckn
