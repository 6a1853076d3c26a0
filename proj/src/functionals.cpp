#include "ckn/functionals.hpp"
#include "ckn/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

namespace ckn {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

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

std::vector<double> merge_breaks(std::vector<double> b) {
    std::sort(b.begin(), b.end());
    b.erase(std::unique(b.begin(), b.end()), b.end());
    return b;
}

QuadratureResult root_q(QuadratureResult s, double q) {
    QuadratureResult out{0.0, 0.0, s.n_evals};
    if (s.value > 0.0) {
        out.value = std::pow(s.value, 1.0 / q);
        out.est_error = s.est_error / q * std::pow(s.value, 1.0 / q - 1.0);
    } else {
        out.value = 0.0;
        out.est_error = std::pow(s.est_error, 1.0 / q);
    }
    return out;
}

} // namespace

TestFunction1D TestFunction1D::bump(double center, double width, double shape) {
    if (!(width > 0.0) || !(shape > 0.0) || !std::isfinite(center))
        throw spec_error("bump requires a finite center and positive width and shape");
    if (!(center - 0.5 * width > 0.0))
        throw support_error("bump support must stay inside the positive half-line");
    TestFunction1D u;
    u.kind_ = Kind::Bump;
    u.center_ = center;
    u.width_ = width;
    u.shape_ = shape;
    u.knots_ = {center - 0.5 * width, center + 0.5 * width};
    u.values_ = {0.0, 0.0};
    return u;
}

TestFunction1D TestFunction1D::piecewise_linear(std::vector<double> knots,
                                                std::vector<double> values) {
    if (knots.size() < 2 || knots.size() != values.size())
        throw spec_error("piecewise-linear function needs matching knots and values");
    if (!(knots.front() > 0.0))
        throw support_error("knots must be positive");
    for (std::size_t i = 0; i + 1 < knots.size(); ++i)
        if (!(knots[i] < knots[i + 1]))
            throw spec_error("knots must be strictly increasing");
    for (double v : values)
        if (!std::isfinite(v)) throw spec_error("values must be finite");
    if (values.front() != 0.0 || values.back() != 0.0)
        throw support_error("piecewise-linear test functions must vanish at the end knots");
    TestFunction1D u;
    u.kind_ = Kind::PiecewiseLinear;
    u.knots_ = std::move(knots);
    u.values_ = std::move(values);
    return u;
}

TestFunction1D TestFunction1D::smoothed_indicator(double edge, double eps) {
    if (!(eps > 0.0) || !(edge - eps > 0.0))
        throw spec_error("smoothed indicator needs 0 < eps < edge");
    TestFunction1D u;
    u.kind_ = Kind::PiecewiseLinear;
    u.knots_ = {edge - eps, edge};
    u.values_ = {1.0, 0.0};
    u.extends_left_ = true;
    return u;
}

double TestFunction1D::value(double t) const {
    if (kind_ == Kind::Bump) {
        const double z = 2.0 * (t - center_) / width_;
        const double d = 1.0 - z * z;
        if (!(d > 0.0)) return 0.0;
        return std::exp(shape_ * (1.0 - 1.0 / d));
    }
    if (t < knots_.front()) return extends_left_ ? values_.front() : 0.0;
    if (t >= knots_.back()) {
        if (t == knots_.back()) return values_.back();
        return extends_right_ ? values_.back() : 0.0;
    }
    const auto it = std::upper_bound(knots_.begin(), knots_.end(), t);
    const std::size_t i = static_cast<std::size_t>(it - knots_.begin()) - 1;
    const double f = (t - knots_[i]) / (knots_[i + 1] - knots_[i]);
    return values_[i] + f * (values_[i + 1] - values_[i]);
}

double TestFunction1D::derivative(double t) const {
    if (kind_ == Kind::Bump) {
        const double z = 2.0 * (t - center_) / width_;
        const double d = 1.0 - z * z;
        if (!(d > 0.0)) return 0.0;
        return value(t) * shape_ * (-2.0 * z / (d * d)) * (2.0 / width_);
    }
    if (t < knots_.front() || t >= knots_.back()) return 0.0;
    const auto it = std::upper_bound(knots_.begin(), knots_.end(), t);
    const std::size_t i = static_cast<std::size_t>(it - knots_.begin()) - 1;
    return (values_[i + 1] - values_[i]) / (knots_[i + 1] - knots_[i]);
}

double TestFunction1D::support_lo() const {
    return extends_left_ ? 0.0 : knots_.front();
}

double TestFunction1D::support_hi() const {
    return extends_right_ ? std::numeric_limits<double>::infinity() : knots_.back();
}

void TestFunction1D::write_csv(std::ostream& os) const {
    os << "t,u\n";
    os.precision(17);
    if (kind_ == Kind::Bump) {
        for (int k = 0; k <= 128; ++k) {
            const double t = knots_.front() +
                             (knots_.back() - knots_.front()) * k / 128.0;
            os << t << "," << value(t) << "\n";
        }
        return;
    }
    for (std::size_t i = 0; i < knots_.size(); ++i)
        os << knots_[i] << "," << values_[i] << "\n";
}

double sphere_area(int n) {
    if (n < 1) throw spec_error("dimension must be at least 1");
    return 2.0 * std::pow(kPi, 0.5 * n) / std::tgamma(0.5 * n);
}

QuadratureResult lhs_1d(const TestFunction1D& u, const WeightSpec& w) {
    const double lo = u.active_lo(), hi = u.active_hi();
    if (!(lo > w.domain_min()) || !(hi < w.eta()))
        throw support_error(
            "derivative support must lie strictly inside the weight domain");

    QuadratureResult total{0.0, 0.0, 0};
    if (u.is_smooth()) {
        // |u'| changes sign at the peak; keep the kink on a panel boundary
        const double c = 0.5 * (lo + hi);
        auto left = linear_breaks(lo, c, 8);
        auto right = linear_breaks(c, hi, 8);
        left.insert(left.end(), right.begin() + 1, right.end());
        total = integrate_gl(
            [&](double t) { return std::fabs(u.derivative(t)) * evaluate(w, t); },
            left);
    } else {
        const auto& kn = u.knots();
        const auto& vals = u.values();
        for (std::size_t i = 0; i + 1 < kn.size(); ++i) {
            const double slope = (vals[i + 1] - vals[i]) / (kn[i + 1] - kn[i]);
            if (slope == 0.0) continue;
            auto piece = integrate_gl([&](double t) { return evaluate(w, t); },
                                      linear_breaks(kn[i], kn[i + 1], 4));
            total.value += std::fabs(slope) * piece.value;
            total.est_error += std::fabs(slope) * piece.est_error;
            total.n_evals += piece.n_evals;
        }
    }
    if (!std::isfinite(total.value))
        throw domain_error(
            "gradient functional is not representable; move the support away "
            "from the degenerate end");
    return total;
}

QuadratureResult rhs_1d_power(const TestFunction1D& u, const EnvelopeResult& env) {
    const auto& g = env.grid;
    if (!(u.active_lo() > 0.0) || !(u.active_hi() < g.eta()))
        throw support_error(
            "derivative support must lie strictly inside the grid interval");
    const double lo = std::max(u.support_lo(), g.r_min());
    const double hi = std::min(u.support_hi(), g.eta());
    const double q = env.q;

    QuadratureResult total{0.0, 0.0, 0};
    for (std::size_t i = 0; i + 1 < g.points.size(); ++i) {
        double a = g.points[i], b = g.points[i + 1];
        if (b <= lo || a >= hi) continue;
        const double vq = env.Vq[i];
        if (vq == 0.0) continue;
        a = std::max(a, lo);
        b = std::min(b, hi);
        if (!(b > a)) continue;

        std::vector<double> cuts{a, b};
        for (double k : u.knots())
            if (k > a && k < b) cuts.push_back(k);
        cuts = merge_breaks(std::move(cuts));

        if (std::isinf(vq)) {
            // tolerable only where the function vanishes identically
            bool zero = true;
            for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
                if (u.value(cuts[c]) != 0.0 ||
                    u.value(0.5 * (cuts[c] + cuts[c + 1])) != 0.0)
                    zero = false;
            }
            if (u.value(cuts.back()) != 0.0) zero = false;
            if (zero) continue;
            throw domain_error(
                "dual density overflows inside the support; move the support "
                "away from the degenerate end");
        }

        QuadratureResult cell{0.0, 0.0, 0};
        for (std::size_t c = 0; c + 1 < cuts.size(); ++c)
            cell += integrate_gl(
                [&](double t) { return std::pow(std::fabs(u.value(t)), q); },
                {cuts[c], cuts[c + 1]});
        total.value += vq * cell.value;
        total.est_error += vq * cell.est_error;
        total.n_evals += cell.n_evals;
    }
    return total;
}

QuadratureResult rhs_1d(const TestFunction1D& u, const EnvelopeResult& env) {
    return root_q(rhs_1d_power(u, env), env.q);
}

namespace {

bool constant_profile(const AngularProfile& b) {
    return b.kind() == AngularProfile::Kind::Constant ||
           (b.kind() == AngularProfile::Kind::Mollified && b.exponent() == 0.0);
}

// Gauss-Legendre tensor rule along the radial support.
struct RadialRule {
    std::vector<double> r, wt, A, Ap;
};

RadialRule radial_rule(const TestFunction1D& u, std::size_t sub) {
    std::vector<double> breaks;
    const auto& kn = u.knots();
    std::vector<double> anchors(kn.begin(), kn.end());
    if (u.is_smooth())
        anchors.insert(anchors.begin() + 1, 0.5 * (kn.front() + kn.back()));
    for (std::size_t i = 0; i + 1 < anchors.size(); ++i) {
        for (std::size_t j = 0; j < sub; ++j)
            breaks.push_back(anchors[i] +
                             (anchors[i + 1] - anchors[i]) * j / sub);
    }
    breaks.push_back(anchors.back());
    breaks = merge_breaks(std::move(breaks));

    static const double gx[8] = {-0.9602898564975363, -0.7966664774136267,
                                 -0.5255324099163290, -0.1834346424956498,
                                 0.1834346424956498,  0.5255324099163290,
                                 0.7966664774136267,  0.9602898564975363};
    static const double gw[8] = {0.1012285362903763, 0.2223810344533745,
                                 0.3137066458778873, 0.3626837833783620,
                                 0.3626837833783620, 0.3137066458778873,
                                 0.2223810344533745, 0.1012285362903763};
    RadialRule rule;
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
        const double mid = 0.5 * (breaks[i] + breaks[i + 1]);
        const double hw = 0.5 * (breaks[i + 1] - breaks[i]);
        if (!(hw > 0.0)) continue;
        for (int k = 0; k < 8; ++k) {
            const double t = mid + hw * gx[k];
            rule.r.push_back(t);
            rule.wt.push_back(hw * gw[k]);
            rule.A.push_back(u.value(t));
            rule.Ap.push_back(u.derivative(t));
        }
    }
    return rule;
}

} // namespace

QuadratureResult lhs_polar(const PolarTestFunction& u, const WeightSpec& w, int n) {
    if (n < 2) throw hypothesis_error("polar functionals require n >= 2");
    if (constant_profile(u.angular)) {
        const double c = std::fabs(u.angular.value(0.0));
        auto r = lhs_1d(u.radial, w);
        r.value *= sphere_area(n) * c;
        r.est_error *= sphere_area(n) * c;
        return r;
    }
    if (n != 2)
        throw hypothesis_error(
            "non-constant angular profiles are supported on the circle only");
    if (u.radial.extends_left() || u.radial.extends_right())
        throw hypothesis_error(
            "product functions require a compactly supported radial factor");
    const double lo = u.radial.active_lo(), hi = u.radial.active_hi();
    if (!(lo > w.domain_min()) || !(hi < w.eta()))
        throw support_error(
            "radial support must lie strictly inside the weight domain");

    const AngularNodes nodes = u.angular.nodes();
    auto tensor = [&](std::size_t sub) {
        const RadialRule rule = radial_rule(u.radial, sub);
        double total = 0.0;
        for (std::size_t l = 0; l < rule.r.size(); ++l) {
            const double wv = evaluate(w, rule.r[l]);
            const double c1 = rule.Ap[l] * rule.Ap[l];
            const double c2 =
                rule.A[l] * rule.A[l] / (rule.r[l] * rule.r[l]);
            double inner = 0.0;
            for (std::size_t k = 0; k < nodes.theta.size(); ++k)
                inner += nodes.weight[k] *
                         std::sqrt(c1 * nodes.B[k] * nodes.B[k] +
                                   c2 * nodes.dB[k] * nodes.dB[k]);
            total += rule.wt[l] * wv * inner;
        }
        return total;
    };
    QuadratureResult out{0.0, 0.0, 0};
    const double fine = tensor(6), coarse = tensor(3);
    out.value = fine;
    out.est_error = std::fabs(fine - coarse);
    out.n_evals = nodes.theta.size() * 9 * u.radial.knots().size();
    if (!std::isfinite(out.value))
        throw domain_error("polar gradient functional is not representable");
    return out;
}

QuadratureResult rhs_polar(const PolarTestFunction& u, const EnvelopeResult& env, int n) {
    if (n < 2) throw hypothesis_error("polar functionals require n >= 2");
    const double q = env.q;
    QuadratureResult ang{0.0, 0.0, 0};
    if (constant_profile(u.angular)) {
        const double c = std::fabs(u.angular.value(0.0));
        ang.value = sphere_area(n) * std::pow(c, q);
    } else {
        if (n != 2)
            throw hypothesis_error(
                "non-constant angular profiles are supported on the circle only");
        ang = u.angular.integral_abs_pow(q);
    }
    const QuadratureResult rad = rhs_1d_power(u.radial, env);
    QuadratureResult s{ang.value * rad.value,
                       ang.value * rad.est_error + rad.value * ang.est_error,
                       ang.n_evals + rad.n_evals};
    return root_q(s, q);
}

TestFunction1D make_localized(const EnvelopeResult& env, double x, double h) {
    if (!(h > 0.0) || !std::isfinite(x))
        throw spec_error("localized window needs a finite anchor and positive width");
    const auto& g = env.grid;
    const bool inc = env.kind == EnvelopeKind::Increasing;
    const double wlo = inc ? x : x - h;
    const double whi = inc ? x + h : x;
    if (!(wlo > g.r_min()) || !(whi < g.eta()))
        throw support_error("localized window must lie strictly inside the grid");
    // the reciprocal envelope is the derivative profile; it must fit a double
    const double anchor_log = env.log_value_at(inc ? wlo : whi);
    if (!(anchor_log > -300.0))
        throw hypothesis_error(
            "envelope is numerically zero on the window; anchor it farther "
            "from the degenerate end");

    std::vector<double> nodes;
    for (int k = 0; k <= 64; ++k)
        nodes.push_back(wlo + (whi - wlo) * k / 64.0);
    for (double p : g.points)
        if (p > wlo && p < whi) nodes.push_back(p);
    nodes = merge_breaks(std::move(nodes));

    const auto f = [&](double t) { return std::exp(-env.log_value_at(t)); };
    std::vector<double> vals(nodes.size(), 0.0);
    if (inc) {
        for (std::size_t i = nodes.size() - 1; i-- > 0;)
            vals[i] = vals[i + 1] +
                      integrate_gl(f, {nodes[i], nodes[i + 1]}).value;
    } else {
        for (std::size_t i = 0; i + 1 < nodes.size(); ++i)
            vals[i + 1] = vals[i] +
                          integrate_gl(f, {nodes[i], nodes[i + 1]}).value;
    }

    TestFunction1D u;
    u.kind_ = TestFunction1D::Kind::PiecewiseLinear;
    u.knots_ = std::move(nodes);
    u.values_ = std::move(vals);
    u.extends_left_ = inc;
    u.extends_right_ = !inc;
    for (std::size_t i = 0; i + 1 < g.points.size(); ++i)
        if (env.plateau[i] && g.points[i + 1] > wlo && g.points[i] < whi)
            u.plateau_window_ = true;
    return u;
}

std::vector<TestFunction1D> make_localized_family(const EnvelopeResult& env,
                                                  double x,
                                                  const std::vector<double>& h_sweep) {
    std::vector<TestFunction1D> out;
    out.reserve(h_sweep.size());
    for (double h : h_sweep) out.push_back(make_localized(env, x, h));
    return out;
}

double RadialBump::value(double sigma) const {
    const double c = 0.5 * (lo + hi), hw = 0.5 * (hi - lo);
    const double z = (sigma - c) / hw;
    return amp * std::exp(1.0) * bump01(z);
}

double RadialBump::derivative(double sigma) const {
    const double c = 0.5 * (lo + hi), hw = 0.5 * (hi - lo);
    const double z = (sigma - c) / hw;
    return amp * std::exp(1.0) * bump01_deriv(z) / hw;
}

namespace {

std::vector<double> bump_breaks(double lo, double hi, std::size_t sub) {
    const double c = 0.5 * (lo + hi);
    auto left = linear_breaks(lo, c, sub);
    auto right = linear_breaks(c, hi, sub);
    left.insert(left.end(), right.begin() + 1, right.end());
    return left;
}

} // namespace

RadialBump counterexample_bump(const EnvelopeResult& env) {
    const bool inc = env.kind == EnvelopeKind::Increasing;
    const double log_outer = inc ? env.log_eta_tilde : -env.log_eta_tilde;
    if (!(std::fabs(log_outer) <= 250.0))
        throw hypothesis_error(
            "transplanted outer level is outside the double range; use the "
            "construction sequence, which works in log space");
    const double outer = std::exp(log_outer);
    RadialBump a;
    a.lo = 0.25 * outer;
    a.hi = 0.75 * outer;
    a.amp = 1.0;
    a.increasing = inc;
    a.amp = 1.0 / bump_gradient_mass(a).value;
    return a;
}

QuadratureResult bump_gradient_mass(const RadialBump& a) {
    const auto m = [&](double s) { return a.increasing ? s : 1.0 / s; };
    return integrate_gl(
        [&](double s) { return std::fabs(a.derivative(s)) * m(s); },
        bump_breaks(a.lo, a.hi, 6));
}

QuadratureResult bump_q_mass(const RadialBump& a, double q) {
    const double e = a.increasing ? q - 1.0 : -q - 1.0;
    return integrate_gl(
        [&](double s) { return std::pow(a.value(s), q) * std::pow(s, e); },
        bump_breaks(a.lo, a.hi, 6));
}

CounterexampleSequence make_counterexample_sequence(const WeightSpec& w,
                                                    const EnvelopeResult& env,
                                                    const NdcReport& ndc,
                                                    double q, int j_count,
                                                    double s) {
    if (ndc.verdict != NdcVerdict::ViolatedLimsupZero)
        throw hypothesis_error(
            "divergence construction requires a gauge that collapses near the "
            "origin (verdict violated_limsup_zero)");
    if (!(q > 1.0) || !(q <= 2.0))
        throw hypothesis_error("divergence construction requires 1 < q <= 2");
    if (s == 0.0) s = 0.5 * (1.0 / q + 1.0);
    if (!(s > 1.0 / q) || !(s < 1.0))
        throw hypothesis_error("angular exponent must lie strictly between 1/q and 1");
    if (j_count < 1 || j_count > 10)
        throw spec_error("term count must be between 1 and 10");

    const bool inc = env.kind == EnvelopeKind::Increasing;
    const double log_outer = inc ? env.log_eta_tilde : -env.log_eta_tilde;

    CounterexampleSequence seq;
    seq.q = q;
    seq.s = s;
    seq.increasing = inc;
    seq.log_eta_tilde = log_outer;

    // Peak-one profile in the normalized variable tau = sigma / outer on
    // (1/4, 3/4); the gradient normalization is carried as an exact scalar
    // so nothing depends on the magnitude of the outer level.
    const auto Av = [](double tau) { return std::exp(1.0) * bump01(4.0 * tau - 2.0); };
    const auto Ad = [](double tau) {
        return std::exp(1.0) * bump01_deriv(4.0 * tau - 2.0) * 4.0;
    };
    const auto mexp = inc ? 1.0 : -1.0;
    const double GA = integrate_gl(
                          [&](double t) {
                              return std::fabs(Ad(t)) * std::pow(t, mexp);
                          },
                          bump_breaks(0.25, 0.75, 8))
                          .value;
    const double QA = integrate_gl(
                          [&](double t) {
                              return std::pow(Av(t), q) *
                                     std::pow(t, inc ? q - 1.0 : -q - 1.0);
                          },
                          bump_breaks(0.25, 0.75, 8))
                          .value;

    double prev_log_eps = 0.0;
    for (int j = 1; j <= j_count; ++j) {
        CounterexampleTerm term;
        term.j = j;
        long long m = 2;
        for (int i = 0; i < j; ++i) m *= 8;
        term.moll_index = m;

        const AngularProfile B =
            AngularProfile::mollified(AngularProfile::singular_power(s), m);
        const AngularNodes nb = B.nodes();
        term.angular_mass = B.integral_abs_pow(1.0).value;
        term.angular_q_mass = B.integral_abs_pow(q).value;
        term.angular_deriv_mass = B.integral_abs_derivative().value;
        const double bound = 1.0 / term.angular_deriv_mass;

        // deepest scale on which the transplanted gauge stays below 1/∫|B'|:
        // cumulative max of K over non-plateau cells walking up from r_min
        double log_rho_max = std::numeric_limits<double>::quiet_NaN();
        std::size_t good = 0;
        for (std::size_t i = 0; i + 1 < env.grid.points.size(); ++i) {
            if (env.plateau[i]) continue;
            const double K = k_gauge(w, env.cell_mid(i));
            if (!std::isfinite(K)) continue; // exempt: derivative vanishes
            if (K > bound) {
                log_rho_max = inc ? env.log_v[i] : -env.log_v[i];
                break;
            }
            ++good;
        }
        if (good < 4)
            throw hypothesis_error(
                "grid cannot resolve the construction depth; refine it near "
                "the origin");
        if (std::isnan(log_rho_max))
            log_rho_max = log_outer + std::log(0.5); // gauge never exceeded the bound

        double log_eps = log_rho_max - log_outer;
        if (!(log_eps <= std::log(0.9))) {
            log_eps = std::log(0.9);
            term.eps_clamped = true;
        }
        if (j > 1 && !(log_eps <= prev_log_eps + std::log(0.5))) {
            log_eps = prev_log_eps + std::log(0.5);
            term.eps_clamped = true;
        }
        prev_log_eps = log_eps;
        term.log10_eps = log_eps / std::log(10.0);
        term.eps = std::exp(log_eps); // flushes to zero when very deep

        const auto H_at = [&](double log_tau) -> double {
            const double log_rho = log_eps + log_outer + log_tau;
            try {
                const double r = env.inverse_log(inc ? log_rho : -log_rho);
                return k_gauge(w, r);
            } catch (const plateau_image_error&) {
                return bound; // exempt level; any bounded stand-in works
            } catch (const domain_error&) {
                throw hypothesis_error(
                    "construction descended below the resolved grid; deepen "
                    "the grid toward the origin");
            }
        };

        // tensor gradient functional in tau; exactly scale-free
        const auto tensor = [&](std::size_t sub) {
            double total = 0.0;
            const auto breaks = bump_breaks(0.25, 0.75, sub);
            static const double gx[16] = {
                -0.9894009349916499, -0.9445750230732326, -0.8656312023878318,
                -0.7554044083550030, -0.6178762444026438, -0.4580167776572274,
                -0.2816035507792589, -0.0950125098376374, 0.0950125098376374,
                0.2816035507792589,  0.4580167776572274,  0.6178762444026438,
                0.7554044083550030,  0.8656312023878318,  0.9445750230732326,
                0.9894009349916499};
            static const double gwt[16] = {
                0.0271524594117541, 0.0622535239386479, 0.0951585116824928,
                0.1246289712555339, 0.1495959888165767, 0.1691565193950025,
                0.1826034150449236, 0.1894506104550685, 0.1894506104550685,
                0.1826034150449236, 0.1691565193950025, 0.1495959888165767,
                0.1246289712555339, 0.0951585116824928, 0.0622535239386479,
                0.0271524594117541};
            for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
                const double mid = 0.5 * (breaks[i] + breaks[i + 1]);
                const double hw = 0.5 * (breaks[i + 1] - breaks[i]);
                for (int k = 0; k < 16; ++k) {
                    const double tau = mid + hw * gx[k];
                    const double a = Av(tau), ad = Ad(tau);
                    if (a == 0.0 && ad == 0.0) continue;
                    const double H = H_at(std::log(tau));
                    const double c1 = ad * ad;
                    const double c2 = H * a / tau;
                    double inner = 0.0;
                    for (std::size_t kk = 0; kk < nb.theta.size(); ++kk)
                        inner += nb.weight[kk] *
                                 std::sqrt(c1 * nb.B[kk] * nb.B[kk] +
                                           c2 * c2 * nb.dB[kk] * nb.dB[kk]);
                    total += hw * gwt[k] * std::pow(tau, mexp) * inner;
                }
            }
            return total;
        };
        term.lhs = tensor(6) / GA;

        term.rhs = std::pow(q * QA * term.angular_q_mass, 1.0 / q) / GA;
        term.quotient = term.lhs / term.rhs;

        // separable bound pieces: lhs <= sqrt(2) (gradient + angular part)
        term.lhs_gradient_part = term.angular_mass; // ∫|A'| m dmu = 1 by normalization
        term.lhs_angular_part =
            term.angular_deriv_mass *
            integrate_gl(
                [&](double t) {
                    return H_at(std::log(t)) * Av(t) *
                           std::pow(t, mexp - 1.0);
                },
                bump_breaks(0.25, 0.75, 8))
                .value /
            GA;

        seq.terms.push_back(term);
    }
    return seq;
}

} // namespace ckn
