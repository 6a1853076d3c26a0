#include "ckn/envelope.hpp"

#include "ckn/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

namespace ckn {

namespace {

constexpr double kFlatTol = 1e-12; // relative flatness of the envelope

// e^(q*lv_big) - e^(q*lv_small), nonnegative, stable for tiny differences.
double pow_diff(double q, double lv_small, double lv_big) {
    const double dl = lv_big - lv_small;
    if (!(dl > 0.0)) return 0.0;
    const double lead = q * lv_big;
    if (lead > 709.0) return std::numeric_limits<double>::infinity();
    if (lead < -745.0) return 0.0;
    return std::exp(lead) * (-std::expm1(-q * dl));
}

bool flat_cell(const EnvelopeResult& env, std::size_t i) {
    return std::abs(env.log_v[i + 1] - env.log_v[i]) <= kFlatTol;
}

} // namespace

Grid Grid::log_uniform(double r_min, double eta, std::size_t count) {
    if (!(r_min > 0.0) || !(eta > r_min))
        throw spec_error("grid: need 0 < r_min < eta");
    if (count < 2) throw spec_error("grid: need at least two points");
    std::vector<double> pts(count);
    const double la = std::log(r_min), lb = std::log(eta);
    for (std::size_t i = 0; i < count; ++i)
        pts[i] = std::exp(la + (lb - la) * static_cast<double>(i) /
                                   static_cast<double>(count - 1));
    pts.front() = r_min;
    pts.back() = eta;
    return Grid{std::move(pts)};
}

Grid Grid::from_points(std::vector<double> pts) {
    if (pts.size() < 2) throw spec_error("grid: need at least two points");
    if (!(pts.front() > 0.0)) throw spec_error("grid: points must be positive");
    for (std::size_t i = 0; i + 1 < pts.size(); ++i)
        if (!(pts[i] < pts[i + 1]))
            throw spec_error("grid: points must be strictly increasing");
    return Grid{std::move(pts)};
}

EnvelopeResult compute_envelope(const WeightSpec& w, const WeightClass& cls,
                                const Grid& grid, double q) {
    if (!cls.is_w0() && !cls.is_winf())
        throw unsupported_class_error(
            "envelope: weight must vanish or blow up at the origin (got " +
            cls.name() + ")");
    if (!(q >= 1.0))
        throw hypothesis_error("envelope: q must be >= 1");
    if (grid.eta() > w.eta() * (1.0 + 1e-12))
        throw domain_error("envelope: grid extends beyond eta");

    const std::size_t n = grid.size();
    EnvelopeResult env;
    env.kind = cls.is_w0() ? EnvelopeKind::Increasing : EnvelopeKind::Decreasing;
    env.grid = grid;
    env.q = q;
    env.log_v.resize(n);
    env.v.resize(n);

    std::vector<double> log_w(n);
    for (std::size_t i = 0; i < n; ++i) log_w[i] = log_evaluate(w, grid.points[i]);

    if (env.kind == EnvelopeKind::Increasing) {
        // suffix infimum: largest nondecreasing minorant on the grid
        env.log_v[n - 1] = log_w[n - 1];
        for (std::size_t i = n - 1; i-- > 0;)
            env.log_v[i] = std::min(log_w[i], env.log_v[i + 1]);
    } else {
        // prefix infimum: largest nonincreasing minorant on the grid
        env.log_v[0] = log_w[0];
        for (std::size_t i = 1; i < n; ++i)
            env.log_v[i] = std::min(env.log_v[i - 1], log_w[i]);
    }
    for (std::size_t i = 0; i < n; ++i) env.v[i] = std::exp(env.log_v[i]);
    env.eta_tilde = env.v[n - 1];
    env.log_eta_tilde = env.log_v[n - 1];

    env.plateau.resize(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const bool flat = std::abs(env.log_v[i + 1] - env.log_v[i]) <= kFlatTol;
        const bool below = log_w[i] > env.log_v[i] + kFlatTol ||
                           log_w[i + 1] > env.log_v[i + 1] + kFlatTol;
        env.plateau[i] = flat && below;
    }

    // Cell density of d(v^q)/dt.  Plateau cells carry zero density; any
    // sub-tolerance residue on them is pushed into the next non-plateau
    // cell so partial sums of Vq * dt reproduce v^q differences exactly.
    env.Vq.resize(n - 1);
    double carry = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double diff =
            env.kind == EnvelopeKind::Increasing
                ? pow_diff(q, env.log_v[i], env.log_v[i + 1])
                : pow_diff(q, env.log_v[i + 1], env.log_v[i]);
        if (env.plateau[i]) {
            carry += diff;
            env.Vq[i] = 0.0;
        } else {
            const double width = grid.points[i + 1] - grid.points[i];
            env.Vq[i] = (diff + carry) / width;
            carry = 0.0;
        }
    }
    return env;
}

double EnvelopeResult::cell_mid(std::size_t i) const {
    return std::sqrt(grid.points[i] * grid.points[i + 1]);
}

namespace {

std::size_t locate_cell(const Grid& g, double r) {
    if (r < g.points.front() || r > g.points.back())
        throw domain_error("envelope: argument outside the sampled range");
    auto it = std::upper_bound(g.points.begin(), g.points.end(), r);
    std::size_t i = (it == g.points.begin())
                        ? 0
                        : static_cast<std::size_t>(it - g.points.begin() - 1);
    if (i + 1 >= g.points.size()) i = g.points.size() - 2;
    return i;
}

} // namespace

double EnvelopeResult::value_at(double r) const {
    const std::size_t i = locate_cell(grid, r);
    const double t0 = grid.points[i], t1 = grid.points[i + 1];
    return v[i] + (v[i + 1] - v[i]) * (r - t0) / (t1 - t0);
}

double EnvelopeResult::log_value_at(double r) const {
    const std::size_t i = locate_cell(grid, r);
    const double t0 = grid.points[i], t1 = grid.points[i + 1];
    return log_v[i] + (log_v[i + 1] - log_v[i]) * (r - t0) / (t1 - t0);
}

namespace {

// Shared inverse scan: samples is v or log_v, monotone per `increasing`.
// Finds all cells whose value range contains `level`; rejects levels met
// on a flat cell (the inverse is set-valued there).
double inverse_scan(const EnvelopeResult& env, const std::vector<double>& samples,
                    double level, bool increasing) {
    const auto& pts = env.grid.points;
    const std::size_t n = samples.size();
    // Attainable levels exclude the value at r_min (the envelope continues
    // past it toward the origin) and include the value at eta.
    if (increasing) {
        if (!(level > samples.front()) || level > samples.back())
            throw domain_error("envelope inverse: level outside the attained range");
    } else {
        if (!(level < samples.front()) || level < samples.back())
            throw domain_error("envelope inverse: level outside the attained range");
    }

    // first index whose value reaches the level (monotone bisection)
    std::size_t first = 0;
    {
        std::size_t lo = 0, hi = n - 1; // samples[lo] short of level, samples[hi] reaches
        while (lo + 1 < hi) {
            const std::size_t m = (lo + hi) / 2;
            const bool reached = increasing ? samples[m] >= level : samples[m] <= level;
            (reached ? hi : lo) = m;
        }
        first = lo;
    }
    for (std::size_t i = first; i + 1 < n; ++i) {
        const double cell_lo = std::min(samples[i], samples[i + 1]);
        const double cell_hi = std::max(samples[i], samples[i + 1]);
        const bool past = increasing ? cell_lo > level : cell_hi < level;
        if (past) break;
        if (level < cell_lo || level > cell_hi) continue;
        if (flat_cell(env, i))
            throw plateau_image_error("envelope inverse: level attained on a plateau");
        // hitting the shared endpoint of a flat neighbour is set-valued too
        if (level == samples[i + 1] && i + 2 < n && flat_cell(env, i + 1))
            throw plateau_image_error("envelope inverse: level attained on a plateau");
        const double denom = samples[i + 1] - samples[i];
        return pts[i] + (level - samples[i]) / denom * (pts[i + 1] - pts[i]);
    }
    throw domain_error("envelope inverse: level not attained");
}

} // namespace

double EnvelopeResult::inverse(double rho) const {
    return inverse_scan(*this, v, rho, kind == EnvelopeKind::Increasing);
}

double EnvelopeResult::inverse_log(double log_rho) const {
    return inverse_scan(*this, log_v, log_rho, kind == EnvelopeKind::Increasing);
}

std::vector<HSample> h_profile(const EnvelopeResult& env, const WeightSpec& w,
                               const std::vector<double>& rho_values) {
    std::vector<HSample> out;
    out.reserve(rho_values.size());
    for (double rho : rho_values) {
        HSample s;
        s.rho = rho;
        if (!(rho > 0.0))
            throw domain_error("h_profile: rho must be positive");
        const double log_level =
            env.kind == EnvelopeKind::Increasing ? std::log(rho) : -std::log(rho);
        try {
            const double r = env.inverse_log(log_level);
            const double K = k_gauge(w, r);
            if (!std::isfinite(K)) {
                s.plateau_skipped = true;
            } else {
                s.H = K;
            }
        } catch (const plateau_image_error&) {
            s.plateau_skipped = true;
        }
        out.push_back(s);
    }
    return out;
}

void write_envelope_csv(std::ostream& os, const EnvelopeResult& env,
                        const WeightSpec& w) {
    os << "r,w,v,Vq,plateau\n";
    const std::size_t n = env.grid.size();
    os.precision(17);
    for (std::size_t i = 0; i < n; ++i) {
        const double r = env.grid.points[i];
        const double wv = std::exp(log_evaluate(w, r));
        const bool last = (i + 1 == n);
        os << r << ',' << wv << ',' << env.v[i] << ','
           << (last ? 0.0 : env.Vq[i]) << ',' << (last ? 0 : (env.plateau[i] ? 1 : 0))
           << '\n';
    }
}

} // namespace ckn
