#include "ckn/ndc.hpp"

#include "ckn/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ckn {

std::string to_string(NdcVerdict v) {
    switch (v) {
    case NdcVerdict::Satisfied: return "satisfied";
    case NdcVerdict::ViolatedLimsupZero: return "violated_limsup_zero";
    case NdcVerdict::Inconclusive: return "inconclusive";
    }
    return "inconclusive";
}

KProfile k_profile(const WeightSpec& w, const EnvelopeResult& env) {
    KProfile prof;
    prof.n_cells = env.grid.cells();
    prof.samples.reserve(prof.n_cells);
    for (std::size_t i = 0; i < prof.n_cells; ++i) {
        if (env.plateau[i]) continue;
        const double r = env.cell_mid(i);
        const double K = k_gauge(w, r);
        if (!std::isfinite(K)) {
            ++prof.n_flagged;
            continue;
        }
        prof.samples.push_back({r, K});
    }
    return prof;
}

NdcCheckResult ndc_check(const KProfile& profile, double eta, double threshold) {
    (void)eta;
    NdcCheckResult res;
    if (profile.samples.empty()) {
        res.verdict = NdcVerdict::Inconclusive;
        return res;
    }

    double c0 = std::numeric_limits<double>::infinity();
    double r_hi = 0.0;
    for (const auto& s : profile.samples) {
        c0 = std::min(c0, s.K);
        r_hi = std::max(r_hi, s.r);
    }
    res.C0 = c0;

    // sups over the dyadic windows (0, r_hi * 2^-m]; samples are in
    // increasing r order, so suffix maxima over prefixes of the list.
    std::vector<double> sups;
    {
        std::size_t idx = profile.samples.size();
        double eps = r_hi;
        double running = 0.0;
        std::vector<double> prefix_max(profile.samples.size());
        for (std::size_t i = 0; i < profile.samples.size(); ++i) {
            running = std::max(running, profile.samples[i].K);
            prefix_max[i] = running;
        }
        while (true) {
            while (idx > 0 && profile.samples[idx - 1].r > eps) --idx;
            if (idx == 0) break;
            sups.push_back(prefix_max[idx - 1]);
            eps *= 0.5;
        }
    }

    const double global_sup = sups.empty() ? 0.0 : sups.front();
    bool violated = false;
    if (sups.size() >= 4) {
        const double s3 = sups[sups.size() - 4], s2 = sups[sups.size() - 3];
        const double s1 = sups[sups.size() - 2], s0 = sups.back();
        const bool strictly_down = s3 > s2 && s2 > s1 && s1 > s0;
        const bool persistent = s0 <= 0.9 * s3; // decay continues at the floor
        const bool small = s0 < threshold || s0 <= 1e-3 * global_sup;
        violated = strictly_down && persistent && small;
    }

    if (violated) {
        res.verdict = NdcVerdict::ViolatedLimsupZero;
    } else if (c0 >= threshold && (sups.empty() || sups.back() >= threshold)) {
        res.verdict = NdcVerdict::Satisfied;
    } else {
        res.verdict = NdcVerdict::Inconclusive;
    }
    return res;
}

InfiniteOrderReport infinite_order_detect(const WeightSpec& w, const WeightClass& cls,
                                          const Grid& grid, int m_max) {
    if (!cls.is_w0() && !cls.is_winf())
        throw unsupported_class_error(
            "infinite_order_detect: weight must vanish or blow up at the origin");
    if (m_max < 1) throw hypothesis_error("infinite_order_detect: m_max must be >= 1");

    InfiniteOrderReport rep;
    const bool w0 = cls.is_w0();

    // normalized exponent along the tail; requires r < 1 so that ln r < 0
    const double tail_top = 0.5 * std::min(1.0, grid.eta());
    std::vector<double> rs, es;
    for (std::size_t i = grid.size(); i-- > 0;) {
        const double r = grid.points[i];
        if (r >= tail_top) continue;
        const double lw = log_evaluate(w, r);
        const double lr = std::log(r);
        const double e = w0 ? lw / lr : lw / (-lr);
        if (!std::isfinite(e)) continue;
        rs.push_back(r); // decreasing
        es.push_back(e);
    }
    if (rs.size() < 4) {
        rep.status = InfiniteOrderStatus::Inconclusive;
        return rep;
    }

    int next_m = 1;
    for (std::size_t i = 0; i < rs.size() && next_m <= m_max; ++i) {
        if (es[i] >= static_cast<double>(next_m)) {
            rep.witness.push_back({next_m, rs[i]});
            ++next_m;
        }
    }
    if (next_m > m_max) {
        rep.status = InfiniteOrderStatus::Yes;
        return rep;
    }

    // Incomplete witness: decide between "bounded exponent" and "still
    // rising when the grid ran out".  Compare the exponent at the end of
    // the tail against one decade earlier.
    const double r_end = rs.back();
    double e_end = es.back(), e_decade = es.back();
    for (std::size_t i = 0; i < rs.size(); ++i)
        if (rs[i] >= 10.0 * r_end) e_decade = es[i];
    rep.status = (e_end > e_decade * 1.1) ? InfiniteOrderStatus::Inconclusive
                                          : InfiniteOrderStatus::No;
    return rep;
}

std::optional<double> fitted_alpha(const KProfile& profile) {
    if (profile.samples.empty()) return std::nullopt;
    const double r_lo = profile.samples.front().r;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::size_t n = 0;
    for (const auto& s : profile.samples) {
        if (s.r > 100.0 * r_lo) break;
        const double x = std::log(s.r), y = std::log(s.K);
        if (!std::isfinite(y)) continue;
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++n;
    }
    if (n < 2) return std::nullopt;
    const double denom = static_cast<double>(n) * sxx - sx * sx;
    if (denom == 0.0) return std::nullopt;
    return (static_cast<double>(n) * sxy - sx * sy) / denom;
}

NdcReport ndc_report(const WeightSpec& w, const WeightClass& cls,
                     const EnvelopeResult& env, double threshold) {
    NdcReport rep;
    rep.profile = k_profile(w, env);
    const NdcCheckResult chk = ndc_check(rep.profile, env.grid.eta(), threshold);
    rep.C0 = chk.C0;
    rep.verdict = chk.verdict;
    rep.order = infinite_order_detect(w, cls, env.grid);
    rep.infinite_order = rep.order.status == InfiniteOrderStatus::Yes;
    rep.fitted_alpha = fitted_alpha(rep.profile);
    return rep;
}

} // namespace ckn
