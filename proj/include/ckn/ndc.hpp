#ifndef CKN_NDC_HPP
#define CKN_NDC_HPP

#include "ckn/envelope.hpp"
#include "ckn/weight.hpp"

#include <optional>
#include <vector>

namespace ckn {

struct KSample {
    double r = 0.0;
    double K = 0.0;
};

// Gauge samples at the geometric midpoints of non-plateau cells.  Cells
// where w' vanishes (or the gauge is otherwise undefined) are excluded and
// counted in n_flagged.
struct KProfile {
    std::vector<KSample> samples;
    std::size_t n_flagged = 0;
    std::size_t n_cells = 0;
};

KProfile k_profile(const WeightSpec& w, const EnvelopeResult& env);

enum class NdcVerdict {
    Satisfied,          // inf of the gauge stays above the threshold
    ViolatedLimsupZero, // windowed sup of the gauge decays to zero near 0
    Inconclusive
};

std::string to_string(NdcVerdict v);

struct InfiniteOrderWitness {
    int m = 0;
    double r = 0.0;
};

enum class InfiniteOrderStatus { No, Yes, Inconclusive };

struct InfiniteOrderReport {
    InfiniteOrderStatus status = InfiniteOrderStatus::No;
    std::vector<InfiniteOrderWitness> witness; // strictly decreasing radii
};

struct NdcReport {
    KProfile profile;
    double C0 = 0.0;
    NdcVerdict verdict = NdcVerdict::Inconclusive;
    bool infinite_order = false;
    InfiniteOrderReport order;
    std::optional<double> fitted_alpha; // log-log slope of K near the origin
};

// Verdict from the dyadic-window sups of the gauge.
//  - Satisfied: min K >= threshold (and the window nearest r_min as well).
//  - ViolatedLimsupZero: the window sups decrease strictly across the last
//    four dyadic windows, keep decaying there (>= 10 percent over the last
//    three halvings), and the final sup is below the threshold or below
//    1e-3 of the global sup.  The relative branch is needed for slow decay
//    (gauge ~ r^a with small a) that cannot reach an absolute cut on a
//    finite grid.
//  - Inconclusive otherwise.
struct NdcCheckResult {
    NdcVerdict verdict = NdcVerdict::Inconclusive;
    double C0 = 0.0;
};

NdcCheckResult ndc_check(const KProfile& profile, double eta,
                         double threshold = 1e-6);

// Detects order-infinity vanishing (increasing envelopes) or blow-up
// (decreasing envelopes) at the origin by scanning the normalized exponent
// e(r) = ln w / ln r (resp. ln w / -ln r) along the grid tail: for each
// m = 1..m_max a radius r_m with e(r_m) >= m is collected, with r_m
// strictly decreasing.
InfiniteOrderReport infinite_order_detect(const WeightSpec& w, const WeightClass& cls,
                                          const Grid& grid, int m_max = 16);

// Least-squares slope of ln K against ln r over the lowest two decades of
// the profile; empty if fewer than two samples lie there.
std::optional<double> fitted_alpha(const KProfile& profile);

// Full pipeline: profile, verdict, infinite-order scan, slope fit.
NdcReport ndc_report(const WeightSpec& w, const WeightClass& cls,
                     const EnvelopeResult& env, double threshold = 1e-6);

} // namespace ckn

#endif
