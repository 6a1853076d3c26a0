#ifndef CKN_ENVELOPE_HPP
#define CKN_ENVELOPE_HPP

#include "ckn/weight.hpp"

#include <iosfwd>
#include <vector>

namespace ckn {

// Strictly increasing evaluation points; points.front() = r_min,
// points.back() = eta.
struct Grid {
    std::vector<double> points;

    static Grid log_uniform(double r_min, double eta, std::size_t count);
    static Grid from_points(std::vector<double> pts);

    std::size_t size() const { return points.size(); }
    std::size_t cells() const { return points.size() - 1; }
    double r_min() const { return points.front(); }
    double eta() const { return points.back(); }
};

enum class EnvelopeKind {
    Increasing, // largest nondecreasing minorant (limit 0 at the origin)
    Decreasing  // largest nonincreasing minorant (blow-up at the origin)
};

// Monotone envelope of a weight on a grid, with the cell-wise density of
// d(v^q)/dt.  Envelope values are kept in log space as well: near the
// origin v itself can leave the double range while log v stays finite.
struct EnvelopeResult {
    EnvelopeKind kind;
    Grid grid;
    double q = 1.0;
    std::vector<double> v;       // per point; exp(log_v), may flush to 0/inf
    std::vector<double> log_v;   // per point, exact recursion in log space
    std::vector<bool> plateau;   // per cell: envelope flat below the weight
    std::vector<double> Vq;      // per cell: |v_r^q - v_l^q| / cell width, >= 0
    double eta_tilde = 0.0;      // v at eta
    double log_eta_tilde = 0.0;

    // Piecewise-linear interpolation of the stored samples.
    double value_at(double r) const;
    double log_value_at(double r) const;

    // Inverse of the interpolated envelope.  Throws plateau_image_error if
    // the level is attained on a plateau, domain_error outside the sampled
    // range.  The log variant works on levels whose linear value leaves the
    // double range.
    double inverse(double rho) const;
    double inverse_log(double log_rho) const;

    // geometric midpoint of cell i
    double cell_mid(std::size_t i) const;
};

// Envelope of w per its class: Increasing (suffix infimum, right to left)
// when the weight vanishes at the origin, Decreasing (prefix infimum) when
// it blows up.  Throws unsupported_class_error for other classes.
EnvelopeResult compute_envelope(const WeightSpec& w, const WeightClass& cls,
                                const Grid& grid, double q);

// Sample of the transplanted gauge H(rho) = K(r(rho)) where rho = v(r) for
// increasing envelopes and rho = 1/v(r) for decreasing ones.
struct HSample {
    double rho = 0.0;
    double H = 0.0;
    bool plateau_skipped = false; // level in a plateau image; H not defined
};

std::vector<HSample> h_profile(const EnvelopeResult& env, const WeightSpec& w,
                               const std::vector<double>& rho_values);

// CSV dump: "r,w,v,Vq,plateau" per grid point (cell columns describe the
// cell to the right of the point; the last row repeats zero).
void write_envelope_csv(std::ostream& os, const EnvelopeResult& env,
                        const WeightSpec& w);

} // namespace ckn

#endif
