#ifndef CKN_WEIGHT_HPP
#define CKN_WEIGHT_HPP

#include <limits>
#include <memory>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace ckn {

// Behaviour of a weight at the origin: limit 0, limit +inf, a finite
// positive limit a, or undetermined.
struct WeightClass {
    enum class Tag { W0, Winf, Wa, Unknown };
    Tag tag = Tag::Unknown;
    double a = std::numeric_limits<double>::quiet_NaN(); // only for Wa

    static WeightClass w0() { return {Tag::W0, 0.0}; }
    static WeightClass winf() { return {Tag::Winf, std::numeric_limits<double>::infinity()}; }
    static WeightClass wa(double value) { return {Tag::Wa, value}; }
    static WeightClass unknown() { return {}; }

    bool is_w0() const { return tag == Tag::W0; }
    bool is_winf() const { return tag == Tag::Winf; }
    std::string name() const;
};

// Positive locally Lipschitz weight on (0, eta], described structurally:
//   pow(g)        t^g,  g != 0
//   expinv(a,-)   exp(-t^-a), a > 0   (vanishes to infinite order)
//   expinv(a,+)   exp(+t^-a), a > 0   (blows up to infinite order)
//   scale(c, w)   c * w(t), c > 0
//   prod(w1, w2)  w1(t) * w2(t)
//   table(...)    piecewise-linear interpolation of positive samples
struct WeightNode;
using WeightNodePtr = std::shared_ptr<const WeightNode>;

struct WeightNode {
    struct Power {
        double gamma;
    };
    struct ExpInvPower {
        double sign; // +1 or -1
        double alpha;
    };
    struct Scale {
        double c;
        WeightNodePtr inner;
    };
    struct Product {
        WeightNodePtr left, right;
    };
    struct Table {
        std::vector<double> knots;  // strictly increasing, > 0
        std::vector<double> values; // positive
    };
    std::variant<Power, ExpInvPower, Scale, Product, Table> node;
};

class WeightSpec {
public:
    static WeightSpec power(double gamma, double eta = 1.0);
    static WeightSpec exp_inv_power(int sign, double alpha, double eta = 1.0);
    static WeightSpec scale(double c, const WeightSpec& inner);
    static WeightSpec product(const WeightSpec& left, const WeightSpec& right);
    static WeightSpec table(std::vector<double> knots, std::vector<double> values,
                            double eta);

    double eta() const { return eta_; }
    WeightSpec with_eta(double eta) const;

    const WeightNode& root() const { return *root_; }

    // Smallest admissible argument: 0 for closed-form weights, the first
    // knot for tables (arguments below it are out of domain).
    double domain_min() const;

    // Human-readable round trip of the structure (mini-language syntax).
    std::string describe() const;

private:
    WeightSpec(WeightNodePtr root, double eta) : root_(std::move(root)), eta_(eta) {}
    WeightNodePtr root_;
    double eta_ = 1.0;
};

// w(t); throws domain_error unless t in (0, eta].  May overflow to +inf
// (or underflow to 0) for extreme built-in weights; use log_evaluate when
// the magnitude matters.
double evaluate(const WeightSpec& w, double t);

// ln w(t), computed structurally so it stays finite where w itself leaves
// the double range.
double log_evaluate(const WeightSpec& w, double t);

// w'(t); throws domain_error unless t in (0, eta).  Tables use the
// piecewise slope and return the right-hand slope at interior knots.
double derivative(const WeightSpec& w, double t);

// (ln w)'(t) = w'(t)/w(t), computed structurally.
double log_derivative(const WeightSpec& w, double t);

// Limit tag at the origin.  Closed-form weights are classified symbolically;
// tables (and indeterminate products) by a numeric probe along a geometric
// sequence approaching the lower edge of the domain.
WeightClass classify(const WeightSpec& w);

// Scale gauge K(r) = |w(r) / (r w'(r))| = 1 / (r |(ln w)'(r)|), computed
// through the structural log-derivative so it stays finite where w leaves
// the double range.  Returns +inf where w'(r) = 0.
double k_gauge(const WeightSpec& w, double r);

// Mini-language:  pow(g) | expinv(a,+) | expinv(a,-) | scale(c,<w>) |
// prod(<w>,<w>) | table(<csv-path>).  Throws parse_error with a byte
// position on syntax errors.
WeightSpec parse_weight(std::string_view text, double eta = 1.0);

// Two-column CSV "t,w" with one header line, strictly increasing t > 0,
// positive w.
WeightSpec load_table_csv(const std::string& path, double eta);

} // namespace ckn

#endif
