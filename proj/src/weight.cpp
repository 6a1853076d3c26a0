#include "ckn/weight.hpp"

#include "ckn/errors.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>

namespace ckn {

namespace {

using Power = WeightNode::Power;
using ExpInvPower = WeightNode::ExpInvPower;
using Scale = WeightNode::Scale;
using Product = WeightNode::Product;
using Table = WeightNode::Table;

double eval_node(const WeightNode& n, double t);
double log_eval_node(const WeightNode& n, double t);
double deriv_node(const WeightNode& n, double t);
double log_deriv_node(const WeightNode& n, double t);

// index of the table segment containing t; knots[i] <= t <= knots[i+1],
// preferring the segment to the right of an interior knot.
std::size_t table_segment(const Table& tb, double t) {
    const auto& k = tb.knots;
    if (t < k.front() || t > k.back())
        throw domain_error("table weight: argument outside knot range");
    auto it = std::upper_bound(k.begin(), k.end(), t);
    std::size_t i = (it == k.begin()) ? 0 : static_cast<std::size_t>(it - k.begin() - 1);
    if (i + 1 >= k.size()) i = k.size() - 2;
    return i;
}

double table_value(const Table& tb, double t) {
    const std::size_t i = table_segment(tb, t);
    const double t0 = tb.knots[i], t1 = tb.knots[i + 1];
    const double w0 = tb.values[i], w1 = tb.values[i + 1];
    return w0 + (w1 - w0) * (t - t0) / (t1 - t0);
}

double table_slope(const Table& tb, double t) {
    const std::size_t i = table_segment(tb, t);
    return (tb.values[i + 1] - tb.values[i]) / (tb.knots[i + 1] - tb.knots[i]);
}

double eval_node(const WeightNode& n, double t) {
    return std::visit(
        [t](const auto& v) -> double {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, Power>) {
                return std::pow(t, v.gamma);
            } else if constexpr (std::is_same_v<T, ExpInvPower>) {
                return std::exp(v.sign * std::pow(t, -v.alpha));
            } else if constexpr (std::is_same_v<T, Scale>) {
                return v.c * eval_node(*v.inner, t);
            } else if constexpr (std::is_same_v<T, Product>) {
                return eval_node(*v.left, t) * eval_node(*v.right, t);
            } else {
                return table_value(v, t);
            }
        },
        n.node);
}

double log_eval_node(const WeightNode& n, double t) {
    return std::visit(
        [t](const auto& v) -> double {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, Power>) {
                return v.gamma * std::log(t);
            } else if constexpr (std::is_same_v<T, ExpInvPower>) {
                return v.sign * std::pow(t, -v.alpha);
            } else if constexpr (std::is_same_v<T, Scale>) {
                return std::log(v.c) + log_eval_node(*v.inner, t);
            } else if constexpr (std::is_same_v<T, Product>) {
                return log_eval_node(*v.left, t) + log_eval_node(*v.right, t);
            } else {
                return std::log(table_value(v, t));
            }
        },
        n.node);
}

double deriv_node(const WeightNode& n, double t) {
    return std::visit(
        [t](const auto& v) -> double {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, Power>) {
                return v.gamma * std::pow(t, v.gamma - 1.0);
            } else if constexpr (std::is_same_v<T, ExpInvPower>) {
                // d/dt exp(s t^-a) = -s a t^(-a-1) exp(s t^-a)
                return -v.sign * v.alpha * std::pow(t, -v.alpha - 1.0) *
                       std::exp(v.sign * std::pow(t, -v.alpha));
            } else if constexpr (std::is_same_v<T, Scale>) {
                return v.c * deriv_node(*v.inner, t);
            } else if constexpr (std::is_same_v<T, Product>) {
                return deriv_node(*v.left, t) * eval_node(*v.right, t) +
                       eval_node(*v.left, t) * deriv_node(*v.right, t);
            } else {
                return table_slope(v, t);
            }
        },
        n.node);
}

double log_deriv_node(const WeightNode& n, double t) {
    return std::visit(
        [t](const auto& v) -> double {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, Power>) {
                return v.gamma / t;
            } else if constexpr (std::is_same_v<T, ExpInvPower>) {
                return -v.sign * v.alpha * std::pow(t, -v.alpha - 1.0);
            } else if constexpr (std::is_same_v<T, Scale>) {
                return log_deriv_node(*v.inner, t);
            } else if constexpr (std::is_same_v<T, Product>) {
                return log_deriv_node(*v.left, t) + log_deriv_node(*v.right, t);
            } else {
                return table_slope(v, t) / table_value(v, t);
            }
        },
        n.node);
}

double domain_min_node(const WeightNode& n) {
    return std::visit(
        [](const auto& v) -> double {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, Scale>) {
                return domain_min_node(*v.inner);
            } else if constexpr (std::is_same_v<T, Product>) {
                return std::max(domain_min_node(*v.left), domain_min_node(*v.right));
            } else if constexpr (std::is_same_v<T, Table>) {
                return v.knots.front();
            } else {
                return 0.0;
            }
        },
        n.node);
}

std::string describe_node(const WeightNode& n) {
    std::ostringstream os;
    std::visit(
        [&os](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, Power>) {
                os << "pow(" << v.gamma << ")";
            } else if constexpr (std::is_same_v<T, ExpInvPower>) {
                os << "expinv(" << v.alpha << "," << (v.sign > 0 ? "+" : "-") << ")";
            } else if constexpr (std::is_same_v<T, Scale>) {
                os << "scale(" << v.c << "," << describe_node(*v.inner) << ")";
            } else if constexpr (std::is_same_v<T, Product>) {
                os << "prod(" << describe_node(*v.left) << "," << describe_node(*v.right)
                   << ")";
            } else {
                os << "table(" << v.knots.size() << " knots)";
            }
        },
        n.node);
    return os.str();
}

} // namespace

std::string WeightClass::name() const {
    switch (tag) {
    case Tag::W0: return "W0";
    case Tag::Winf: return "Winf";
    case Tag::Wa: return "Wa";
    case Tag::Unknown: return "unknown";
    }
    return "unknown";
}

WeightSpec WeightSpec::power(double gamma, double eta) {
    if (!std::isfinite(gamma) || gamma == 0.0)
        throw spec_error("pow: exponent must be finite and nonzero");
    if (!(eta > 0.0))
        throw spec_error("weight: eta must be positive");
    return WeightSpec(std::make_shared<WeightNode>(WeightNode{Power{gamma}}), eta);
}

WeightSpec WeightSpec::exp_inv_power(int sign, double alpha, double eta) {
    if (sign != 1 && sign != -1)
        throw spec_error("expinv: sign must be + or -");
    if (!(alpha > 0.0) || !std::isfinite(alpha))
        throw spec_error("expinv: alpha must be positive and finite");
    if (!(eta > 0.0))
        throw spec_error("weight: eta must be positive");
    return WeightSpec(
        std::make_shared<WeightNode>(WeightNode{ExpInvPower{static_cast<double>(sign), alpha}}),
        eta);
}

WeightSpec WeightSpec::scale(double c, const WeightSpec& inner) {
    if (!(c > 0.0) || !std::isfinite(c))
        throw spec_error("scale: factor must be positive and finite");
    return WeightSpec(std::make_shared<WeightNode>(WeightNode{Scale{c, inner.root_}}),
                      inner.eta_);
}

WeightSpec WeightSpec::product(const WeightSpec& left, const WeightSpec& right) {
    return WeightSpec(
        std::make_shared<WeightNode>(WeightNode{Product{left.root_, right.root_}}),
        left.eta_);
}

WeightSpec WeightSpec::table(std::vector<double> knots, std::vector<double> values,
                             double eta) {
    if (knots.size() != values.size() || knots.size() < 2)
        throw spec_error("table: need matching knot/value lists with >= 2 entries");
    if (!(knots.front() > 0.0))
        throw spec_error("table: knots must be positive");
    for (std::size_t i = 0; i + 1 < knots.size(); ++i)
        if (!(knots[i] < knots[i + 1]))
            throw spec_error("table: knots must be strictly increasing");
    for (double v : values)
        if (!(v > 0.0) || !std::isfinite(v))
            throw spec_error("table: values must be positive and finite");
    if (!(eta > 0.0))
        throw spec_error("weight: eta must be positive");
    if (knots.back() < eta)
        throw spec_error("table: knots must cover (t_min, eta]");
    return WeightSpec(
        std::make_shared<WeightNode>(WeightNode{Table{std::move(knots), std::move(values)}}),
        eta);
}

WeightSpec WeightSpec::with_eta(double eta) const {
    if (!(eta > 0.0))
        throw spec_error("weight: eta must be positive");
    WeightSpec w(root_, eta);
    if (w.domain_min() >= eta)
        throw spec_error("weight: eta lies below the table domain");
    const auto* tb = std::get_if<Table>(&root_->node);
    if (tb && std::isfinite(eta) && tb->knots.back() < eta)
        throw spec_error("table: knots must cover (t_min, eta]");
    return w;
}

double WeightSpec::domain_min() const { return domain_min_node(*root_); }

std::string WeightSpec::describe() const { return describe_node(*root_); }

double evaluate(const WeightSpec& w, double t) {
    if (!(t > 0.0) || t > w.eta())
        throw domain_error("evaluate: t must lie in (0, eta]");
    return eval_node(w.root(), t);
}

double log_evaluate(const WeightSpec& w, double t) {
    if (!(t > 0.0) || t > w.eta())
        throw domain_error("log_evaluate: t must lie in (0, eta]");
    return log_eval_node(w.root(), t);
}

double derivative(const WeightSpec& w, double t) {
    if (!(t > 0.0) || !(t < w.eta()))
        throw domain_error("derivative: t must lie in (0, eta)");
    return deriv_node(w.root(), t);
}

double log_derivative(const WeightSpec& w, double t) {
    if (!(t > 0.0) || !(t < w.eta()))
        throw domain_error("log_derivative: t must lie in (0, eta)");
    return log_deriv_node(w.root(), t);
}

namespace {

// Numeric probe of the limit at the lower domain edge: samples ln w along a
// geometric sequence and looks at the tail.
WeightClass classify_probe(const WeightSpec& w) {
    const double lo = w.domain_min();
    const double hi = std::isfinite(w.eta()) ? std::min(w.eta(), 1.0) : 1.0;
    std::vector<double> ys;
    double t = hi;
    for (int k = 0; k < 60 && t > lo; ++k, t *= 0.5) {
        const double y = log_evaluate(w, t);
        if (!std::isnan(y)) ys.push_back(y);
        if (std::isinf(y)) break; // ln w left double range; the sign decides
    }
    if (ys.size() < 3) return WeightClass::unknown();

    if (std::isinf(ys.back()))
        return ys.back() > 0 ? WeightClass::winf() : WeightClass::w0();

    const std::size_t m = std::min<std::size_t>(5, ys.size());
    double ymin = ys.back(), ymax = ys.back();
    for (std::size_t i = ys.size() - m; i < ys.size(); ++i) {
        ymin = std::min(ymin, ys[i]);
        ymax = std::max(ymax, ys[i]);
    }
    // settled tail: relative spread of w below 5 percent
    if (ymax - ymin <= std::log(1.05))
        return WeightClass::wa(std::exp(0.5 * (ymin + ymax)));

    const std::size_t look = std::min<std::size_t>(10, ys.size() - 1);
    bool down = true, up = true;
    for (std::size_t i = ys.size() - look; i < ys.size(); ++i) {
        if (ys[i] > ys[i - 1] + 1e-12) down = false;
        if (ys[i] < ys[i - 1] - 1e-12) up = false;
    }
    const double drop = ys.back() - ys.front();
    if (down && drop < -20.0 && ys.back() < std::log(1e-12)) return WeightClass::w0();
    if (up && drop > 20.0 && ys.back() > std::log(1e12)) return WeightClass::winf();
    return WeightClass::unknown();
}

WeightClass classify_node(const WeightSpec& w, const WeightNode& n) {
    return std::visit(
        [&w](const auto& v) -> WeightClass {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, Power>) {
                return v.gamma > 0 ? WeightClass::w0() : WeightClass::winf();
            } else if constexpr (std::is_same_v<T, ExpInvPower>) {
                return v.sign < 0 ? WeightClass::w0() : WeightClass::winf();
            } else if constexpr (std::is_same_v<T, Scale>) {
                WeightClass c = classify_node(w, *v.inner);
                if (c.tag == WeightClass::Tag::Wa) return WeightClass::wa(v.c * c.a);
                return c;
            } else if constexpr (std::is_same_v<T, Product>) {
                const WeightClass l = classify_node(w, *v.left);
                const WeightClass r = classify_node(w, *v.right);
                using Tag = WeightClass::Tag;
                if (l.tag == Tag::Unknown || r.tag == Tag::Unknown)
                    return classify_probe(w);
                if (l.tag == Tag::Wa && r.tag == Tag::Wa)
                    return WeightClass::wa(l.a * r.a);
                if (l.tag == Tag::Wa) return r;
                if (r.tag == Tag::Wa) return l;
                if (l.tag == r.tag) return l;
                // 0 * inf: indeterminate, fall back to the probe
                return classify_probe(w);
            } else {
                (void)v;
                return classify_probe(w);
            }
        },
        n.node);
}

} // namespace

WeightClass classify(const WeightSpec& w) { return classify_node(w, w.root()); }

double k_gauge(const WeightSpec& w, double r) {
    const double dln = log_derivative(w, r);
    if (dln == 0.0) return std::numeric_limits<double>::infinity();
    return 1.0 / (r * std::abs(dln));
}

// ---------------------------------------------------------------------------
// mini-language parser

namespace {

struct Parser {
    std::string_view text;
    std::size_t pos = 0;
    double eta;

    void skip_ws() {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos])))
            ++pos;
    }

    [[noreturn]] void fail(const std::string& msg) { throw parse_error(msg, pos); }

    void expect(char c) {
        skip_ws();
        if (pos >= text.size() || text[pos] != c)
            fail(std::string("expected '") + c + "'");
        ++pos;
    }

    double number() {
        skip_ws();
        const char* begin = text.data() + pos;
        char* end = nullptr;
        const double v = std::strtod(begin, &end);
        if (end == begin) fail("expected a number");
        pos += static_cast<std::size_t>(end - begin);
        return v;
    }

    std::string ident() {
        skip_ws();
        const std::size_t start = pos;
        while (pos < text.size() &&
               (std::isalnum(static_cast<unsigned char>(text[pos])) || text[pos] == '_'))
            ++pos;
        if (pos == start) fail("expected a weight name");
        return std::string(text.substr(start, pos - start));
    }

    WeightSpec spec() {
        const std::size_t name_pos = pos;
        const std::string name = ident();
        expect('(');
        if (name == "pow") {
            const double g = number();
            expect(')');
            return WeightSpec::power(g, eta);
        }
        if (name == "expinv") {
            const double a = number();
            expect(',');
            skip_ws();
            if (pos >= text.size() || (text[pos] != '+' && text[pos] != '-'))
                fail("expected '+' or '-'");
            const int sign = (text[pos] == '+') ? 1 : -1;
            ++pos;
            expect(')');
            return WeightSpec::exp_inv_power(sign, a, eta);
        }
        if (name == "scale") {
            const double c = number();
            expect(',');
            WeightSpec inner = spec();
            expect(')');
            return WeightSpec::scale(c, inner);
        }
        if (name == "prod") {
            WeightSpec l = spec();
            expect(',');
            WeightSpec r = spec();
            expect(')');
            return WeightSpec::product(l, r);
        }
        if (name == "table") {
            skip_ws();
            const std::size_t start = pos;
            while (pos < text.size() && text[pos] != ')') ++pos;
            if (pos >= text.size()) fail("expected ')'");
            std::string path(text.substr(start, pos - start));
            while (!path.empty() && std::isspace(static_cast<unsigned char>(path.back())))
                path.pop_back();
            if (path.empty()) fail("expected a csv path");
            ++pos; // ')'
            return load_table_csv(path, eta);
        }
        pos = name_pos;
        fail("unknown weight '" + name + "'");
    }
};

} // namespace

WeightSpec parse_weight(std::string_view text, double eta) {
    Parser p{text, 0, eta};
    WeightSpec w = p.spec();
    p.skip_ws();
    if (p.pos != text.size()) p.fail("trailing input after weight");
    return w;
}

WeightSpec load_table_csv(const std::string& path, double eta) {
    std::ifstream in(path);
    if (!in) throw spec_error("table: cannot open '" + path + "'");
    std::string line;
    if (!std::getline(in, line)) throw spec_error("table: empty file '" + path + "'");
    std::vector<double> knots, values;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string a, b;
        if (!std::getline(ls, a, ',') || !std::getline(ls, b))
            throw spec_error("table: bad row at line " + std::to_string(lineno) +
                             " of '" + path + "'");
        try {
            knots.push_back(std::stod(a));
            values.push_back(std::stod(b));
        } catch (const std::exception&) {
            throw spec_error("table: bad number at line " + std::to_string(lineno) +
                             " of '" + path + "'");
        }
    }
    return WeightSpec::table(std::move(knots), std::move(values), eta);
}

} // namespace ckn
