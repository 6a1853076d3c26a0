// ckn: weighted-inequality verification toolkit (command-line front door)
#include "ckn/certify.hpp"
#include "ckn/envelope.hpp"
#include "ckn/errors.hpp"
#include "ckn/functionals.hpp"
#include "ckn/ndc.hpp"
#include "ckn/version.hpp"
#include "ckn/weight.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

using nlohmann::json;

namespace {

struct CommonOpts {
    std::string weight;
    std::string eta_text = "1";
    double q = 2.0;
    int n = 2;
    int grid_points = 0; // 0 = default (CKN_GRID_POINTS or 4096)
    double r_min_ratio = 1e-8;
    std::uint64_t seed = 1;
    std::string format = "json";
    std::string out;
    double trunc = 1e3;

    bool eta_infinite = false;
    double eta_value = 1.0;
};

int default_grid_points() {
    if (const char* s = std::getenv("CKN_GRID_POINTS")) {
        char* end = nullptr;
        const long v = std::strtol(s, &end, 10);
        if (end == s || *end != '\0' || v < 16 || v > (1L << 22))
            throw ckn::spec_error(
                "CKN_GRID_POINTS must be an integer in [16, 4194304]");
        return static_cast<int>(v);
    }
    return 4096;
}

void resolve_common(CommonOpts& o, bool allow_inf_eta) {
    std::string t = o.eta_text;
    std::transform(t.begin(), t.end(), t.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    if (t == "inf" || t == "infinity") {
        if (!allow_inf_eta)
            throw ckn::hypothesis_error(
                "eta = inf is supported for 1d operations only; pass a finite "
                "eta");
        if (!(o.trunc > 0.0) || !std::isfinite(o.trunc))
            throw ckn::spec_error("truncation radius must be positive and finite");
        o.eta_infinite = true;
        o.eta_value = o.trunc;
    } else {
        char* end = nullptr;
        const double v = std::strtod(t.c_str(), &end);
        if (end == t.c_str() || *end != '\0' || !(v > 0.0) || !std::isfinite(v))
            throw ckn::spec_error("eta must be a positive real or 'inf'");
        o.eta_infinite = false;
        o.eta_value = v;
    }
    if (o.grid_points == 0) o.grid_points = default_grid_points();
    if (o.grid_points < 16)
        throw ckn::spec_error("grid must have at least 16 points");
    if (!(o.r_min_ratio > 0.0) || !(o.r_min_ratio < 1.0))
        throw ckn::spec_error("r-min-ratio must lie in (0, 1)");
    if (o.format != "json" && o.format != "csv")
        throw ckn::spec_error("format must be json or csv");
}

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

// decimal string for a scale known only through log10 (it may underflow)
std::string eps_string(double log10_eps) {
    double fl = std::floor(log10_eps);
    double mant = std::pow(10.0, log10_eps - fl);
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", mant);
    if (std::string(buf) == "10.000000") {
        std::snprintf(buf, sizeof buf, "%.6f", 1.0);
        fl += 1.0;
    }
    std::string s(buf);
    s += "e";
    std::snprintf(buf, sizeof buf, "%+lld", static_cast<long long>(fl));
    s += buf;
    return s;
}

json config_json(const CommonOpts& o, const char* command) {
    json c;
    c["command"] = command;
    c["weight"] = o.weight;
    if (o.eta_infinite) {
        c["eta"] = "inf";
        c["trunc"] = o.trunc;
    } else {
        c["eta"] = o.eta_value;
    }
    c["q"] = o.q;
    c["n"] = o.n;
    c["grid_points"] = o.grid_points;
    c["r_min_ratio"] = o.r_min_ratio;
    c["seed"] = o.seed;
    c["format"] = o.format;
    c["out_path"] = o.out;
    return c;
}

std::string csv_preamble(const CommonOpts& o, const char* command) {
    std::ostringstream os;
    os << "# version=" << ckn::version_string << "\n";
    os << "# schema=" << ckn::report_schema << "\n";
    os << "# command=" << command << "\n";
    os << "# weight=" << o.weight << "\n";
    os << "# eta=" << (o.eta_infinite ? std::string("inf") : fmt(o.eta_value))
       << "\n";
    if (o.eta_infinite) os << "# trunc=" << fmt(o.trunc) << "\n";
    os << "# q=" << fmt(o.q) << "\n";
    os << "# n=" << o.n << "\n";
    os << "# grid_points=" << o.grid_points << "\n";
    os << "# r_min_ratio=" << fmt(o.r_min_ratio) << "\n";
    os << "# seed=" << o.seed << "\n";
    return os.str();
}

void emit(const CommonOpts& o, const std::string& text) {
    if (o.out.empty()) {
        std::cout << text;
        if (text.empty() || text.back() != '\n') std::cout << "\n";
        return;
    }
    std::ofstream f(o.out);
    if (!f) throw ckn::spec_error("cannot open output path '" + o.out + "'");
    f << text;
    if (text.empty() || text.back() != '\n') f << "\n";
}

json report_shell(const CommonOpts& o, const char* command) {
    json r;
    r["schema"] = ckn::report_schema;
    r["version"] = ckn::version_string;
    r["config"] = config_json(o, command);
    return r;
}

struct Built {
    ckn::WeightSpec w;
    ckn::WeightClass cls;
};

Built build_weight(const CommonOpts& o) {
    ckn::WeightSpec w = ckn::parse_weight(o.weight, o.eta_value);
    return Built{w, ckn::classify(w)};
}

ckn::Grid make_grid(const CommonOpts& o, double eta) {
    return ckn::Grid::log_uniform(o.r_min_ratio * eta, eta,
                                  static_cast<std::size_t>(o.grid_points));
}

void add_common(CLI::App* cmd, CommonOpts& o, bool with_weight = true) {
    if (with_weight)
        cmd->add_option("--weight", o.weight, "weight spec, e.g. pow(1) or expinv(1,-)")
            ->required();
    cmd->add_option("--eta", o.eta_text, "interval endpoint (positive real, or inf for 1d ops)");
    cmd->add_option("--grid-points", o.grid_points, "grid resolution (default 4096 or CKN_GRID_POINTS)");
    cmd->add_option("--r-min-ratio", o.r_min_ratio, "grid start as a fraction of eta (default 1e-8)");
    cmd->add_option("--trunc", o.trunc, "truncation radius used when eta=inf (default 1e3)");
    cmd->add_option("--format", o.format, "output format: json or csv");
    cmd->add_option("--out", o.out, "output path (default stdout)");
    cmd->add_option("--seed", o.seed, "random seed for batteries");
}

json quotient_json(const ckn::QuotientReport& e) {
    json j;
    j["label"] = e.label;
    j["lhs"] = e.lhs;
    j["rhs"] = e.rhs;
    if (std::isinf(e.quotient))
        j["quotient"] = "inf";
    else
        j["quotient"] = e.quotient;
    j["est_error"] = e.est_error;
    j["theory_constant"] = e.theory_constant;
    j["theory_source"] = e.theory_source;
    j["pass"] = e.pass;
    return j;
}

int emit_battery(const CommonOpts& o, const char* command,
                 const ckn::BatteryReport& rep) {
    if (o.format == "csv") {
        std::ostringstream os;
        os << csv_preamble(o, command);
        os << "label,lhs,rhs,quotient,est_error,pass\n";
        for (const auto& e : rep.entries)
            os << e.label << "," << fmt(e.lhs) << "," << fmt(e.rhs) << ","
               << fmt(e.quotient) << "," << fmt(e.est_error) << ","
               << (e.pass ? 1 : 0) << "\n";
        emit(o, os.str());
    } else {
        json r = report_shell(o, command);
        r["theory_constant"] = rep.theory_constant;
        r["min_quotient"] = std::isinf(rep.min_quotient)
                                ? json("inf")
                                : json(rep.min_quotient);
        r["all_pass"] = rep.all_pass;
        json arr = json::array();
        for (const auto& e : rep.entries) arr.push_back(quotient_json(e));
        r["entries"] = arr;
        emit(o, r.dump(2));
    }
    return rep.all_pass ? 0 : 1;
}

std::vector<double> parse_sweep(const std::string& text, const char* what) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        char* end = nullptr;
        const double v = std::strtod(item.c_str(), &end);
        if (end == item.c_str() || *end != '\0' || !(v > 0.0))
            throw ckn::spec_error(std::string(what) +
                                  " must be a comma list of positive reals");
        out.push_back(v);
    }
    if (out.empty())
        throw ckn::spec_error(std::string(what) + " must be nonempty");
    return out;
}

int run_classify(CommonOpts& o) {
    resolve_common(o, true);
    const Built b = build_weight(o);
    if (o.format == "csv") {
        std::ostringstream os;
        os << csv_preamble(o, "classify") << "class,a\n";
        os << b.cls.name() << ","
           << (b.cls.tag == ckn::WeightClass::Tag::Wa ? fmt(b.cls.a) : "")
           << "\n";
        emit(o, os.str());
        return 0;
    }
    json r = report_shell(o, "classify");
    r["class"] = b.cls.name();
    if (b.cls.tag == ckn::WeightClass::Tag::Wa) r["a"] = b.cls.a;
    emit(o, r.dump(2));
    return 0;
}

int run_envelope(CommonOpts& o) {
    resolve_common(o, true);
    const Built b = build_weight(o);
    const auto env = ckn::compute_envelope(b.w, b.cls, make_grid(o, o.eta_value), o.q);
    if (o.format == "csv") {
        std::ostringstream os;
        os << csv_preamble(o, "envelope");
        ckn::write_envelope_csv(os, env, b.w);
        emit(o, os.str());
        return 0;
    }
    json r = report_shell(o, "envelope");
    r["kind"] = env.kind == ckn::EnvelopeKind::Increasing ? "increasing" : "decreasing";
    r["eta_tilde"] = env.eta_tilde;
    r["log_eta_tilde"] = env.log_eta_tilde;
    std::size_t plateaus = 0;
    for (bool p : env.plateau) plateaus += p ? 1 : 0;
    r["plateau_cells"] = plateaus;
    r["cells"] = env.grid.cells();
    emit(o, r.dump(2));
    return 0;
}

int run_k_profile(CommonOpts& o) {
    resolve_common(o, true);
    const Built b = build_weight(o);
    const auto env = ckn::compute_envelope(b.w, b.cls, make_grid(o, o.eta_value), o.q);
    const auto prof = ckn::k_profile(b.w, env);
    if (o.format == "csv") {
        std::ostringstream os;
        os << csv_preamble(o, "k-profile") << "r,K\n";
        for (const auto& s : prof.samples)
            os << fmt(s.r) << "," << fmt(s.K) << "\n";
        emit(o, os.str());
        return 0;
    }
    json r = report_shell(o, "k-profile");
    r["n_cells"] = prof.n_cells;
    r["n_flagged"] = prof.n_flagged;
    json arr = json::array();
    for (const auto& s : prof.samples) arr.push_back({{"r", s.r}, {"K", s.K}});
    r["samples"] = arr;
    emit(o, r.dump(2));
    return 0;
}

int run_ndc(CommonOpts& o, double threshold) {
    resolve_common(o, true);
    const Built b = build_weight(o);
    const auto env = ckn::compute_envelope(b.w, b.cls, make_grid(o, o.eta_value), o.q);
    const auto rep = ckn::ndc_report(b.w, b.cls, env, threshold);
    if (o.format == "csv") {
        std::ostringstream os;
        os << csv_preamble(o, "ndc")
           << "verdict,C0,infinite_order,fitted_alpha\n";
        os << ckn::to_string(rep.verdict) << "," << fmt(rep.C0) << ","
           << (rep.infinite_order ? 1 : 0) << ","
           << (rep.fitted_alpha ? fmt(*rep.fitted_alpha) : "") << "\n";
        emit(o, os.str());
    } else {
        json r = report_shell(o, "ndc");
        r["verdict"] = ckn::to_string(rep.verdict);
        r["C0"] = rep.C0;
        r["threshold"] = threshold;
        r["infinite_order"] = rep.infinite_order;
        switch (rep.order.status) {
        case ckn::InfiniteOrderStatus::Yes: r["order_status"] = "yes"; break;
        case ckn::InfiniteOrderStatus::No: r["order_status"] = "no"; break;
        default: r["order_status"] = "inconclusive"; break;
        }
        json wit = json::array();
        for (const auto& x : rep.order.witness)
            wit.push_back({{"m", x.m}, {"r", x.r}});
        r["witness"] = wit;
        if (rep.fitted_alpha)
            r["fitted_alpha"] = *rep.fitted_alpha;
        else
            r["fitted_alpha"] = nullptr;
        r["n_flagged"] = rep.profile.n_flagged;
        emit(o, r.dump(2));
    }
    return rep.verdict == ckn::NdcVerdict::Inconclusive ? 1 : 0;
}

int run_verify_1d(CommonOpts& o, std::size_t count) {
    resolve_common(o, true);
    const Built b = build_weight(o);
    const auto env = ckn::compute_envelope(b.w, b.cls, make_grid(o, o.eta_value), o.q);
    const auto rep = ckn::verify_battery(b.w, env, nullptr, 1, count, o.seed);
    return emit_battery(o, "verify-1d", rep);
}

int run_verify_nd(CommonOpts& o, std::size_t count) {
    resolve_common(o, false);
    const Built b = build_weight(o);
    const auto env = ckn::compute_envelope(b.w, b.cls, make_grid(o, o.eta_value), o.q);
    const auto ndc = ckn::ndc_report(b.w, b.cls, env);
    const auto rep = ckn::verify_battery(b.w, env, &ndc, o.n, count, o.seed);
    return emit_battery(o, "verify-nd", rep);
}

int run_best_const_1d(CommonOpts& o, double x, std::string sweep_text) {
    resolve_common(o, true);
    const Built b = build_weight(o);
    const auto env = ckn::compute_envelope(b.w, b.cls, make_grid(o, o.eta_value), o.q);
    if (x <= 0.0) x = 0.5 * o.eta_value;
    std::vector<double> sweep;
    if (sweep_text.empty()) {
        for (double f : {0.05, 0.02, 0.01, 0.005, 0.002})
            sweep.push_back(f * o.eta_value);
    } else {
        sweep = parse_sweep(sweep_text, "--h-sweep");
    }
    const auto rep = ckn::estimate_best_constant_1d(b.w, env, x, sweep);
    bool ok = true;
    for (const auto& p : rep.sweep)
        ok = ok && p.quotient >= rep.theory * (1.0 - 1e-3) - 3.0 * p.est_error;
    if (o.format == "csv") {
        std::ostringstream os;
        os << csv_preamble(o, "best-const-1d") << "h,quotient,est_error,plateau_window\n";
        for (const auto& p : rep.sweep)
            os << fmt(p.h) << "," << fmt(p.quotient) << "," << fmt(p.est_error)
               << "," << (p.plateau_window ? 1 : 0) << "\n";
        emit(o, os.str());
    } else {
        json r = report_shell(o, "best-const-1d");
        r["anchor_x"] = rep.anchor;
        r["theory_constant"] = rep.theory;
        r["constant"] = rep.constant;
        json arr = json::array();
        for (const auto& p : rep.sweep)
            arr.push_back({{"h", p.h},
                           {"quotient", p.quotient},
                           {"est_error", p.est_error},
                           {"plateau_window", p.plateau_window}});
        r["sweep"] = arr;
        emit(o, r.dump(2));
    }
    return ok ? 0 : 1;
}

int run_best_const_rad(CommonOpts& o, double gamma, double R,
                       std::string sweep_text) {
    resolve_common(o, false);
    std::vector<double> sweep;
    if (sweep_text.empty()) {
        for (double f : {0.05, 0.02, 0.01, 0.005}) sweep.push_back(f * R);
    } else {
        sweep = parse_sweep(sweep_text, "--eps-sweep");
    }
    const auto rep = ckn::estimate_best_constant_radial(o.n, o.q, gamma, R, sweep);
    bool ok = true;
    for (const auto& p : rep.sweep)
        ok = ok && p.quotient >=
                       rep.constants.s_radial * (1.0 - 1e-3) - 3.0 * p.est_error;
    if (o.format == "csv") {
        std::ostringstream os;
        os << csv_preamble(o, "best-const-rad") << "eps,quotient,est_error\n";
        for (const auto& p : rep.sweep)
            os << fmt(p.h) << "," << fmt(p.quotient) << "," << fmt(p.est_error)
               << "\n";
        emit(o, os.str());
    } else {
        json r = report_shell(o, "best-const-rad");
        r["gamma"] = gamma;
        r["R"] = R;
        r["omega_n"] = rep.constants.omega_n;
        r["s_1q"] = rep.constants.s_1q;
        r["s_radial"] = rep.constants.s_radial;
        r["constant"] = rep.constant;
        json arr = json::array();
        for (const auto& p : rep.sweep)
            arr.push_back({{"eps", p.h},
                           {"quotient", p.quotient},
                           {"est_error", p.est_error}});
        r["sweep"] = arr;
        emit(o, r.dump(2));
    }
    return ok ? 0 : 1;
}

int run_counterexample(CommonOpts& o, int j_count, double s) {
    resolve_common(o, false);
    const Built b = build_weight(o);
    const auto env = ckn::compute_envelope(b.w, b.cls, make_grid(o, o.eta_value), o.q);
    const auto ndc = ckn::ndc_report(b.w, b.cls, env);
    const auto a = ckn::run_counterexample(b.w, env, ndc, o.q, j_count, s);
    if (o.format == "csv") {
        std::ostringstream os;
        os << csv_preamble(o, "counterexample") << "j,eps_j,lhs,rhs,quotient\n";
        for (const auto& t : a.seq.terms)
            os << t.j << "," << eps_string(t.log10_eps) << "," << fmt(t.lhs)
               << "," << fmt(t.rhs) << "," << fmt(t.quotient) << "\n";
        emit(o, os.str());
    } else {
        json r = report_shell(o, "counterexample");
        r["s"] = a.seq.s;
        r["log_eta_tilde"] = a.seq.log_eta_tilde;
        r["lhs_spread"] = a.lhs_spread;
        r["rhs_growth"] = a.rhs_growth;
        r["lhs_bounded"] = a.lhs_bounded;
        r["rhs_increasing"] = a.rhs_increasing;
        r["quotient_decreasing"] = a.quotient_decreasing;
        json arr = json::array();
        for (const auto& t : a.seq.terms) {
            json tj;
            tj["j"] = t.j;
            tj["moll_index"] = t.moll_index;
            tj["eps"] = eps_string(t.log10_eps);
            tj["log10_eps"] = t.log10_eps;
            tj["eps_clamped"] = t.eps_clamped;
            tj["lhs"] = t.lhs;
            tj["rhs"] = t.rhs;
            tj["quotient"] = t.quotient;
            tj["angular_mass"] = t.angular_mass;
            tj["angular_q_mass"] = t.angular_q_mass;
            tj["angular_deriv_mass"] = t.angular_deriv_mass;
            arr.push_back(tj);
        }
        r["terms"] = arr;
        emit(o, r.dump(2));
    }
    return (a.lhs_bounded && a.rhs_increasing && a.quotient_decreasing) ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{std::string(ckn::version_string) +
                 " - weighted inequality verification toolkit"};
    app.require_subcommand(1);

    CommonOpts o;
    double threshold = 1e-6;
    std::size_t count = 50;
    double x = 0.0;
    std::string h_sweep, eps_sweep;
    double gamma = 1.0, R = 1.0;
    int j_count = 6;
    double s = 0.0;

    auto* c_classify = app.add_subcommand("classify", "limit class of the weight at the origin");
    add_common(c_classify, o);

    auto* c_envelope = app.add_subcommand("envelope", "monotone envelope, plateau mask and dual density");
    add_common(c_envelope, o);
    c_envelope->add_option("--q", o.q, "dual exponent (default 2)");

    auto* c_kprofile = app.add_subcommand("k-profile", "logarithmic-derivative gauge K along the grid");
    add_common(c_kprofile, o);

    auto* c_ndc = app.add_subcommand("ndc", "non-degeneracy verdict for the gauge");
    add_common(c_ndc, o);
    c_ndc->add_option("--threshold", threshold, "gauge threshold (default 1e-6)");

    auto* c_v1 = app.add_subcommand("verify-1d", "random battery for the 1d inequality");
    add_common(c_v1, o);
    c_v1->add_option("--q", o.q, "dual exponent (default 2)");
    c_v1->add_option("--count", count, "battery size (default 50)");

    auto* c_vn = app.add_subcommand("verify-nd", "random battery for the polar inequality");
    add_common(c_vn, o);
    c_vn->add_option("--q", o.q, "dual exponent (default 2)");
    c_vn->add_option("--n", o.n, "dimension (default 2)");
    c_vn->add_option("--count", count, "battery size (default 50)");

    auto* c_b1 = app.add_subcommand("best-const-1d", "localized sweep toward the sharp 1d constant");
    add_common(c_b1, o);
    c_b1->add_option("--q", o.q, "dual exponent (default 2)");
    c_b1->add_option("--x", x, "window anchor (default eta/2)");
    c_b1->add_option("--h-sweep", h_sweep, "comma list of window widths");

    auto* c_br = app.add_subcommand("best-const-rad", "smoothed-indicator sweep for the radial constant");
    add_common(c_br, o, false);
    c_br->add_option("--q", o.q, "dual exponent (default 2)");
    c_br->add_option("--n", o.n, "dimension (default 2)");
    c_br->add_option("--gamma", gamma, "power exponent")->required();
    c_br->add_option("--R", R, "indicator radius (default 1)");
    c_br->add_option("--eps-sweep", eps_sweep, "comma list of smoothing scales");

    auto* c_cx = app.add_subcommand("counterexample", "divergent product sequence when the gauge collapses");
    add_common(c_cx, o);
    c_cx->add_option("--q", o.q, "dual exponent in (1, 2] (default 2)");
    c_cx->add_option("--jmax", j_count, "number of terms (default 6)");
    c_cx->add_option("--s", s, "angular exponent (default (1/q+1)/2)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (app.got_subcommand(c_classify)) return run_classify(o);
        if (app.got_subcommand(c_envelope)) return run_envelope(o);
        if (app.got_subcommand(c_kprofile)) return run_k_profile(o);
        if (app.got_subcommand(c_ndc)) return run_ndc(o, threshold);
        if (app.got_subcommand(c_v1)) return run_verify_1d(o, count);
        if (app.got_subcommand(c_vn)) return run_verify_nd(o, count);
        if (app.got_subcommand(c_b1)) return run_best_const_1d(o, x, h_sweep);
        if (app.got_subcommand(c_br)) return run_best_const_rad(o, gamma, R, eps_sweep);
        if (app.got_subcommand(c_cx)) return run_counterexample(o, j_count, s);
        std::cerr << "error: no subcommand\n";
        return 2;
    } catch (const ckn::hypothesis_error& e) {
        std::cerr << "hypothesis not met: " << e.what() << "\n";
        return 2;
    } catch (const ckn::parse_error& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
