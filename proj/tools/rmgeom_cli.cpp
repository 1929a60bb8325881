#include "rmgeom/acceptance.hpp"
#include "rmgeom/cfrac.hpp"
#include "rmgeom/errors.hpp"
#include "rmgeom/lfunc.hpp"
#include "rmgeom/nctorus.hpp"
#include "rmgeom/parallel.hpp"
#include "rmgeom/records.hpp"
#include "rmgeom/shadows.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>

using namespace rmgeom;

namespace {

enum Exit { kOk = 0, kCheckFailed = 1, kUsage = 2, kDomain = 3, kPrecision = 4, kOther = 5 };

const char* kExitHelp =
    "Exit codes:\n"
    "  0  success\n"
    "  1  a check record has pass=false\n"
    "  2  usage error (unknown flag, bad value, csv for a command without csv output)\n"
    "  3  domain error (invalid field, lattice or argument)\n"
    "  4  precision or truncation exhausted\n"
    "  5  any other failure\n"
    "Environment: RMGEOM_PRECISION_BITS sets the default --precision-bits,\n"
    "RMGEOM_WORKERS the default --workers.\n";

struct Options {
    std::int64_t d = 5;
    std::string l0 = "1";
    double s_re = 2, s_im = 0;
    std::optional<std::string> x;
    std::optional<double> truncation;
    int k = 2;
    long m = 2;
    long level = 11;
    long scale = 1;
    long window = 5;
    std::string f;
    std::string gamma = "sigma";
    bool continued = false;
    bool printed = false;
    long precision_bits = 128;
    std::uint64_t seed = 0;
    std::string format = "json";
    std::string out;
    int workers = 0;
    bool no_timing = false;
};

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// "a" or "a,b" meaning a + b omega, rationals as p/q
FieldElement parse_element(const QuadraticField& F, const std::string& s) {
    auto rat = [&](const std::string& t) {
        mpq_class q;
        if (q.set_str(t, 10) != 0) throw DomainError("cannot parse rational '" + t + "'");
        q.canonicalize();
        return q;
    };
    const auto comma = s.find(',');
    if (comma == std::string::npos) return FieldElement(F, rat(s), 0);
    return FieldElement(F, rat(s.substr(0, comma)), rat(s.substr(comma + 1)));
}

double parse_double(const std::string& s) {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw DomainError("cannot parse number '" + s + "'");
    return v;
}

RealLattice scaled_order(const QuadraticField& F, long m) {
    if (m < 1) throw DomainError("--lattice-scale must be >= 1");
    return RealLattice(FieldElement::from_integer(F, m), FieldElement::omega(F) * mpq_class(m));
}

Json series_json(const SeriesValue& v) {
    return Json{{"value", complex_json(v.value)},
                {"method", v.method == SeriesMethod::Direct ? "direct" : "continued"},
                {"truncation", real_json(v.truncation)},
                {"tail_bound", real_json(v.tail_bound)},
                {"terms", v.terms}};
}

Mat2 parse_gamma(const std::string& g) {
    if (g == "sigma") return gen_sigma();
    if (g == "tau") return gen_tau();
    if (g == "T") return Mat2{{{mpz_class(1), mpz_class(1)}, {mpz_class(0), mpz_class(1)}}};
    // a,b,c,d
    std::stringstream ss(g);
    std::string item;
    std::vector<mpz_class> v;
    while (std::getline(ss, item, ',')) {
        mpz_class z;
        if (z.set_str(item, 10) != 0) throw DomainError("cannot parse matrix entry '" + item + "'");
        v.push_back(z);
    }
    if (v.size() != 4) throw DomainError("--gamma takes sigma, tau, T or a,b,c,d");
    return Mat2{{{v[0], v[1]}, {v[2], v[3]}}};
}

struct Output {
    Json params = Json::object();
    Json result;
    std::string csv;  // used when --format csv
};

void require_json(const Options& o, const std::string& cmd) {
    if (o.format != "json") throw UsageError(cmd + ": only --format json is available");
}

Output cmd_unit(const Options& o) {
    require_json(o, "unit");
    const auto F = make_field(o.d);
    const FieldElement eps = fundamental_unit(F);
    Output r;
    r.params = {{"d", o.d}};
    r.result = {{"field", {{"d", F.d}, {"disc", F.disc}, {"basis", F.basis_kind == BasisKind::Integral ? "(1+sqrt d)/2" : "sqrt d"}}},
                {"unit", field_json(eps)},
                {"sqrt_coords", {{"x", rational_json(eps.sqrt_x())}, {"y", rational_json(eps.sqrt_y())}}},
                {"norm", rational_json(eps.norm())},
                {"value", real_json(Real::from_field(eps, o.precision_bits))}};
    return r;
}

Output cmd_zeta(const Options& o) {
    require_json(o, "zeta");
    const auto F = make_field(o.d);
    const RealLattice L = scaled_order(F, o.scale);
    const FieldElement l0 = parse_element(F, o.l0);
    const cplx s(o.s_re, o.s_im);
    const double X = o.x ? parse_double(*o.x) : 1e4;
    Output r;
    r.params = {{"d", o.d}, {"lattice_scale", o.scale}, {"l0", field_json(l0)}, {"s", complex_json(s)}};
    if (o.continued) {
        r.result = series_json(partial_zeta_continued(L, l0, s));
    } else {
        r.params["x"] = real_json(X);
        r.result = series_json(partial_zeta_direct(L, l0, s, X));
    }
    return r;
}

Output cmd_stark(const Options& o) {
    require_json(o, "stark");
    const auto F = make_field(o.d);
    const RealLattice L = scaled_order(F, o.scale);
    const FieldElement l0 = parse_element(F, o.l0);
    const auto st = stark_number(L, l0);
    Output r;
    r.params = {{"d", o.d}, {"lattice_scale", o.scale}, {"l0", field_json(l0)}};
    r.result = {{"derivative", real_json(st.derivative)},
                {"value", real_json(st.value)},
                {"richardson_error", real_json(st.error)},
                {"step", real_json(st.step)}};
    return r;
}

Output cmd_shimizu(const Options& o) {
    require_json(o, "shimizu");
    const auto F = make_field(o.d);
    const RealLattice L = scaled_order(F, o.scale);
    const cplx s(o.s_re, o.s_im);
    const double X = o.x ? parse_double(*o.x) : 1e3;
    Output r;
    r.params = {{"d", o.d}, {"lattice_scale", o.scale}, {"s", complex_json(s)}, {"x", real_json(X)}};
    Json checks = Json::array();
    for (const auto& c : shimizu_checks(L, X)) checks.push_back(to_json(c));
    r.result = {{"series", series_json(shimizu_L(L, s, X))}, {"checks", checks}};
    return r;
}

Output cmd_dedekind(const Options& o) {
    require_json(o, "dedekind");
    const auto F = make_field(o.d);
    const double X = o.x ? parse_double(*o.x) : 1e5;
    if (o.s_im != 0) throw DomainError("dedekind: s must be real");
    Output r;
    r.params = {{"d", o.d}, {"s", real_json(o.s_re)}, {"x", real_json(X)}};
    r.result = {{"series", series_json(dedekind_zeta(F, o.s_re, X))}, {"residue", real_json(dedekind_residue(F))}};
    return r;
}

Output cmd_levy(const Options& o) {
    require_json(o, "levy");
    const std::string xs = o.x.value_or("0.41421356237309504880168872420969807856967187537694807317667973799");
    const Real x = Real::from_string(xs, o.precision_bits);
    const auto N = static_cast<std::size_t>(o.truncation.value_or(20));
    const BoundaryFunction f = q_power(o.k);
    const auto v = levy_transform(f, x, N);
    Output r;
    r.params = {{"f", "q^-" + std::to_string(o.k)}, {"x", xs}, {"truncation", N}};
    r.result = {{"value", complex_json(v.value)}, {"tail_bound", real_json(v.tail_bound)}, {"terms", v.terms}};
    return r;
}

Output cmd_levy_mellin(const Options& o) {
    require_json(o, "levy-mellin");
    QuadratureConfig cfg;
    cfg.nodes = static_cast<std::size_t>(o.truncation.value_or(20000));
    cfg.farey_order = 16;
    cfg.precision_bits = o.precision_bits;
    const cplx s(o.s_re, o.s_im);
    const auto v = levy_mellin(q_power_param(), cfg, s);
    Output r;
    r.params = {{"f", "q^-s"}, {"s", complex_json(s)}, {"nodes", cfg.nodes}, {"farey_order", cfg.farey_order}};
    r.result = {{"value", complex_json(v.value)}, {"error_estimate", real_json(v.error_estimate)}, {"strata", v.strata}};
    return r;
}

Output cmd_manin(const Options& o) {
    require_json(o, "manin-check");
    const long N = static_cast<long>(o.truncation.value_or(200));
    const auto c = manin_hecke_check(o.level, o.m, N);
    CheckRecord rec;
    rec.identity = "sum_{d|m} sum_b int_{0}^{b/d} omega = (sigma(m) - c_m) int_0^{i oo} omega";
    rec.parameters = {{"level", o.level}, {"m", o.m}, {"N", N}, {"factor", c.factor}, {"error", real_json(c.error)}};
    rec.lhs = complex_json(c.lhs);
    rec.rhs = complex_json(c.rhs);
    rec.gap = c.gap;
    rec.tolerance = 1e-6;
    rec.pass = c.gap < rec.tolerance;
    Output r;
    r.params = {{"level", o.level}, {"m", o.m}, {"truncation", N}};
    r.result = to_json(rec);
    return r;
}

Output cmd_cocycle(const Options& o) {
    require_json(o, "cocycle-check");
    const int cases = static_cast<int>(o.truncation.value_or(1000));
    std::mt19937_64 rng(o.seed);
    Json checks = Json::array();
    for (const auto& c : cocycle_checks(o.d, cases, rng)) checks.push_back(to_json(c));
    Output r;
    r.params = {{"d", o.d}, {"cases", cases}};
    r.result = {{"checks", checks}};
    return r;
}

Output cmd_dirac(const Options& o) {
    const FieldElement th = FieldElement::omega(make_field(o.d));
    const auto w = dirac_spectrum(th, o.window);
    Output r;
    r.params = {{"d", o.d}, {"theta", field_json(th)}, {"window", o.window}};
    if (o.format == "csv") {
        std::ostringstream os;
        write_spectrum_csv(os, w);
        r.csv = os.str();
        return r;
    }
    Json recs = Json::array();
    for (const auto& e : w.records)
        recs.push_back({{"n", e.n}, {"m", e.m}, {"lambda_plus", real_json(e.lambda_plus)}, {"norm", rational_json(e.norm)},
                        {"sign", e.sign}});
    r.result = {{"records", recs}};
    return r;
}

Output cmd_psi(const Options& o) {
    require_json(o, "psi");
    const double x = parse_double(o.x.value_or("1"));
    const double T = o.truncation.value_or(200);
    const PsiMode mode = o.printed ? PsiMode::Printed : PsiMode::Convergent;
    const auto v = psi_2k(x, o.k, mode, T);
    Output r;
    r.params = {{"x", real_json(x)}, {"k", o.k}, {"mode", o.printed ? "printed" : "convergent"}, {"truncation", real_json(T)}};
    r.result = {{"value", real_json(v.value)}, {"tail_bound", real_json(v.tail_bound)}, {"terms", v.terms}};
    return r;
}

Output cmd_defect(const Options& o) {
    const std::string fname = o.f.empty() ? "psi" : o.f;
    const long order = static_cast<long>(o.truncation.value_or(20));
    const Mat2 g = parse_gamma(o.gamma);
    BoundaryEval f;
    int weight;
    mpq_class lo, hi;
    if (fname == "psi") {
        // psi_2k has weight 2k; x = 0 is outside its domain, so the grid is (0, 1]
        const int k = o.k;
        weight = 2 * k;
        f = [k](const Cusp& x) { return cplx(psi_2k(mpq_class(x.num, x.den).get_d(), k, PsiMode::Convergent, 300).value); };
        lo = mpq_class(1, order);
        hi = 1;
    } else if (fname == "qk") {
        const int k = o.k;
        weight = k;
        f = [k](const Cusp& x) { return x.is_infinity() ? cplx(0) : cplx(std::pow(x.den.get_d(), k)); };
        lo = -2;
        hi = 2;
    } else {
        throw UsageError("defect: --f takes psi or qk");
    }
    const auto grid = farey_grid(order, lo, hi);
    const auto d = quantum_defect(f, g, weight, grid);
    Output r;
    r.params = {{"f", fname}, {"k", o.k}, {"weight", weight}, {"gamma", o.gamma}, {"farey_order", order},
                {"lo", rational_json(lo)}, {"hi", rational_json(hi)}};
    if (o.format == "csv") {
        std::ostringstream os;
        write_defect_csv(os, d);
        r.csv = os.str();
        return r;
    }
    Json samples = Json::array();
    for (const auto& s : d.samples) samples.push_back({{"x", rational_json(s.x)}, {"h", complex_json(s.h)}});
    r.result = {{"samples", samples}, {"max_jump", real_json(d.max_jump)}, {"excluded", d.excluded}};
    return r;
}

Output cmd_verify(const Options& o) {
    require_json(o, "verify");
    AcceptanceOptions opt;
    opt.seed = o.seed;
    opt.timing = !o.no_timing;
    opt.workers = o.workers;
    const auto results = run_acceptance(opt);
    Json crit = Json::array(), failed = Json::array();
    for (const auto& c : results) {
        std::fprintf(stderr, "%s\n", criterion_line(c).c_str());
        crit.push_back(criterion_json(c));
        if (!c.pass()) failed.push_back(c.id);
    }
    Output r;
    r.result = {{"criteria", crit}, {"failed", failed}};
    return r;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"rmgeom: real multiplication geometry computations"};
    app.footer(kExitHelp);
    app.require_subcommand(1);
    Options o;
    o.precision_bits = 0;

    using Handler = Output (*)(const Options&);
    const std::pair<const char*, std::pair<const char*, Handler>> cmds[] = {
        {"unit", {"fundamental unit of Q(sqrt d)", cmd_unit}},
        {"zeta", {"partial zeta of (l0 + L), L = scale O_K", cmd_zeta}},
        {"stark", {"Stark number exp zeta'(0)", cmd_stark}},
        {"shimizu", {"Shimizu L partial sum with the spectral cross-check", cmd_shimizu}},
        {"dedekind", {"Dedekind zeta by ideal counting", cmd_dedekind}},
        {"levy", {"Levy transform of q^-k at x", cmd_levy}},
        {"levy-mellin", {"Levy-Mellin transform of q^-s", cmd_levy_mellin}},
        {"manin-check", {"Manin's Hecke identity", cmd_manin}},
        {"cocycle-check", {"cocycle, twisted cocycle and SL2 invariance checks", cmd_cocycle}},
        {"dirac-spectrum", {"Dirac spectrum on a window (csv or json)", cmd_dirac}},
        {"psi", {"psi_2k at x", cmd_psi}},
        {"defect", {"quantum modular defect on a Farey grid (csv or json)", cmd_defect}},
        {"verify", {"acceptance suite with a pass/fail table on stderr", cmd_verify}},
    };
    std::string chosen;
    Handler handler = nullptr;
    for (const auto& [name, info] : cmds) {
        auto* sub = app.add_subcommand(name, info.first);
        sub->fallthrough();
        sub->callback([&chosen, &handler, name = std::string(name), h = info.second] {
            chosen = name;
            handler = h;
        });
    }
    app.add_option("--d", o.d, "squarefree d > 1 of Q(sqrt d)");
    app.add_option("--l0", o.l0, "coset shift a or a,b meaning a + b omega");
    app.add_option("--s-re", o.s_re, "real part of s");
    app.add_option("--s-im", o.s_im, "imaginary part of s");
    app.add_option("--x", o.x, "point x (levy, psi) or truncation X (zeta, shimizu, dedekind)");
    app.add_option("--truncation", o.truncation, "terms, nodes, cases or grid order, per command");
    app.add_option("--k", o.k, "weight or exponent parameter");
    app.add_option("--m", o.m, "Hecke index for manin-check");
    app.add_option("--level", o.level, "level for manin-check");
    app.add_option("--lattice-scale", o.scale, "L = scale O_K for zeta, stark, shimizu");
    app.add_option("--window", o.window, "window R for dirac-spectrum");
    app.add_option("--f", o.f, "boundary function for defect: psi or qk");
    app.add_option("--gamma", o.gamma, "matrix for defect: sigma, tau, T or a,b,c,d");
    app.add_flag("--continued", o.continued, "zeta by analytic continuation");
    app.add_flag("--printed", o.printed, "psi with the divergent exponent +k");
    app.add_option("--precision-bits", o.precision_bits, "working precision (default 128 or RMGEOM_PRECISION_BITS)");
    app.add_option("--seed", o.seed, "seed for sampled checks");
    app.add_option("--format", o.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    app.add_option("--out", o.out, "write to PATH instead of stdout");
    app.add_option("--workers", o.workers, "worker threads (default RMGEOM_WORKERS or hardware)");
    app.add_flag("--no-timing", o.no_timing, "record wall_time_ms = 0 and do not judge time budgets");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (o.precision_bits == 0) o.precision_bits = default_precision_bits();
        if (o.precision_bits < 2) throw DomainError("--precision-bits must be >= 2");
        if (o.workers > 0) set_worker_count(o.workers);
        const auto t0 = std::chrono::steady_clock::now();
        Output res = handler(o);
        const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - t0).count();

        std::string text;
        bool pass = true;
        if (o.format == "csv") {
            text = res.csv;
        } else {
            RunRecord rec;
            rec.command = chosen;
            rec.params = res.params;
            rec.precision_bits = o.precision_bits;
            rec.result = res.result;
            rec.wall_time_ms = o.no_timing ? 0 : ms;
            rec.seed = o.seed;
            const Json j = to_json(rec);
            pass = all_pass(j);
            text = dump_line(j);
        }
        if (o.out.empty()) {
            std::cout << text << std::flush;
        } else {
            std::ofstream f(o.out, std::ios::binary);
            if (!f) throw std::runtime_error("cannot open " + o.out);
            f << text;
        }
        return pass ? kOk : kCheckFailed;
    } catch (const UsageError& e) {
        std::fprintf(stderr, "usage error: %s\n", e.what());
        return kUsage;
    } catch (const DomainError& e) {
        std::fprintf(stderr, "domain error: %s\n", e.what());
        return kDomain;
    } catch (const PrecisionExhausted& e) {
        std::fprintf(stderr, "precision exhausted: %s\n", e.what());
        return kPrecision;
    } catch (const InsufficientTerms& e) {
        std::fprintf(stderr, "insufficient terms: %s\n", e.what());
        return kPrecision;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kOther;
    }
}
