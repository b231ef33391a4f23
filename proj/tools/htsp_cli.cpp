// htsp: point sets in, Holder curves and diagnostics out.
//
// Exit codes: 0 success, 1 a checked invariant failed, 2 usage, input or parameter error.

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "htsp/errors.hpp"
#include "htsp/fractals.hpp"
#include "htsp/io.hpp"
#include "htsp/measures.hpp"

using json = nlohmann::json;
using namespace htsp;

namespace {

constexpr int kOk = 0, kInvariant = 1, kUsage = 2;

struct RunConfig {
    std::string input;
    std::optional<std::size_t> dim;
    double s = 1.5;
    std::optional<double> p, q;
    std::optional<double> alpha0;
    int depth = 5;
    double ratio = 0.5;
    std::string fitter;
    std::uint64_t seed = 0;
    std::string out, svg;
};

// Parameters that every pipeline shares, checked before anything runs.
void validate(const RunConfig& c) {
    if (!(c.s >= 1)) throw BadParameter("--s must be at least 1");
    if (c.depth < 0) throw BadParameter("--depth must be nonnegative");
    if (c.depth > 12) throw DepthTooLarge("--depth above 12");
    if (!(c.ratio > 0 && c.ratio < 1)) throw BadParameter("--ratio must lie in (0, 1)");
    if (c.alpha0 && !(*c.alpha0 > 0 && *c.alpha0 < 1)) throw BadParameter("--alpha0 must lie in (0, 1)");
    if (c.p && !(*c.p > 0)) throw BadParameter("--p must be positive");
    if (c.q && !(*c.q > 0)) throw BadParameter("--q must be positive");
    if (const char* t = std::getenv("HTSP_THREADS")) {
        char* end = nullptr;
        const long n = std::strtol(t, &end, 10);
        if (*t == '\0' || *end != '\0' || n < 1) throw BadParameter("HTSP_THREADS must be a positive integer");
    }
}

std::optional<FitMode> fitter(const std::string& name) {
    if (name.empty()) return std::nullopt;
    if (name == "exact2d") return FitMode::exact2d;
    if (name == "farpair") return FitMode::farpair;
    if (name == "refine") return FitMode::refine;
    throw BadParameter("unknown fitter '" + name + "'");
}

// Floats cut to 12 significant digits; object keys are already sorted.
json canonical(const json& j) {
    if (j.is_number_float()) {
        const double v = j.get<double>();
        if (!std::isfinite(v)) return nullptr;
        return std::stod(format_number(v));
    }
    if (j.is_array() || j.is_object()) {
        json out = j;
        for (auto it = out.begin(); it != out.end(); ++it) *it = canonical(*it);
        return out;
    }
    return j;
}

void emit_text(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream f(path);
    if (!f) throw ParseError("cannot write '" + path + "'");
    f << text;
}

void emit(const std::string& path, const json& j) { emit_text(path, canonical(j).dump(2) + "\n"); }

json point_json(const Point& p) { return json(std::vector<double>(p.begin(), p.end())); }

// ---- shared pipeline -----------------------------------------------------------

struct Built {
    NetHierarchy h;
    LineFitTable fits;
    Params prm;
    ChoiceLedger ledger;
    std::vector<LevelState> states;
    bool flat = false;
};

Built build_tst(const std::vector<Point>& E, const RunConfig& c, bool verify) {
    Built b;
    b.h = build_nets(E, c.depth + 1, c.ratio);
    b.fits = fit_lines(b.h, fitter(c.fitter));
    b.prm = default_params(b.h, c.s, c.depth);
    if (c.alpha0) b.prm.alpha0 = *c.alpha0;
    b.prm.p = c.p;
    b.prm.q = c.q;
    b.ledger.seed = c.seed;
    b.states = run(b.h, b.fits, b.prm, b.ledger, verify);
    return b;
}

Built build_flat(const std::vector<Point>& E, const RunConfig& c) {
    ContinuumOptions opt;
    opt.depth = c.depth;
    auto r = run_flat_continuum(E, c.s, opt);
    Built b;
    b.h = std::move(r.h);
    b.fits = std::move(r.fits);
    b.prm = r.prm;
    b.states = std::move(r.states);
    b.flat = true;
    return b;
}

Built build_mode(const std::vector<Point>& E, const RunConfig& c, const std::string& mode) {
    if (mode == "flat") return build_flat(E, c);
    if (mode == "tst") return build_tst(E, c, true);
    try {
        return build_flat(E, c);
    } catch (const FlatnessViolated&) {
        return build_tst(E, c, true);
    }
}

json level_diagnostics(const Built& b) {
    json levels = json::array();
    const auto ss = s_sum(b.h, b.fits, b.prm);
    for (std::size_t k = 0; k < b.states.size(); ++k) {
        const auto& st = b.states[k];
        int bridges = 0, edges = 0, points = 0;
        for (const auto& r : st.records) {
            bridges += r.kind == Kind::bridge;
            edges += r.kind == Kind::edge;
            points += r.is_point();
        }
        json lv{{"k", static_cast<int>(k)}, {"edges", edges}, {"bridges", bridges}, {"point_intervals", points},
                {"claim_conflicts", st.diag.claim_conflicts}};
        if (k < ss.excess.size()) {
            lv["excess_sum"] = ss.excess[k];
            lv["nonflat_sum"] = ss.nonflat[k];
        }
        levels.push_back(lv);
    }
    return levels;
}

// ---- commands --------------------------------------------------------------------

int cmd_beta(const RunConfig& c, const std::string& variant, double beta0, int kmin, int kmax) {
    const auto E = read_csv(c.input, c.dim).points;
    BetaVariant v = BetaVariant::square();
    if (variant == "threshold") v = BetaVariant::threshold(beta0);
    else if (variant == "power") v = BetaVariant::power(c.p.value_or(2.0));
    else if (variant != "square") throw BadParameter("unknown variant '" + variant + "'");
    if (kmin > kmax) throw BadParameter("--kmin above --kmax");
    const FitMode mode = fitter(c.fitter).value_or(default_fit_mode(E[0].size()));
    const auto rep = beta_sums(E, c.s, v, kmin, kmax, mode);
    json gens = json::array();
    double acc = 0;
    for (std::size_t i = rep.scale_exp.size(); i-- > 0;) {
        acc += rep.per_scale[i];
        gens.push_back({{"generation", -rep.scale_exp[i]},
                        {"side_exponent", rep.scale_exp[i]},
                        {"sum", rep.per_scale[i]},
                        {"partial_sum", acc},
                        {"cubes", rep.cubes[i]}});
    }
    json out{{"variant", variant}, {"s", c.s}, {"total", rep.total}, {"points", E.size()}, {"generations", gens}};
    if (variant == "threshold") out["beta0"] = beta0;
    if (variant == "power") out["p"] = c.p.value_or(2.0);
    emit(c.out, out);
    return kOk;
}

int cmd_curve(const RunConfig& c, const std::string& mode) {
    const auto E = read_csv(c.input, c.dim).points;
    Built b = build_mode(E, c, mode);
    const auto curve = build_curve(b.states, b.h, c.s, b.flat);
    const auto conv = convergence_report(curve, b.h);
    const auto cov = coverage_check(curve, b.h);
    const double emp = empirical_holder(curve.curve, c.s, 20000, c.seed + 1);
    const auto ss = s_sum(b.h, b.fits, b.prm);

    json bp = json::array();
    for (std::size_t i = 0; i < curve.curve.size(); ++i) bp.push_back({curve.curve.t[i], point_json(curve.curve.p[i])});
    json warnings = json::array();
    if (ss.nonflat.size() >= 3 && ss.nonflat.back() > 0 && ss.nonflat.back() >= ss.nonflat[ss.nonflat.size() - 2])
        warnings.push_back("non-flat sum is not decaying with the level; the limit curve may not exist for this s");
    json out{
        {"exponent", curve.exponent},
        {"H", curve.H},
        {"depth", curve.depth},
        {"mode", b.flat ? "flat" : "tst"},
        {"params",
         {{"s", c.s}, {"alpha0", b.prm.alpha0}, {"ratio", b.h.rho.size() > 1 ? b.h.rho[1] : c.ratio}, {"r0", b.h.r0},
          {"cstar", b.h.cstar}, {"xi1", b.h.xi1}, {"xi2", b.h.xi2}, {"seed", c.seed}}},
        {"breakpoints", bp},
        {"certificate",
         {{"mass", curve.mass},
          {"tail", curve.tail},
          {"empirical_holder", emp},
          {"holder_ok", emp <= curve.H},
          {"convergence_ok", conv.ok()},
          {"coverage", {{"built", cov.built}, {"beyond", cov.beyond}, {"tail", cov.tail}, {"ok", cov.ok}}},
          {"s_sum", ss.total}}},
        {"levels", level_diagnostics(b)},
        {"warnings", warnings}};
    emit(c.out, out);
    if (!c.svg.empty()) {
        if (b.h.dim() != 2) throw BadParameter("--svg needs planar input");
        std::vector<Point> net;
        for (int id : b.h.levels.back()) net.push_back(b.h.pt(id));
        emit_text(c.svg, render_svg(curve.curve.p, net));
    }
    for (const auto& w : warnings) std::cerr << "warning: " << w.get<std::string>() << '\n';
    return emp <= curve.H && conv.ok() && cov.ok ? kOk : kInvariant;
}

int cmd_gen(const RunConfig& c, const std::string& kind, const std::vector<double>& p_seq, int N, int n0,
            const std::string& skeleton) {
    GeneratorSpec g;
    g.kind = generator_kind(kind);
    if (!p_seq.empty()) g.p_seq = p_seq;
    g.N = N;
    g.s = c.s;
    g.p = c.p.value_or(2.0);
    g.q = c.q.value_or(0.4);
    g.n0 = n0;
    g.depth = c.depth;
    const Sample smp = generate(g);
    std::ostringstream csv;
    write_csv(csv, smp.points);
    emit_text(c.out, csv.str());
    if (!skeleton.empty()) {
        std::ostringstream seg;
        seg << "a,b\n";
        for (auto [a, b] : smp.segments) seg << a << ',' << b << '\n';
        emit_text(skeleton, seg.str());
    }
    if (!c.svg.empty()) emit_text(c.svg, render_svg({}, smp.points, smp.segments));
    return kOk;
}

int cmd_mass(const RunConfig& c) {
    const auto E = read_csv(c.input, c.dim).points;
    Built b = build_tst(E, c, true);
    auto t = compute_mass(b.states, b.h, c.s);
    assign_phantom(t, b.states, b.h);
    const auto lem = check_mass_lemmas(t, b.states, b.h);
    const auto bound = mass_bound_report(t, b.h, b.fits, b.prm);
    const auto cover = hausdorff_lower_check(b.states, t, b.h);
    const auto sb = special_bridge_check(b.states);
    json per_level = json::array();
    for (const auto& lv : t.mass) {
        double sum = 0;
        for (double m : lv) sum += m;
        per_level.push_back(sum);
    }
    json out{{"s", c.s},
             {"depth", t.depth},
             {"mass", t.total},
             {"truncated", t.truncated},
             {"level_mass", per_level},
             {"bound", {{"rhs", bound.rhs}, {"ratio", bound.ratio}}},
             {"cover", {{"cover_sum", cover.cover_sum}, {"level_sum", cover.level_sum}, {"holds", cover.holds}}},
             {"lemmas", {{"ok", lem.ok()}, {"witness", lem.witness}}},
             {"special_bridges_per_interval", sb.max_per_interval}};
    emit(c.out, out);
    return lem.ok() && cover.holds && sb.ok() ? kOk : kInvariant;
}

int cmd_measure(const RunConfig& c, const std::vector<double>& x0, double M, double P, double theta) {
    const auto tab = read_csv(c.input, c.dim, true);
    AtomicMeasure mu{tab.points, tab.weights};
    SelectionParams sp;
    sp.x0 = x0.empty() ? Point(tab.points[0].size(), 0.0) : Point(x0.begin(), x0.end());
    if (sp.x0.size() != tab.points[0].size()) throw BadParameter("--x0 has the wrong dimension");
    sp.M = M;
    sp.P = P;
    sp.theta = theta;
    sp.s = c.s;
    sp.p = c.p.value_or(2.0);
    sp.q = c.q.value_or(2.0);
    const auto res = measure_pipeline(mu, sp, c.depth);
    json bp = json::array();
    for (std::size_t i = 0; i < res.curve.curve.size(); ++i)
        bp.push_back({res.curve.curve.t[i], point_json(res.curve.curve.p[i])});
    json out{{"selected", res.sel.A.size()},
             {"dense", res.sel.Aprime.size()},
             {"failed", {{"jsp", res.sel.failed_jsp.size()},
                         {"doubling", res.sel.failed_doubling.size()},
                         {"density", res.sel.failed_density.size()}}},
             {"exponent", res.exponent},
             {"s_plus", res.s_plus},
             {"chain", res.chain},
             {"s_plus_levels", res.s_plus_levels},
             {"chain_levels", res.chain_levels},
             {"growing", res.growing},
             {"H", res.curve.H},
             {"breakpoints", bp}};
    emit(c.out, out);
    return kOk;
}

// Full invariant suite on each input; prints one line per file.
int cmd_check(const RunConfig& base, const std::vector<std::string>& inputs) {
    bool all = true;
    json report = json::object();
    for (const auto& path : inputs) {
        RunConfig c = base;
        c.input = path;
        const auto E = read_csv(path, c.dim).points;
        std::map<std::string, bool> res;
        std::string first;
        auto note = [&](const std::string& name, bool ok) {
            res[name] = ok;
            if (!ok && first.empty()) first = name;
        };
        Built b;
        b.h = build_nets(E, c.depth + 1, c.ratio);
        note("nets", validate_nets(b.h).ok());
        b.fits = fit_lines(b.h, fitter(c.fitter));
        b.prm = default_params(b.h, c.s, c.depth);
        if (c.alpha0) b.prm.alpha0 = *c.alpha0;
        b.ledger.seed = c.seed;
        b.states = run(b.h, b.fits, b.prm, b.ledger, false);
        bool props = true;
        for (const auto& st : b.states) props = props && check_properties(st, b.h, b.fits, b.prm, b.ledger).ok();
        note("properties", props);
        const auto t = compute_mass(b.states, b.h, c.s);
        note("mass_lemmas", check_mass_lemmas(t, b.states, b.h).ok());
        note("special_bridges", special_bridge_check(b.states).ok());
        const auto re = reallocate(b.states, t);
        note("reallocation", check_reallocation(b.states, t, re).ok());
        const auto curve = assemble(b.states, b.h, t, re);
        note("convergence", convergence_report(curve, b.h).ok());
        note("coverage", coverage_check(curve, b.h).ok);
        note("holder", empirical_holder(curve.curve, c.s, 20000, c.seed + 1) <= curve.H);
        const bool ok = first.empty();
        all = all && ok;
        report[path] = res;
        std::cerr << (ok ? "ok   " : "FAIL ") << path << (ok ? "" : "  (" + first + ")") << '\n';
    }
    emit(base.out, report);
    return all ? kOk : kInvariant;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Holder curves through point sets"};
    app.require_subcommand(1);
    RunConfig cfg;
    std::size_t dim = 0;
    double p = 0, q = 0, alpha0 = 0;

    auto common = [&](CLI::App* sub) {
        sub->add_option("--dim", dim, "expected number of coordinates per row");
        sub->add_option("--s", cfg.s, "Holder exponent is 1/s");
        sub->add_option("--p", p, "power parameter");
        sub->add_option("--q", q, "second power parameter");
        sub->add_option("--alpha0", alpha0, "flatness threshold override");
        sub->add_option("--depth", cfg.depth, "number of refinement levels");
        sub->add_option("--ratio", cfg.ratio, "net scale ratio");
        sub->add_option("--fitter", cfg.fitter, "line fitter")->check(CLI::IsMember({"exact2d", "farpair", "refine"}));
        sub->add_option("--seed", cfg.seed, "seed for free choices and sampling");
        sub->add_option("--out", cfg.out, "output path (stdout when absent)");
        sub->add_option("--svg", cfg.svg, "SVG output path (planar input only)");
    };

    auto* beta = app.add_subcommand("beta", "dyadic beta sums");
    std::string variant = "square";
    double beta0 = 0.1;
    int kmin = -6, kmax = 0;
    beta->add_option("input", cfg.input)->required();
    beta->add_option("--variant", variant)->check(CLI::IsMember({"square", "threshold", "power"}));
    beta->add_option("--beta0", beta0);
    beta->add_option("--kmin", kmin);
    beta->add_option("--kmax", kmax);
    common(beta);

    auto* curve = app.add_subcommand("curve", "Holder curve through the input");
    std::string mode = "auto";
    curve->add_option("input", cfg.input)->required();
    curve->add_option("--mode", mode)->check(CLI::IsMember({"auto", "tst", "flat"}));
    common(curve);

    auto* gen = app.add_subcommand("gen", "generate an example set");
    std::string kind;
    std::vector<double> p_seq;
    int N = 2, n0 = 10;
    std::string skeleton;
    gen->add_option("kind", kind)->required();
    gen->add_option("--pseq", p_seq, "snowflake parameters per level (last one repeats)")->delimiter(',');
    gen->add_option("--N", N, "ambient dimension");
    gen->add_option("--n0", n0, "offset for the sharpness nets");
    gen->add_option("--skeleton", skeleton, "CSV of segment index pairs");
    common(gen);

    auto* mass = app.add_subcommand("mass", "mass of the interval tree");
    mass->add_option("input", cfg.input)->required();
    common(mass);

    auto* measure = app.add_subcommand("measure", "selection and curve for a weighted point set");
    std::vector<double> x0;
    double M = 1, P = 4, theta = 0.5;
    measure->add_option("input", cfg.input)->required();
    measure->add_option("--x0", x0)->delimiter(',');
    measure->add_option("--M", M);
    measure->add_option("--P", P);
    measure->add_option("--theta", theta);
    common(measure);

    auto* check = app.add_subcommand("check", "run the invariant suite");
    std::vector<std::string> inputs;
    check->add_option("inputs", inputs)->required();
    common(check);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsage;
    }

    auto given = [](CLI::App* sub, const char* name) { return sub->count(name) > 0; };
    CLI::App* active = app.get_subcommands().front();
    if (given(active, "--dim")) cfg.dim = dim;
    if (given(active, "--p")) cfg.p = p;
    if (given(active, "--q")) cfg.q = q;
    if (given(active, "--alpha0")) cfg.alpha0 = alpha0;
    // generators carry their own parameter checks
    if (active == gen && !given(gen, "--s")) cfg.s = 1.5;

    try {
        if (active != gen) validate(cfg);
        if (active == beta) return cmd_beta(cfg, variant, beta0, kmin, kmax);
        if (active == curve) return cmd_curve(cfg, mode);
        if (active == gen) {
            if (given(gen, "--p") && kind == "snowflake" && p_seq.empty()) p_seq = {p};
            return cmd_gen(cfg, kind, p_seq, N, n0, skeleton);
        }
        if (active == mass) return cmd_mass(cfg);
        if (active == measure) return cmd_measure(cfg, x0, M, P, theta);
        return cmd_check(cfg, inputs);
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const BadParameter& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const DepthTooLarge& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const EmptyInput& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const NoValidN& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const Error& e) {
        std::cerr << "invariant failure: " << e.what() << '\n';
        return kInvariant;
    }
}
