// Acceptance driver: `acceptance --criterion N` runs one criterion and prints a single
// PASS/FAIL line. Exit status is 0 on PASS.

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <numeric>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "htsp/errors.hpp"
#include "htsp/fractals.hpp"
#include "htsp/io.hpp"
#include "htsp/measures.hpp"

using namespace htsp;

namespace {

const std::string root = HTSP_SOURCE_DIR;

struct Verdict {
    bool ok = true;
    std::string detail;
};

struct Built {
    NetHierarchy h;
    LineFitTable fits;
    Params prm;
    std::vector<LevelState> states;
};

Built build(const std::vector<Point>& E, int depth, double s, bool verify = true) {
    Built b;
    b.h = build_nets(E, depth + 1);
    b.fits = fit_lines(b.h);
    b.prm = default_params(b.h, s, depth);
    ChoiceLedger ledger;
    b.states = run(b.h, b.fits, b.prm, ledger, verify);
    return b;
}

std::vector<Point> fixture(const std::string& name) { return read_csv(root + "/fixtures/" + name).points; }

std::vector<Point> cloud(std::mt19937& rng, int n, int dim) {
    std::uniform_real_distribution<double> u(0, 1);
    std::vector<Point> E(static_cast<std::size_t>(n), Point(static_cast<std::size_t>(dim)));
    for (auto& p : E)
        for (auto& x : p) x = u(rng);
    return E;
}

Point gaussian(std::mt19937& rng, int dim) {
    std::normal_distribution<double> g;
    Point p(static_cast<std::size_t>(dim));
    for (auto& x : p) x = g(rng);
    return p;
}

// unit vector orthogonal to dir
Point normal_to(std::mt19937& rng, const Point& dir) {
    for (;;) {
        Point w = gaussian(rng, static_cast<int>(dir.size()));
        w = sub(w, scaled(dir, dot(w, dir)));
        if (norm(w) > 1e-6) return normalized(w);
    }
}

double power_sum(const std::vector<Point>& chain, double s) {
    double sum = 0;
    for (std::size_t i = 0; i + 1 < chain.size(); ++i) sum += std::pow(dist(chain[i], chain[i + 1]), s);
    return sum;
}

double along(const Point& x, const Line& l) { return dot(sub(x, l.base), l.dir); }

// Points near a random line with irregular spacing and a small transverse wobble.
std::vector<Point> near_line(std::mt19937& rng, int dim) {
    std::uniform_real_distribution<double> u(0, 1);
    const Point dir = normalized(gaussian(rng, dim));
    const Point nrm = normal_to(rng, dir);
    const double amp = 1e-5 * (1 + 20 * u(rng));
    const double freq = 2 + 10 * u(rng);
    std::vector<Point> E;
    double t = 0;
    while (t < 1) {
        const double wobble = amp * std::sin(freq * t) + 0.2 * amp * (u(rng) - 0.5);
        E.push_back(add(scaled(dir, t), scaled(nrm, wobble)));
        t += u(rng) < 0.05 ? 0.02 + 0.05 * u(rng) : 0.001 + 0.004 * u(rng);
    }
    return E;
}

std::string fmt(double x) {
    std::ostringstream o;
    o.precision(6);
    o << x;
    return o.str();
}

// ---------------------------------------------------------------------------

Verdict structural() {
    Verdict v;
    std::mt19937 rng(20240611);
    std::uniform_int_distribution<int> npts(20, 100), depth(5, 7), dimd(2, 4);
    std::uniform_real_distribution<double> sd(1.0, 2.5);
    int levels = 0;
    for (int trial = 0; trial < 50; ++trial) {
        const int dim = dimd(rng), n = npts(rng), d = depth(rng);
        const double s = sd(rng);
        const auto b = build(cloud(rng, n, dim), d, s, false);
        const auto nets = validate_nets(b.h);
        if (!nets.ok()) {
            v.ok = false;
            v.detail = "cloud " + std::to_string(trial) + " nets: " + nets.first_failure();
            return v;
        }
        for (const auto& st : b.states) {
            ++levels;
            const auto rep = check_properties(st, b.h, b.fits, b.prm);
            if (!rep.ok()) {
                v.ok = false;
                v.detail = "cloud " + std::to_string(trial) + " level " + std::to_string(st.k) + ": " +
                           rep.first_failure();
                return v;
            }
        }
    }

    std::vector<Point> bent;
    for (int i = 0; i <= 300; ++i) {
        const double t = i / 300.0;
        bent.push_back({t, 2e-5 * std::sin(3 * t), 1e-5 * t * t});
    }
    int flat_levels = 0;
    for (const auto& E : {fixture("segment.csv"), bent}) {
        ContinuumOptions opt;
        opt.depth = 6;
        const auto res = run_flat_continuum(E, 1.0, opt);
        for (std::size_t k = 0; k < res.checks.size(); ++k) {
            ++flat_levels;
            if (!res.checks[k].ok()) {
                v.ok = false;
                v.detail = "flat continuum level " + std::to_string(k) + " fails";
                return v;
            }
        }
    }
    v.detail = std::to_string(levels) + " levels on 50 clouds and " + std::to_string(flat_levels) +
               " flat-continuum levels pass";
    return v;
}

Verdict chain_inequalities() {
    Verdict v;
    const double tol = 1e-9;
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> u(0, 1);
    int var_bad = 0, mono_bad = 0;

    // tube configurations: unit separation, offsets at most alpha from a line
    for (int trial = 0; trial < 10000; ++trial) {
        const int dim = 2 + trial % 3;
        const int n = 2 + static_cast<int>(u(rng) * 11);
        const double alpha = (1.0 / 16) * std::max(u(rng), 1e-3);
        const double s = 1 + 3 * u(rng);
        const Point base = gaussian(rng, dim), dir = normalized(gaussian(rng, dim));
        std::vector<Point> V;
        double x = 0;
        for (int i = 0; i < n; ++i) {
            const double off = alpha * (u(rng) < 0.3 ? 1.0 : u(rng));
            V.push_back(add(add(base, scaled(dir, x)), scaled(normal_to(rng, dir), off)));
            x += 1 + (u(rng) < 0.5 ? 0.1 * u(rng) : 15 * u(rng));
        }
        const double L = dist(V.front(), V.back());
        const double lhs = power_sum(V, s);
        if (lhs > std::pow(1 + 3 * alpha * alpha, s) * std::pow(L, s) * (1 + tol)) ++var_bad;
        if (n >= 3 && lhs > (std::pow((1 + 3 * alpha * alpha) * L - 1, s) + 1) * (1 + tol)) ++var_bad;
        if (chain_excess(V, 1) > 3 * alpha * alpha + tol) ++mono_bad;
    }

    // flat pairs of nets over near-linear samples
    int pairs = 0, net_mono_bad = 0, diam_bad = 0, card_bad = 0, clouds = 0;
    while (pairs < 10000 && clouds < 2000) {
        const int dim = 2 + clouds % 3;
        ++clouds;
        const auto E = near_line(rng, dim);
        NetHierarchy h = build_nets(E, 7);
        const auto fits = fit_lines(h);
        const double a1 = alpha_one(h.cstar, h.xi1, h.xi2);
        for (int k = 0; k + 1 < h.depth(); ++k) {
            for (const auto& fp : flat_pairs(h, fits, a1, k)) {
                ++pairs;
                const auto& fit = fits.get(k, fp.v);
                const auto ids = between_points(h, fits, fp);
                if (variation_excess(h, fits, fp, 1, a1) > 3 * fit.alpha * fit.alpha + tol) ++net_mono_bad;
                const double vw = dist(h.pt(fp.v), h.pt(fp.w));
                for (std::size_t i = 0; i < ids.size(); ++i)
                    for (std::size_t j = i + 1; j < ids.size(); ++j)
                        if (dist(h.pt(ids[i]), h.pt(ids[j])) > vw * (1 + tol)) ++diam_bad;
                if (static_cast<double>(ids.size()) >= 2 + 2.2 * h.cstar) ++card_bad;
                int left = 0, right = 0;
                const double t0 = along(h.pt(fp.v), fit.line);
                for (int y : h.levels[static_cast<std::size_t>(k) + 1]) {
                    if (y == fp.v || dist(h.pt(y), h.pt(fp.v)) > h.cstar * h.scale(k + 1)) continue;
                    (along(h.pt(y), fit.line) > t0 ? right : left) += 1;
                }
                if (left >= 1.1 * h.cstar || right >= 1.1 * h.cstar) ++card_bad;
            }
        }
    }
    v.ok = var_bad == 0 && mono_bad == 0 && net_mono_bad == 0 && diam_bad == 0 && card_bad == 0 && pairs >= 10000;
    v.detail = "power-sum violations " + std::to_string(var_bad) + ", tau_1 violations " +
               std::to_string(mono_bad + net_mono_bad) + ", betweenness-diameter violations " +
               std::to_string(diam_bad) + ", cardinality violations " + std::to_string(card_bad) + " (10000 tubes, " +
               std::to_string(pairs) + " flat pairs on " + std::to_string(clouds) + " samples)";
    return v;
}

// Every chain v = (0,0), interior points within 2 of an end, v' = (L,0) with unit
// separation, offsets in {-alpha, 0, alpha}. Returns the number of chains with tau_2 > 0.
long tube_witnesses(double alpha, long& chains) {
    std::vector<double> offsets{-alpha, 0.0, alpha};
    long found = 0;
    for (double L = 2; L < 112; L += 0.5) {
        std::vector<double> slots;
        for (double x = 1; x <= 2 + 1e-12; x += 0.25) slots.push_back(x);
        for (double x = L - 2; x <= L - 1 + 1e-12; x += 0.25)
            if (x > 0) slots.push_back(x);
        std::sort(slots.begin(), slots.end());
        slots.erase(std::unique(slots.begin(), slots.end()), slots.end());
        const int m = static_cast<int>(slots.size());
        for (int mask = 1; mask < (1 << m); ++mask) {
            const int inner = __builtin_popcount(static_cast<unsigned>(mask));
            if (inner > 4) continue;
            std::vector<double> xs{0.0};
            for (int i = 0; i < m; ++i)
                if (mask >> i & 1) xs.push_back(slots[static_cast<std::size_t>(i)]);
            xs.push_back(L);
            const int n = static_cast<int>(xs.size());
            int combos = 1;
            for (int i = 0; i < n; ++i) combos *= 3;
            for (int c = 0; c < combos; ++c) {
                std::vector<Point> chain;
                int code = c;
                for (int i = 0; i < n; ++i, code /= 3)
                    chain.push_back({xs[static_cast<std::size_t>(i)], offsets[static_cast<std::size_t>(code % 3)]});
                bool separated = true;
                for (int i = 0; i < n && separated; ++i)
                    for (int j = i + 1; j < n; ++j)
                        if (dist(chain[static_cast<std::size_t>(i)], chain[static_cast<std::size_t>(j)]) < 1) {
                            separated = false;
                            break;
                        }
                if (!separated) continue;
                ++chains;
                if (chain_excess(chain, 2) > 0) ++found;
            }
        }
    }
    return found;
}

Verdict tube_control() {
    Verdict v;
    const double eps = tube_threshold(2, 2, 0.5, 0.5);
    long at_chains = 0, above_chains = 0;
    const long at = tube_witnesses(eps, at_chains);
    const long above = tube_witnesses(1.05 * eps, above_chains);
    v.ok = std::abs(eps - 0.0544) < 5e-4 && at == 0 && above > 0;
    v.detail = "eps = " + fmt(eps) + "; tau_2 > 0 in " + std::to_string(at) + " of " + std::to_string(at_chains) +
               " chains at eps and " + std::to_string(above) + " of " + std::to_string(above_chains) +
               " chains at 1.05 eps";
    if (above == 0) v.detail += " (no admissible witness above the threshold)";
    return v;
}

Verdict mass_oracle() {
    Verdict v;
    struct Case {
        std::vector<Point> E;
        double s;
    };
    std::mt19937 rng(31);
    std::vector<Case> cases{{fixture("segment.csv"), 1.0},    {fixture("square_corners.csv"), 2.0},
                            {fixture("cloud2d.csv"), 1.5},    {fixture("cloud3d.csv"), 1.25},
                            {fixture("wiggle.csv"), 1.2},     {fixture("wiggle.csv"), 1.0},
                            {cloud(rng, 25, 2), 1.0},         {cloud(rng, 30, 3), 1.75}};
    double worst = 0;
    for (std::size_t i = 0; i < cases.size(); ++i) {
        const auto& [E, s] = cases[i];
        const auto b = build(E, 3, s);
        const auto fast = compute_mass(b.states, b.h, s);
        const auto slow = brute_force_mass(b.states, b.h, s, 3);
        for (std::size_t k = 0; k < fast.mass.size(); ++k)
            for (std::size_t j = 0; j < fast.mass[k].size(); ++j) {
                const double d = std::abs(fast.mass[k][j] - slow.mass[k][j]);
                worst = std::max(worst, d / std::max(1.0, std::abs(slow.mass[k][j])));
            }
        const auto lem = check_mass_lemmas(fast, b.states, b.h);
        if (!lem.ok()) {
            v.ok = false;
            v.detail = "fixture " + std::to_string(i) + ": " + lem.witness;
            return v;
        }
        if (s == 1.0) {
            for (int d = 1; d <= 5; ++d) {
                const auto bd = build(E, d, 1.0);
                double sum = 0;
                for (const auto& r : bd.states.back().records) sum += image_diam(r, bd.h);
                const double total = compute_mass(bd.states, bd.h, 1.0).total;
                if (std::abs(total - sum) > 1e-12 * std::max(1.0, sum)) {
                    v.ok = false;
                    v.detail = "fixture " + std::to_string(i) + " depth " + std::to_string(d) + ": mass " +
                               fmt(total) + " vs diameter sum " + fmt(sum);
                    return v;
                }
            }
        }
    }
    v.ok = worst <= 1e-12;
    v.detail = "recursion vs tree enumeration, worst relative gap " + fmt(worst) + " over " +
               std::to_string(cases.size()) + " fixtures";
    return v;
}

Verdict certificates() {
    Verdict v;
    struct Case {
        std::string name;
        double s;
    };
    const std::vector<Case> cases{{"segment.csv", 1.0},   {"square_corners.csv", 2.0}, {"cloud2d.csv", 1.5},
                                  {"cloud3d.csv", 2.0},   {"wiggle.csv", 1.2},         {"helix_measure.csv", 1.5}};
    std::string summary;
    for (std::size_t i = 0; i < cases.size(); ++i) {
        const bool weighted = cases[i].name == "helix_measure.csv";
        const auto E = read_csv(root + "/fixtures/" + cases[i].name, std::nullopt, weighted).points;
        const double s = cases[i].s;
        const auto b = build(E, 5, s);
        const auto c = build_curve(b.states, b.h, s);
        const auto conv = convergence_report(c, b.h);
        const double emp = empirical_holder(c.curve, s, 100000, 11 + i);
        const auto cov = coverage_check(c, b.h);
        if (!conv.ok() || emp > c.H || !cov.ok) {
            v.ok = false;
            v.detail = cases[i].name + ": convergence " + (conv.ok() ? "ok" : "FAIL") + ", holder " + fmt(emp) +
                       " vs H " + fmt(c.H) + ", coverage " + (cov.ok ? "ok" : "FAIL");
            return v;
        }
        summary += (i ? ", " : "") + cases[i].name + " " + fmt(emp / c.H);
    }
    v.detail = "steps, slopes and coverage within bounds; empirical/H: " + summary;
    return v;
}

Verdict segment_sanity() {
    Verdict v;
    ContinuumOptions opt;
    opt.depth = 7;
    const auto res = run_flat_continuum(fixture("segment.csv"), 1.0, opt);
    const auto c = build_curve(res.states, res.h, 1.0, true);
    const double len = c.curve.length();
    const double slope = max_slope(c.curve);
    const bool seg_ok = std::abs(len - 1) <= 1e-9 && std::abs(c.mass - 1) <= 1e-9 && std::abs(slope - 1) <= 1e-9;

    const auto flake = snowflake({0.25}, 5);
    double off = 0;
    for (std::size_t i = 0; i < flake.vertices.size(); ++i) {
        const double t = static_cast<double>(i) / static_cast<double>(flake.vertices.size() - 1);
        off = std::max(off, dist(flake.vertices[i], Point{t, 0.0}));
    }
    const bool flake_ok = off <= 1e-12 && std::abs(flake.length() - 1) <= 1e-12;

    bool exact_ok = true;
    std::mt19937 rng(5);
    for (int trial = 0; trial < 200 && exact_ok; ++trial) {
        std::vector<Rational> ps;
        std::vector<double> pd;
        const int depth = 1 + trial % 6;
        std::int64_t num = 1, den = 1;
        for (int i = 0; i < depth; ++i) {
            const std::int64_t d = 4 + static_cast<std::int64_t>(rng() % 20);
            const std::int64_t nmin = (d + 3) / 4, nmax = (d - 1) / 2;
            const std::int64_t n = nmin + static_cast<std::int64_t>(rng() % static_cast<unsigned>(nmax - nmin + 1));
            ps.push_back({n, d});
            pd.push_back(static_cast<double>(n) / static_cast<double>(d));
            num *= 4 * n;
            den *= d;
        }
        const auto exact = snowflake_length_exact(ps, depth);
        const std::int64_t g = std::gcd(num, den);
        exact_ok = exact == Rational{num / g, den / g} &&
                   std::abs(snowflake(pd, depth).length() - exact.value()) <= 1e-12 * exact.value();
    }
    v.ok = seg_ok && flake_ok && exact_ok;
    v.detail = "segment length " + fmt(len) + ", mass " + fmt(c.mass) + ", slope " + fmt(slope) +
               "; p = 1/4 deviation " + fmt(off) + "; rational lengths " + (exact_ok ? "exact" : "wrong");
    return v;
}

Verdict sharpness() {
    Verdict v;
    const auto nets = sharpness_nets(1.1, 2, 0.4, 10, 14);
    double edge_err = 0;
    for (int k = 0; k <= nets.h.depth(); ++k) {
        const auto& lv = nets.h.levels[static_cast<std::size_t>(k)];
        for (std::size_t i = 0; i + 1 < lv.size(); ++i)
            edge_err = std::max(edge_err, std::abs(dist(nets.h.pt(lv[i]), nets.h.pt(lv[i + 1])) - nets.h.scale(k)));
    }
    double tau_err = 0;
    int worst_k = 0;
    for (int k = 0; k <= 30; ++k) {
        const double e = std::abs(nets.tau_geometric(k) - nets.tau_closed(k));
        if (e > tau_err) tau_err = e, worst_k = k;
    }
    const auto sums = sharpness_sums(nets, 31);
    auto window = [](const std::vector<double>& p, int a) {
        return p[static_cast<std::size_t>(a) + 5] - p[static_cast<std::size_t>(a)];
    };
    bool cauchy = true;
    double tail_ratio = 0;
    for (int a = 5; a + 10 <= 30; a += 5) {
        const double r = window(sums.powered, a + 5) / window(sums.powered, a);
        tail_ratio = std::max(tail_ratio, r);
        cauchy = cauchy && r < 1;
    }
    bool growing = true;
    for (std::size_t k = 1; k < sums.plain.size(); ++k) growing = growing && sums.plain[k] > sums.plain[k - 1];
    const double last = window(sums.plain, 25) / sums.plain[30];
    growing = growing && last > 0.05;

    v.ok = edge_err <= 1e-9 && tau_err <= 1e-9 && cauchy && growing;
    v.detail = "edge error " + fmt(edge_err) + "; geometric vs closed-form tau, worst gap " + fmt(tau_err) + " at k = " +
               std::to_string(worst_k) + " (" + fmt(nets.tau_geometric(worst_k)) + " vs " +
               fmt(nets.tau_closed(worst_k)) + "), closed/geometric at k = 30 " +
               fmt(nets.tau_closed(30) / nets.tau_geometric(30)) + "; powered tail ratio " + fmt(tail_ratio) +
               "; plain sum gains " + fmt(100 * last) + "% over its last 5 levels";
    return v;
}

Verdict divergence() {
    Verdict v;
    const auto square = unit_cube_threshold_sums(2, 2, 1.0 / (6 * std::sqrt(2.0)), 12);
    bool square_ok = true;
    for (int g = 0; g <= 12; ++g) square_ok = square_ok && square[static_cast<std::size_t>(g)] >= 2.0 * (g + 1);

    const auto pack = packing_sums(2, 1, 1, 20);
    bool pack_ok = pack.back() > 1e3;
    for (std::size_t k = 3; k < pack.size(); ++k)
        pack_ok = pack_ok && pack[k] - pack[k - 1] > pack[k - 1] - pack[k - 2];

    const auto jones = four_corner_jones(5);
    bool jones_ok = jones.size() == 5;
    double lo = 1e300, hi = 0;
    for (std::size_t i = 1; jones_ok && i < jones.size(); ++i) {
        const double inc = jones[i] - jones[i - 1];
        lo = std::min(lo, inc);
        hi = std::max(hi, inc);
    }
    jones_ok = jones_ok && lo > 0 && hi < 3 * lo;
    v.ok = square_ok && pack_ok && jones_ok;
    v.detail = "square sum at 12 generations " + fmt(square.back()) + " (>= 2 per generation: " +
               (square_ok ? "yes" : "no") + "); packing sum at K = 20 " + fmt(pack.back()) +
               "; four-corner increments in [" + fmt(lo) + ", " + fmt(hi) + "]";
    return v;
}

SimpleGraph path_graph(int n) {
    SimpleGraph g;
    for (int i = 0; i < n; ++i) g.vertices.push_back({static_cast<double>(i), 0.0});
    for (int i = 0; i + 1 < n; ++i) g.edges.push_back({i, i + 1});
    return g;
}

Verdict tours_and_constants() {
    Verdict v;
    int tours = 0;
    bool tours_ok = true;
    for (int n = 2; n <= 9; ++n) {
        for (bool closed : {false, true}) {
            if (closed && n < 3) continue;
            SimpleGraph g = path_graph(n);
            if (closed) g.edges.push_back({n - 1, 0});
            for (int v0 = 0; v0 < n; ++v0) {
                const auto t = graph_tour(g, v0, 0.25, 0.75);
                tours_ok = tours_ok && check_tour(g, v0, t).ok();
                ++tours;
            }
        }
    }
    bool rejected = false;
    SimpleGraph star;
    star.vertices = {{0, 0}, {1, 0}, {0, 1}, {-1, 0}};
    star.edges = {{0, 1}, {0, 2}, {0, 3}};
    try {
        graph_tour(star, 0, 0, 1);
    } catch (const ValenceExceeded&) {
        rejected = true;
    }

    const double H = lip_to_holder(1, 0.5, 0.5, 1, 1, 2);
    bool wiggle_ok = true;
    double worst = 0;
    for (double s : {1.5, 2.0, 2.5, 3.0})
        for (double rho : {0.3, 0.5}) {
            const auto w = wiggle_holder_check(s, rho, 0.3, 10, 20000, 3);
            worst = std::max(worst, w.ratio / w.H);
            wiggle_ok = wiggle_ok && w.ratio > 0 && w.ratio <= w.H;
        }
    v.ok = tours_ok && rejected && H == 10.0 && wiggle_ok;
    v.detail = std::to_string(tours) + " path/cycle tours " + (tours_ok ? "pass" : "fail") + ", star " +
               (rejected ? "rejected" : "accepted") + ", H = " + fmt(H) + ", worst sampled/H " + fmt(worst);
    return v;
}

Verdict measures() {
    Verdict v;
    std::mt19937 rng(1234);
    std::uniform_real_distribution<double> u(0, 1), uc(-1, 1), uw(0.1, 2);
    int mono_bad = 0, dil_bad = 0, mono_tested = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        const int dim = 2 + trial % 3;
        AtomicMeasure mu;
        for (int i = 0; i < 5 + trial % 20; ++i) {
            Point p(static_cast<std::size_t>(dim));
            for (auto& x : p) x = uc(rng);
            mu.atoms.push_back(p);
            mu.weights.push_back(uw(rng));
        }
        const double p = 0.5 + 3 * u(rng);
        const Point x = mu.atoms[static_cast<std::size_t>(trial) % mu.size()];
        const double r = 0.5 + 1.5 * u(rng);
        const Line L{gaussian(rng, dim), normalized(gaussian(rng, dim))};
        const Point& y = mu.atoms[0];
        const double gap = r - dist(x, y);
        if (gap > 1e-6) {
            ++mono_tested;
            const double sr = gap * (0.2 + 0.79 * u(rng));
            const double inner = sr * std::pow(mu.ball(y, sr), 1 / p) * beta_p_line(mu, y, sr, p, L);
            const double outer = r * std::pow(mu.ball(x, r), 1 / p) * beta_p_line(mu, x, r, p, L);
            if (inner > outer * (1 + 1e-12)) ++mono_bad;
        }
        const double lambda = 0.05 + 20 * u(rng);
        const auto big = mu.dilated(lambda);
        const double b0 = beta_p_line(mu, x, r, p, L);
        const double b1 = beta_p_line(big, scaled(x, lambda), lambda * r, p, Line{scaled(L.base, lambda), L.dir});
        if (std::abs(b1 - b0) > 1e-12 * std::max(1.0, b0)) ++dil_bad;
    }

    AtomicMeasure line;
    for (int i = 0; i < 65; ++i) {
        const double t = -0.5 + i / 64.0;
        line.atoms.push_back({0.3 + 0.6 * t, 0.2 + 0.8 * t, -0.1});
        line.weights.push_back(1.0 + (i % 3));
    }
    double flat = 0;
    for (std::size_t i = 0; i < line.size(); i += 4) {
        for (double r : {0.05, 0.2, 1.0}) flat = std::max(flat, beta_p(line, line.atoms[i], r, 2));
        flat = std::max(flat, jsp(line, line.atoms[i], 1.5, 2, 2));
    }
    SelectionParams sp;
    sp.x0 = line.atoms[32];
    sp.M = 1e-6;
    sp.P = 1e9;
    const auto res = measure_pipeline(line, sp, 5);
    const Line axis = line_through(line.atoms.front(), line.atoms.back());
    double bend = 0;
    for (const auto& q : res.curve.curve.p) bend = std::max(bend, dist_to_line(q, axis));
    const bool line_ok = flat < 1e-12 && bend < 1e-12 && res.s_plus == 0.0 && !res.sel.A.empty();

    v.ok = mono_bad == 0 && dil_bad == 0 && line_ok;
    v.detail = "monotonicity violations " + std::to_string(mono_bad) + " of " + std::to_string(mono_tested) +
               ", dilation mismatches " + std::to_string(dil_bad) + " of 1000; line measure beta/jsp " + fmt(flat) +
               ", curve deviation " + fmt(bend);
    return v;
}

}  // namespace

int main(int argc, char** argv) {
    int n = 0;
    for (int i = 1; i + 1 < argc; ++i)
        if (std::string(argv[i]) == "--criterion") n = std::atoi(argv[i + 1]);
    const std::vector<std::function<Verdict()>> table{
        structural,     chain_inequalities, tube_control, mass_oracle,         certificates,
        segment_sanity, sharpness,          divergence,   tours_and_constants, measures};
    if (n < 1 || n > static_cast<int>(table.size())) {
        std::cerr << "usage: acceptance --criterion N   (N = 1.." << table.size() << ")\n";
        return 2;
    }
    Verdict v;
    try {
        v = table[static_cast<std::size_t>(n) - 1]();
    } catch (const std::exception& e) {
        v = {false, std::string("exception: ") + e.what()};
    }
    std::cout << (v.ok ? "PASS" : "FAIL") << " criterion " << n << ": " << v.detail << '\n';
    return v.ok ? 0 : 1;
}
