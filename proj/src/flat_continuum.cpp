#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "htsp/construct.hpp"

namespace htsp {

namespace {

using Pair = std::pair<int, int>;

Pair key(int a, int b) { return {std::min(a, b), std::max(a, b)}; }

IntervalRecord piece(double a, double b, Kind kind, int va, int vb, int level, Origin o, int parent) {
    IntervalRecord r;
    r.a = a;
    r.b = b;
    r.kind = kind;
    r.va = va;
    r.vb = vb;
    r.born = level;
    r.origin = o;
    r.parent = parent;
    return r;
}

// Alternating point/segment pieces along a vertex chain, laid out on [a, b].
// `first` and `last` give the kinds of the outer point pieces; interior points are frozen.
std::vector<IntervalRecord> chain_pieces(const std::vector<int>& chain, double a, double b, Kind first, Kind last,
                                         bool outer_points, const NetHierarchy& h, int level, Origin o, int parent) {
    const double reach = 14.0 * h.astar() * h.scale(level);
    std::vector<IntervalRecord> out;
    const int segs = static_cast<int>(chain.size()) - 1;
    const int n = outer_points ? 2 * segs + 1 : 2 * segs - 1;
    const double w = (b - a) / n;
    int slot = 0;
    auto next = [&](Kind kind, int va, int vb) {
        const double lo = slot == 0 ? a : a + slot * w;
        const double hi = slot == n - 1 ? b : a + (slot + 1) * w;
        out.push_back(piece(lo, hi, kind, va, vb, level, o, parent));
        ++slot;
    };
    for (int j = 0; j <= segs; ++j) {
        const int v = chain[static_cast<std::size_t>(j)];
        const bool outer = j == 0 || j == segs;
        if (!outer || outer_points) next(j == 0 ? first : j == segs ? last : Kind::frozen, v, v);
        if (j < segs) {
            const int w2 = chain[static_cast<std::size_t>(j) + 1];
            const bool longgap = !(dist(h.pt(v), h.pt(w2)) < reach);
            next(longgap ? Kind::bridge : Kind::edge, v, w2);
            if (longgap) out.back().special = true;
        }
    }
    return out;
}

// Points of V_{k+1} \ V_k in B(v, C* rho_{k+1} r0) on the far side from `partner`,
// nearest first.
std::vector<int> beyond(const NetHierarchy& h, const LineFitTable& fits, int k, int v, int partner) {
    const Line& l = fits.get(k, v).line;
    const double tv = line_param(h.pt(v), l);
    const double away = line_param(h.pt(partner), l) < tv ? 1.0 : -1.0;
    std::vector<std::pair<double, int>> found;
    for (int x : h.levels[static_cast<std::size_t>(k) + 1]) {
        if (h.in_level(k, x) || !(dist(h.pt(x), h.pt(v)) < h.cstar * h.scale(k + 1))) continue;
        const double t = (line_param(h.pt(x), l) - tv) * away;
        if (t > 0) found.push_back({t, x});
    }
    std::sort(found.begin(), found.end());
    std::vector<int> out;
    for (auto [t, x] : found) out.push_back(x);
    return out;
}

LevelState refine_continuum(const LevelState& st, const NetHierarchy& h, const LineFitTable& fits) {
    const int k = st.k;
    LevelState next;
    next.k = k + 1;
    const auto& R = st.records;
    const int n = static_cast<int>(R.size());
    for (int i = 0; i < n; ++i) {
        const IntervalRecord& r = R[static_cast<std::size_t>(i)];
        if (r.kind == Kind::edge) {
            const auto chain = between_points(h, fits, FlatPair{k, r.va, r.vb, Side::right});
            for (auto& c : chain_pieces(chain, r.a, r.b, Kind::frozen, Kind::frozen, false, h, k + 1,
                                        Origin::flat_edge, i))
                next.records.push_back(c);
            continue;
        }
        const bool head = r.kind == Kind::netpoint && i == 0;
        const bool tail = r.kind == Kind::netpoint && i == n - 1;
        if (!head && !tail) {
            IntervalRecord c = r;
            c.kind = Kind::frozen;
            if (r.kind != Kind::frozen) c.born = k + 1;
            c.origin = r.kind == Kind::frozen ? Origin::kept_frozen : Origin::continuum_end;
            c.parent = i;
            next.records.push_back(c);
            continue;
        }
        const int partner = head ? R[1].vb : R[static_cast<std::size_t>(n) - 2].va;
        auto far = beyond(h, fits, k, r.va, partner);
        if (far.empty()) {
            IntervalRecord c = r;
            c.parent = i;
            c.origin = Origin::continuum_end;
            next.records.push_back(c);
            continue;
        }
        std::vector<int> chain{r.va};
        chain.insert(chain.end(), far.begin(), far.end());
        if (head) std::reverse(chain.begin(), chain.end());
        const Kind first = head ? Kind::netpoint : Kind::frozen;
        const Kind last = head ? Kind::frozen : Kind::netpoint;
        for (auto& c : chain_pieces(chain, r.a, r.b, first, last, true, h, k + 1, Origin::continuum_end, i))
            next.records.push_back(c);
    }
    return next;
}

}  // namespace

ContinuumLevelCheck check_continuum_level(const LevelState& st, const NetHierarchy& h) {
    ContinuumLevelCheck c;
    const auto& R = st.records;
    const int n = static_cast<int>(R.size());
    if (n < 1 || n % 2 == 0 || R.front().a != 0.0 || R.back().b != 1.0) c.alternating = false;
    int ncount = 0;
    std::map<int, int> hits;
    std::map<Pair, int> images;
    for (int i = 0; i < n; ++i) {
        const auto& r = R[static_cast<std::size_t>(i)];
        if (r.kind == Kind::bridge) c.no_bridges = false;
        if (r.is_point() != (i % 2 == 0)) c.alternating = false;
        if (i + 1 < n && (r.b != R[static_cast<std::size_t>(i) + 1].a || r.vb != R[static_cast<std::size_t>(i) + 1].va))
            c.alternating = false;
        if (r.kind == Kind::netpoint) {
            ++ncount;
            if (i != 0 && i != n - 1) c.alternating = false;
        }
        if (r.is_point()) {
            hits[r.va]++;
            if (!h.in_level(st.k, r.va)) c.singly_covered = false;
        } else {
            images[key(r.va, r.vb)]++;
            if (!(dist(h.pt(r.va), h.pt(r.vb)) < 3.0 * std::ldexp(1.0, -st.k) * h.r0)) c.short_edges = false;
        }
    }
    if (ncount != (n == 1 ? 1 : 2)) c.alternating = false;
    for (int v : h.levels[static_cast<std::size_t>(st.k)])
        if (hits[v] != 1) c.singly_covered = false;
    std::vector<Pair> segs;
    for (auto [e, m] : images) {
        if (m != 1) c.injective = false;
        segs.push_back(e);
    }
    for (std::size_t x = 0; x < segs.size() && c.injective; ++x)
        for (std::size_t y = x + 1; y < segs.size(); ++y) {
            const auto [a0, a1] = segs[x];
            const auto [b0, b1] = segs[y];
            const int shared = (a0 == b0) + (a0 == b1) + (a1 == b0) + (a1 == b1);
            if (segment_contacts(h.pt(a0), h.pt(a1), h.pt(b0), h.pt(b1)) > shared) {
                c.injective = false;
                break;
            }
        }
    return c;
}

ContinuumResult run_flat_continuum(const std::vector<Point>& sample, double s, const ContinuumOptions& opt) {
    if (sample.size() < 2) throw EmptyInput("flat continuum needs at least two sample points");
    ContinuumResult res;
    NetHierarchy& h = res.h;
    h.points = sample;
    const int n = static_cast<int>(sample.size());
    int x0 = 0, y0 = 0;
    double diam = 0;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            const double d = dist(sample[static_cast<std::size_t>(i)], sample[static_cast<std::size_t>(j)]);
            if (d > diam) {
                diam = d;
                x0 = i;
                y0 = j;
            }
        }
    if (!(diam > 0)) throw EmptyInput("sample has a single distinct point");
    h.r0 = diam;
    h.x0 = h.pt(x0);
    h.cstar = 2;
    h.xi1 = h.xi2 = 0.5;

    // maximal 2^-k r0 separated nets grown from the diameter pair
    h.levels.push_back({x0, y0});
    h.rho.push_back(1.0);
    for (int k = 1; k <= opt.depth; ++k) {
        const double sep = std::ldexp(1.0, -k) * h.r0;
        std::vector<int> lvl = h.levels.back();
        for (int i = 0; i < n; ++i) {
            bool far = true;
            for (int v : lvl)
                if (dist(h.pt(v), h.pt(i)) < sep) {
                    far = false;
                    break;
                }
            if (far) lvl.push_back(i);
        }
        h.levels.push_back(std::move(lvl));
        h.rho.push_back(std::ldexp(1.0, -k));
    }

    // alpha_{k,v} from the width of E in the closed ball of radius min(120 2^-k, 1) r0
    const FitMode mode = default_fit_mode(h.dim());
    res.fits.mode = mode;
    auto ball = [&](const Point& c, double r) {
        std::vector<Point> in;
        for (const auto& p : sample)
            if (dist(p, c) <= r) in.push_back(p);
        return in;
    };
    for (int k = 0; k <= opt.depth; ++k) {
        std::vector<NetFit> row(sample.size());
        const double rk = std::min(120.0 * std::ldexp(1.0, -k), 1.0) * h.r0;
        for (int v : h.levels[static_cast<std::size_t>(k)]) {
            const auto pts = ball(h.pt(v), rk);
            const LineFit lf = minimax_line(pts, mode);
            NetFit& f = row[static_cast<std::size_t>(v)];
            f.valid = true;
            f.line = lf.line;
            f.alpha = lf.max_dist / (std::ldexp(1.0, -(k + 1)) * h.r0);
            f.window = static_cast<int>(pts.size());
            if (opt.precheck) {
                for (double r : {rk, h.scale(k)}) {
                    const double b = beta_number(sample, Region::ball(h.pt(v), r), mode);
                    res.max_beta = std::max(res.max_beta, b);
                    if (b > opt.beta1) {
                        std::ostringstream msg;
                        msg << "beta " << b << " > " << opt.beta1 << " at level " << k << ", radius " << r;
                        throw FlatnessViolated(msg.str());
                    }
                }
            }
        }
        res.fits.at.push_back(std::move(row));
    }

    res.prm.s = s;
    res.prm.alpha0 = 512.0 * opt.beta1;
    res.prm.depth = opt.depth;

    LevelState st;
    st.records = {piece(0, 1.0 / 3, Kind::netpoint, x0, x0, 0, Origin::step0, -1),
                  piece(1.0 / 3, 2.0 / 3, Kind::edge, x0, y0, 0, Origin::step0, -1),
                  piece(2.0 / 3, 1, Kind::netpoint, y0, y0, 0, Origin::step0, -1)};
    res.states.push_back(st);
    for (int k = 0; k < opt.depth; ++k) res.states.push_back(refine_continuum(res.states.back(), h, res.fits));
    for (const auto& s2 : res.states) res.checks.push_back(check_continuum_level(s2, h));
    return res;
}

RerouteReport make_essentially_two_to_one(std::vector<LevelState>& states, const NetHierarchy& h) {
    RerouteReport rep;
    if (states.empty()) return rep;
    std::map<Pair, Point> apex;
    auto apex_for = [&](const IntervalRecord& r) -> const Point& {
        const Pair e = key(r.va, r.vb);
        auto it = apex.find(e);
        if (it != apex.end()) return it->second;
        const Point& p = h.pt(e.first);
        const Point& q = h.pt(e.second);
        const Point d = sub(q, p);
        const double c = norm(d);
        Point normal(p.size(), 0.0);
        if (c > 0) {
            const Point u = scaled(d, 1.0 / c);
            std::size_t axis = 0;
            for (std::size_t j = 1; j < u.size(); ++j)
                if (std::abs(u[j]) < std::abs(u[axis])) axis = j;
            Point e_j(p.size(), 0.0);
            e_j[axis] = 1.0;
            normal = normalized(sub(e_j, scaled(u, dot(e_j, u))));
        }
        // detour length 2 sqrt((c/2)^2 + delta^2) stays below c + rho r0 / 2
        const double rho = h.scale(std::min(r.born, h.depth()));
        const double delta = 0.5 * std::sqrt(std::pow(c + 0.5 * rho, 2) - c * c);
        return apex.emplace(e, add(lerp(p, q, 0.5), scaled(normal, delta))).first->second;
    };
    for (auto& st : states)
        for (auto& r : st.records)
            if (r.kind == Kind::bridge && !r.detour) {
                Point a = apex_for(r);
                r.detour = a;
            }

    const LevelState& last = states.back();
    std::vector<std::pair<Point, Point>> edges;
    std::set<Pair> seen;
    for (const auto& r : last.records)
        if (r.kind == Kind::edge && seen.insert(key(r.va, r.vb)).second) edges.push_back({h.pt(r.va), h.pt(r.vb)});
    std::set<Pair> done;
    for (const auto& r : last.records) {
        if (r.kind != Kind::bridge) continue;
        rep.bridges++;
        const double chord = dist(h.pt(r.va), h.pt(r.vb));
        const double len = dist(h.pt(r.va), *r.detour) + dist(*r.detour, h.pt(r.vb));
        rep.max_excess = std::max(rep.max_excess, len - chord);
        if (!done.insert(key(r.va, r.vb)).second) continue;
        for (const auto& [p, q] : edges)
            for (const auto& [s0, s1] : {std::pair<Point, Point>{h.pt(r.va), *r.detour}, {*r.detour, h.pt(r.vb)}}) {
                const int c = segment_contacts(s0, s1, p, q);
                rep.contacts += c;
                if (c > 1) rep.overlaps = true;
            }
    }
    return rep;
}

}  // namespace htsp
