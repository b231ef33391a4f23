#include "htsp/construct.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <set>
#include <sstream>

namespace htsp {

std::string to_string(Kind k) {
    switch (k) {
        case Kind::edge: return "E";
        case Kind::bridge: return "B";
        case Kind::netpoint: return "N";
        case Kind::frozen: return "F";
    }
    return "?";
}

std::string to_string(VertexClass c) {
    switch (c) {
        case VertexClass::nonterminal: return "nonterminal";
        case VertexClass::one_sided: return "one_sided";
        case VertexClass::two_sided: return "two_sided";
        case VertexClass::nonflat: return "nonflat";
    }
    return "?";
}

double flat_threshold(const Params& prm, const ChoiceLedger& ledger) {
    return ledger.alpha_relaxed ? std::min(*ledger.alpha_relaxed, prm.alpha0) : prm.alpha0;
}

namespace {

using Pair = std::pair<int, int>;

Pair key(int a, int b) { return {std::min(a, b), std::max(a, b)}; }

template <class V>
auto& ix(V& v, int i) {
    return v[static_cast<std::size_t>(i)];
}

struct Proto {
    bool constant = true;
    int from = -1, to = -1;
    Kind kind = Kind::frozen;
    bool special = false;
};

Proto point_proto(int v, Kind k = Kind::frozen) { return {true, v, v, k, false}; }
Proto seg_proto(int u, int w, Kind k = Kind::edge, bool special = false) { return {false, u, w, k, special}; }

// Equal-length children of [a, b]; the outer endpoints are copied exactly.
std::vector<IntervalRecord> place(const std::vector<Proto>& ps, double a, double b, int level, Origin o,
                                  int parent) {
    std::vector<IntervalRecord> out;
    const int n = static_cast<int>(ps.size());
    const double h = (b - a) / n;
    for (int i = 0; i < n; ++i) {
        IntervalRecord r;
        r.a = i == 0 ? a : a + i * h;
        r.b = i == n - 1 ? b : a + (i + 1) * h;
        const Proto& p = ix(ps, i);
        r.kind = p.kind;
        r.origin = o;
        r.born = level;
        r.va = p.from;
        r.vb = p.to;
        r.parent = parent;
        r.special = p.special;
        out.push_back(r);
    }
    return out;
}

// A tour over a possibly disconnected vertex set: the component of `center` is
// toured first, every other component is reached by a bridge out of `center`
// and back, followed by a constancy piece at `center`.
struct Composite {
    std::vector<Proto> pieces;
    std::map<int, int> designated;   // point id -> piece index
    std::vector<int> center_options;  // pieces at the center meeting the tour adjacency rule
    int components = 0;
};

Composite composite_tour(const NetHierarchy& h, std::vector<int> ids, const std::vector<Pair>& edges, int center,
                         const std::set<int>& anchors, int first_neighbor_id = -1) {
    std::sort(ids.begin(), ids.end());
    std::map<int, int> local;
    SimpleGraph g;
    for (int id : ids) {
        local[id] = static_cast<int>(g.vertices.size());
        g.vertices.push_back(h.pt(id));
    }
    for (auto [u, w] : edges) g.edges.push_back({local.at(u), local.at(w)});

    auto comps = component_indices(g);
    auto subs = components(g);
    const int c0 = local.at(center);
    std::vector<int> order(comps.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
    auto lex_min = [&](const std::vector<int>& members, bool anchored) {
        int best = -1;
        for (int u : members) {
            if (anchored && !anchors.count(ix(ids, u))) continue;
            if (best < 0 || lex_less(ix(g.vertices, u), ix(g.vertices, best))) best = u;
        }
        return best;
    };
    std::sort(order.begin(), order.end(), [&](int x, int y) {
        const bool hx = std::count(ix(comps, x).begin(), ix(comps, x).end(), c0) > 0;
        const bool hy = std::count(ix(comps, y).begin(), ix(comps, y).end(), c0) > 0;
        if (hx != hy) return hx;
        return lex_less(ix(g.vertices, lex_min(ix(comps, x), false)), ix(g.vertices, lex_min(ix(comps, y), false)));
    });

    Composite out;
    out.components = static_cast<int>(comps.size());
    for (std::size_t j = 0; j < order.size(); ++j) {
        const auto& members = ix(comps, order[j]);
        const SimpleGraph& sub = ix(subs, order[j]);
        int start = -1;
        if (j == 0) {
            start = c0;
        } else {
            start = lex_min(members, true);
            if (start < 0) start = lex_min(members, false);
        }
        const int start_sub = static_cast<int>(std::find(members.begin(), members.end(), start) - members.begin());
        int first_sub = -1;
        if (j == 0 && first_neighbor_id >= 0 && local.count(first_neighbor_id)) {
            auto it = std::find(members.begin(), members.end(), local.at(first_neighbor_id));
            if (it != members.end()) first_sub = static_cast<int>(it - members.begin());
        }
        const int start_id = ix(ids, start);
        if (j > 0) out.pieces.push_back(seg_proto(center, start_id, Kind::bridge));
        const int offset = static_cast<int>(out.pieces.size());
        const TourWalk w = tour_walk(sub, start_sub, first_sub);
        const int m = static_cast<int>(w.walk.size());
        for (int c = 0; c < m; ++c) {
            const int here = ix(ids, ix(members, ix(w.walk, c)));
            out.pieces.push_back(point_proto(here));
            if (c + 1 < m) out.pieces.push_back(seg_proto(here, ix(ids, ix(members, ix(w.walk, c + 1)))));
        }
        for (std::size_t u = 0; u < members.size(); ++u)
            out.designated[ix(ids, members[u])] = offset + 2 * w.designated[u];
        if (j == 0)
            for (int c : designation_candidates(sub, w.walk, start_sub)) out.center_options.push_back(offset + 2 * c);
        if (j > 0) {
            out.pieces.push_back(seg_proto(start_id, center, Kind::bridge));
            out.pieces.push_back(point_proto(center));
            // an isolated center may sit on any of its constancy pieces
            if (ix(comps, order[0]).size() == 1) out.center_options.push_back(static_cast<int>(out.pieces.size()) - 1);
        }
    }
    return out;
}

void mirror(Composite& c) {
    std::reverse(c.pieces.begin(), c.pieces.end());
    for (auto& p : c.pieces) std::swap(p.from, p.to);
    const int n = static_cast<int>(c.pieces.size());
    for (auto& [id, d] : c.designated) d = n - 1 - d;
    for (auto& d : c.center_options) d = n - 1 - d;
}

struct Refiner {
    const NetHierarchy& h;
    const LineFitTable& fits;
    const Params& prm;
    ChoiceLedger& ledger;
    double alpha0;
    int k;
    std::vector<char> in_vk;
    std::map<int, std::vector<int>> partners;  // flat v -> first neighbours at level k
    std::mt19937_64 rng;

    Refiner(const NetHierarchy& h_, const LineFitTable& f_, const Params& p_, ChoiceLedger& l_, int k_)
        : h(h_), fits(f_), prm(p_), ledger(l_), alpha0(flat_threshold(p_, l_)), k(k_), rng(l_.seed ^ (0x9e37u + k_)) {
        in_vk.assign(h.points.size(), 0);
        for (int v : ix(h.levels, k)) ix(in_vk, v) = 1;
        for (const auto& fp : flat_pairs(h, fits, alpha0, k)) partners[fp.v].push_back(fp.w);
    }

    bool flat(int v) const {
        const NetFit& f = fits.get(k, v);
        return f.valid && f.alpha < alpha0;
    }

    VertexClass classify(int v) const {
        if (!flat(v)) return VertexClass::nonflat;
        auto it = partners.find(v);
        const std::size_t n = it == partners.end() ? 0 : it->second.size();
        return n >= 2 ? VertexClass::nonterminal : n == 1 ? VertexClass::one_sided : VertexClass::two_sided;
    }
};

}  // namespace

LevelState initialize(const NetHierarchy& h, const LineFitTable& fits, const Params& prm, ChoiceLedger& ledger) {
    LevelState st;
    st.k = 0;
    const auto& V0 = h.levels.at(0);
    if (V0.size() == 1) {
        IntervalRecord r;
        r.a = 0;
        r.b = 1;
        r.kind = Kind::netpoint;
        r.va = r.vb = V0[0];
        st.records.push_back(r);
        return st;
    }
    const double alpha0 = flat_threshold(prm, ledger);
    std::set<Pair> L;
    if (fits.levels() > 0)
        for (const auto& fp : flat_pairs(h, fits, alpha0, 0)) L.insert(key(fp.v, fp.w));
    const int v0 = std::count(V0.begin(), V0.end(), 0) ? 0 : V0[0];
    std::set<int> anchors(V0.begin(), V0.end());
    Composite c = composite_tour(h, V0, {L.begin(), L.end()}, v0, anchors);
    for (auto& p : c.pieces)
        if (p.constant) p.kind = Kind::frozen;
    for (auto [id, d] : c.designated) ix(c.pieces, d).kind = Kind::netpoint;
    st.records = place(c.pieces, 0.0, 1.0, 0, Origin::step0, -1);
    if (c.components > 1)
        ledger.log.push_back("level 0: " + std::to_string(c.components) + " components joined by bridges");
    return st;
}

LevelState refine(const LevelState& st, const NetHierarchy& h, const LineFitTable& fits, const Params& prm,
                  ChoiceLedger& ledger) {
    const int k = st.k;
    if (k + 1 >= fits.levels() || k + 1 > h.depth())
        throw BadParameter("refining level " + std::to_string(k) + " needs fits at level " + std::to_string(k + 1));
    Refiner R(h, fits, prm, ledger, k);
    LevelState next;
    next.k = k + 1;
    LevelDiagnostics& diag = next.diag;

    const auto& recs = st.records;
    const int n = static_cast<int>(recs.size());
    std::vector<std::vector<IntervalRecord>> kids(recs.size());
    std::vector<char> done(recs.size(), 0);

    // ownership of V_{k+1} points through N intervals: -1 none, -2 flat edge,
    // -3 flat point, r >= 0 the r-th non-flat point interval
    std::vector<int> owner(h.points.size(), -1);
    std::set<Pair> realized;

    const double reach_next = 14.0 * h.astar() * h.scale(k + 1);
    const double ball_next = h.cstar * h.scale(k + 1);
    const auto& Vk1 = ix(h.levels, k + 1);

    auto keep = [&](int i, Kind kind, Origin o) {
        IntervalRecord r = ix(recs, i);
        if (r.kind != kind) r.born = k + 1;
        r.kind = kind;
        r.origin = o;
        r.parent = i;
        ix(kids, i) = {r};
        ix(done, i) = 1;
    };

    // bridges and frozen intervals
    for (int i = 0; i < n; ++i) {
        if (ix(recs, i).kind == Kind::bridge) keep(i, Kind::bridge, Origin::kept_bridge);
        if (ix(recs, i).kind == Kind::frozen) keep(i, Kind::frozen, Origin::kept_frozen);
    }

    // edges, grouped into twins by image
    std::map<Pair, std::vector<int>> twins;
    for (int i = 0; i < n; ++i)
        if (ix(recs, i).kind == Kind::edge) twins[key(ix(recs, i).va, ix(recs, i).vb)].push_back(i);
    for (auto& [pr, members] : twins) {
        const auto [x, y] = pr;
        const bool fx = R.flat(x), fy = R.flat(y);
        if (!fx && !fy) {
            for (int i : members) keep(i, Kind::bridge, Origin::nonflat_edge);
            continue;
        }
        int p = x, q = y;
        if (fx && fy) {
            const double ax = fits.get(k, x).alpha, ay = fits.get(k, y).alpha;
            if (ay < ax) std::swap(p, q);
        } else if (fy) {
            std::swap(p, q);
        }
        const std::vector<int> chain = between_points(h, fits, FlatPair{k, p, q, Side::right});
        for (std::size_t j = 0; j + 1 < chain.size(); ++j) realized.insert(key(chain[j], chain[j + 1]));
        std::size_t keeper = 0;
        if (ledger.seed != 0 && members.size() == 2) keeper = R.rng() % 2;
        for (std::size_t m = 0; m < members.size(); ++m) {
            const int i = members[m];
            const IntervalRecord& rec = ix(recs, i);
            std::vector<int> c = chain;
            if (rec.va != p) std::reverse(c.begin(), c.end());
            std::vector<Proto> ps;
            for (std::size_t j = 0; j + 1 < c.size(); ++j) {
                if (j > 0) {
                    Kind kind = Kind::frozen;
                    const int u = c[j];
                    if (m == keeper && !ix(R.in_vk, u)) {
                        if (ix(owner, u) == -1) {
                            ix(owner, u) = -2;
                            kind = Kind::netpoint;
                        } else {
                            diag.claim_conflicts++;
                        }
                    }
                    ps.push_back(point_proto(u, kind));
                }
                const bool longgap = !(dist(h.pt(c[j]), h.pt(c[j + 1])) < reach_next);
                ps.push_back(seg_proto(c[j], c[j + 1], longgap ? Kind::bridge : Kind::edge, longgap));
            }
            ix(kids, i) = place(ps, rec.a, rec.b, k + 1, Origin::flat_edge, i);
            // a single piece keeps the interval as it was
            if (ps.size() == 1 && ps[0].kind == Kind::edge) ix(kids, i)[0].born = rec.born;
            ix(done, i) = 1;
        }
    }

    // image pairs of the new edges touching each vertex, for facing outside edges
    auto outside_pairs = [&](int i, bool left) {
        std::set<Pair> out;
        const int j = left ? i - 1 : i + 1;
        if (j < 0 || j >= n || ix(kids, j).empty()) return out;
        const IntervalRecord& r = left ? ix(kids, j).back() : ix(kids, j).front();
        if (r.kind == Kind::edge) out.insert(key(r.va, r.vb));
        return out;
    };
    std::map<int, std::set<Pair>> touching;
    for (int i = 0; i < n; ++i)
        for (const auto& r : ix(kids, i))
            if (r.kind == Kind::edge) {
                touching[r.va].insert(key(r.va, r.vb));
                touching[r.vb].insert(key(r.va, r.vb));
            }

    // Pick the constancy piece for the center: among the tour-valid options
    // (in both orientations) take the one facing the most outside edges.
    auto settle_center = [&](Composite& c, int i, int v) {
        const std::set<Pair> need = touching.count(v) ? touching.at(v) : std::set<Pair>{};
        const auto lp = outside_pairs(i, true), rp = outside_pairs(i, false);
        const int np = static_cast<int>(c.pieces.size());
        auto score = [&](int d, bool flipped) {
            int s = 0;
            const int pos = flipped ? np - 1 - d : d;
            for (const auto& e : need)
                if ((pos == 0 && lp.count(e)) || (pos == np - 1 && rp.count(e))) ++s;
            return s;
        };
        int best = c.designated.at(v), best_score = -1;
        bool best_flip = false;
        std::vector<int> opts = c.center_options;
        if (std::find(opts.begin(), opts.end(), best) == opts.end()) opts.insert(opts.begin(), best);
        else {
            opts.erase(std::find(opts.begin(), opts.end(), best));
            opts.insert(opts.begin(), best);
        }
        for (bool flip : {false, true})
            for (int d : opts) {
                const int s = score(d, flip);
                if (s > best_score) {
                    best_score = s;
                    best = d;
                    best_flip = flip;
                }
            }
        c.designated[v] = best;
        if (best_flip) {
            mirror(c);
            diag.mirrored++;
        }
        if (best_score < static_cast<int>(need.size())) diag.adjacency_misses++;
    };

    // point intervals with flat image
    for (int i = 0; i < n; ++i) {
        const IntervalRecord& rec = ix(recs, i);
        if (rec.kind != Kind::netpoint || !R.flat(rec.va)) continue;
        const int v = rec.va;
        const VertexClass cls = R.classify(v);
        next.classes.push_back({v, cls});
        if (cls == VertexClass::nonterminal) {
            keep(i, Kind::netpoint, Origin::nonterminal);
            ix(kids, i)[0].born = rec.born;
            continue;
        }
        const Line& l = fits.get(k, v).line;
        const double tv = line_param(h.pt(v), l);
        double away = 0;  // sign of the allowed side for 1-sided vertices
        if (cls == VertexClass::one_sided) away = line_param(h.pt(R.partners.at(v)[0]), l) < tv ? 1.0 : -1.0;
        std::vector<std::pair<double, int>> side;
        for (int x : Vk1) {
            if (x == v || ix(R.in_vk, x) || !(dist(h.pt(x), h.pt(v)) < ball_next)) continue;
            const double t = line_param(h.pt(x), l) - tv;
            if (cls == VertexClass::one_sided && !(t * away > 0)) continue;
            if (ix(owner, x) != -1) {
                diag.claim_conflicts++;
                continue;
            }
            side.push_back({t, x});
        }
        const Origin o = cls == VertexClass::one_sided ? Origin::one_sided : Origin::two_sided;
        if (side.empty()) {
            keep(i, Kind::netpoint, o);
            ix(kids, i)[0].born = rec.born;
            continue;
        }
        side.push_back({0.0, v});
        std::sort(side.begin(), side.end());
        std::vector<int> ids;
        std::vector<Pair> edges;
        for (std::size_t j = 0; j < side.size(); ++j) {
            ids.push_back(side[j].second);
            if (j > 0) edges.push_back({side[j - 1].second, side[j].second});
        }
        for (int x : ids)
            if (x != v) ix(owner, x) = -3;
        for (const auto& e : edges) realized.insert(key(e.first, e.second));
        int first = -1;
        if (cls == VertexClass::two_sided) {
            const int lo = side.front().second, hi = side.back().second;
            int target = lex_less(h.pt(lo), h.pt(hi)) ? lo : hi;
            if (target == v) target = target == lo ? hi : lo;
            auto pos = std::find(ids.begin(), ids.end(), v) - ids.begin();
            first = target == ids.front() ? ids[static_cast<std::size_t>(pos - 1)] : ids[static_cast<std::size_t>(pos + 1)];
        }
        Composite c = composite_tour(h, ids, edges, v, {ids.begin(), ids.end()}, first);
        settle_center(c, i, v);
        for (auto& p : c.pieces)
            if (p.constant) p.kind = Kind::frozen;
        for (auto [id, d] : c.designated) ix(c.pieces, d).kind = Kind::netpoint;
        ix(kids, i) = place(c.pieces, rec.a, rec.b, k + 1, o, i);
        ix(done, i) = 1;
    }

    // point intervals with non-flat image
    std::vector<int> order;
    for (int i = 0; i < n; ++i)
        if (ix(recs, i).kind == Kind::netpoint && !R.flat(ix(recs, i).va)) order.push_back(i);
    if (ledger.seed != 0) std::shuffle(order.begin(), order.end(), R.rng);

    std::vector<std::vector<int>> vr(order.size());
    for (std::size_t r = 0; r < order.size(); ++r) {
        const int v = ix(recs, order[r]).va;
        next.classes.push_back({v, VertexClass::nonflat});
        vr[r].push_back(v);
        for (int x : Vk1) {
            if (x == v || ix(R.in_vk, x) || ix(owner, x) != -1 || !(dist(h.pt(x), h.pt(v)) < ball_next)) continue;
            ix(owner, x) = static_cast<int>(r);
            vr[r].push_back(x);
        }
    }
    std::map<int, int> own_vertex;  // non-flat V_k vertex -> its r
    for (std::size_t r = 0; r < order.size(); ++r) own_vertex[ix(recs, order[r]).va] = static_cast<int>(r);

    std::map<int, std::vector<Pair>> lnext;
    for (const auto& fp : flat_pairs(h, fits, R.alpha0, k + 1)) {
        const Pair e = key(fp.v, fp.w);
        for (int end : {e.first, e.second}) {
            auto& lst = lnext[end];
            if (std::find(lst.begin(), lst.end(), e) == lst.end()) lst.push_back(e);
        }
    }

    for (std::size_t r = 0; r < order.size(); ++r) {
        const int i = order[r];
        const IntervalRecord& rec = ix(recs, i);
        const int v = rec.va;
        const std::set<int> mine(vr[r].begin(), vr[r].end());
        std::set<Pair> Lr;
        for (int x : vr[r]) {
            auto it = lnext.find(x);
            if (it == lnext.end()) continue;
            for (const auto& e : it->second)
                if (!realized.count(e)) Lr.insert(e);
        }
        std::set<int> tilde(mine);
        for (const auto& e : Lr) {
            tilde.insert(e.first);
            tilde.insert(e.second);
        }
        if (tilde.size() == 1) {
            keep(i, Kind::netpoint, Origin::nonflat_point);
            ix(kids, i)[0].born = rec.born;
            continue;
        }
        Composite c = composite_tour(h, {tilde.begin(), tilde.end()}, {Lr.begin(), Lr.end()}, v, mine);
        settle_center(c, i, v);

        // the other end of an edge leaving V_r is toured by its own owner only
        // when that owner is another non-flat point interval
        auto owned_elsewhere = [&](int y) {
            if (ix(R.in_vk, y)) return own_vertex.count(y) > 0 && own_vertex.at(y) != static_cast<int>(r);
            return ix(owner, y) >= 0 && ix(owner, y) != static_cast<int>(r);
        };
        const int np = static_cast<int>(c.pieces.size());
        std::set<Pair> settled;
        for (int p = 0; p < np; ++p) {
            Proto& pc = ix(c.pieces, p);
            if (pc.constant) {
                pc.kind = Kind::frozen;
                continue;
            }
            if (pc.kind == Kind::bridge) continue;
            const bool in_a = mine.count(pc.from) > 0, in_b = mine.count(pc.to) > 0;
            if (in_a && in_b) continue;  // edge
            const int x = in_a ? pc.from : pc.to, y = in_a ? pc.to : pc.from;
            if (!owned_elsewhere(y)) {
                if (!settled.count(key(x, y))) diag.shared_edge_fallbacks++;
                settled.insert(key(x, y));
                continue;
            }
            const int d = c.designated.at(x);
            pc.kind = (std::abs(p - d) == 1 && !settled.count(key(x, y))) ? Kind::edge : Kind::bridge;
            if (pc.kind == Kind::edge) settled.insert(key(x, y));
        }
        for (auto [id, d] : c.designated)
            if (mine.count(id)) ix(c.pieces, d).kind = Kind::netpoint;
        ix(kids, i) = place(c.pieces, rec.a, rec.b, k + 1, Origin::nonflat_point, i);
        ix(done, i) = 1;
    }

    for (int i = 0; i < n; ++i) {
        if (!ix(done, i)) keep(i, ix(recs, i).kind, ix(recs, i).origin);
        for (auto& r : ix(kids, i)) next.records.push_back(r);
    }
    std::ostringstream msg;
    msg << "level " << k + 1 << ": " << next.records.size() << " intervals";
    if (diag.claim_conflicts) msg << ", " << diag.claim_conflicts << " claim conflicts";
    if (diag.shared_edge_fallbacks) msg << ", " << diag.shared_edge_fallbacks << " shared-edge fallbacks";
    if (diag.adjacency_misses) msg << ", " << diag.adjacency_misses << " adjacency misses";
    if (ledger.seed != 0) msg << ", seed " << ledger.seed;
    ledger.log.push_back(msg.str());
    return next;
}

std::vector<LevelState> run(const NetHierarchy& h, const LineFitTable& fits, const Params& prm,
                            ChoiceLedger& ledger, bool verify) {
    const int top = std::min(prm.depth, fits.levels() - 1);
    if (top < 0) throw BadParameter("no fitted levels");
    std::vector<LevelState> states;
    states.push_back(initialize(h, fits, prm, ledger));
    for (int k = 1; k <= top; ++k) states.push_back(refine(states.back(), h, fits, prm, ledger));
    if (verify)
        for (const auto& s : states) {
            const auto rep = check_properties(s, h, fits, prm, ledger);
            if (!rep.ok()) throw PropertyViolation("level " + std::to_string(s.k) + ": " + rep.first_failure());
        }
    return states;
}

bool PropertyReport::ok() const {
    return std::all_of(checks.begin(), checks.end(), [](const PropertyCheck& c) { return c.ok; });
}

bool PropertyReport::passed(const std::string& name) const {
    for (const auto& c : checks)
        if (c.name == name) return c.ok;
    return false;
}

std::string PropertyReport::first_failure() const {
    for (const auto& c : checks)
        if (!c.ok) return c.name + ": " + c.witness;
    return "";
}

double segment_distance(const Point& p0, const Point& p1, const Point& q0, const Point& q1) {
    const Point d1 = sub(p1, p0), d2 = sub(q1, q0), r = sub(p0, q0);
    const double a = dot(d1, d1), e = dot(d2, d2), f = dot(d2, r);
    double s = 0, t = 0;
    if (a <= 0 && e <= 0) return norm(r);
    if (a <= 0) {
        t = std::clamp(f / e, 0.0, 1.0);
    } else {
        const double c = dot(d1, r);
        if (e <= 0) {
            s = std::clamp(-c / a, 0.0, 1.0);
        } else {
            const double b = dot(d1, d2), den = a * e - b * b;
            s = den > 0 ? std::clamp((b * f - c * e) / den, 0.0, 1.0) : 0.0;
            t = (b * s + f) / e;
            if (t < 0) {
                t = 0;
                s = std::clamp(-c / a, 0.0, 1.0);
            } else if (t > 1) {
                t = 1;
                s = std::clamp((b - c) / a, 0.0, 1.0);
            }
        }
    }
    return dist(add(p0, scaled(d1, s)), add(q0, scaled(d2, t)));
}

int segment_contacts(const Point& p0, const Point& p1, const Point& q0, const Point& q1, double tol) {
    const double scale = std::max({norm(sub(p1, p0)), norm(sub(q1, q0)), 1.0});
    if (segment_distance(p0, p1, q0, q1) > tol * scale) return 0;
    const Point d1 = sub(p1, p0), d2 = sub(q1, q0);
    const double l1 = norm(d1), l2 = norm(d2);
    if (l1 == 0 || l2 == 0) return 1;
    const Point u = scaled(d1, 1.0 / l1);
    // parallel and within tolerance: measure the shared stretch along u
    const double c = std::abs(dot(u, d2)) / l2;
    if (c < 1 - 1e-12) return 1;
    if (dist_to_line(q0, Line{p0, u}) > tol * scale) return 0;
    const double s0 = dot(sub(q0, p0), u), s1 = dot(sub(q1, p0), u);
    const double lo = std::max(0.0, std::min(s0, s1)), hi = std::min(l1, std::max(s0, s1));
    return hi - lo > tol * scale ? 2 : 1;
}

PropertyReport check_properties(const LevelState& st, const NetHierarchy& h, const LineFitTable& fits,
                                const Params& prm, const ChoiceLedger& ledger) {
    PropertyReport rep;
    const auto& R = st.records;
    const int n = static_cast<int>(R.size());
    const int k = st.k;
    const double alpha0 = flat_threshold(prm, ledger);
    auto fail = [&](PropertyCheck& c, const std::string& w) {
        if (c.ok) c.witness = w;
        c.ok = false;
    };
    auto show = [](const IntervalRecord& r) {
        std::ostringstream o;
        o << to_string(r.kind) << (r.is_point() ? "[" : "(") << r.a << "," << r.b << (r.is_point() ? "]" : ")")
          << " -> " << r.va;
        if (r.is_segment()) o << "-" << r.vb;
        return o.str();
    };

    PropertyCheck p1{"P1", true, ""};
    if (R.empty() || R.front().a != 0.0 || R.back().b != 1.0) fail(p1, "records do not span [0,1]");
    for (int i = 0; i < n; ++i) {
        const auto& r = ix(R, i);
        if (!(r.a < r.b)) fail(p1, "degenerate " + show(r));
        if (r.is_point() != (i % 2 == 0)) fail(p1, "kinds do not alternate at " + show(r));
        if (i + 1 < n && r.b != ix(R, i + 1).a) fail(p1, "gap after " + show(r));
    }
    if (n % 2 == 0) fail(p1, "partition must start and end with point intervals");
    rep.checks.push_back(p1);

    PropertyCheck p2{"P2", true, ""};
    for (int i = 0; i < n; ++i) {
        const auto& r = ix(R, i);
        if (r.is_point() && r.va != r.vb) fail(p2, "non-constant " + show(r));
        if (r.is_segment()) {
            if (i > 0 && ix(R, i - 1).vb != r.va) fail(p2, "jump before " + show(r));
            if (i + 1 < n && ix(R, i + 1).va != r.vb) fail(p2, "jump after " + show(r));
        }
    }
    rep.checks.push_back(p2);

    PropertyCheck p3{"P3", true, ""};
    const double reach = 14.0 * h.astar() * h.scale(k);
    for (const auto& r : R)
        if (r.kind == Kind::edge && !(dist(h.pt(r.va), h.pt(r.vb)) < reach)) fail(p3, "long " + show(r));
    rep.checks.push_back(p3);

    PropertyCheck p4{"P4", true, ""};
    std::map<Pair, int> count;
    for (const auto& r : R)
        if (r.kind == Kind::edge) count[key(r.va, r.vb)]++;
    for (const auto& [e, c] : count)
        if (c != 2)
            fail(p4, "image " + std::to_string(e.first) + "-" + std::to_string(e.second) + " covered " +
                         std::to_string(c) + " times");
    std::vector<Pair> imgs;
    for (const auto& [e, c] : count) imgs.push_back(e);
    for (std::size_t x = 0; x < imgs.size() && p4.ok; ++x)
        for (std::size_t y = x + 1; y < imgs.size(); ++y) {
            const auto [a0, a1] = imgs[x];
            const auto [b0, b1] = imgs[y];
            const int shared = (a0 == b0) + (a0 == b1) + (a1 == b0) + (a1 == b1);
            const int c = segment_contacts(h.pt(a0), h.pt(a1), h.pt(b0), h.pt(b1));
            if (c > shared) {
                fail(p4, "images " + std::to_string(a0) + "-" + std::to_string(a1) + " and " + std::to_string(b0) +
                             "-" + std::to_string(b1) + " meet");
                break;
            }
        }
    rep.checks.push_back(p4);

    PropertyCheck p5{"P5", true, ""};
    if (k < fits.levels()) {
        std::set<Pair> directed, undirected;
        for (const auto& fp : flat_pairs(h, fits, alpha0, k)) {
            directed.insert({fp.v, fp.w});
            undirected.insert(key(fp.v, fp.w));
        }
        for (const auto& e : undirected)
            if (!count.count(e))
                fail(p5, "flat pair " + std::to_string(e.first) + "-" + std::to_string(e.second) + " not an edge image");
        for (const auto& r : R) {
            if (r.kind != Kind::edge) continue;
            for (auto [x, y] : {Pair{r.va, r.vb}, Pair{r.vb, r.va}}) {
                const NetFit& f = fits.get(k, x);
                if (f.valid && f.alpha < alpha0 && !directed.count({x, y})) fail(p5, "edge " + show(r) + " not flat");
            }
        }
    }
    rep.checks.push_back(p5);

    PropertyCheck p6{"P6", true, ""};
    std::map<int, int> ncount;
    for (const auto& r : R) {
        if (!r.is_point()) continue;
        if (!h.in_level(k, r.va)) fail(p6, show(r) + " outside V_k");
        if (r.kind == Kind::netpoint) ncount[r.va]++;
    }
    for (int v : ix(h.levels, k))
        if (ncount[v] != 1) fail(p6, "vertex " + std::to_string(v) + " has " + std::to_string(ncount[v]) + " N intervals");
    rep.checks.push_back(p6);

    PropertyCheck p7{"P7", true, ""};
    std::map<int, std::set<Pair>> at;
    for (const auto& r : R)
        if (r.kind == Kind::edge) {
            at[r.va].insert(key(r.va, r.vb));
            at[r.vb].insert(key(r.va, r.vb));
        }
    for (int j = 0; j < n; ++j) {
        const auto& J = ix(R, j);
        if (J.kind != Kind::netpoint || !at.count(J.va)) continue;
        for (const auto& e : at.at(J.va)) {
            bool found = false;
            for (int d : {j - 1, j + 1})
                if (d >= 0 && d < n && ix(R, d).kind == Kind::edge && key(ix(R, d).va, ix(R, d).vb) == e) found = true;
            if (!found)
                fail(p7, show(J) + " not adjacent to image " + std::to_string(e.first) + "-" + std::to_string(e.second));
        }
    }
    rep.checks.push_back(p7);
    return rep;
}

Point evaluate(const LevelState& st, const NetHierarchy& h, double x) {
    const auto& R = st.records;
    auto it = std::upper_bound(R.begin(), R.end(), x, [](double v, const IntervalRecord& r) { return v < r.a; });
    if (it != R.begin()) --it;
    const IntervalRecord& r = *it;
    if (r.is_point()) return h.pt(r.va);
    const double t = std::clamp((x - r.a) / (r.b - r.a), 0.0, 1.0);
    if (r.detour) {
        if (t <= 0.5) return lerp(h.pt(r.va), *r.detour, 2 * t);
        return lerp(*r.detour, h.pt(r.vb), 2 * t - 1);
    }
    return lerp(h.pt(r.va), h.pt(r.vb), t);
}

std::vector<std::pair<double, Point>> breakpoints(const LevelState& st, const NetHierarchy& h) {
    std::vector<std::pair<double, Point>> out;
    for (const auto& r : st.records) {
        if (out.empty() || out.back().first != r.a) out.push_back({r.a, h.pt(r.va)});
        if (r.detour) out.push_back({0.5 * (r.a + r.b), *r.detour});
        out.push_back({r.b, h.pt(r.vb)});
    }
    return out;
}

double sup_distance(const LevelState& a, const LevelState& b, const NetHierarchy& h) {
    std::vector<double> xs;
    for (const auto* s : {&a, &b})
        for (const auto& [x, p] : breakpoints(*s, h)) xs.push_back(x);
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
    double best = 0;
    for (double x : xs) best = std::max(best, dist(evaluate(a, h, x), evaluate(b, h, x)));
    return best;
}

}  // namespace htsp
