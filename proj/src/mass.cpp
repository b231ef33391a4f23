#include "htsp/mass.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace htsp {

namespace {

template <class V>
auto& ix(V& v, int i) {
    return v[static_cast<std::size_t>(i)];
}

double power(double d, double s) { return d > 0 ? std::pow(d, s) : 0.0; }

MassTable skeleton(const std::vector<LevelState>& states, double s, int depth) {
    MassTable t;
    t.s = s;
    t.depth = depth;
    for (int k = 0; k <= depth; ++k) t.mass.emplace_back(ix(states, k).records.size(), 0.0);
    return t;
}

bool has_future(const LevelState& st) {
    for (const auto& r : st.records)
        if (r.kind == Kind::edge || r.kind == Kind::netpoint) return true;
    return false;
}

}  // namespace

double image_diam(const IntervalRecord& r, const NetHierarchy& h) {
    if (r.is_point()) return 0.0;
    const Point& p = h.pt(r.va);
    const Point& q = h.pt(r.vb);
    double d = dist(p, q);
    if (r.detour) d = std::max({d, dist(p, *r.detour), dist(*r.detour, q)});
    return d;
}

std::vector<std::vector<int>> children(const std::vector<LevelState>& states, int k) {
    std::vector<std::vector<int>> out(ix(states, k).records.size());
    const auto& next = ix(states, k + 1).records;
    for (int j = 0; j < static_cast<int>(next.size()); ++j) {
        const int p = ix(next, j).parent;
        if (p >= 0 && p < static_cast<int>(out.size())) ix(out, p).push_back(j);
    }
    return out;
}

double phantom_constant(double s, double cstar, double xi2) {
    return 2.0 * std::pow(1.1 * cstar, s) / (1.0 - std::pow(xi2, s));
}

MassTable compute_mass(const std::vector<LevelState>& states, const NetHierarchy& h, double s) {
    if (states.empty()) throw EmptyInput("no levels to weigh");
    const int m = static_cast<int>(states.size()) - 1;
    MassTable t = skeleton(states, s, m);
    for (int k = m; k >= 0; --k) {
        const auto& recs = ix(states, k).records;
        const auto kids = k < m ? children(states, k) : std::vector<std::vector<int>>{};
        for (int i = 0; i < static_cast<int>(recs.size()); ++i) {
            double here = power(image_diam(ix(recs, i), h), s);
            if (k < m) {
                double sum = 0;
                for (int j : ix(kids, i)) sum += ix(ix(t.mass, k + 1), j);
                here = std::max(here, sum);
            }
            ix(ix(t.mass, k), i) = here;
        }
    }
    for (double v : t.mass[0]) t.total += v;
    t.truncated = has_future(states.back());
    t.phantom_p = phantom_constant(s, h.cstar, h.xi2);
    return t;
}

MassTable brute_force_mass(const std::vector<LevelState>& states, const NetHierarchy& h, double s,
                           int max_depth) {
    if (max_depth > 4) throw DepthTooLarge("tree enumeration is limited to depth 4, asked for " +
                                           std::to_string(max_depth));
    if (states.empty()) throw EmptyInput("no levels to weigh");
    const int m = std::min(max_depth, static_cast<int>(states.size()) - 1);
    MassTable t = skeleton(states, s, m);

    // every boundary sum reachable by a finite tree rooted at (k, i)
    std::vector<std::vector<std::set<double>>> sums(static_cast<std::size_t>(m) + 1);
    for (int k = m; k >= 0; --k) {
        const auto& recs = ix(states, k).records;
        const auto kids = k < m ? children(states, k) : std::vector<std::vector<int>>{};
        auto& row = ix(sums, k);
        row.resize(recs.size());
        for (int i = 0; i < static_cast<int>(recs.size()); ++i) {
            std::set<double> opts{power(image_diam(ix(recs, i), h), s)};
            if (k < m) {
                std::set<double> acc{0.0};
                for (int j : ix(kids, i)) {
                    std::set<double> grown;
                    for (double a : acc)
                        for (double b : ix(ix(sums, k + 1), j)) grown.insert(a + b);
                    if (grown.size() > 2000000) throw DepthTooLarge("too many trees to enumerate");
                    acc.swap(grown);
                }
                opts.insert(acc.begin(), acc.end());
            }
            ix(ix(t.mass, k), i) = *opts.rbegin();
            ix(row, i) = std::move(opts);
        }
        if (k + 1 <= m) ix(sums, k + 1).clear();
    }
    for (double v : t.mass[0]) t.total += v;
    t.truncated = has_future(ix(states, m));
    t.phantom_p = phantom_constant(s, h.cstar, h.xi2);
    return t;
}

void assign_phantom(MassTable& t, const std::vector<LevelState>& states, const NetHierarchy& h) {
    t.phantom.assign(t.mass.size(), {});
    for (int k = 0; k + 1 < static_cast<int>(t.mass.size()) && k + 1 < static_cast<int>(states.size()); ++k) {
        const auto& cls = ix(states, k + 1).classes;
        const double unit = t.phantom_p * power(h.scale(k), t.s);
        const auto& recs = ix(states, k).records;
        for (int i = 0; i < static_cast<int>(recs.size()); ++i) {
            const auto& r = ix(recs, i);
            if (r.kind != Kind::netpoint) continue;
            for (const auto& [v, c] : cls)
                if (v == r.va && (c == VertexClass::one_sided || c == VertexClass::two_sided))
                    ix(t.phantom, k).push_back({i, c, c == VertexClass::two_sided ? 2 * unit : unit});
        }
    }
}

MassBoundReport mass_bound_report(const MassTable& t, const NetHierarchy& h, const LineFitTable& fits,
                                  const Params& prm) {
    MassBoundReport rep;
    rep.mass = t.total;
    rep.rhs = power(h.r0, prm.s) * (1.0 + s_sum(h, fits, prm).total);
    rep.ratio = rep.rhs > 0 ? rep.mass / rep.rhs : 0.0;
    return rep;
}

CoverReport hausdorff_lower_check(const std::vector<LevelState>& states, const MassTable& t,
                                  const NetHierarchy& h) {
    CoverReport rep;
    const int m = t.depth;
    const double s = t.s;
    const double next = m + 1 < static_cast<int>(h.rho.size()) ? ix(h.rho, m + 1) : h.xi2 * ix(h.rho, m);
    const auto& vm = ix(h.levels, m);
    // a single point has zero measure; the cover of one ball is not charged
    if (vm.size() > 1) rep.cover_sum = static_cast<double>(vm.size()) *
                                       power(2 * h.cstar * next * h.r0 / (1 - h.xi2), s);
    rep.constant = power(2 * h.cstar * h.xi2 / (1 - h.xi2), s);
    for (const auto& r : ix(states, m).records) rep.level_sum += power(image_diam(r, h), s);
    rep.mass = t.total;
    const double tol = 1e-9 * std::max(1.0, rep.cover_sum);
    rep.holds = rep.cover_sum <= rep.constant * rep.level_sum + tol && rep.level_sum <= rep.mass + tol;
    return rep;
}

SpecialBridgeReport special_bridge_check(const std::vector<LevelState>& states) {
    SpecialBridgeReport rep;
    const int m = static_cast<int>(states.size()) - 1;
    // contiguous child ranges per level
    std::vector<std::vector<std::pair<int, int>>> span(static_cast<std::size_t>(std::max(m, 0)));
    for (int k = 0; k < m; ++k) {
        const auto kids = children(states, k);
        for (const auto& c : kids)
            ix(span, k).push_back(c.empty() ? std::pair{-1, -1} : std::pair{c.front(), c.back()});
    }
    for (int l = 0; l < m; ++l) {
        const auto& recs = ix(states, l).records;
        for (int j = 0; j < static_cast<int>(recs.size()); ++j) {
            if (ix(recs, j).is_point()) continue;
            int lo = j, hi = j, count = 0;
            for (int k = l + 1; k <= m && lo >= 0; ++k) {
                const int nlo = ix(ix(span, k - 1), lo).first;
                const int nhi = ix(ix(span, k - 1), hi).second;
                lo = nlo;
                hi = nhi;
                if (lo < 0) break;
                const auto& cur = ix(states, k).records;
                const int n = static_cast<int>(cur.size());
                auto counts = [&](int i, int outside) {
                    const auto& r = ix(cur, i);
                    return r.kind == Kind::bridge && r.special && r.born == k && outside >= 0 && outside < n &&
                           ix(cur, outside).kind == Kind::netpoint;
                };
                if (counts(lo, lo - 1)) ++count;
                if (hi != lo && counts(hi, hi + 1)) ++count;
            }
            if (count > rep.max_per_interval) {
                rep.max_per_interval = count;
                rep.worst_level = l;
                rep.worst_record = j;
            }
        }
    }
    return rep;
}

MassLemmaReport check_mass_lemmas(const MassTable& t, const std::vector<LevelState>& states,
                                  const NetHierarchy& h, double tol) {
    MassLemmaReport rep;
    auto fail = [&](bool& flag, int k, int i, const char* what) {
        if (flag) {
            std::ostringstream o;
            o << what << " at level " << k << ", record " << i;
            if (rep.witness.empty()) rep.witness = o.str();
        }
        flag = false;
    };
    for (int k = 0; k <= t.depth; ++k) {
        const auto& recs = ix(states, k).records;
        const auto kids = k < t.depth ? children(states, k) : std::vector<std::vector<int>>{};
        for (int i = 0; i < static_cast<int>(recs.size()); ++i) {
            const auto& r = ix(recs, i);
            const double M = ix(ix(t.mass, k), i);
            const double slack = tol * std::max(1.0, M);
            if (r.kind == Kind::bridge && std::abs(M - power(image_diam(r, h), t.s)) > slack)
                fail(rep.bridge_exact, k, i, "bridge mass differs from diam^s");
            if (r.kind == Kind::frozen && M != 0.0) fail(rep.frozen_zero, k, i, "frozen mass is not zero");
            if (k == t.depth) continue;
            double sum = 0;
            for (int j : ix(kids, i)) sum += ix(ix(t.mass, k + 1), j);
            if (M < sum - slack) fail(rep.superadditive, k, i, "mass below the children's sum");
            if (ix(kids, i).size() == 1) {
                const int j = ix(kids, i)[0];
                const auto& c = ix(ix(states, k + 1).records, j);
                if (c.a == r.a && c.b == r.b && std::abs(ix(ix(t.mass, k + 1), j) - M) > slack)
                    fail(rep.persistent, k, i, "persisting interval changed mass");
            }
        }
    }
    return rep;
}

}  // namespace htsp
