#include "htsp/nets.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace htsp {

bool NetHierarchy::in_level(int k, int id) const {
    const auto& L = levels[static_cast<std::size_t>(k)];
    return std::find(L.begin(), L.end(), id) != L.end();
}

bool NetsReport::ok() const {
    return std::all_of(checks.begin(), checks.end(), [](const NetsCheck& c) { return c.ok; });
}

std::string NetsReport::first_failure() const {
    for (const auto& c : checks)
        if (!c.ok) return c.property + " at level " + std::to_string(c.level) + ": " + c.witness;
    return {};
}

NetHierarchy build_nets(const std::vector<Point>& E, int depth, double ratio, bool farthest_first) {
    if (E.empty()) throw EmptyInput("build_nets: empty point set");
    if (!(ratio > 0 && ratio < 1)) throw BadParameter("ratio must lie in (0,1)");
    if (depth < 0) throw BadParameter("depth must be nonnegative");
    const std::size_t dim = E[0].size();
    for (const auto& p : E) {
        if (p.size() != dim) throw BadParameter("mixed point dimensions");
        for (double x : p)
            if (!std::isfinite(x)) throw BadParameter("non-finite coordinate");
    }

    NetHierarchy h;
    h.points = E;
    h.x0 = E[0];
    const double d = diameter(E);
    h.r0 = d > 0 ? d : 1.0;
    h.xi1 = h.xi2 = ratio;
    h.cstar = std::max(2.0, 1.0 / ratio);

    const int n = static_cast<int>(E.size());
    std::vector<char> admitted(E.size(), 0);
    // distance from each point to the admitted set, updated incrementally
    std::vector<double> gap(E.size(), std::numeric_limits<double>::infinity());
    auto admit = [&](int i, std::vector<int>& level) {
        admitted[static_cast<std::size_t>(i)] = 1;
        level.push_back(i);
        for (int j = 0; j < n; ++j)
            gap[static_cast<std::size_t>(j)] =
                std::min(gap[static_cast<std::size_t>(j)], dist(E[static_cast<std::size_t>(j)], E[static_cast<std::size_t>(i)]));
    };

    std::vector<int> current;
    double rho = 1.0;
    for (int k = 0; k <= depth; ++k) {
        const double sep = rho * h.r0;
        if (!farthest_first) {
            for (int i = 0; i < n; ++i)
                if (!admitted[static_cast<std::size_t>(i)] && gap[static_cast<std::size_t>(i)] >= sep) admit(i, current);
        } else {
            if (current.empty()) admit(0, current);
            while (true) {
                int best = -1;
                for (int i = 0; i < n; ++i) {
                    if (admitted[static_cast<std::size_t>(i)] || gap[static_cast<std::size_t>(i)] < sep) continue;
                    if (best < 0 || gap[static_cast<std::size_t>(i)] > gap[static_cast<std::size_t>(best)]) best = i;
                }
                if (best < 0) break;
                admit(best, current);
            }
        }
        h.levels.push_back(current);
        h.rho.push_back(rho);
        rho *= ratio;
    }
    return h;
}

NetsReport validate_nets(const NetHierarchy& h) {
    NetsReport rep;
    auto add = [&](const char* prop, int k, bool ok, std::string w) {
        rep.checks.push_back({prop, k, ok, ok ? std::string() : std::move(w)});
    };
    const int K = h.depth();
    for (int k = 0; k <= K; ++k) {
        const auto& Vk = h.levels[static_cast<std::size_t>(k)];
        // V0
        {
            bool ok = true;
            std::string w;
            if (k == 0 && std::abs(h.rho[0] - 1.0) > 1e-12) {
                ok = false;
                w = "rho_0 != 1";
            }
            if (k < K) {
                const double r = h.rho[static_cast<std::size_t>(k) + 1] / h.rho[static_cast<std::size_t>(k)];
                if (r < h.xi1 - 1e-12 || r > h.xi2 + 1e-12) {
                    ok = false;
                    w = "ratio " + std::to_string(r) + " outside [xi1, xi2]";
                }
            }
            add("V0", k, ok, w);
        }
        if (k == 0) {
            bool ok = true;
            std::string w;
            for (int id : Vk)
                if (!(dist(h.pt(id), h.x0) < h.cstar * h.r0)) {
                    ok = false;
                    w = "point " + std::to_string(id) + " outside B(x0, C* r0)";
                    break;
                }
            add("V1", k, ok, w);
        }
        if (k < K) {
            const auto& Vn = h.levels[static_cast<std::size_t>(k) + 1];
            bool ok = true;
            std::string w;
            for (int id : Vk)
                if (std::find(Vn.begin(), Vn.end(), id) == Vn.end()) {
                    ok = false;
                    w = "point " + std::to_string(id) + " missing from next level";
                    break;
                }
            add("V2", k, ok, w);
        }
        {
            bool ok = true;
            std::string w;
            const double sep = h.scale(k);
            for (std::size_t a = 0; a < Vk.size() && ok; ++a)
                for (std::size_t b = a + 1; b < Vk.size(); ++b)
                    if (Vk[a] == Vk[b] || dist(h.pt(Vk[a]), h.pt(Vk[b])) < sep * (1 - 1e-12)) {
                        ok = false;
                        w = "points " + std::to_string(Vk[a]) + "," + std::to_string(Vk[b]) + " too close";
                        break;
                    }
            add("V3", k, ok, w);
        }
        if (k < K) {
            const auto& Vn = h.levels[static_cast<std::size_t>(k) + 1];
            const double r = h.cstar * h.scale(k + 1);
            bool ok = true;
            std::string w;
            for (int id : Vn) {
                bool near = false;
                for (int c : Vk)
                    if (dist(h.pt(id), h.pt(c)) < r) {
                        near = true;
                        break;
                    }
                if (!near) {
                    ok = false;
                    w = "point " + std::to_string(id) + " has no parent";
                    break;
                }
            }
            add("V4", k + 1, ok, w);
        }
    }
    return rep;
}

LineFitTable fit_lines(const NetHierarchy& h, std::optional<FitMode> mode) {
    LineFitTable t;
    t.mode = mode.value_or(default_fit_mode(h.dim()));
    const double big = 30.0 * h.astar();
    for (int k = 0; k < h.depth(); ++k) {
        std::vector<NetFit> row(h.points.size());
        const auto& Vn = h.levels[static_cast<std::size_t>(k) + 1];
        for (int v : h.levels[static_cast<std::size_t>(k)]) {
            std::vector<Point> window;
            for (int x : Vn)
                if (dist(h.pt(x), h.pt(v)) <= big * h.scale(k)) window.push_back(h.pt(x));
            LineFit lf = minimax_line(window, t.mode);
            NetFit& f = row[static_cast<std::size_t>(v)];
            f.valid = true;
            f.line = lf.line;
            f.alpha = lf.max_dist / h.scale(k + 1);
            f.window = static_cast<int>(window.size());
        }
        t.at.push_back(std::move(row));
    }
    return t;
}

std::vector<int> order_points(const NetHierarchy& h, std::vector<int> ids, const Line& l) {
    std::stable_sort(ids.begin(), ids.end(), [&](int a, int b) {
        const double ta = line_param(h.pt(a), l), tb = line_param(h.pt(b), l);
        if (ta != tb) return ta < tb;
        return lex_less(h.pt(a), h.pt(b));
    });
    return ids;
}

std::vector<Point> order_points(std::vector<Point> pts, const Line& l) {
    std::stable_sort(pts.begin(), pts.end(), [&](const Point& a, const Point& b) {
        const double ta = line_param(a, l), tb = line_param(b, l);
        if (ta != tb) return ta < tb;
        return lex_less(a, b);
    });
    return pts;
}

std::vector<FlatPair> flat_pairs(const NetHierarchy& h, const LineFitTable& fits, double alpha0, int k) {
    std::vector<FlatPair> out;
    if (k >= fits.levels()) return out;
    const double reach = 14.0 * h.astar() * h.scale(k);
    const auto& Vk = h.levels[static_cast<std::size_t>(k)];
    for (int v : Vk) {
        const NetFit& f = fits.get(k, v);
        if (!f.valid || !(f.alpha < alpha0)) continue;
        const double tv = line_param(h.pt(v), f.line);
        int left = -1, right = -1;
        double tl = -std::numeric_limits<double>::infinity(), tr = std::numeric_limits<double>::infinity();
        for (int w : Vk) {
            if (w == v || !(dist(h.pt(w), h.pt(v)) < reach)) continue;
            const double t = line_param(h.pt(w), f.line) - tv;
            if (t > 0 && (t < tr || (t == tr && lex_less(h.pt(w), h.pt(right))))) {
                tr = t;
                right = w;
            }
            if (t < 0 && (t > tl || (t == tl && lex_less(h.pt(w), h.pt(left))))) {
                tl = t;
                left = w;
            }
        }
        if (left >= 0) out.push_back({k, v, left, Side::left});
        if (right >= 0) out.push_back({k, v, right, Side::right});
    }
    return out;
}

std::vector<int> between_points(const NetHierarchy& h, const LineFitTable& fits, const FlatPair& fp) {
    const NetFit& f = fits.get(fp.k, fp.v);
    const double reach = 14.0 * h.astar() * h.scale(fp.k);
    const double tv = line_param(h.pt(fp.v), f.line), tw = line_param(h.pt(fp.w), f.line);
    const double lo = std::min(tv, tw), hi = std::max(tv, tw);
    std::vector<int> ids;
    for (int x : h.levels[static_cast<std::size_t>(fp.k) + 1]) {
        if (x == fp.v || x == fp.w) {
            ids.push_back(x);
            continue;
        }
        if (!(dist(h.pt(x), h.pt(fp.v)) < reach)) continue;
        const double t = line_param(h.pt(x), f.line);
        if (t >= lo && t <= hi) ids.push_back(x);
    }
    Line l = f.line;
    if (tw < tv) l.dir = scaled(l.dir, -1.0);
    return order_points(h, ids, l);
}

double chain_excess(const std::vector<Point>& chain, double s) {
    if (chain.size() < 2) return 0.0;
    const double base = dist(chain.front(), chain.back());
    double sum = 0;
    for (std::size_t i = 0; i + 1 < chain.size(); ++i) sum += std::pow(dist(chain[i], chain[i + 1]), s);
    return std::max(sum - std::pow(base, s), 0.0) / std::pow(base, s);
}

double variation_excess(const NetHierarchy& h, const LineFitTable& fits, const FlatPair& fp, double s,
                        double alpha0) {
    const auto pairs = flat_pairs(h, fits, alpha0, fp.k);
    const bool known = std::any_of(pairs.begin(), pairs.end(),
                                   [&](const FlatPair& q) { return q.v == fp.v && q.w == fp.w; });
    if (!known) throw PairNotFlat("(" + std::to_string(fp.v) + "," + std::to_string(fp.w) + ") at level " +
                                  std::to_string(fp.k));
    std::vector<Point> chain;
    for (int id : between_points(h, fits, fp)) chain.push_back(h.pt(id));
    return chain_excess(chain, s);
}

double tube_coefficient(double alpha, double s, double cstar, double xi1, double xi2) {
    const double t = xi1 / (14.0 * cstar / (1.0 - xi2));
    return std::pow(1.0 + 3.0 * alpha * alpha - t, s) + std::pow(t, s);
}

double tube_threshold(double s, double cstar, double xi1, double xi2) {
    if (!(s > 1)) throw NoRoot("tube control needs s > 1");
    if (!(cstar >= 1 && xi1 > 0 && xi1 <= xi2 && xi2 < 1)) throw NoRoot("degenerate net parameters");
    auto A = [&](double a) { return tube_coefficient(a, s, cstar, xi1, xi2); };
    if (!(A(0.0) < 1.0)) throw NoRoot("A_0 >= 1");
    double lo = 0.0, hi = 0.25;
    if (A(hi) < 1.0) return 1.0 / 16.0;
    while (hi - lo > 1e-13) {
        const double mid = 0.5 * (lo + hi);
        (A(mid) < 1.0 ? lo : hi) = mid;
    }
    return std::min(lo, 1.0 / 16.0);
}

double alpha_one(double cstar, double xi1, double xi2) {
    const double astar = cstar / (1.0 - xi2);
    return std::min(1.0 / 16.0, std::sqrt(xi1 / (42.0 * astar)));
}

double default_alpha0(double s, double cstar, double xi1, double xi2) {
    const double a1 = alpha_one(cstar, xi1, xi2);
    if (s > 1) return std::min(tube_threshold(s, cstar, xi1, xi2), a1);
    return a1;
}

Params default_params(const NetHierarchy& h, double s, int depth) {
    Params p;
    p.s = s;
    p.depth = depth;
    p.alpha0 = default_alpha0(s, h.cstar, h.xi1, h.xi2);
    return p;
}

namespace {

template <class Keep>
SSumReport sum_impl(const NetHierarchy& h, const LineFitTable& fits, const Params& prm, int from, Keep keep) {
    SSumReport r;
    for (int k = 0; k < fits.levels() && k < h.depth(); ++k) {
        double ex = 0, nf = 0;
        if (k >= from) {
            const double rs = std::pow(h.rho[static_cast<std::size_t>(k)], prm.s);
            for (const auto& fp : flat_pairs(h, fits, prm.alpha0, k)) {
                if (!keep(fp.v) || !keep(fp.w)) continue;
                std::vector<Point> chain;
                for (int id : between_points(h, fits, fp)) chain.push_back(h.pt(id));
                ex += chain_excess(chain, prm.s) * rs;
            }
            for (int v : h.levels[static_cast<std::size_t>(k)])
                if (keep(v) && fits.get(k, v).alpha >= prm.alpha0) nf += rs;
        }
        r.excess.push_back(ex);
        r.nonflat.push_back(nf);
        r.total += ex + nf;
    }
    return r;
}

}  // namespace

SSumReport s_sum(const NetHierarchy& h, const LineFitTable& fits, const Params& prm) {
    return sum_impl(h, fits, prm, 0, [](int) { return true; });
}

double carleson_sum(const NetHierarchy& h, const LineFitTable& fits, const Params& prm, int j, int w,
                    double lambda) {
    const double r = lambda * h.scale(j);
    const Point& c = h.pt(w);
    return sum_impl(h, fits, prm, j, [&](int id) { return dist(h.pt(id), c) < r; }).total;
}

}  // namespace htsp
