#include "htsp/fractals.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <queue>
#include <random>
#include <set>
#include <unordered_map>

#include "htsp/errors.hpp"

namespace htsp {

namespace {

Point left_normal(const Point& d) { return {-d[1], d[0]}; }

Point apex(const Point& a, const Point& b, double height) {
    const Point d = sub(b, a);
    return add(lerp(a, b, 0.5), scaled(left_normal(d), height));
}

// Dedupes points on a fine lattice so shared corners become one vertex.
class PointIndex {
public:
    explicit PointIndex(Sample& s) : s_(s) {}
    int operator()(const Point& p) {
        std::vector<std::int64_t> key;
        key.reserve(p.size());
        for (double x : p) key.push_back(std::llround(std::ldexp(x, 36)));
        auto [it, fresh] = ids_.emplace(key, static_cast<int>(s_.points.size()));
        if (fresh) s_.points.push_back(p);
        return it->second;
    }

private:
    Sample& s_;
    std::map<std::vector<std::int64_t>, int> ids_;
};

void add_segment(Sample& s, std::set<std::pair<int, int>>& seen, int a, int b) {
    if (a == b) return;
    const auto key = std::minmax(a, b);
    if (seen.insert(key).second) s.segments.push_back(key);
}

}  // namespace

// ---- snowflake ---------------------------------------------------------------

Point Snowflake::at(double t) const {
    t = std::clamp(t, 0.0, 1.0);
    const double x = t * static_cast<double>(vertices.size() - 1);
    const auto i = std::min(static_cast<std::size_t>(x), vertices.size() - 2);
    return lerp(vertices[i], vertices[i + 1], x - static_cast<double>(i));
}

double Snowflake::length() const {
    double len = 0;
    for (std::size_t i = 0; i + 1 < vertices.size(); ++i) len += dist(vertices[i], vertices[i + 1]);
    return len;
}

Sample Snowflake::sample() const {
    Sample s;
    s.points = vertices;
    for (std::size_t i = 0; i + 1 < vertices.size(); ++i)
        s.segments.emplace_back(static_cast<int>(i), static_cast<int>(i + 1));
    return s;
}

Snowflake snowflake(const std::vector<double>& p_seq, int depth) {
    if (depth < 0) throw BadParameter("depth must be nonnegative");
    if (depth > 11) throw DepthTooLarge("snowflake depth above 11");
    if (p_seq.empty() && depth > 0) throw BadParameter("empty parameter sequence");
    Snowflake f;
    f.depth = depth;
    f.vertices = {{0.0, 0.0}, {1.0, 0.0}};
    for (int k = 0; k < depth; ++k) {
        const double p = p_seq[std::min(static_cast<std::size_t>(k), p_seq.size() - 1)];
        if (!(p >= 0.25 && p < 0.5)) throw BadParameter("snowflake parameter outside [1/4, 1/2)");
        f.p.push_back(p);
        const double h = std::sqrt(p - 0.25);
        std::vector<Point> next;
        next.reserve(4 * f.vertices.size());
        for (std::size_t i = 0; i + 1 < f.vertices.size(); ++i) {
            const Point& a = f.vertices[i];
            const Point& b = f.vertices[i + 1];
            next.push_back(a);
            next.push_back(lerp(a, b, p));
            next.push_back(apex(a, b, h));
            next.push_back(lerp(a, b, 1 - p));
        }
        next.push_back(f.vertices.back());
        f.vertices = std::move(next);
    }
    return f;
}

Rational snowflake_length_exact(const std::vector<Rational>& p_seq, int depth) {
    if (depth < 0) throw BadParameter("depth must be nonnegative");
    if (p_seq.empty() && depth > 0) throw BadParameter("empty parameter sequence");
    __int128 num = 1, den = 1;
    for (int k = 0; k < depth; ++k) {
        const Rational& p = p_seq[std::min(static_cast<std::size_t>(k), p_seq.size() - 1)];
        if (p.den <= 0 || 4 * p.num < p.den || 2 * p.num >= p.den)
            throw BadParameter("snowflake parameter outside [1/4, 1/2)");
        num *= 4 * p.num;
        den *= p.den;
        const auto g = std::gcd(static_cast<std::int64_t>(num % std::numeric_limits<std::int64_t>::max()),
                                static_cast<std::int64_t>(den % std::numeric_limits<std::int64_t>::max()));
        if (g > 1 && num % g == 0 && den % g == 0) {
            num /= g;
            den /= g;
        }
        if (num > std::numeric_limits<std::int64_t>::max() || den > std::numeric_limits<std::int64_t>::max())
            throw BadParameter("exact length overflows 64 bits");
    }
    Rational r{static_cast<std::int64_t>(num), static_cast<std::int64_t>(den)};
    const auto g = std::gcd(r.num, r.den);
    r.num /= g;
    r.den /= g;
    return r;
}

// ---- sharpness nets ----------------------------------------------------------

double SharpnessNets::rho(int k) const {
    if (k == 0) return 1.0;
    return std::exp2(-k / s) * std::pow((k + 1.0 + n0) / (2.0 + n0), q);
}

double SharpnessNets::bump_at(int k) const {
    const double r = rho(k + 1) / rho(k);
    return std::sqrt(r * r - 0.25);
}

double SharpnessNets::tau_geometric(int k) const {
    Point a{0, 0}, b{1, 0};
    for (int j = 0; j < k; ++j) b = apex(a, b, bump_at(j));
    const Point m = apex(a, b, bump_at(k));
    const double base = std::pow(dist(a, b), s);
    return (std::pow(dist(a, m), s) + std::pow(dist(m, b), s) - base) / base;
}

double SharpnessNets::tau_closed(int k) const {
    const double hi = std::pow(k + 2.0 + n0, s * q), lo = std::pow(k + 1.0 + n0, s * q);
    return 2 * (hi - lo) / hi;
}

SharpnessNets sharpness_nets(double s, double p, double q, int n0, int depth) {
    if (!(s > 1) || !(p > 1)) throw BadParameter("need s > 1 and p > 1");
    if (!(q > 0) || !(q < std::min(1 / s, (p - 1) / s))) throw BadParameter("need 0 < q < min(1/s, (p-1)/s)");
    if (n0 < 0) throw BadParameter("n0 must be nonnegative");
    if (depth < 0) throw BadParameter("depth must be nonnegative");
    if (depth > 20) throw DepthTooLarge("sharpness nets deeper than 20");
    SharpnessNets n;
    n.s = s;
    n.p = p;
    n.q = q;
    n.n0 = n0;
    // the ratio decreases in k, so the first two steps decide the bump range
    for (int k = 0; k < std::max(depth, 2); ++k) {
        const double r = n.rho(k + 1) / n.rho(k);
        if (!(r * r >= 0.25 && r * r < 0.5)) throw BadParameter("bump parameter outside [1/4, 1/2); raise n0");
    }
    n.h.cstar = 2;
    n.h.xi1 = std::exp2(-1 / s);
    n.h.xi2 = (1 + n.h.xi1) / 2;
    n.h.r0 = 1;
    n.h.x0 = {0.0, 0.0};
    n.h.points = {{0.0, 0.0}, {1.0, 0.0}};
    n.h.levels = {{0, 1}};
    n.h.rho = {1.0};
    for (int k = 0; k < depth; ++k) {
        const double b = n.bump_at(k);
        n.bump.push_back(b);
        const auto& prev = n.h.levels.back();
        std::vector<int> next;
        for (std::size_t i = 0; i + 1 < prev.size(); ++i) {
            next.push_back(prev[i]);
            next.push_back(static_cast<int>(n.h.points.size()));
            n.h.points.push_back(apex(n.h.pt(prev[i]), n.h.pt(prev[i + 1]), b));
        }
        next.push_back(prev.back());
        n.h.levels.push_back(std::move(next));
        n.h.rho.push_back(n.rho(k + 1));
    }
    return n;
}

SharpnessSums sharpness_sums(const SharpnessNets& nets, int levels) {
    SharpnessSums out;
    double pw = 0, pl = 0;
    for (int k = 0; k < levels; ++k) {
        const double tau = nets.tau_geometric(k);
        const double w = std::exp2(k) * std::pow(nets.rho(k), nets.s);
        pw += std::pow(tau, nets.p) * w;
        pl += tau * w;
        out.powered.push_back(pw);
        out.plain.push_back(pl);
    }
    return out;
}

// ---- Sierpinski-type sets --------------------------------------------------

std::int64_t skeleton_cube_count(int N, int m, std::int64_t n) {
    if (N < 1 || m < 0 || m > N || n < 2) throw BadParameter("need N >= 1, 0 <= m <= N, n >= 2");
    // a cube meets the m-skeleton iff at least N - m of its indices are 0 or n - 1
    std::int64_t total = 0;
    for (int j = N - m; j <= N; ++j) {
        std::int64_t binom = 1;
        for (int i = 0; i < j; ++i) binom = binom * (N - i) / (i + 1);
        std::int64_t term = binom;
        for (int i = 0; i < j; ++i) term *= 2;
        for (int i = 0; i < N - j; ++i) term *= n - 2;
        total += term;
    }
    return total;
}

SierpinskiChoice sierpinski_choice(int N, double s) {
    if (N < 2 || !(s > 1) || s > N) throw BadParameter("need N >= 2 and 1 < s <= N");
    SierpinskiChoice c;
    c.N = N;
    c.s = s;
    const bool integral = s == std::floor(s);
    if (integral && static_cast<int>(s) == N) {
        c.m = N;
        c.n = 2;
        c.pieces = std::int64_t{1} << N;
        return c;
    }
    if (integral) {
        c.m = static_cast<int>(s) - 1;
        for (std::int64_t n = 3; n < 100000; ++n) {
            const auto full = static_cast<std::int64_t>(std::llround(std::pow(static_cast<double>(n), s)));
            if (skeleton_cube_count(N, c.m, n) < full) {
                c.n = n;
                c.pieces = full;
                return c;
            }
        }
        throw NoValidN("no grid size fits the skeleton");
    }
    c.m = static_cast<int>(std::floor(s));
    for (std::int64_t n = 3; n < 100000; ++n) {
        const double P = static_cast<double>(skeleton_cube_count(N, c.m, n));
        const double ns = std::pow(static_cast<double>(n), s);
        if (ns - std::pow(static_cast<double>(n - 2), s) < P && P < ns - 1) {
            c.n = n;
            c.pieces = static_cast<std::int64_t>(P);
            // P n^-s + lambda^s = 1, bisection on (1/n, 1 - 2/n)
            auto g = [&](double l) { return P / ns + std::pow(l, s) - 1; };
            double lo = 1.0 / static_cast<double>(n), hi = 1 - 2.0 / static_cast<double>(n);
            for (int it = 0; it < 200; ++it) {
                const double mid = 0.5 * (lo + hi);
                (g(mid) < 0 ? lo : hi) = mid;
            }
            c.lambda = 0.5 * (lo + hi);
            c.residual = std::abs(g(c.lambda));
            return c;
        }
    }
    throw NoValidN("no grid size satisfies the counting window");
}

namespace {

struct Similarity {
    Point offset;
    double scale;
};

std::vector<std::vector<std::int64_t>> grid_cells(int N, std::int64_t n) {
    std::vector<std::vector<std::int64_t>> out;
    std::vector<std::int64_t> idx(static_cast<std::size_t>(N), 0);
    while (true) {
        out.push_back(idx);
        int d = 0;
        while (d < N && ++idx[static_cast<std::size_t>(d)] == n) idx[static_cast<std::size_t>(d++)] = 0;
        if (d == N) break;
    }
    return out;
}

int boundary_indices(const std::vector<std::int64_t>& c, std::int64_t n) {
    int b = 0;
    for (auto x : c) b += x == 0 || x == n - 1;
    return b;
}

std::vector<Similarity> sierpinski_maps(const SierpinskiChoice& c) {
    const int N = c.N;
    const double inv = 1.0 / static_cast<double>(c.n);
    std::vector<Similarity> maps;
    auto cube_map = [&](const std::vector<std::int64_t>& idx) {
        Point off;
        for (auto x : idx) off.push_back(static_cast<double>(x) * inv);
        maps.push_back({off, inv});
    };
    const auto cells = grid_cells(N, c.n);
    if (c.m == N) {
        for (const auto& idx : cells) cube_map(idx);
        return maps;
    }
    std::set<std::vector<std::int64_t>> chosen;
    for (const auto& idx : cells)
        if (boundary_indices(idx, c.n) >= N - c.m) chosen.insert(idx);
    if (c.lambda > 0) {
        for (const auto& idx : chosen) cube_map(idx);
        maps.push_back({Point(static_cast<std::size_t>(N), inv), c.lambda});
        return maps;
    }
    // integral s < N: grow the skeleton cubes by face neighbours until n^s cubes are chosen
    std::queue<std::vector<std::int64_t>> frontier;
    for (const auto& idx : chosen) frontier.push(idx);
    while (static_cast<std::int64_t>(chosen.size()) < c.pieces && !frontier.empty()) {
        auto cur = frontier.front();
        frontier.pop();
        for (int d = 0; d < N && static_cast<std::int64_t>(chosen.size()) < c.pieces; ++d)
            for (int step : {-1, 1}) {
                auto nb = cur;
                nb[static_cast<std::size_t>(d)] += step;
                if (nb[static_cast<std::size_t>(d)] < 0 || nb[static_cast<std::size_t>(d)] >= c.n) continue;
                if (chosen.insert(nb).second) frontier.push(nb);
                if (static_cast<std::int64_t>(chosen.size()) == c.pieces) break;
            }
    }
    for (const auto& idx : chosen) cube_map(idx);
    return maps;
}

}  // namespace

SierpinskiSet sierpinski_like(int N, double s, int depth) {
    if (depth < 0) throw BadParameter("depth must be nonnegative");
    SierpinskiSet out;
    out.choice = sierpinski_choice(N, s);
    const auto maps = sierpinski_maps(out.choice);
    const double cubes = std::pow(static_cast<double>(maps.size()), depth);
    if (cubes * std::exp2(N) > 4e6) throw DepthTooLarge("too many cubes at this depth");

    std::vector<Similarity> level{{Point(static_cast<std::size_t>(N), 0.0), 1.0}};
    for (int k = 0; k < depth; ++k) {
        std::vector<Similarity> next;
        next.reserve(level.size() * maps.size());
        for (const auto& w : level)
            for (const auto& m : maps) next.push_back({add(w.offset, scaled(m.offset, w.scale)), w.scale * m.scale});
        level = std::move(next);
    }
    PointIndex index(out.sample);
    std::set<std::pair<int, int>> seen;
    const int corners = 1 << N;
    for (const auto& w : level) {
        std::vector<int> ids(static_cast<std::size_t>(corners));
        for (int c = 0; c < corners; ++c) {
            Point p = w.offset;
            for (int d = 0; d < N; ++d)
                if (c >> d & 1) p[static_cast<std::size_t>(d)] += w.scale;
            ids[static_cast<std::size_t>(c)] = index(p);
        }
        for (int c = 0; c < corners; ++c)
            for (int d = 0; d < N; ++d)
                if (!(c >> d & 1))
                    add_segment(out.sample, seen, ids[static_cast<std::size_t>(c)],
                                ids[static_cast<std::size_t>(c | 1 << d)]);
    }
    return out;
}

namespace {

// Normal of the hyperplane through N points (Gram-Schmidt against their differences).
std::optional<Point> facet_normal(const std::vector<const Point*>& pts) {
    const std::size_t n = pts[0]->size();
    std::vector<Point> basis;
    for (std::size_t i = 1; i < pts.size(); ++i) {
        Point d = sub(*pts[i], *pts[0]);
        for (const auto& b : basis) d = sub(d, scaled(b, dot(d, b)));
        const double len = norm(d);
        if (len < 1e-12) return std::nullopt;
        basis.push_back(scaled(d, 1 / len));
    }
    Point best;
    double best_len = 0;
    for (std::size_t a = 0; a < n; ++a) {
        Point e(n, 0.0);
        e[a] = 1;
        for (const auto& b : basis) e = sub(e, scaled(b, dot(e, b)));
        const double len = norm(e);
        if (len > best_len) {
            best_len = len;
            best = scaled(e, 1 / len);
        }
    }
    if (best_len < 1e-9) return std::nullopt;
    return best;
}

double slab_half_width(const std::vector<Point>& pts, const Point& normal) {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (const auto& p : pts) {
        const double t = dot(p, normal);
        lo = std::min(lo, t);
        hi = std::max(hi, t);
    }
    return 0.5 * (hi - lo);
}

// Half the minimal slab width of pts over hyperplane normals.
double hyperplane_half_width(const std::vector<Point>& pts) {
    if (pts.size() <= 1) return 0;
    const std::size_t n = pts[0].size();
    if (n == 2) return minimax_line(pts, FitMode::exact2d).max_dist;
    if (pts.size() <= n) return 0;  // N points always lie on a hyperplane

    Point best_n;
    double best = std::numeric_limits<double>::infinity();
    auto consider = [&](const Point& normal) {
        const double w = slab_half_width(pts, normal);
        if (w < best) {
            best = w;
            best_n = normal;
        }
    };
    for (std::size_t a = 0; a < n; ++a) {
        Point e(n, 0.0);
        e[a] = 1;
        consider(e);
    }
    // facets through N of the points: exhaustive for small sets, sampled otherwise
    std::mt19937_64 rng(pts.size());
    std::vector<std::size_t> pick(n);
    const bool exhaustive = pts.size() <= 14 && n == 3;
    if (exhaustive) {
        for (std::size_t i = 0; i < pts.size(); ++i)
            for (std::size_t j = i + 1; j < pts.size(); ++j)
                for (std::size_t k = j + 1; k < pts.size(); ++k)
                    if (auto f = facet_normal({&pts[i], &pts[j], &pts[k]})) consider(*f);
    } else {
        std::uniform_int_distribution<std::size_t> u(0, pts.size() - 1);
        for (int trial = 0; trial < 400; ++trial) {
            std::vector<const Point*> sel;
            for (std::size_t d = 0; d < n; ++d) sel.push_back(&pts[u(rng)]);
            if (auto f = facet_normal(sel)) consider(*f);
        }
    }
    // local polish by coordinate tilts
    for (double step = 0.1; step > 1e-7; step *= 0.5) {
        bool moved = true;
        while (moved) {
            moved = false;
            for (std::size_t a = 0; a < n; ++a)
                for (double sg : {-1.0, 1.0}) {
                    Point cand = best_n;
                    cand[a] += sg * step;
                    cand = normalized(cand);
                    if (slab_half_width(pts, cand) < best - 1e-15) {
                        consider(cand);
                        moved = true;
                    }
                }
        }
    }
    return best;
}

}  // namespace

double hyperplane_beta(const std::vector<Point>& E, const Region& Q) {
    std::vector<Point> inside;
    for (const auto& p : E)
        if (Q.contains(p)) inside.push_back(p);
    if (inside.empty()) return 0;
    return std::min(1.0, hyperplane_half_width(inside) / Q.diam());
}

std::vector<double> hyperplane_threshold_sums(const std::vector<Point>& E, double s, double threshold,
                                              int generations) {
    if (E.empty()) throw EmptyInput("no points");
    const std::size_t n = E[0].size();
    std::vector<double> out;
    double acc = 0;
    for (int g = 0; g <= generations; ++g) {
        const int k = -g;
        std::map<std::vector<std::int64_t>, std::vector<std::size_t>> cells;
        for (std::size_t i = 0; i < E.size(); ++i) {
            std::vector<std::int64_t> c(n);
            for (std::size_t d = 0; d < n; ++d) c[d] = static_cast<std::int64_t>(std::floor(std::ldexp(E[i][d], g)));
            cells[c].push_back(i);
        }
        // cubes Q whose triple meets E
        std::set<std::vector<std::int64_t>> cubes;
        for (const auto& q : dyadic_cubes_meeting(E, k, k)) {
            std::vector<std::int64_t> off(n, -1);
            while (true) {
                auto c = q.corner;
                for (std::size_t d = 0; d < n; ++d) c[d] += off[d];
                cubes.insert(c);
                std::size_t d = 0;
                while (d < n && ++off[d] == 2) off[d++] = -1;
                if (d == n) break;
            }
        }
        const double diam = std::sqrt(static_cast<double>(n)) * std::ldexp(1.0, k);
        for (const auto& c : cubes) {
            const Region q3 = Region::dilated(DyadicCube{k, c}, 3.0);
            std::vector<Point> inside;
            std::vector<std::int64_t> off(n, -2);
            while (true) {
                auto cell = c;
                for (std::size_t d = 0; d < n; ++d) cell[d] += off[d];
                if (auto it = cells.find(cell); it != cells.end())
                    for (auto i : it->second)
                        if (q3.contains(E[i])) inside.push_back(E[i]);
                std::size_t d = 0;
                while (d < n && ++off[d] == 3) off[d++] = -2;
                if (d == n) break;
            }
            if (inside.empty()) continue;
            const double b = std::min(1.0, hyperplane_half_width(inside) / q3.diam());
            if (b >= threshold * (1 - 1e-12)) acc += std::pow(diam, s);
        }
        out.push_back(acc);
    }
    return out;
}

std::vector<double> unit_cube_threshold_sums(int N, double s, double threshold, int generations) {
    if (N < 2) throw BadParameter("need N >= 2");
    if (generations > 30) throw DepthTooLarge("more than 30 generations");
    std::vector<double> out;
    double acc = 0;
    for (int g = 0; g <= generations; ++g) {
        const double h = std::ldexp(1.0, -g);
        const std::int64_t cells = std::int64_t{1} << g;
        // along one axis, 3Q meets [0,1] in one of a few intervals; count each
        std::map<std::pair<double, double>, std::int64_t> classes;
        auto interval = [&](std::int64_t i) {
            return std::make_pair(std::max(0.0, static_cast<double>(i - 1) * h),
                                  std::min(1.0, static_cast<double>(i + 2) * h));
        };
        const std::int64_t lo = -2, hi = cells + 1;
        for (std::int64_t i = lo; i <= std::min(hi, lo + 4); ++i) ++classes[interval(i)];
        for (std::int64_t i = std::max(lo + 5, hi - 4); i <= hi; ++i) ++classes[interval(i)];
        if (hi - 4 > lo + 5) classes[interval(lo + 5)] += (hi - 4) - (lo + 5);
        std::vector<std::pair<std::pair<double, double>, std::int64_t>> list(classes.begin(), classes.end());

        const double diam3 = 3 * std::sqrt(static_cast<double>(N)) * h;
        const double weight = std::pow(std::sqrt(static_cast<double>(N)) * h, s);
        std::vector<std::size_t> pick(static_cast<std::size_t>(N), 0);
        while (true) {
            std::vector<Point> corners;
            double count = 1;
            for (int c = 0; c < 1 << N; ++c) {
                Point p(static_cast<std::size_t>(N));
                for (int d = 0; d < N; ++d) {
                    const auto& iv = list[pick[static_cast<std::size_t>(d)]].first;
                    p[static_cast<std::size_t>(d)] = c >> d & 1 ? iv.second : iv.first;
                }
                corners.push_back(p);
            }
            for (int d = 0; d < N; ++d) count *= static_cast<double>(list[pick[static_cast<std::size_t>(d)]].second);
            bool nonempty = true;
            for (int d = 0; d < N; ++d) {
                const auto& iv = list[pick[static_cast<std::size_t>(d)]].first;
                nonempty = nonempty && iv.first <= iv.second;
            }
            if (nonempty && hyperplane_half_width(corners) / diam3 >= threshold * (1 - 1e-12)) acc += count * weight;
            std::size_t d = 0;
            while (d < pick.size() && ++pick[d] == list.size()) pick[d++] = 0;
            if (d == pick.size()) break;
        }
        out.push_back(acc);
    }
    return out;
}

// ---- countable set -----------------------------------------------------------

CountableSet countable_set(int N, int depth) {
    if (N < 2) throw BadParameter("need N >= 2");
    if (depth < 0) throw BadParameter("depth must be nonnegative");
    if (std::pow(std::exp2(depth) + 1, N) > 4e6) throw DepthTooLarge("grid too large");
    CountableSet c;
    c.N = N;
    double shift = 0;  // 2 sum_{i<=k} i^-2
    for (int k = 0; k <= depth; ++k) {
        if (k > 0) shift += 2.0 / (static_cast<double>(k) * k);
        c.level_start.push_back(static_cast<int>(c.points.size()));
        const double scale = 1.0 / ((k + 1.0) * (k + 1.0));
        const std::int64_t side = (std::int64_t{1} << k) + 1;
        for (const auto& idx : grid_cells(N, side)) {
            Point p(static_cast<std::size_t>(N));
            for (int d = 0; d < N; ++d)
                p[static_cast<std::size_t>(d)] = scale * std::ldexp(static_cast<double>(idx[static_cast<std::size_t>(d)]), -k);
            p.back() += shift;
            c.points.push_back(p);
        }
    }
    c.level_start.push_back(static_cast<int>(c.points.size()));
    Point limit(static_cast<std::size_t>(N), 0.0);
    limit.back() = M_PI * M_PI / 3;
    c.points.push_back(limit);
    return c;
}

double countable_separation(const CountableSet& c, int k) {
    if (k < 0 || k + 1 >= static_cast<int>(c.level_start.size())) throw BadParameter("level out of range");
    const double unit = std::ldexp(1.0, -k) / ((k + 1.0) * (k + 1.0));
    double worst = std::numeric_limits<double>::infinity();
    for (int i = c.level_start[static_cast<std::size_t>(k)]; i < c.level_start[static_cast<std::size_t>(k) + 1]; ++i)
        for (std::size_t j = 0; j < c.points.size(); ++j)
            if (static_cast<int>(j) != i)
                worst = std::min(worst, dist(c.points[static_cast<std::size_t>(i)], c.points[j]) / unit);
    return worst;
}

std::vector<double> packing_sums(int N, int m, double s, int K) {
    std::vector<double> out;
    double acc = 0;
    for (int k = 0; k <= K; ++k) {
        acc += std::exp2(k * (N - m * s)) / std::pow(k + 1.0, 2 * s);
        out.push_back(acc);
    }
    return out;
}

// ---- Cantor constructions ----------------------------------------------------

Sample four_corner(int depth) {
    if (depth < 0) throw BadParameter("depth must be nonnegative");
    if (depth > 9) throw DepthTooLarge("four-corner depth above 9");
    std::vector<Point> corners{{0.0, 0.0}};
    double side = 1;
    for (int g = 0; g < depth; ++g) {
        std::vector<Point> next;
        for (const auto& c : corners)
            for (double dx : {0.0, 0.75 * side})
                for (double dy : {0.0, 0.75 * side}) next.push_back({c[0] + dx, c[1] + dy});
        corners = std::move(next);
        side *= 0.25;
    }
    Sample s;
    for (const auto& c : corners) {
        const int base = static_cast<int>(s.points.size());
        s.points.push_back(c);
        s.points.push_back({c[0] + side, c[1]});
        s.points.push_back({c[0] + side, c[1] + side});
        s.points.push_back({c[0], c[1] + side});
        for (int e = 0; e < 4; ++e) s.segments.emplace_back(base + e, base + (e + 1) % 4);
    }
    return s;
}

std::vector<double> four_corner_jones(int depth) {
    std::vector<double> out;
    for (int d = 1; d <= depth; ++d) {
        const auto rep = beta_sums(four_corner(d).points, 1.0, BetaVariant::square(), -2 * d, 0, FitMode::exact2d);
        out.push_back(rep.total);
    }
    return out;
}

FlatCantor flat_snowflake_cantor(double pstar, double s, int depth) {
    if (!(pstar >= 0.25 && pstar < 0.5)) throw BadParameter("p* outside [1/4, 1/2)");
    FlatCantor fc;
    fc.s0 = pstar == 0.25 ? 1.0 : std::log(4.0) / std::log(1 / pstar);
    if (!(s >= 1) || s > fc.s0) throw BadParameter("need 1 <= s <= s0");
    fc.ratio = std::exp2(-fc.s0 / s);
    fc.arc = snowflake({pstar}, depth);
    const double fine = std::pow(0.25, depth);
    fc.generations = 0;
    for (double len = 1; len > fine && fc.generations < 2 * depth + 2; len *= fc.ratio) ++fc.generations;

    std::vector<std::pair<double, double>> iv{{0.0, 1.0}};
    for (int g = 0; g < fc.generations; ++g) {
        std::vector<std::pair<double, double>> next;
        for (auto [a, b] : iv) {
            const double L = (b - a) * fc.ratio;
            next.emplace_back(a, a + L);
            next.emplace_back(b - L, b);
        }
        iv = std::move(next);
    }
    Sample& out = fc.sample;
    PointIndex index(out);
    std::set<std::pair<int, int>> seen;
    const double cells = static_cast<double>(fc.arc.vertices.size() - 1);
    int prev_end = -1;
    for (std::size_t j = 0; j < iv.size(); ++j) {
        const auto [a, b] = iv[j];
        // image of the Cantor interval: arc vertices inside it plus its ends
        int last = index(fc.arc.at(a));
        const int first = last;
        for (auto i = static_cast<std::size_t>(std::ceil(a * cells)); static_cast<double>(i) <= b * cells; ++i) {
            const int id = index(fc.arc.vertices[i]);
            add_segment(out, seen, last, id);
            last = id;
        }
        const int end = index(fc.arc.at(b));
        add_segment(out, seen, last, end);
        if (prev_end >= 0) {
            // chord across the gap, sampled at the arc's resolution
            const Point P = out.points[static_cast<std::size_t>(prev_end)];
            const Point Q = out.points[static_cast<std::size_t>(first)];
            const int steps = std::max(1, static_cast<int>(std::ceil(dist(P, Q) / (fine * std::pow(4 * pstar, depth) + 1e-300))));
            int at = prev_end;
            for (int t = 1; t <= steps; ++t) {
                const int id = t == steps ? first : index(lerp(P, Q, static_cast<double>(t) / steps));
                add_segment(out, seen, at, id);
                at = id;
            }
        }
        prev_end = end;
    }
    return fc;
}

double max_cube_beta(const std::vector<Point>& E, int gmax) {
    if (E.empty()) throw EmptyInput("no points");
    double worst = 0;
    const FitMode mode = default_fit_mode(E[0].size());
    for (int g = 0; g <= gmax; ++g)
        for (const auto& q : dyadic_cubes_meeting(E, -g, -g))
            worst = std::max(worst, beta_number(E, Region::dilated(q, 1.0), mode));
    return worst;
}

namespace {

// Ladder factor before padding: points in R^3 (integral s) or R^2 (fractional s).
struct Ladder {
    Sample sample;
    std::vector<double> weight;
    int rungs = 0;
};

class KeyedNodes {
public:
    explicit KeyedNodes(Ladder& L) : L_(L) {}
    int operator()(const std::vector<std::int64_t>& key, const Point& p) {
        auto [it, fresh] = ids_.emplace(key, static_cast<int>(L_.sample.points.size()));
        if (fresh) {
            L_.sample.points.push_back(p);
            L_.weight.push_back(0);
        }
        return it->second;
    }
    int fresh(const Point& p) {
        L_.sample.points.push_back(p);
        L_.weight.push_back(0);
        return static_cast<int>(L_.sample.points.size()) - 1;
    }

private:
    Ladder& L_;
    std::map<std::vector<std::int64_t>, int> ids_;
};

Ladder square_ladder(int d) {
    Ladder L;
    KeyedNodes node(L);
    std::set<std::pair<int, int>> seen;
    const std::int64_t full = std::int64_t{1} << (2 * d);  // side of D_empty in units of 4^-d
    const double u = std::ldexp(1.0, -2 * d), hu = std::ldexp(1.0, -d);
    auto at = [&](std::int64_t x, std::int64_t y, std::int64_t h) {
        return node({x, y, h}, {static_cast<double>(x) * u, static_cast<double>(y) * u, static_cast<double>(h) * hu});
    };
    struct Sq {
        std::int64_t x, y, side;
        int gen;
    };
    std::vector<Sq> stack{{0, 0, full, 0}};
    while (!stack.empty()) {
        const Sq q = stack.back();
        stack.pop_back();
        if (q.gen == d) {
            // column over a final square, content split among its corners
            const double w = u * hu / 4;
            for (std::int64_t cx : {q.x, q.x + 1})
                for (std::int64_t cy : {q.y, q.y + 1})
                    for (std::int64_t h = 0; h <= (std::int64_t{1} << d); ++h) {
                        const int id = at(cx, cy, h);
                        L.weight[static_cast<std::size_t>(id)] += w;
                        if (h > 0) add_segment(L.sample, seen, at(cx, cy, h - 1), id);
                    }
            continue;
        }
        // rungs D_w x {(2i-1) 2^(-|w|-1)}, i = 1..2^|w|
        for (std::int64_t i = 1; i <= (std::int64_t{1} << q.gen); ++i) {
            ++L.rungs;
            const std::int64_t h = (2 * i - 1) << (d - q.gen - 1);
            for (std::int64_t a = 0; a <= q.side; ++a)
                for (std::int64_t b = 0; b <= q.side; ++b) {
                    const int id = at(q.x + a, q.y + b, h);
                    L.weight[static_cast<std::size_t>(id)] += u * u;
                    if (a > 0) add_segment(L.sample, seen, at(q.x + a - 1, q.y + b, h), id);
                    if (b > 0) add_segment(L.sample, seen, at(q.x + a, q.y + b - 1, h), id);
                }
        }
        const std::int64_t c = q.side / 4;
        for (std::int64_t dx : {std::int64_t{0}, q.side - c})
            for (std::int64_t dy : {std::int64_t{0}, q.side - c}) stack.push_back({q.x + dx, q.y + dy, c, q.gen + 1});
    }
    return L;
}

Ladder snowflake_ladder(double frac, int d) {
    Ladder L;
    KeyedNodes node(L);
    std::set<std::pair<int, int>> seen;
    const double ratio = std::exp2(-1 / frac);
    const double hu = std::ldexp(1.0, -d);
    const double psf = std::pow(4.0, -1 / (1 + frac));

    std::vector<std::pair<double, double>> iv{{0.0, 1.0}};
    for (int g = 0; g < d; ++g) {
        std::vector<std::pair<double, double>> next;
        for (auto [a, b] : iv) {
            const double len = (b - a) * ratio;
            next.emplace_back(a, a + len);
            next.emplace_back(b - len, b);
        }
        iv = std::move(next);
    }
    std::vector<double> ends;
    for (auto [a, b] : iv) {
        ends.push_back(a);
        ends.push_back(b);
    }
    const std::int64_t top = std::int64_t{1} << d;
    auto col = [&](std::int64_t e, std::int64_t h) {
        return node({e, h}, {ends[static_cast<std::size_t>(e)], static_cast<double>(h) * hu});
    };
    const double cw = std::ldexp(1.0, -d) * hu / 2;
    for (std::int64_t e = 0; e < static_cast<std::int64_t>(ends.size()); ++e)
        for (std::int64_t h = 0; h <= top; ++h) {
            const int id = col(e, h);
            L.weight[static_cast<std::size_t>(id)] += cw;
            if (h > 0) add_segment(L.sample, seen, col(e, h - 1), id);
            // a final interval stands in for the Cantor points inside it
            if (e % 2 == 1) add_segment(L.sample, seen, col(e - 1, h), id);
        }
    for (int j = 0; j < d; ++j)
        for (std::int64_t w = 0; w < (std::int64_t{1} << j); ++w) {
            // the gap of I_w lies between final intervals fr and fr + 1
            const std::int64_t fr = (2 * w + 1) * (std::int64_t{1} << (d - j - 1)) - 1;
            const std::int64_t eL = 2 * fr + 1, eR = 2 * fr + 2;
            const double gap = ends[static_cast<std::size_t>(eR)] - ends[static_cast<std::size_t>(eL)];
            const Snowflake arc = snowflake({psf}, std::min(d - j, 4));
            const double w_pt = std::pow(gap, 1 + frac) / static_cast<double>(arc.vertices.size() - 1);
            for (std::int64_t i = 1; i <= (std::int64_t{1} << j); ++i) {
                ++L.rungs;
                const std::int64_t h = (2 * i - 1) << (d - j - 1);
                int prev = col(eL, h);
                for (std::size_t v = 1; v < arc.vertices.size(); ++v) {
                    const int id = v + 1 == arc.vertices.size()
                                       ? col(eR, h)
                                       : node.fresh({ends[static_cast<std::size_t>(eL)] + gap * arc.vertices[v][0],
                                                     static_cast<double>(h) * hu + gap * arc.vertices[v][1]});
                    L.weight[static_cast<std::size_t>(id)] += w_pt;
                    add_segment(L.sample, seen, prev, id);
                    prev = id;
                }
            }
        }
    return L;
}

}  // namespace

CantorLadder cantor_ladder(int N, double s, int depth) {
    if (!(s > 1) || !(s < N)) throw BadParameter("need 1 < s < N");
    if (depth < 1) throw BadParameter("depth must be positive");
    const bool integral = s == std::floor(s);
    if (integral && depth > 4) throw DepthTooLarge("square ladder deeper than 4");
    if (!integral && depth > 8) throw DepthTooLarge("snowflake ladder deeper than 8");
    CantorLadder out;
    out.N = N;
    out.s = s;
    Ladder base;
    int extra = 0;
    if (integral) {
        base = square_ladder(depth);
        out.base_dim = 2;
        extra = static_cast<int>(s) - 2;
    } else {
        const double frac = s - std::floor(s);
        base = snowflake_ladder(frac, depth);
        out.base_dim = 1 + frac;
        extra = static_cast<int>(std::floor(s)) - 1;
    }
    out.rungs = base.rungs;
    out.resolution = std::ldexp(1.0, -depth);
    const std::size_t bdim = base.sample.points[0].size();
    if (bdim + static_cast<std::size_t>(extra) > static_cast<std::size_t>(N)) throw BadParameter("ambient dimension too small");

    // product with [0,1]^extra sampled at {0, 1/2, 1}, then zero padding
    int copies = 1;
    for (int e = 0; e < extra; ++e) copies *= 3;
    const auto nb = static_cast<int>(base.sample.points.size());
    for (int c = 0; c < copies; ++c) {
        std::vector<double> tail;
        for (int e = 0, r = c; e < extra; ++e, r /= 3) tail.push_back(0.5 * (r % 3));
        for (int i = 0; i < nb; ++i) {
            Point p = base.sample.points[static_cast<std::size_t>(i)];
            p.insert(p.end(), tail.begin(), tail.end());
            p.resize(static_cast<std::size_t>(N), 0.0);
            out.sample.points.push_back(std::move(p));
            out.weight.push_back(base.weight[static_cast<std::size_t>(i)] / copies);
        }
        for (auto [a, b] : base.sample.segments) out.sample.segments.emplace_back(a + c * nb, b + c * nb);
        for (int e = 0, stride = 1, r = c; e < extra; ++e, stride *= 3, r /= 3)
            if (r % 3 < 2)
                for (int i = 0; i < nb; ++i) out.sample.segments.emplace_back(c * nb + i, (c + stride) * nb + i);
    }
    return out;
}

LadderConnectivity ladder_connectivity(const CantorLadder& L, int pairs, std::uint64_t seed) {
    const auto n = L.sample.points.size();
    std::vector<std::vector<std::pair<int, double>>> adj(n);
    for (auto [a, b] : L.sample.segments) {
        const double w = dist(L.sample.points[static_cast<std::size_t>(a)], L.sample.points[static_cast<std::size_t>(b)]);
        adj[static_cast<std::size_t>(a)].emplace_back(b, w);
        adj[static_cast<std::size_t>(b)].emplace_back(a, w);
    }
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> u(0, n - 1);
    LadderConnectivity rep;
    for (int t = 0; t < pairs; ++t) {
        const std::size_t x = u(rng), y = u(rng);
        const double sep = dist(L.sample.points[x], L.sample.points[y]);
        if (!(sep > 0)) continue;
        std::vector<double> d(n, std::numeric_limits<double>::infinity());
        std::vector<int> from(n, -1);
        using Item = std::pair<double, int>;
        std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
        d[x] = 0;
        pq.emplace(0.0, static_cast<int>(x));
        while (!pq.empty()) {
            auto [dv, v] = pq.top();
            pq.pop();
            if (dv > d[static_cast<std::size_t>(v)]) continue;
            if (static_cast<std::size_t>(v) == y) break;
            for (auto [w, len] : adj[static_cast<std::size_t>(v)])
                if (dv + len < d[static_cast<std::size_t>(w)]) {
                    d[static_cast<std::size_t>(w)] = dv + len;
                    from[static_cast<std::size_t>(w)] = v;
                    pq.emplace(dv + len, w);
                }
        }
        if (!std::isfinite(d[y])) throw NotConnected("ladder sample is disconnected");
        std::vector<const Point*> path;
        for (int v = static_cast<int>(y); v != -1; v = from[static_cast<std::size_t>(v)])
            path.push_back(&L.sample.points[static_cast<std::size_t>(v)]);
        double diam = 0;
        for (std::size_t i = 0; i < path.size(); ++i)
            for (std::size_t j = i + 1; j < path.size(); ++j) diam = std::max(diam, dist(*path[i], *path[j]));
        ++rep.pairs;
        rep.max_ratio = std::max(rep.max_ratio, diam / std::pow(sep, 1 / L.base_dim));
    }
    return rep;
}

LadderRegularity ladder_regularity(const CantorLadder& L, const std::vector<double>& radii, int centers,
                                   std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> u(0, L.sample.points.size() - 1);
    LadderRegularity rep;
    rep.min_ratio = std::numeric_limits<double>::infinity();
    for (int c = 0; c < centers; ++c) {
        const Point& x = L.sample.points[u(rng)];
        for (double r : radii) {
            double content = 0;
            for (std::size_t i = 0; i < L.sample.points.size(); ++i)
                if (dist(L.sample.points[i], x) <= r) content += L.weight[i];
            const double ratio = content / std::pow(r, L.s);
            rep.min_ratio = std::min(rep.min_ratio, ratio);
            rep.max_ratio = std::max(rep.max_ratio, ratio);
        }
    }
    return rep;
}

// ---- generator dispatch --------------------------------------------------------

GeneratorSpec::Kind generator_kind(const std::string& name) {
    using K = GeneratorSpec::Kind;
    static const std::map<std::string, K> names{{"snowflake", K::snowflake},     {"sierpinski", K::sierpinski},
                                                {"cantor_ladder", K::cantor_ladder}, {"countable", K::countable},
                                                {"four_corner", K::four_corner}, {"flat_cantor", K::flat_cantor},
                                                {"sharpness", K::sharpness}};
    const auto it = names.find(name);
    if (it == names.end()) throw BadParameter("unknown generator '" + name + "'");
    return it->second;
}

Sample generate(const GeneratorSpec& spec) {
    using K = GeneratorSpec::Kind;
    switch (spec.kind) {
        case K::snowflake:
            return snowflake(spec.p_seq, spec.depth).sample();
        case K::sierpinski:
            return sierpinski_like(spec.N, spec.s, spec.depth).sample;
        case K::cantor_ladder:
            return cantor_ladder(spec.N, spec.s, spec.depth).sample;
        case K::countable: {
            Sample s;
            s.points = countable_set(spec.N, spec.depth).points;
            return s;
        }
        case K::four_corner:
            return four_corner(spec.depth);
        case K::flat_cantor:
            if (spec.p_seq.empty()) throw BadParameter("flat_cantor needs p*");
            return flat_snowflake_cantor(spec.p_seq.front(), spec.s, spec.depth).sample;
        case K::sharpness: {
            const auto nets = sharpness_nets(spec.s, spec.p, spec.q, spec.n0, spec.depth);
            Sample s;
            const auto& top = nets.h.levels.back();
            for (int id : top) s.points.push_back(nets.h.pt(id));
            for (std::size_t i = 0; i + 1 < top.size(); ++i)
                s.segments.emplace_back(static_cast<int>(i), static_cast<int>(i + 1));
            return s;
        }
    }
    throw BadParameter("unknown generator");
}

}  // namespace htsp
