#include "htsp/geom.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <unordered_map>

namespace htsp {

std::string to_string(FitMode m) {
    switch (m) {
        case FitMode::exact2d: return "exact2d";
        case FitMode::farpair: return "farpair";
        case FitMode::refine: return "refine";
    }
    return "?";
}

FitMode fit_mode_from_string(const std::string& s) {
    if (s == "exact2d") return FitMode::exact2d;
    if (s == "farpair") return FitMode::farpair;
    if (s == "refine") return FitMode::refine;
    throw BadParameter("unknown fitter '" + s + "'");
}

FitMode default_fit_mode(std::size_t dim) { return dim == 2 ? FitMode::exact2d : FitMode::refine; }

double DyadicCube::side() const { return std::ldexp(1.0, k); }
double DyadicCube::diam() const { return std::sqrt(static_cast<double>(corner.size())) * side(); }

bool DyadicCube::contains(const Point& p, double tol) const {
    const double h = side();
    for (std::size_t i = 0; i < corner.size(); ++i) {
        const double lo = static_cast<double>(corner[i]) * h;
        if (p[i] < lo - tol || p[i] > lo + h + tol) return false;
    }
    return true;
}

Region Region::ball(Point c, double r) {
    if (!(r > 0)) throw BadParameter("ball radius must be positive");
    Region q;
    q.kind = Kind::ball;
    q.center = std::move(c);
    q.radius = r;
    return q;
}

Region Region::dilated(DyadicCube cube, double lambda) {
    if (!(lambda > 0)) throw BadParameter("dilation factor must be positive");
    Region q;
    q.kind = Kind::dilated_cube;
    q.cube = std::move(cube);
    q.lambda = lambda;
    return q;
}

bool Region::contains(const Point& p) const {
    if (kind == Kind::ball) return dist(p, center) <= radius;
    const double h = cube.side();
    for (std::size_t i = 0; i < cube.corner.size(); ++i) {
        const double mid = (static_cast<double>(cube.corner[i]) + 0.5) * h;
        if (std::abs(p[i] - mid) > 0.5 * lambda * h) return false;
    }
    return true;
}

double Region::diam() const { return kind == Kind::ball ? 2.0 * radius : lambda * cube.diam(); }

double dot(const Point& a, const Point& b) {
    double s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}
double norm(const Point& a) { return std::sqrt(dot(a, a)); }
double dist(const Point& a, const Point& b) {
    double s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(s);
}
Point sub(const Point& a, const Point& b) {
    Point r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
    return r;
}
Point add(const Point& a, const Point& b) {
    Point r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
    return r;
}
Point scaled(const Point& a, double c) {
    Point r(a);
    for (double& x : r) x *= c;
    return r;
}
Point lerp(const Point& a, const Point& b, double t) {
    Point r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + t * (b[i] - a[i]);
    return r;
}
Point normalized(const Point& a) {
    const double n = norm(a);
    if (n == 0) {
        Point e(a.size(), 0.0);
        e[0] = 1.0;
        return e;
    }
    return scaled(a, 1.0 / n);
}
bool lex_less(const Point& a, const Point& b) {
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

Line line_through(const Point& a, const Point& b) { return Line{a, normalized(sub(b, a))}; }

double line_param(const Point& x, const Line& l) { return dot(sub(x, l.base), l.dir); }

Point project(const Point& x, const Line& l) { return add(l.base, scaled(l.dir, line_param(x, l))); }

double dist_to_line(const Point& x, const Line& l) {
    const Point d = sub(x, l.base);
    const double t = dot(d, l.dir);
    double sq = 0;
    for (std::size_t i = 0; i < d.size(); ++i) {
        const double r = d[i] - t * l.dir[i];
        sq += r * r;
    }
    return std::sqrt(sq);
}

double max_dist_to_line(const std::vector<Point>& pts, const Line& l) {
    double m = 0;
    for (const auto& p : pts) m = std::max(m, dist_to_line(p, l));
    return m;
}

double diameter(const std::vector<Point>& pts) {
    double d = 0;
    for (std::size_t i = 0; i < pts.size(); ++i)
        for (std::size_t j = i + 1; j < pts.size(); ++j) d = std::max(d, dist(pts[i], pts[j]));
    return d;
}

namespace {

double cross(const Point& o, const Point& a, const Point& b) {
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
}

std::vector<Point> convex_hull(std::vector<Point> pts) {
    std::sort(pts.begin(), pts.end(), lex_less);
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    if (pts.size() < 3) return pts;
    std::vector<Point> h(2 * pts.size());
    std::size_t k = 0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        while (k >= 2 && cross(h[k - 2], h[k - 1], pts[i]) <= 0) --k;
        h[k++] = pts[i];
    }
    for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
        while (k >= t && cross(h[k - 2], h[k - 1], pts[i]) <= 0) --k;
        h[k++] = pts[i];
    }
    h.resize(k - 1);
    return h;
}

std::pair<std::size_t, std::size_t> far_pair(const std::vector<Point>& pts) {
    std::pair<std::size_t, std::size_t> best{0, 0};
    double d = -1;
    for (std::size_t i = 0; i < pts.size(); ++i)
        for (std::size_t j = i + 1; j < pts.size(); ++j) {
            const double dij = dist(pts[i], pts[j]);
            if (dij > d) {
                d = dij;
                best = {i, j};
            }
        }
    return best;
}

LineFit fit_exact2d(const std::vector<Point>& pts) {
    if (pts[0].size() != 2) throw BadParameter("exact2d fitting needs planar points");
    const auto hull = convex_hull(pts);
    if (hull.size() == 1) return {Line{hull[0], {1.0, 0.0}}, 0.0, FitMode::exact2d};
    if (hull.size() == 2) {
        const Line l = line_through(hull[0], hull[1]);
        return {l, max_dist_to_line(pts, l), FitMode::exact2d};
    }
    // Minimum-width strip has a side on a hull edge; the best line is its midline.
    double best_w = std::numeric_limits<double>::infinity();
    Line best;
    const std::size_t h = hull.size();
    for (std::size_t i = 0; i < h; ++i) {
        const Line edge = line_through(hull[i], hull[(i + 1) % h]);
        double w = 0;
        std::size_t far = i;
        for (std::size_t j = 0; j < h; ++j) {
            const double dj = dist_to_line(hull[j], edge);
            if (dj > w) {
                w = dj;
                far = j;
            }
        }
        if (w < best_w) {
            best_w = w;
            const Point foot = project(hull[far], edge);
            best = Line{lerp(foot, hull[far], 0.5), edge.dir};
        }
    }
    best.base = project(hull[0], best);
    return {best, max_dist_to_line(pts, best), FitMode::exact2d};
}

Line principal_axis(const std::vector<Point>& pts) {
    const std::size_t n = pts[0].size();
    Point mean(n, 0.0);
    for (const auto& p : pts)
        for (std::size_t i = 0; i < n; ++i) mean[i] += p[i] / static_cast<double>(pts.size());
    std::vector<double> cov(n * n, 0.0);
    for (const auto& p : pts)
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) cov[i * n + j] += (p[i] - mean[i]) * (p[j] - mean[j]);
    Point v(n, 1.0);
    for (int it = 0; it < 100; ++it) {
        Point w(n, 0.0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) w[i] += cov[i * n + j] * v[j];
        if (norm(w) == 0) break;
        v = normalized(w);
    }
    return Line{mean, normalized(v)};
}

// Coordinate descent on (base, direction); never returns worse than the seed.
LineFit fit_refine(const std::vector<Point>& pts, double scale) {
    const auto [i, j] = far_pair(pts);
    Line seed = line_through(pts[i], pts[j]);
    const Line pca = principal_axis(pts);
    if (max_dist_to_line(pts, pca) < max_dist_to_line(pts, seed)) seed = pca;

    const std::size_t n = pts[0].size();
    Point b = seed.base, d = seed.dir;
    auto objective = [&](const Point& bb, const Point& dd) {
        return max_dist_to_line(pts, Line{bb, normalized(dd)});
    };
    double f = objective(b, d);
    double step_b = 0.1 * std::max(scale, 1e-300);
    double step_d = 0.1;
    for (int it = 0; it < 200 && (step_b > 1e-10 * std::max(scale, 1e-300) || step_d > 1e-10); ++it) {
        bool improved = false;
        for (std::size_t c = 0; c < 2 * n; ++c) {
            Point& v = c < n ? b : d;
            const std::size_t idx = c % n;
            const double st = c < n ? step_b : step_d;
            for (double sgn : {1.0, -1.0}) {
                const double old = v[idx];
                v[idx] = old + sgn * st;
                const double g = objective(b, d);
                if (g < f) {
                    f = g;
                    improved = true;
                    break;
                }
                v[idx] = old;
            }
        }
        if (!improved) {
            step_b *= 0.5;
            step_d *= 0.5;
        }
        d = normalized(d);
    }
    Line l{b, normalized(d)};
    l.base = project(pts[0], l);
    return {l, max_dist_to_line(pts, l), FitMode::refine};
}

}  // namespace

LineFit minimax_line(const std::vector<Point>& pts, FitMode mode) {
    if (pts.empty()) throw EmptyInput("minimax_line needs at least one point");
    const std::size_t n = pts[0].size();
    if (pts.size() == 1) {
        Point e(n, 0.0);
        e[0] = 1.0;
        return {Line{pts[0], e}, 0.0, mode};
    }
    switch (mode) {
        case FitMode::exact2d: return fit_exact2d(pts);
        case FitMode::farpair: {
            const auto [i, j] = far_pair(pts);
            if (i == j || dist(pts[i], pts[j]) == 0) {
                Point e(n, 0.0);
                e[0] = 1.0;
                return {Line{pts[0], e}, 0.0, mode};
            }
            const Line l = line_through(pts[i], pts[j]);
            return {l, max_dist_to_line(pts, l), mode};
        }
        case FitMode::refine: {
            const double scale = diameter(pts);
            if (scale == 0) {
                Point e(n, 0.0);
                e[0] = 1.0;
                return {Line{pts[0], e}, 0.0, mode};
            }
            return fit_refine(pts, scale);
        }
    }
    throw BadParameter("bad fit mode");
}

double beta_number(const std::vector<Point>& E, const Region& Q, FitMode mode) {
    std::vector<Point> inside;
    for (const auto& p : E)
        if (Q.contains(p)) inside.push_back(p);
    if (inside.empty()) return 0.0;
    const double b = minimax_line(inside, mode).max_dist / Q.diam();
    return std::clamp(b, 0.0, 1.0);
}

namespace {

// Index ranges of closed cubes of side 2^k containing coordinate x.
std::pair<std::int64_t, std::int64_t> closed_range(double x, int k) {
    const double u = std::ldexp(x, -k);
    const auto m = static_cast<std::int64_t>(std::floor(u));
    if (static_cast<double>(m) == u) return {m - 1, m};
    return {m, m};
}

template <class F>
void for_each_index(const std::vector<std::pair<std::int64_t, std::int64_t>>& ranges, F&& f) {
    std::vector<std::int64_t> idx(ranges.size());
    for (std::size_t i = 0; i < ranges.size(); ++i) idx[i] = ranges[i].first;
    while (true) {
        f(idx);
        std::size_t c = 0;
        while (c < ranges.size() && idx[c] == ranges[c].second) {
            idx[c] = ranges[c].first;
            ++c;
        }
        if (c == ranges.size()) return;
        ++idx[c];
    }
}

}  // namespace

std::vector<DyadicCube> dyadic_cubes_meeting(const std::vector<Point>& E, int k_min, int k_max) {
    std::vector<DyadicCube> out;
    for (int k = k_min; k <= k_max; ++k) {
        std::set<std::vector<std::int64_t>> seen;
        for (const auto& p : E) {
            std::vector<std::pair<std::int64_t, std::int64_t>> r;
            for (double x : p) r.push_back(closed_range(x, k));
            for_each_index(r, [&](const std::vector<std::int64_t>& c) { seen.insert(c); });
        }
        for (const auto& c : seen) out.push_back(DyadicCube{k, c});
    }
    return out;
}

namespace {

struct VecHash {
    std::size_t operator()(const std::vector<std::int64_t>& v) const {
        std::size_t h = 1469598103934665603ull;
        for (auto x : v) h = (h ^ static_cast<std::size_t>(x)) * 1099511628211ull;
        return h;
    }
};

}  // namespace

BetaSumReport beta_sums(const std::vector<Point>& E, double s, BetaVariant v, int k_min, int k_max,
                        FitMode mode) {
    BetaSumReport rep;
    if (E.empty()) return rep;
    const std::size_t n = E[0].size();
    for (int k = k_min; k <= k_max; ++k) {
        // bucket points by cell so 3Q only scans nearby cells
        std::unordered_map<std::vector<std::int64_t>, std::vector<std::size_t>, VecHash> cells;
        for (std::size_t i = 0; i < E.size(); ++i) {
            std::vector<std::int64_t> c(n);
            for (std::size_t d = 0; d < n; ++d)
                c[d] = static_cast<std::int64_t>(std::floor(std::ldexp(E[i][d], -k)));
            cells[c].push_back(i);
        }
        std::set<std::vector<std::int64_t>> cubes;
        for (const auto& p : E) {
            std::vector<std::pair<std::int64_t, std::int64_t>> r;
            for (double x : p) {
                auto [lo, hi] = closed_range(x, k);
                r.push_back({lo - 1, hi + 1});
            }
            for_each_index(r, [&](const std::vector<std::int64_t>& c) { cubes.insert(c); });
        }
        double acc = 0;
        for (const auto& c : cubes) {
            const Region q3 = Region::dilated(DyadicCube{k, c}, 3.0);
            std::vector<Point> inside;
            std::vector<std::pair<std::int64_t, std::int64_t>> r;
            for (auto x : c) r.push_back({x - 2, x + 2});
            for_each_index(r, [&](const std::vector<std::int64_t>& cell) {
                auto it = cells.find(cell);
                if (it == cells.end()) return;
                for (auto i : it->second)
                    if (q3.contains(E[i])) inside.push_back(E[i]);
            });
            if (inside.empty()) continue;
            const double beta = std::clamp(minimax_line(inside, mode).max_dist / q3.diam(), 0.0, 1.0);
            const double dq = DyadicCube{k, c}.diam();
            switch (v.kind) {
                case BetaVariant::Kind::square: acc += beta * beta * dq; break;
                case BetaVariant::Kind::threshold:
                    if (beta >= v.param) acc += std::pow(dq, s);
                    break;
                case BetaVariant::Kind::power: acc += std::pow(beta, v.param) * std::pow(dq, s); break;
            }
        }
        rep.scale_exp.push_back(k);
        rep.per_scale.push_back(acc);
        rep.cubes.push_back(cubes.size());
        rep.total += acc;
    }
    return rep;
}

}  // namespace htsp
