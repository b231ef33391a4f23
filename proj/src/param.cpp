#include "htsp/param.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

namespace htsp {

namespace {

template <class V>
auto& ix(V& v, int i) {
    return v[static_cast<std::size_t>(i)];
}

// Single point everywhere: the constant map needs no mass.
bool constant_states(const std::vector<LevelState>& states) {
    int v = -1;
    for (const auto& st : states)
        for (const auto& r : st.records) {
            if (!r.is_point()) return false;
            if (v >= 0 && r.va != v) return false;
            v = r.va;
        }
    return true;
}

double clipped_length(const Point& p, const Point& q, const Point& c, double r) {
    const Point d = sub(q, p);
    const double len2 = dot(d, d);
    if (len2 == 0) return 0;
    const Point w = sub(p, c);
    const double b = dot(w, d) / len2;
    const double disc = b * b - (dot(w, w) - r * r) / len2;
    if (disc < 0) return 0;
    const double root = std::sqrt(disc);
    const double lo = std::max(0.0, -b - root);
    const double hi = std::min(1.0, -b + root);
    return hi > lo ? (hi - lo) * std::sqrt(len2) : 0.0;
}

double point_polyline_distance(const Point& x, const Polyline& f) {
    double best = f.size() ? dist(x, f.p[0]) : INFINITY;
    for (std::size_t i = 0; i + 1 < f.size(); ++i) {
        const Point& p = f.p[i];
        const Point& q = f.p[i + 1];
        const Point d = sub(q, p);
        const double len2 = dot(d, d);
        const double u = len2 > 0 ? std::clamp(dot(sub(x, p), d) / len2, 0.0, 1.0) : 0.0;
        best = std::min(best, dist(x, add(p, scaled(d, u))));
    }
    return best;
}

}  // namespace

Point Polyline::operator()(double x) const {
    if (t.empty()) throw EmptyInput("empty polyline");
    if (x <= t.front()) return p.front();
    if (x >= t.back()) return p.back();
    const auto it = std::upper_bound(t.begin(), t.end(), x);
    const std::size_t j = static_cast<std::size_t>(it - t.begin());
    const std::size_t i = j - 1;
    const double w = t[j] - t[i];
    if (w <= 0) return p[j];
    return lerp(p[i], p[j], (x - t[i]) / w);
}

double Polyline::length() const {
    double L = 0;
    for (std::size_t i = 0; i + 1 < p.size(); ++i) L += dist(p[i], p[i + 1]);
    return L;
}

Reallocation reallocate(const std::vector<LevelState>& states, const MassTable& t, bool flat) {
    Reallocation re;
    re.flat = flat;
    const int m = t.depth;
    const bool trivial = !(t.total > 0);
    if (trivial && !constant_states(states))
        throw ZeroMass("total mass is zero but the states move");
    for (int k = 0; k <= m; ++k) {
        const auto n = ix(states, k).records.size();
        re.a.emplace_back(n, 0.0);
        re.b.emplace_back(n, 0.0);
    }
    auto share = [&](int k, int i) { return trivial ? 0.0 : ix(ix(t.mass, k), i) / t.total; };

    // lay out `ids` of level k inside [lo, hi]
    auto lay = [&](int k, const std::vector<int>& ids, double lo, double hi) {
        const auto& recs = ix(states, k).records;
        std::vector<double> len(ids.size());
        double base = 0, weight = 0;
        int edges = 0;
        for (std::size_t j = 0; j < ids.size(); ++j) {
            len[j] = share(k, ids[j]);
            base += len[j];
            weight += len[j];
            edges += ix(recs, ids[j]).kind == Kind::edge;
        }
        const double slack = std::max(0.0, (hi - lo) - base);
        for (std::size_t j = 0; j < ids.size(); ++j) {
            const auto& r = ix(recs, ids[j]);
            if (flat && edges > 0) {
                if (r.kind == Kind::edge) len[j] += slack / edges;
                if (r.kind == Kind::frozen) len[j] = 0;
            } else if (weight > 0) {
                len[j] += slack * (len[j] / weight);
            } else {
                len[j] = (hi - lo) / static_cast<double>(ids.size());
            }
        }
        double at = lo;
        for (std::size_t j = 0; j < ids.size(); ++j) {
            ix(ix(re.a, k), ids[j]) = at;
            at = j + 1 == ids.size() ? hi : std::min(hi, at + len[j]);
            ix(ix(re.b, k), ids[j]) = at;
        }
    };

    std::vector<int> top(ix(states, 0).records.size());
    for (std::size_t i = 0; i < top.size(); ++i) top[i] = static_cast<int>(i);
    lay(0, top, 0.0, 1.0);
    for (int k = 0; k < m; ++k) {
        const auto kids = children(states, k);
        for (int i = 0; i < static_cast<int>(kids.size()); ++i)
            lay(k + 1, ix(kids, i), ix(ix(re.a, k), i), ix(ix(re.b, k), i));
    }
    return re;
}

ReallocationCheck check_reallocation(const std::vector<LevelState>& states, const MassTable& t,
                                     const Reallocation& re, double tol) {
    ReallocationCheck c;
    auto note = [&](const std::string& s) {
        if (c.witness.empty()) c.witness = s;
    };
    for (int k = 0; k <= t.depth; ++k) {
        const auto& A = ix(re.a, k);
        const auto& B = ix(re.b, k);
        for (int i = 0; i < static_cast<int>(A.size()); ++i) {
            const double sh = t.total > 0 ? ix(ix(t.mass, k), i) / t.total : 0.0;
            if (ix(B, i) - ix(A, i) < sh - tol) {
                c.share_bound = false;
                std::ostringstream o;
                o << "level " << k << " record " << i << " shorter than its share";
                note(o.str());
            }
            const double prev = i == 0 ? 0.0 : ix(B, i - 1);
            if (ix(A, i) != prev || ix(B, i) < ix(A, i)) {
                c.partition = false;
                note("level " + std::to_string(k) + " is not tiled at record " + std::to_string(i));
            }
        }
        if (!A.empty() && B.back() != 1.0) {
            c.partition = false;
            note("level " + std::to_string(k) + " does not end at 1");
        }
        if (k == 0) continue;
        const auto kids = children(states, k - 1);
        for (int i = 0; i < static_cast<int>(kids.size()); ++i) {
            const auto& ks = ix(kids, i);
            if (ks.empty() || ix(A, ks.front()) != ix(ix(re.a, k - 1), i) ||
                ix(B, ks.back()) != ix(ix(re.b, k - 1), i)) {
                c.partition = false;
                note("children of level " + std::to_string(k - 1) + " record " + std::to_string(i) +
                     " do not span it");
            }
        }
    }
    return c;
}

Polyline level_map(const LevelState& st, const NetHierarchy& h, const std::vector<double>& a,
                   const std::vector<double>& b) {
    Polyline f;
    auto push = [&](double x, const Point& p) {
        if (!f.t.empty() && f.t.back() == x && f.p.back() == p) return;
        f.t.push_back(x);
        f.p.push_back(p);
    };
    for (int i = 0; i < static_cast<int>(st.records.size()); ++i) {
        const auto& r = ix(st.records, i);
        push(ix(a, i), h.pt(r.va));
        push(ix(b, i), h.pt(r.vb));
    }
    return f;
}

double holder_constant(double mass, double s, const NetHierarchy& h) {
    return (mass * std::pow(h.r0, 1 - s) + 60 * h.astar() * h.r0 * h.xi2 / (1 - h.xi2)) / h.xi1;
}

double lip_to_holder(double M, double xi1, double xi2, double alpha, double beta, double s) {
    if (!(M > 0) || !(xi1 > 0) || !(xi1 <= xi2) || !(xi2 < 1) || s < 1)
        throw BadParameter("need M > 0, 0 < xi1 <= xi2 < 1 and s >= 1");
    return std::max(1.0, 1.0 / M) / xi1 * (alpha * M + 2 * beta / (1 - xi2));
}

HolderCurve assemble(const std::vector<LevelState>& states, const NetHierarchy& h, const MassTable& t,
                     const Reallocation& re) {
    HolderCurve c;
    c.s = t.s;
    c.exponent = 1 / t.s;
    c.depth = t.depth;
    c.flat = re.flat;
    c.mass = t.total;
    for (int k = 0; k <= t.depth; ++k)
        c.levels.push_back(level_map(ix(states, k), h, ix(re.a, k), ix(re.b, k)));
    c.curve = c.levels.back();
    c.H = holder_constant(t.total, t.s, h);
    // geometric tail of the 30 A* xi2 r0 rho_k steps past the last level
    c.tail = 30 * h.astar() * h.xi2 * h.scale(std::min(t.depth, h.depth())) / (1 - h.xi2);
    return c;
}

HolderCurve build_curve(const std::vector<LevelState>& states, const NetHierarchy& h, double s, bool flat) {
    const MassTable t = compute_mass(states, h, s);
    return assemble(states, h, t, reallocate(states, t, flat));
}

bool ConvergenceReport::ok(double tol) const {
    for (std::size_t k = 0; k < step.size(); ++k)
        if (step[k] > step_bound[k] * (1 + tol) + tol) return false;
    for (std::size_t k = 0; k < lip.size(); ++k)
        if (lip[k] > lip_bound[k] * (1 + tol) + tol) return false;
    return true;
}

ConvergenceReport convergence_report(const HolderCurve& c, const NetHierarchy& h) {
    ConvergenceReport rep;
    const int m = static_cast<int>(c.levels.size()) - 1;
    for (int k = 0; k <= m; ++k) {
        const Polyline& f = ix(c.levels, k);
        rep.lip.push_back(max_slope(f));
        rep.lip_bound.push_back(c.mass * std::pow(h.r0, 1 - c.s) * std::pow(ix(h.rho, k), 1 - c.s));
        if (k == m) break;
        // the difference of two polylines peaks at a breakpoint of one of them
        const Polyline& g = ix(c.levels, k + 1);
        double worst = 0;
        for (double x : f.t) worst = std::max(worst, dist(f(x), g(x)));
        for (double x : g.t) worst = std::max(worst, dist(f(x), g(x)));
        rep.step.push_back(worst);
        rep.step_bound.push_back(30 * h.astar() * h.xi2 * h.scale(k));
    }
    return rep;
}

CoverageReport coverage_check(const HolderCurve& c, const NetHierarchy& h, double tol) {
    CoverageReport rep;
    rep.tail = c.tail;
    for (int k = 0; k <= h.depth(); ++k) {
        double worst = 0;
        for (int v : ix(h.levels, k)) worst = std::max(worst, point_polyline_distance(h.pt(v), c.curve));
        if (k <= c.depth)
            rep.built = std::max(rep.built, worst);
        else
            rep.beyond = std::max(rep.beyond, worst);
    }
    rep.ok = rep.built <= tol && rep.beyond <= rep.tail + tol;
    return rep;
}

double max_slope(const Polyline& f) {
    double best = 0;
    for (std::size_t i = 0; i + 1 < f.size(); ++i) {
        const double w = f.t[i + 1] - f.t[i];
        if (w > 0) best = std::max(best, dist(f.p[i], f.p[i + 1]) / w);
    }
    return best;
}

double empirical_holder(const Polyline& f, double s, int samples, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0, 1);
    const double e = 1 / s;
    double best = 0;
    auto probe = [&](double x, double y) {
        const double d = std::abs(x - y);
        if (d > 0) best = std::max(best, dist(f(x), f(y)) / std::pow(d, e));
    };
    for (int i = 0; i < samples; ++i) {
        const double x = u(rng);
        if (i % 2 == 0) {
            probe(x, u(rng));
        } else {
            // log-uniform gaps reach the fine scales
            const double gap = std::pow(10.0, -9 * u(rng));
            probe(x, std::clamp(x + (u(rng) < 0.5 ? -gap : gap), 0.0, 1.0));
        }
    }
    for (std::size_t i = 0; i + 1 < f.size(); ++i) probe(f.t[i], f.t[i + 1]);
    return best;
}

InjectivityReport injectivity_check(const std::vector<LevelState>& states, const NetHierarchy& h,
                                    const Reallocation& re, const Polyline& f, int samples,
                                    std::uint64_t seed) {
    InjectivityReport rep;
    rep.min_ratio = INFINITY;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0, 1);
    const int m = static_cast<int>(re.a.size()) - 1;
    for (int n = 0; n < samples; ++n) {
        double x = u(rng), y = u(rng);
        if (n % 2 == 1) y = std::clamp(x + std::pow(10.0, -6 * u(rng)), 0.0, 1.0);
        if (x > y) std::swap(x, y);
        if (x == y) continue;
        ++rep.pairs;
        int k0 = -1;
        for (int k = 0; k <= m && k0 < 0; ++k) {
            const auto& recs = ix(states, k).records;
            for (int i = 0; i < static_cast<int>(recs.size()); ++i)
                if (ix(recs, i).kind == Kind::edge && x <= ix(ix(re.a, k), i) && ix(ix(re.b, k), i) <= y) {
                    k0 = k;
                    break;
                }
        }
        if (k0 < 0) continue;
        ++rep.resolved;
        const double ratio = dist(f(x), f(y)) / (0.15 * std::ldexp(1.0, -k0) * h.r0);
        if (ratio < rep.min_ratio) {
            rep.min_ratio = ratio;
            rep.x = x;
            rep.y = y;
        }
    }
    if (rep.resolved == 0) rep.min_ratio = 0;
    return rep;
}

RegularityReport upper_regularity_scan(const Polyline& f, double s, const std::vector<double>& radii, int centers) {
    RegularityReport rep;
    if (f.size() < 2) return rep;
    const std::size_t step = std::max<std::size_t>(1, f.size() / static_cast<std::size_t>(std::max(centers, 1)));
    for (std::size_t ci = 0; ci < f.size(); ci += step) {
        const Point& c = f.p[ci];
        for (double r : radii) {
            double content = 0;
            for (std::size_t i = 0; i + 1 < f.size(); ++i) {
                const double l = clipped_length(f.p[i], f.p[i + 1], c, r);
                if (l > 0) content += std::pow(l, s);
            }
            const double ratio = content / std::pow(r, s);
            if (ratio > rep.sup_ratio) {
                rep.sup_ratio = ratio;
                rep.center = c;
                rep.radius = r;
            }
        }
    }
    return rep;
}

LipschitzReport lipschitz_report(const HolderCurve& c, const NetHierarchy& h, const LineFitTable& fits) {
    LipschitzReport rep;
    rep.certified = c.mass * std::pow(h.r0, 1 - c.s);
    rep.sampled = max_slope(c.curve);
    rep.alpha0 = alpha_one(h.cstar, h.xi1, h.xi2);
    for (int k = 0; k < fits.levels() && k <= h.depth(); ++k)
        for (int v : ix(h.levels, k)) {
            const double a = fits.get(k, v).alpha;
            rep.square_sum += a * a * ix(h.rho, k);
        }
    Params prm;
    prm.s = 1;
    prm.alpha0 = rep.alpha0;
    rep.s1 = s_sum(h, fits, prm).total;
    rep.chain_ok = rep.s1 <= rep.square_sum / (rep.alpha0 * rep.alpha0) * (1 + 1e-12) + 1e-12;
    return rep;
}

WiggleCheck wiggle_holder_check(double s, double rho, double amp, int terms, int samples, std::uint64_t seed) {
    if (!(s > 1) || !(rho > 0 && rho < 1)) throw BadParameter("wiggle needs s > 1 and 0 < rho < 1");
    WiggleCheck w;
    constexpr double tau = 2 * std::numbers::pi;
    w.alpha = tau * amp / (std::pow(rho, 1 - s) - 1);
    w.beta = amp;
    w.H = lip_to_holder(1.0, rho, rho, w.alpha, w.beta, s);
    auto f = [&](double x) {
        double y = 0;
        for (int i = 0; i < terms; ++i) y += amp * std::pow(rho, i) * std::sin(tau * x / std::pow(rho, i * s));
        return y;
    };
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0, 1);
    for (int n = 0; n < samples; ++n) {
        const double x = u(rng);
        const double y = n % 2 ? u(rng) : std::clamp(x + std::pow(10.0, -8 * u(rng)), 0.0, 1.0);
        const double d = std::abs(x - y);
        if (d > 0) w.ratio = std::max(w.ratio, std::abs(f(x) - f(y)) / std::pow(d, 1 / s));
    }
    return w;
}

}  // namespace htsp
