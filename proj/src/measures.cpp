#include "htsp/measures.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "htsp/errors.hpp"

namespace htsp {

AtomicMeasure AtomicMeasure::uniform(std::vector<Point> pts) {
    AtomicMeasure mu;
    mu.weights.assign(pts.size(), 1.0);
    mu.atoms = std::move(pts);
    return mu;
}

double AtomicMeasure::total() const {
    double t = 0;
    for (double w : weights) t += w;
    return t;
}

double AtomicMeasure::ball(const Point& x, double r) const {
    double m = 0;
    for (std::size_t i = 0; i < atoms.size(); ++i)
        if (dist(atoms[i], x) <= r) m += weights[i];
    return m;
}

AtomicMeasure AtomicMeasure::dilated(double lambda) const {
    AtomicMeasure mu = *this;
    for (auto& a : mu.atoms) a = scaled(a, lambda);
    return mu;
}

namespace {

// Atoms of the closed ball B(x, r), rescaled to the unit ball around the origin.
struct Window {
    std::vector<Point> y;
    std::vector<double> w;
    double mass = 0;
};

Window window(const AtomicMeasure& mu, const Point& x, double r) {
    if (!(r > 0)) throw BadParameter("radius must be positive");
    Window win;
    for (std::size_t i = 0; i < mu.size(); ++i) {
        if (dist(mu.atoms[i], x) > r) continue;
        win.y.push_back(scaled(sub(mu.atoms[i], x), 1.0 / r));
        win.w.push_back(mu.weights[i]);
        win.mass += mu.weights[i];
    }
    if (!(win.mass > 0)) throw EmptyBall("mu(B(x, r)) = 0");
    return win;
}

double cost(const Window& win, const Line& L, double p) {
    double acc = 0;
    for (std::size_t i = 0; i < win.y.size(); ++i) acc += win.w[i] * std::pow(dist_to_line(win.y[i], L), p);
    return std::pow(acc / win.mass, 1.0 / p);
}

// Principal line of the weights g_i at y_i, by power iteration on the covariance.
Line principal(const std::vector<Point>& y, const std::vector<double>& g) {
    const std::size_t n = y[0].size();
    double gs = 0;
    Point c(n, 0.0);
    for (std::size_t i = 0; i < y.size(); ++i) {
        gs += g[i];
        for (std::size_t d = 0; d < n; ++d) c[d] += g[i] * y[i][d];
    }
    Line L;
    L.dir.assign(n, 0.0);
    L.dir[0] = 1;
    if (!(gs > 0)) {
        L.base = y[0];
        return L;
    }
    for (auto& v : c) v /= gs;
    L.base = c;
    std::vector<double> cov(n * n, 0.0);
    for (std::size_t i = 0; i < y.size(); ++i)
        for (std::size_t a = 0; a < n; ++a)
            for (std::size_t b = 0; b < n; ++b) cov[a * n + b] += g[i] * (y[i][a] - c[a]) * (y[i][b] - c[b]);
    std::size_t start = 0;
    for (std::size_t a = 1; a < n; ++a)
        if (cov[a * n + a] > cov[start * n + start]) start = a;
    if (!(cov[start * n + start] > 0)) return L;
    Point v(n, 0.0);
    v[start] = 1;
    for (int it = 0; it < 300; ++it) {
        Point nv(n, 0.0);
        for (std::size_t a = 0; a < n; ++a)
            for (std::size_t b = 0; b < n; ++b) nv[a] += cov[a * n + b] * v[b];
        const double len = norm(nv);
        if (!(len > 0)) break;
        v = scaled(nv, 1.0 / len);
    }
    L.dir = v;
    return L;
}

Line unscale(const Line& L, const Point& x, double r) {
    return Line{add(x, scaled(L.base, r)), L.dir};
}

Line rescale(const Line& L, const Point& x, double r) {
    return Line{scaled(sub(L.base, x), 1.0 / r), L.dir};
}

// Best candidate line in window coordinates and its cost.
std::pair<Line, double> search(const Window& win, double p, const std::vector<Line>& extra) {
    Line best;
    double bc = std::numeric_limits<double>::infinity();
    auto consider = [&](const Line& L) {
        const double c = cost(win, L, p);
        if (c < bc) {
            bc = c;
            best = L;
        }
    };
    const std::size_t n = win.y[0].size();

    Line L = principal(win.y, win.w);
    consider(L);
    // reweighted refits move the principal line toward the L^p optimum
    if (p != 2) {
        for (int it = 0; it < 30; ++it) {
            std::vector<double> g(win.y.size());
            for (std::size_t i = 0; i < g.size(); ++i)
                g[i] = win.w[i] * std::pow(std::max(dist_to_line(win.y[i], L), 1e-9), p - 2);
            L = principal(win.y, g);
            consider(L);
        }
    }
    if (win.y.size() >= 2) consider(minimax_line(win.y, default_fit_mode(n)).line);

    const Point origin(n, 0.0);
    if (win.y.size() <= 64)
        for (const auto& y : win.y)
            if (norm(y) > 0) consider(line_through(origin, y));
    if (win.y.size() <= 24)
        for (std::size_t i = 0; i < win.y.size(); ++i)
            for (std::size_t j = i + 1; j < win.y.size(); ++j)
                if (dist(win.y[i], win.y[j]) > 0) consider(line_through(win.y[i], win.y[j]));
    for (const auto& e : extra) consider(e);
    return {best, bc};
}

void check_p(double p) {
    if (!(p > 0)) throw BadParameter("p must be positive");
}

}  // namespace

double beta_p_line(const AtomicMeasure& mu, const Point& x, double r, double p, const Line& L) {
    check_p(p);
    const Window win = window(mu, x, r);
    return cost(win, rescale(L, x, r), p);
}

double beta_p(const AtomicMeasure& mu, const Point& x, double r, double p, const std::vector<Line>& extra) {
    check_p(p);
    const Window win = window(mu, x, r);
    std::vector<Line> ex;
    for (const auto& e : extra) ex.push_back(rescale(e, x, r));
    return search(win, p, ex).second;
}

Line best_line_p(const AtomicMeasure& mu, const Point& x, double r, double p) {
    check_p(p);
    const Window win = window(mu, x, r);
    return unscale(search(win, p, {}).first, x, r);
}

double doubling_sup(const AtomicMeasure& mu, const Point& x, double r_min, double r_max) {
    if (!(r_min > 0) || r_min > r_max) throw BadParameter("need 0 < r_min <= r_max");
    double sup = 1;
    for (double r = r_max; r >= r_min; r *= 0.5) {
        const double inner = mu.ball(x, r);
        if (!(inner > 0)) return std::numeric_limits<double>::infinity();
        sup = std::max(sup, mu.ball(x, 2 * r) / inner);
    }
    return sup;
}

double jsp(const AtomicMeasure& mu, const Point& x, double s, double p, double q, int octaves) {
    if (octaves < 1) throw BadParameter("octaves must be positive");
    double sum = 0;
    for (int j = 1; j <= octaves; ++j) {
        const double r = std::ldexp(1.0, -j);
        const double b = beta_p(mu, x, r, p);
        sum += std::pow(b, q) * std::pow(r, s) / mu.ball(x, r) * std::log(2.0);
    }
    return sum;
}

Selection select_sets(const AtomicMeasure& mu, const SelectionParams& sp) {
    if (mu.size() == 0) throw EmptyInput("measure has no atoms");
    Selection sel;
    for (std::size_t i = 0; i < mu.size(); ++i) {
        const Point& x = mu.atoms[i];
        if (!(mu.weights[i] > 0) || !(dist(x, sp.x0) < 0.5)) continue;
        const int id = static_cast<int>(i);
        bool keep = true;
        if (jsp(mu, x, sp.s, sp.p, sp.q, sp.octaves) > sp.M) {
            sel.failed_jsp.push_back(id);
            keep = false;
        }
        if (doubling_sup(mu, x, std::ldexp(1.0, -sp.octaves), 1.0) > sp.P) {
            sel.failed_doubling.push_back(id);
            keep = false;
        }
        if (keep) sel.A.push_back(id);
    }
    for (int id : sel.A) {
        const Point& x = mu.atoms[static_cast<std::size_t>(id)];
        bool dense = true;
        for (int j = 0; j <= sp.octaves && dense; ++j) {
            const double r = std::ldexp(1.0, -j);
            double inA = 0;
            for (int a : sel.A)
                if (dist(mu.atoms[static_cast<std::size_t>(a)], x) <= r) inA += mu.weights[static_cast<std::size_t>(a)];
            dense = inA >= sp.theta * mu.ball(x, r);
        }
        (dense ? sel.Aprime : sel.failed_density).push_back(id);
    }
    return sel;
}

PipelineResult measure_pipeline(const AtomicMeasure& mu, const SelectionParams& sp, int depth) {
    if (!(sp.P >= 1)) throw BadParameter("doubling constant must be at least 1");
    PipelineResult res;
    res.sel = select_sets(mu, sp);
    if (res.sel.Aprime.empty()) throw EmptyInput("no atom survives the selection");
    std::vector<Point> pts;
    for (int id : res.sel.Aprime) pts.push_back(mu.atoms[static_cast<std::size_t>(id)]);

    res.h = build_nets(pts, depth + 1);
    res.fits = fit_lines(res.h);
    res.prm = default_params(res.h, sp.s, depth);
    res.prm.p = sp.p;
    res.prm.q = sp.q;
    ChoiceLedger ledger;
    res.states = run(res.h, res.fits, res.prm, ledger, false);
    res.curve = build_curve(res.states, res.h, sp.s);

    res.exponent = sp.q + sp.q / sp.p * std::log2(sp.P);
    const auto ss = s_sum(res.h, res.fits, res.prm);
    res.s_plus_levels = ss.nonflat;
    for (double v : ss.nonflat) res.s_plus += v;
    for (int k = 0; k < res.fits.levels() && k < res.h.depth(); ++k) {
        const double rs = std::pow(res.h.rho[static_cast<std::size_t>(k)], sp.s);
        double c = 0;
        for (int v : res.h.levels[static_cast<std::size_t>(k)]) {
            const auto& f = res.fits.get(k, v);
            if (f.valid) c += std::pow(f.alpha, res.exponent) * rs;
        }
        res.chain_levels.push_back(c);
        res.chain += c;
    }
    const auto& L = res.s_plus_levels;
    res.growing = L.size() >= 3 && L.back() > 0 && L.back() >= L[L.size() - 2];
    return res;
}

}  // namespace htsp
