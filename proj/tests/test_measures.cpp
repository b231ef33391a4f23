#include "doctest.h"

#include <cmath>
#include <random>

#include "htsp/errors.hpp"
#include "htsp/measures.hpp"

using namespace htsp;

namespace {

AtomicMeasure random_measure(std::mt19937& rng, int n, int dim) {
    std::uniform_real_distribution<double> u(-1, 1), w(0.1, 2);
    AtomicMeasure mu;
    for (int i = 0; i < n; ++i) {
        Point p(static_cast<std::size_t>(dim));
        for (auto& x : p) x = u(rng);
        mu.atoms.push_back(p);
        mu.weights.push_back(w(rng));
    }
    return mu;
}

Line random_line(std::mt19937& rng, int dim) {
    std::normal_distribution<double> g;
    Point b(static_cast<std::size_t>(dim)), d(static_cast<std::size_t>(dim));
    for (auto& x : b) x = g(rng);
    for (auto& x : d) x = g(rng);
    return Line{b, normalized(d)};
}

// 2D oracle for p = 2: the optimal line passes through the weighted centroid along the
// major axis, so the cost is the smaller eigenvalue of the 2x2 covariance in closed form.
double closed_form_beta2(const AtomicMeasure& mu, const Point& x, double r) {
    double m = 0, cx = 0, cy = 0;
    for (std::size_t i = 0; i < mu.size(); ++i)
        if (dist(mu.atoms[i], x) <= r) {
            m += mu.weights[i];
            cx += mu.weights[i] * mu.atoms[i][0];
            cy += mu.weights[i] * mu.atoms[i][1];
        }
    cx /= m;
    cy /= m;
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < mu.size(); ++i)
        if (dist(mu.atoms[i], x) <= r) {
            const double dx = mu.atoms[i][0] - cx, dy = mu.atoms[i][1] - cy;
            sxx += mu.weights[i] * dx * dx;
            sxy += mu.weights[i] * dx * dy;
            syy += mu.weights[i] * dy * dy;
        }
    const double lo = (sxx + syy) / 2 - std::hypot((sxx - syy) / 2, sxy);
    return std::sqrt(std::max(lo, 0.0) / m) / r;
}

AtomicMeasure line_measure(int n) {
    AtomicMeasure mu;
    for (int i = 0; i < n; ++i) {
        const double t = -0.5 + static_cast<double>(i) / (n - 1);
        mu.atoms.push_back({0.3 + 0.6 * t, 0.2 + 0.8 * t, -0.1});
        mu.weights.push_back(1.0 + (i % 3));
    }
    return mu;
}

}  // namespace

TEST_CASE("two atoms against the horizontal axis") {
    const auto mu = AtomicMeasure::uniform({{0, 0}, {0, 1}});
    const Line axis{{0, 0}, {1, 0}};
    CHECK(beta_p_line(mu, {0, 0}, 2, 2, axis) == doctest::Approx(1 / (2 * std::sqrt(2.0))).epsilon(1e-14));
    CHECK(beta_p(mu, {0, 0}, 2, 2) < 1e-15);
    CHECK(mu.ball({0, 0}, 1) == 2.0);
    CHECK(mu.ball({0, 0}, 0.5) == 1.0);
}

TEST_CASE("errors") {
    const auto mu = AtomicMeasure::uniform({{0, 0}});
    CHECK_THROWS_AS(beta_p(mu, {5, 5}, 1, 2), EmptyBall);
    CHECK_THROWS_AS(beta_p(mu, {0, 0}, 1, 0), BadParameter);
    CHECK_THROWS_AS(beta_p(mu, {0, 0}, 0, 2), BadParameter);
    CHECK(beta_p(mu, {0, 0}, 1, 2) == 0.0);
    CHECK(doubling_sup(mu, {0, 0}, 1e-3, 1) == 1.0);
}

TEST_CASE("least squares infimum matches an angle scan") {
    std::mt19937 rng(4);
    for (int trial = 0; trial < 12; ++trial) {
        const auto mu = random_measure(rng, 6 + trial, 2);
        const Point x = mu.atoms[0];
        const double r = 0.8 + 0.1 * trial;
        const double oracle = closed_form_beta2(mu, x, r);
        const double b = beta_p(mu, x, r, 2);
        CHECK(b == doctest::Approx(oracle).epsilon(1e-9).scale(1e-7));
    }
}

TEST_CASE("fixed-line monotonicity and dilation invariance") {
    std::mt19937 rng(1234);
    std::uniform_real_distribution<double> u(0, 1);
    for (int trial = 0; trial < 1000; ++trial) {
        const int dim = 2 + trial % 3;
        const auto mu = random_measure(rng, 5 + trial % 20, dim);
        const double p = 0.5 + 3 * u(rng);
        const Point x = mu.atoms[static_cast<std::size_t>(trial) % mu.size()];
        const double r = 0.5 + 1.5 * u(rng);
        // a ball strictly inside B(x, r) centred at an atom near x
        const Point& y = mu.atoms[0];
        const double gap = r - dist(x, y);
        const Line L = random_line(rng, dim);
        if (gap > 1e-6) {
            const double sr = gap * (0.2 + 0.79 * u(rng));
            const double lhs = sr * std::pow(mu.ball(y, sr), 1 / p) * beta_p_line(mu, y, sr, p, L);
            const double rhs = r * std::pow(mu.ball(x, r), 1 / p) * beta_p_line(mu, x, r, p, L);
            CHECK(lhs <= rhs * (1 + 1e-12));
        }
        const double lambda = 0.05 + 20 * u(rng);
        const auto big = mu.dilated(lambda);
        const Line bigL{scaled(L.base, lambda), L.dir};
        CHECK(beta_p_line(big, scaled(x, lambda), lambda * r, p, bigL) ==
              doctest::Approx(beta_p_line(mu, x, r, p, L)).epsilon(1e-12));
        if (trial % 10 == 0)
            CHECK(std::abs(beta_p(big, scaled(x, lambda), lambda * r, p) - beta_p(mu, x, r, p)) <= 1e-12);
    }
}

TEST_CASE("infimum beta is monotone when the inner ball may use the outer line") {
    std::mt19937 rng(77);
    for (int trial = 0; trial < 50; ++trial) {
        const auto mu = random_measure(rng, 15, 2);
        const Point& x = mu.atoms[1];
        const double r = 1.5;
        const Line L = best_line_p(mu, x, r, 2);
        const double sr = 0.6;
        const double inner = beta_p(mu, x, sr, 2, {L});
        CHECK(sr * std::sqrt(mu.ball(x, sr)) * inner <= r * std::sqrt(mu.ball(x, r)) * beta_p(mu, x, r, 2) + 1e-12);
    }
}

TEST_CASE("doubling supremum") {
    AtomicMeasure seg;
    for (int i = 0; i <= 4096; ++i) seg.atoms.push_back({i / 4096.0, 0.0});
    seg.weights.assign(seg.atoms.size(), 1.0);
    const double d = doubling_sup(seg, {0.5, 0}, 1.0 / 256, 0.25);
    CHECK(d == doctest::Approx(2.0).epsilon(1e-3));
    // at an endpoint only one side grows
    CHECK(doubling_sup(seg, {0.0, 0}, 1.0 / 256, 0.25) == doctest::Approx(2.0).epsilon(1e-3));
}

TEST_CASE("line measures are flat everywhere") {
    const auto mu = line_measure(65);
    for (std::size_t i = 0; i < mu.size(); i += 8) {
        for (double r : {0.05, 0.2, 1.0}) CHECK(beta_p(mu, mu.atoms[i], r, 1.5) < 1e-12);
        CHECK(jsp(mu, mu.atoms[i], 1.5, 2, 2) < 1e-12);
    }
    SelectionParams sp;
    sp.x0 = mu.atoms[32];
    sp.M = 1e-6;
    sp.P = 1e9;
    sp.theta = 0.5;
    const auto res = measure_pipeline(mu, sp, 5);
    CHECK(res.sel.failed_jsp.empty());
    CHECK(res.sel.Aprime.size() == res.sel.A.size());
    CHECK(res.s_plus == 0.0);
    CHECK(res.chain < 1e-12);
    CHECK_FALSE(res.growing);
    // every vertex of the output curve lies on the line
    const Line L = line_through(mu.atoms.front(), mu.atoms.back());
    for (const auto& p : res.curve.curve.p) CHECK(dist_to_line(p, L) < 1e-12);
}

TEST_CASE("selection drops atoms by each rule") {
    // a dense cluster plus a lone far atom: the lone atom fails the density ratio only when
    // theta is high, and a big-jump atom fails doubling
    AtomicMeasure mu;
    for (int i = 0; i < 40; ++i) mu.atoms.push_back({0.01 * i, 0.0});
    mu.weights.assign(mu.atoms.size(), 1.0);
    mu.atoms.push_back({0.2, 0.3});
    mu.weights.push_back(1.0);
    SelectionParams sp;
    sp.x0 = {0.2, 0.0};
    sp.M = 1e9;
    sp.P = 1e9;
    sp.theta = 0;
    auto sel = select_sets(mu, sp);
    CHECK(sel.A.size() == 41);
    CHECK(sel.Aprime.size() == 41);

    sp.P = 8;
    sel = select_sets(mu, sp);
    // the off-line atom sees its ball jump from 1 to many atoms
    CHECK(std::find(sel.failed_doubling.begin(), sel.failed_doubling.end(), 40) != sel.failed_doubling.end());

    sp.P = 1e9;
    sp.M = 1e-9;
    sel = select_sets(mu, sp);
    CHECK_FALSE(sel.failed_jsp.empty());
    CHECK(sel.A.size() + sel.failed_jsp.size() == 41);
}

TEST_CASE("pipeline on a wiggly measure") {
    AtomicMeasure mu;
    for (int i = 0; i <= 200; ++i) {
        const double t = i / 200.0 - 0.5;
        mu.atoms.push_back({0.8 * t, 0.05 * std::sin(40 * t)});
    }
    mu.weights.assign(mu.atoms.size(), 1.0);
    SelectionParams sp;
    sp.x0 = {0, 0};
    sp.M = 1e9;
    sp.P = 1e9;
    sp.theta = 0;
    sp.s = 1.5;
    const auto res = measure_pipeline(mu, sp, 5);
    CHECK(res.exponent == doctest::Approx(2 + std::log2(1e9)));
    CHECK(res.curve.H > 0);
    CHECK(empirical_holder(res.curve.curve, 1.5, 5000) <= res.curve.H);
    CHECK(res.s_plus_levels.size() == res.chain_levels.size());
    CHECK_THROWS_AS(measure_pipeline(AtomicMeasure::uniform({{5.0, 5.0}}), sp, 3), EmptyInput);
}
