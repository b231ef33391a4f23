#include "doctest.h"

#include <cmath>
#include <random>

#include "htsp/nets.hpp"

using namespace htsp;

namespace {

NetHierarchy manual(std::vector<Point> pts, std::vector<std::vector<int>> levels, double ratio, double r0) {
    NetHierarchy h;
    h.points = std::move(pts);
    h.levels = std::move(levels);
    double rho = 1;
    for (std::size_t k = 0; k < h.levels.size(); ++k, rho *= ratio) h.rho.push_back(rho);
    h.x0 = h.points[0];
    h.r0 = r0;
    h.cstar = 2;
    h.xi1 = h.xi2 = ratio;
    return h;
}

}  // namespace

TEST_CASE("two points and singletons") {
    auto h = build_nets({{0, 0}, {1, 0}}, 2);
    CHECK(h.r0 == doctest::Approx(1));
    CHECK(h.levels[0] == std::vector<int>{0, 1});
    CHECK(h.levels[1] == std::vector<int>{0, 1});
    CHECK(h.levels[2] == std::vector<int>{0, 1});
    CHECK(validate_nets(h).ok());

    auto s = build_nets({{0.3, 0.7}}, 3);
    CHECK(s.r0 == 1.0);
    for (const auto& L : s.levels) CHECK(L.size() == 1);
    CHECK_THROWS_AS(build_nets({}, 2), EmptyInput);
}

TEST_CASE("random clouds give valid hierarchies") {
    std::mt19937 rng(1);
    std::uniform_real_distribution<double> u(0, 1);
    for (bool far : {false, true}) {
        std::vector<Point> E(100, Point(2));
        for (auto& p : E) p = {u(rng), u(rng)};
        auto h = build_nets(E, 5, 0.5, far);
        auto rep = validate_nets(h);
        CHECK_MESSAGE(rep.ok(), rep.first_failure());
        CHECK(h.levels.back().size() <= E.size());
    }
}

TEST_CASE("validator catches planted faults") {
    auto h = build_nets({{0, 0}, {1, 0}, {0.5, 0.1}, {0.25, 0}}, 3);
    REQUIRE(validate_nets(h).ok());

    auto dup = h;
    dup.levels[2].push_back(dup.levels[2][0]);
    auto r = validate_nets(dup);
    CHECK_FALSE(r.ok());
    CHECK(r.first_failure().find("V3") != std::string::npos);

    auto gap = h;
    gap.levels[2].erase(std::find(gap.levels[2].begin(), gap.levels[2].end(), gap.levels[1].back()));
    CHECK(validate_nets(gap).first_failure().find("V2") == 0);
}

TEST_CASE("line fits") {
    std::vector<Point> E;
    for (int i = 0; i <= 16; ++i) E.push_back({i / 16.0, 2 * i / 16.0});
    auto h = build_nets(E, 4);
    auto f = fit_lines(h);
    CHECK(f.levels() == 4);
    for (int k = 0; k < 4; ++k)
        for (int v : h.levels[static_cast<std::size_t>(k)]) CHECK(f.get(k, v).alpha == doctest::Approx(0).epsilon(1e-9));

    auto two = build_nets({{0, 0}, {0.7, 0.4}}, 2);
    auto f2 = fit_lines(two);
    CHECK(f2.get(0, 0).alpha == 0.0);
    CHECK(f2.get(0, 0).window == 2);
}

TEST_CASE("ordering along a line") {
    NetHierarchy h = manual({{3, 0.01}, {1, 0}, {2, -0.02}, {0, 0}}, {{0, 1, 2, 3}}, 0.5, 1);
    Line l{{0, 0}, {1, 0}};
    CHECK(order_points(h, {0, 1, 2, 3}, l) == std::vector<int>{3, 1, 2, 0});
    Line r{{0, 0}, {-1, 0}};
    CHECK(order_points(h, {0, 1, 2, 3}, r) == std::vector<int>{0, 2, 1, 3});
    // two nearly-equal fitted lines order a flat set identically
    Line tilt{{0, 0.001}, normalized({1, 0.004})};
    CHECK(order_points(h, {0, 1, 2, 3}, tilt) == order_points(h, {0, 1, 2, 3}, l));
}

TEST_CASE("flat pairs on equispaced collinear points") {
    std::vector<Point> pts{{0, 0}, {1, 0}, {2, 0}, {3, 0}, {4, 0}};
    auto h = manual(pts, {{0, 1, 2, 3, 4}, {0, 1, 2, 3, 4}}, 0.5, 1);
    auto f = fit_lines(h);
    auto pairs = flat_pairs(h, f, 1.0 / 16, 0);
    std::vector<int> count(5, 0);
    for (const auto& p : pairs) count[static_cast<std::size_t>(p.v)]++;
    CHECK(count == std::vector<int>{1, 2, 2, 2, 1});

    // a non-flat vertex contributes nothing
    f.at[0][2].alpha = 0.5;
    for (const auto& p : flat_pairs(h, f, 1.0 / 16, 0)) CHECK(p.v != 2);
}

TEST_CASE("variation excess of a bent chain") {
    const double ht = 0.05;
    auto h = manual({{0, 0}, {1, 0}, {0.5, ht}}, {{0, 1}, {0, 1, 2}}, 0.5, 1);
    auto f = fit_lines(h);
    CHECK(f.get(0, 0).alpha == doctest::Approx(ht));
    FlatPair fp{0, 0, 1, Side::right};
    const double tau1 = variation_excess(h, f, fp, 1, 1.0 / 16);
    CHECK(tau1 == doctest::Approx(2 * std::sqrt(0.25 + ht * ht) - 1).epsilon(1e-12));
    CHECK(tau1 == doctest::Approx(0.0049876).epsilon(1e-4));
    CHECK(tau1 <= 3 * f.get(0, 0).alpha * f.get(0, 0).alpha);
    CHECK(variation_excess(h, f, fp, 2, 1.0 / 16) == 0.0);
    CHECK_THROWS_AS(variation_excess(h, f, FlatPair{0, 0, 2, Side::right}, 1, 1.0 / 16), PairNotFlat);

    auto straight = manual({{0, 0}, {1, 0}}, {{0, 1}, {0, 1}}, 0.5, 1);
    auto fs = fit_lines(straight);
    CHECK(variation_excess(straight, fs, FlatPair{0, 0, 1, Side::right}, 1.5, 1.0 / 16) == 0.0);
}

TEST_CASE("tube threshold") {
    // closed form for s = 2: 3 a^2 = sqrt(1 - t^2) - 1 + t with t = xi1 / (14 A*)
    const double t = 0.5 / 56;
    const double expect = std::sqrt((std::sqrt(1 - t * t) - 1 + t) / 3);
    const double eps = tube_threshold(2, 2, 0.5, 0.5);
    CHECK(eps == doctest::Approx(expect).epsilon(1e-10));
    CHECK(eps == doctest::Approx(0.0544).epsilon(1e-3));
    CHECK(tube_coefficient(eps, 2, 2, 0.5, 0.5) == doctest::Approx(1).epsilon(1e-10));

    double prev = 1;
    for (double s : {2.0, 1.5, 1.2, 1.05, 1.01, 1.001}) {
        const double e = tube_threshold(s, 2, 0.5, 0.5);
        CHECK(e <= 1.0 / 16);
        CHECK(e <= prev);
        prev = e;
    }
    CHECK_THROWS_AS(tube_threshold(1.0, 2, 0.5, 0.5), NoRoot);
}

TEST_CASE("alpha one") {
    CHECK(alpha_one(2, 0.5, 0.5) == doctest::Approx(std::sqrt(1.0 / 336)));
    CHECK(alpha_one(2, 0.5, 0.5) == doctest::Approx(0.0546).epsilon(1e-3));
    CHECK(alpha_one(2, 1e-8, 0.5) < 1e-4);
    CHECK(alpha_one(1, 0.9, 0.9) <= 1.0 / 16);
    CHECK(default_alpha0(2, 2, 0.5, 0.5) == doctest::Approx(tube_threshold(2, 2, 0.5, 0.5)));
    CHECK(default_alpha0(1, 2, 0.5, 0.5) == doctest::Approx(alpha_one(2, 0.5, 0.5)));
}

TEST_CASE("flatness sums") {
    std::vector<Point> E;
    for (int i = 0; i <= 32; ++i) E.push_back({i / 32.0, 0.0});
    auto h = build_nets(E, 5);
    auto f = fit_lines(h);
    auto prm = default_params(h, 1.5, 4);
    CHECK(s_sum(h, f, prm).total == 0.0);
    for (int j = 0; j < 4; ++j)
        for (int w : h.levels[static_cast<std::size_t>(j)]) CHECK(carleson_sum(h, f, prm, j, w, 4) == 0.0);

    std::mt19937 rng(2);
    std::uniform_real_distribution<double> u(0, 1);
    std::vector<Point> cloud(40, Point(2));
    for (auto& p : cloud) p = {u(rng), u(rng)};
    auto hc = build_nets(cloud, 4);
    auto fc = fit_lines(hc);
    auto pc = default_params(hc, 1.2, 3);
    const auto total = s_sum(hc, fc, pc);
    CHECK(total.total > 0);
    CHECK(carleson_sum(hc, fc, pc, 0, hc.levels[0][0], 1e6) == doctest::Approx(total.total));
}
