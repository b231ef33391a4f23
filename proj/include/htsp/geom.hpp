#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "htsp/errors.hpp"

namespace htsp {

using Point = std::vector<double>;

inline constexpr double kTol = 1e-9;

struct Line {
    Point base;
    Point dir;  // unit length
};

enum class FitMode { exact2d, farpair, refine };

std::string to_string(FitMode m);
FitMode fit_mode_from_string(const std::string& s);
// exact2d for planar data, refine otherwise.
FitMode default_fit_mode(std::size_t dim);

struct LineFit {
    Line line;
    double max_dist = 0.0;
    FitMode mode = FitMode::exact2d;
};

// Closed cube prod [2^k m_i, 2^k (m_i + 1)].
struct DyadicCube {
    int k = 0;
    std::vector<std::int64_t> corner;

    double side() const;
    double diam() const;
    bool contains(const Point& p, double tol = 0.0) const;
    auto operator<=>(const DyadicCube&) const = default;
};

struct Region {
    enum class Kind { ball, dilated_cube };
    Kind kind = Kind::ball;
    Point center;
    double radius = 0.0;
    DyadicCube cube;
    double lambda = 1.0;

    static Region ball(Point c, double r);
    static Region dilated(DyadicCube q, double lambda);

    bool contains(const Point& p) const;
    double diam() const;
};

// vector helpers
double dot(const Point& a, const Point& b);
double norm(const Point& a);
double dist(const Point& a, const Point& b);
Point sub(const Point& a, const Point& b);
Point add(const Point& a, const Point& b);
Point scaled(const Point& a, double c);
Point lerp(const Point& a, const Point& b, double t);
Point normalized(const Point& a);
bool lex_less(const Point& a, const Point& b);

Line line_through(const Point& a, const Point& b);
Point project(const Point& x, const Line& l);
double line_param(const Point& x, const Line& l);
double dist_to_line(const Point& x, const Line& l);
double max_dist_to_line(const std::vector<Point>& pts, const Line& l);
double diameter(const std::vector<Point>& pts);

LineFit minimax_line(const std::vector<Point>& pts, FitMode mode);

double beta_number(const std::vector<Point>& E, const Region& Q, FitMode mode);

std::vector<DyadicCube> dyadic_cubes_meeting(const std::vector<Point>& E, int k_min, int k_max);

struct BetaVariant {
    enum class Kind { square, threshold, power };
    Kind kind = Kind::square;
    double param = 0.0;  // beta_0 for threshold, p for power

    static BetaVariant square() { return {Kind::square, 0.0}; }
    static BetaVariant threshold(double b0) { return {Kind::threshold, b0}; }
    static BetaVariant power(double p) { return {Kind::power, p}; }
};

struct BetaSumReport {
    double total = 0.0;
    std::vector<int> scale_exp;       // one entry per k, ascending
    std::vector<double> per_scale;    // contribution of each k
    std::vector<std::size_t> cubes;   // cubes Q with E meeting 3Q
};

// Sum over dyadic Q with side 2^k, k in [k_min, k_max], of the chosen
// functional of beta_E(3Q).
BetaSumReport beta_sums(const std::vector<Point>& E, double s, BetaVariant v, int k_min, int k_max,
                        FitMode mode);

}  // namespace htsp
