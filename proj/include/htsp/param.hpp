#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "htsp/mass.hpp"

namespace htsp {

// Piecewise-linear map [0,1] -> R^N through (t_i, p_i); t is nondecreasing.
struct Polyline {
    std::vector<double> t;
    std::vector<Point> p;

    Point operator()(double x) const;
    double length() const;
    std::size_t size() const { return t.size(); }
};

// Reparameterized intervals: record i of level k now occupies [a[k][i], b[k][i]].
struct Reallocation {
    bool flat = false;
    std::vector<std::vector<double>> a, b;
};

// Lengths follow mass shares. The slack left at a parent goes to its children in
// proportion to their mass (all equal when every child is massless); with `flat`
// set the slack goes to the edge children only and frozen children collapse.
Reallocation reallocate(const std::vector<LevelState>& states, const MassTable& t, bool flat = false);

struct ReallocationCheck {
    bool partition = true;    // children tile their parent exactly
    bool share_bound = true;  // length >= mass share
    std::string witness;
    bool ok() const { return partition && share_bound; }
};
ReallocationCheck check_reallocation(const std::vector<LevelState>& states, const MassTable& t,
                                     const Reallocation& re, double tol = 1e-12);

struct HolderCurve {
    double s = 1;
    double exponent = 1;   // 1/s
    Polyline curve;        // deepest level
    std::vector<Polyline> levels;
    double H = 0;          // certified constant
    double mass = 0;
    double tail = 0;       // sup distance bound between the deepest level and the limit
    int depth = 0;
    bool flat = false;
};

Polyline level_map(const LevelState& st, const NetHierarchy& h, const std::vector<double>& a,
                   const std::vector<double>& b);
HolderCurve assemble(const std::vector<LevelState>& states, const NetHierarchy& h, const MassTable& t,
                     const Reallocation& re);

// Mass, reallocation and assembly in one call.
HolderCurve build_curve(const std::vector<LevelState>& states, const NetHierarchy& h, double s, bool flat = false);

// (1/xi1)(M r0^(1-s) + 60 A* r0 xi2/(1-xi2))
double holder_constant(double mass, double s, const NetHierarchy& h);
// max(1, 1/M)/xi1 * (alpha M + 2 beta/(1 - xi2))
double lip_to_holder(double M, double xi1, double xi2, double alpha, double beta, double s);

struct ConvergenceReport {
    std::vector<double> step, step_bound;  // sup |F_{k+1} - F_k| and 30 A* xi2 r0 rho_k
    std::vector<double> lip, lip_bound;    // max slope of F_k and M r0^(1-s) rho_k^(1-s)
    bool ok(double tol = 1e-9) const;
};
ConvergenceReport convergence_report(const HolderCurve& c, const NetHierarchy& h);

struct CoverageReport {
    double built = 0;   // worst distance from a net point of a built level to the curve
    double beyond = 0;  // same for net levels past the deepest built level
    double tail = 0;
    bool ok = true;
};
CoverageReport coverage_check(const HolderCurve& c, const NetHierarchy& h, double tol = 1e-9);

// max |F(x) - F(y)| / |x - y|^(1/s) over random pairs and breakpoint pairs.
double empirical_holder(const Polyline& f, double s, int samples, std::uint64_t seed = 1);
// max |F(x) - F(y)| / |x - y| over breakpoints.
double max_slope(const Polyline& f);

struct InjectivityReport {
    int pairs = 0;
    int resolved = 0;       // pairs separated by some edge interval of a built level
    double min_ratio = 0;   // min |F(x)-F(y)| / ((3/20) 2^-k0 r0)
    double x = 0, y = 0;    // worst pair
    bool ok(double margin = 0) const { return resolved == 0 || min_ratio >= 1 - margin; }
};
InjectivityReport injectivity_check(const std::vector<LevelState>& states, const NetHierarchy& h,
                                    const Reallocation& re, const Polyline& f, int samples,
                                    std::uint64_t seed = 1);

struct RegularityReport {
    double sup_ratio = 0;
    Point center;
    double radius = 0;
};
// sup over centers and radii of sum over pieces of (diam (piece cap closed ball))^s / r^s.
RegularityReport upper_regularity_scan(const Polyline& f, double s, const std::vector<double>& radii,
                                       int centers = 64);

struct LipschitzReport {
    double certified = 0;   // M_1: slope bound of every level when s = 1
    double sampled = 0;     // max slope of the deepest level
    double square_sum = 0;  // sum alpha^2 rho_k
    double s1 = 0;          // excess plus non-flat sum at alpha0 = alpha_1
    double alpha0 = 0;
    bool chain_ok = true;   // s1 <= square_sum / alpha0^2
};
LipschitzReport lipschitz_report(const HolderCurve& c, const NetHierarchy& h, const LineFitTable& fits);

// Scalar wiggle f_J(x) = sum_{i<J} amp rho^i sin(2 pi x / rho^(i s)) against its
// constant from the slope and step bounds of the sequence.
struct WiggleCheck {
    double alpha = 0, beta = 0, H = 0;
    double ratio = 0;  // sampled Holder ratio of f_J
};
WiggleCheck wiggle_holder_check(double s, double rho, double amp, int terms, int samples, std::uint64_t seed = 1);

}  // namespace htsp
