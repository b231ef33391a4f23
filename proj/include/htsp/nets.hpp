#pragma once

#include <optional>
#include <string>
#include <vector>

#include "htsp/geom.hpp"

namespace htsp {

// Nested separated nets. Levels store indices into a shared point pool, so
// V_k subset V_{k+1} is a statement about ids.
struct NetHierarchy {
    std::vector<Point> points;
    std::vector<std::vector<int>> levels;
    std::vector<double> rho;
    Point x0;
    double r0 = 1.0;
    double cstar = 2.0;
    double xi1 = 0.5;
    double xi2 = 0.5;

    double astar() const { return cstar / (1.0 - xi2); }
    int depth() const { return static_cast<int>(levels.size()) - 1; }
    std::size_t dim() const { return points.empty() ? 0 : points[0].size(); }
    const Point& pt(int id) const { return points[static_cast<std::size_t>(id)]; }
    double scale(int k) const { return rho[static_cast<std::size_t>(k)] * r0; }
    bool in_level(int k, int id) const;
};

struct NetsCheck {
    std::string property;  // "V0".."V4"
    int level = -1;
    bool ok = true;
    std::string witness;
};

struct NetsReport {
    std::vector<NetsCheck> checks;
    bool ok() const;
    std::string first_failure() const;
};

// Greedy nets: V_k is grown from V_{k-1} by scanning E and admitting any point
// at distance >= rho_k r0 from everything admitted so far.
NetHierarchy build_nets(const std::vector<Point>& E, int depth, double ratio = 0.5,
                        bool farthest_first = false);

NetsReport validate_nets(const NetHierarchy& h);

struct NetFit {
    bool valid = false;
    Line line;
    double alpha = 0.0;
    int window = 0;  // points of V_{k+1} used
};

struct LineFitTable {
    FitMode mode = FitMode::exact2d;
    std::vector<std::vector<NetFit>> at;  // [k][id]

    const NetFit& get(int k, int id) const { return at[static_cast<std::size_t>(k)][static_cast<std::size_t>(id)]; }
    int levels() const { return static_cast<int>(at.size()); }
};

// Fits levels 0..depth-1 (level k needs V_{k+1}).
LineFitTable fit_lines(const NetHierarchy& h, std::optional<FitMode> mode = std::nullopt);

// Sort by position along l; ties broken lexicographically.
std::vector<int> order_points(const NetHierarchy& h, std::vector<int> ids, const Line& l);
std::vector<Point> order_points(std::vector<Point> pts, const Line& l);

enum class Side { left, right };

struct FlatPair {
    int k = 0;
    int v = -1;
    int w = -1;
    Side side = Side::right;
};

std::vector<FlatPair> flat_pairs(const NetHierarchy& h, const LineFitTable& fits, double alpha0, int k);

// Points of V_{k+1} in B(v, 14 A* rho_k r0) between v and w inclusive, ordered from v.
std::vector<int> between_points(const NetHierarchy& h, const LineFitTable& fits, const FlatPair& fp);

double variation_excess(const NetHierarchy& h, const LineFitTable& fits, const FlatPair& fp, double s,
                        double alpha0);
// Same quantity for an explicit chain v = p_1, ..., p_n = w.
double chain_excess(const std::vector<Point>& chain, double s);

double tube_coefficient(double alpha, double s, double cstar, double xi1, double xi2);
double tube_threshold(double s, double cstar, double xi1, double xi2);
double alpha_one(double cstar, double xi1, double xi2);

struct Params {
    double s = 1.0;
    double alpha0 = 1.0 / 16.0;
    std::optional<double> p;
    std::optional<double> q;
    int depth = 0;
};

// alpha_* = min(eps, alpha_1) for s > 1, alpha_1 for s = 1.
double default_alpha0(double s, double cstar, double xi1, double xi2);
Params default_params(const NetHierarchy& h, double s, int depth);

struct SSumReport {
    double total = 0.0;
    std::vector<double> excess;   // per level: sum tau_s rho_k^s
    std::vector<double> nonflat;  // per level: sum over alpha >= alpha0 of rho_k^s
};

SSumReport s_sum(const NetHierarchy& h, const LineFitTable& fits, const Params& prm);

// Same sum with both points of every term restricted to B(w, lambda rho_j r0), levels k >= j.
double carleson_sum(const NetHierarchy& h, const LineFitTable& fits, const Params& prm, int j, int w,
                    double lambda);

}  // namespace htsp
