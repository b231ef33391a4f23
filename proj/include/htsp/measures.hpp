#pragma once

#include <optional>
#include <vector>

#include "htsp/param.hpp"

namespace htsp {

struct AtomicMeasure {
    std::vector<Point> atoms;
    std::vector<double> weights;

    static AtomicMeasure uniform(std::vector<Point> pts);
    std::size_t size() const { return atoms.size(); }
    double total() const;
    // mu of the closed ball
    double ball(const Point& x, double r) const;
    // push-forward under z -> lambda z
    AtomicMeasure dilated(double lambda) const;
};

double beta_p_line(const AtomicMeasure& mu, const Point& x, double r, double p, const Line& L);

// Infimum over lines, taken over weighted principal lines, reweighted refits,
// the minimax line, lines from x to each atom, and `extra`.
double beta_p(const AtomicMeasure& mu, const Point& x, double r, double p, const std::vector<Line>& extra = {});
Line best_line_p(const AtomicMeasure& mu, const Point& x, double r, double p);

// sup of mu(B(x,2r)) / mu(B(x,r)) over r = r_max 2^-j >= r_min.
double doubling_sup(const AtomicMeasure& mu, const Point& x, double r_min, double r_max);

// Left-endpoint dyadic sum for the integral over (0,1] of beta_p^q r^s / mu(B(x,r)) dr/r.
double jsp(const AtomicMeasure& mu, const Point& x, double s, double p, double q, int octaves = 20);

struct SelectionParams {
    Point x0;
    double M = 1;      // bound on jsp
    double P = 4;      // doubling constant
    double theta = 0.5;
    double s = 1.5, p = 2, q = 2;
    int octaves = 20;
};

struct Selection {
    std::vector<int> A, Aprime;
    std::vector<int> failed_jsp, failed_doubling, failed_density;
};

Selection select_sets(const AtomicMeasure& mu, const SelectionParams& sp);

struct PipelineResult {
    Selection sel;
    NetHierarchy h;
    LineFitTable fits;
    Params prm;
    std::vector<LevelState> states;
    HolderCurve curve;
    double exponent = 0;                 // q + (q/p) log2 P
    double s_plus = 0;                   // sum over alpha >= alpha* of rho_k^s
    double chain = 0;                    // sum of alpha^exponent rho_k^s
    std::vector<double> s_plus_levels, chain_levels;
    bool growing = false;                // late levels do not decay
};

PipelineResult measure_pipeline(const AtomicMeasure& mu, const SelectionParams& sp, int depth);

}  // namespace htsp
