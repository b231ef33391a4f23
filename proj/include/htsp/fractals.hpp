#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "htsp/nets.hpp"

namespace htsp {

// Point sample plus skeleton segments (index pairs into points).
struct Sample {
    std::vector<Point> points;
    std::vector<std::pair<int, int>> segments;
};

// ---- snowflake arcs -------------------------------------------------------

// Each edge [a,b] becomes a, a + p d, a + d/2 + sqrt(p - 1/4) n, a + (1-p) d, b with d = b - a
// and n the left normal; all four new edges have length p |d|.
struct Snowflake {
    std::vector<double> p;        // parameter used at each step
    std::vector<Point> vertices;  // 4^depth + 1, in arc order
    int depth = 0;

    // Uniform 4-adic coding: vertex i sits at i / 4^depth.
    Point at(double t) const;
    double length() const;
    Sample sample() const;
};

// p_seq shorter than depth repeats its last entry. Every p must lie in [1/4, 1/2).
Snowflake snowflake(const std::vector<double>& p_seq, int depth);

struct Rational {
    std::int64_t num = 0, den = 1;
    double value() const { return static_cast<double>(num) / static_cast<double>(den); }
    bool operator==(const Rational&) const = default;
};
// prod_{i<depth} 4 p_i in lowest terms
Rational snowflake_length_exact(const std::vector<Rational>& p_seq, int depth);

// ---- nets with a slowly decaying ratio ------------------------------------

struct SharpnessNets {
    double s = 1.1, p = 2, q = 0.4;
    int n0 = 10;
    NetHierarchy h;            // level k lists V_k in arc order
    std::vector<double> bump;  // bump[k]: relative apex height used from level k to k+1

    // 2^(-k/s) (k+1+n0)^q / (2+n0)^q for k >= 1, and 1 at k = 0
    double rho(int k) const;
    // relative apex height for the step k -> k+1 so that edge lengths follow rho
    double bump_at(int k) const;
    // variation excess of one edge at level k, from explicit points
    double tau_geometric(int k) const;
    // 2((k+2+n0)^(sq) - (k+1+n0)^(sq)) / (k+2+n0)^(sq)
    double tau_closed(int k) const;
};

SharpnessNets sharpness_nets(double s, double p, double q, int n0, int depth);

struct SharpnessSums {
    std::vector<double> powered;  // partial sums of 2^k tau_k^p rho_k^s
    std::vector<double> plain;    // partial sums of 2^k tau_k rho_k^s
};
SharpnessSums sharpness_sums(const SharpnessNets& nets, int levels);

// ---- self-similar sets that are curves yet never flat ---------------------

// Number of cubes of the n^N grid of [0,1]^N meeting the m-skeleton of its boundary.
std::int64_t skeleton_cube_count(int N, int m, std::int64_t n);

struct SierpinskiChoice {
    int N = 2;
    double s = 1.5;
    int m = 1;
    std::int64_t n = 0;
    std::int64_t pieces = 0;  // similarities of ratio 1/n
    double lambda = 0;        // ratio of the extra central piece (0 when absent)
    double residual = 0;
};
SierpinskiChoice sierpinski_choice(int N, double s);

struct SierpinskiSet {
    SierpinskiChoice choice;
    Sample sample;  // corners of the depth-level cubes and their edges
};
SierpinskiSet sierpinski_like(int N, double s, int depth);

// inf over hyperplanes of sup dist / diam Q, on the points of E inside Q
double hyperplane_beta(const std::vector<Point>& E, const Region& Q);

// Partial sums over generations g = 0..G of sum of (diam Q)^s over dyadic Q of side 2^-g
// with hyperplane beta on 3Q at least `threshold`.
std::vector<double> hyperplane_threshold_sums(const std::vector<Point>& E, double s, double threshold,
                                              int generations);
// Same for the full cube [0,1]^N, exact by boundary classes.
std::vector<double> unit_cube_threshold_sums(int N, double s, double threshold, int generations);

// ---- a countable compact set ---------------------------------------------

struct CountableSet {
    int N = 2;
    std::vector<Point> points;    // level blocks, then the limit point
    std::vector<int> level_start; // block k is [level_start[k], level_start[k+1])
};
CountableSet countable_set(int N, int depth);
// min over x in block k of |x - y| / (2^-k (k+1)^-2), y ranging over all other points
double countable_separation(const CountableSet& c, int k);
std::vector<double> packing_sums(int N, int m, double s, int K);

// ---- Cantor constructions -------------------------------------------------

Sample four_corner(int depth);
// Partial sums over generations of the Jones square sum of a four-corner sample.
std::vector<double> four_corner_jones(int depth);

struct FlatCantor {
    Snowflake arc;
    double s0 = 1;      // -log 4 / log p*
    double ratio = 0.5; // Cantor ratio 2^(-s0/s)
    int generations = 0;
    Sample sample;
};
FlatCantor flat_snowflake_cantor(double pstar, double s, int depth);
// max beta_E(Q) over dyadic Q of side between 2^-gmax and 1 that meet E
double max_cube_beta(const std::vector<Point>& E, int gmax);

struct CantorLadder {
    int N = 3;
    double s = 2;
    double base_dim = 2;        // dimension of the ladder factor
    Sample sample;
    std::vector<double> weight; // content carried by each point
    double resolution = 0;
    int rungs = 0;
};
CantorLadder cantor_ladder(int N, double s, int depth);

struct LadderConnectivity {
    int pairs = 0;
    double max_ratio = 0;  // diam(path) / |x - y|^(1/base_dim)
};
LadderConnectivity ladder_connectivity(const CantorLadder& L, int pairs, std::uint64_t seed = 1);

struct LadderRegularity {
    double min_ratio = 0, max_ratio = 0;  // content(B(x,r)) / r^s
};
LadderRegularity ladder_regularity(const CantorLadder& L, const std::vector<double>& radii, int centers,
                                   std::uint64_t seed = 1);

// ---- one entry point for the command line ---------------------------------

struct GeneratorSpec {
    enum class Kind { snowflake, sierpinski, cantor_ladder, countable, four_corner, flat_cantor, sharpness };
    Kind kind = Kind::snowflake;
    std::vector<double> p_seq{1.0 / 3};
    int N = 2;
    double s = 1.5;
    double p = 2, q = 0.4;
    int n0 = 10;
    int depth = 3;
};
GeneratorSpec::Kind generator_kind(const std::string& name);
Sample generate(const GeneratorSpec& spec);

}  // namespace htsp
