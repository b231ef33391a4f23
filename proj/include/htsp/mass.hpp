#pragma once

#include <string>
#include <vector>

#include "htsp/construct.hpp"

namespace htsp {

// Diameter of the image of one interval; a rerouted bridge counts its apex.
double image_diam(const IntervalRecord& r, const NetHierarchy& h);

// Indices of the level-(k+1) records cut from record i of level k.
std::vector<std::vector<int>> children(const std::vector<LevelState>& states, int k);

struct PhantomEntry {
    int record = -1;
    VertexClass cls = VertexClass::one_sided;
    double value = 0;
};

struct MassTable {
    double s = 1;
    int depth = 0;                          // deepest level used as the base
    std::vector<std::vector<double>> mass;  // [k][record]
    double total = 0;                       // sum over level-0 records
    bool truncated = false;                 // frontier still has edges or net points with future growth
    double phantom_p = 0;
    std::vector<std::vector<PhantomEntry>> phantom;  // [k]
};

double phantom_constant(double s, double cstar, double xi2);

// Mass by the recursion max{diam^s, sum of children}, base diam^s at the last level.
MassTable compute_mass(const std::vector<LevelState>& states, const NetHierarchy& h, double s);

// Exact supremum over every finite tree of depth <= max_depth; exponential.
MassTable brute_force_mass(const std::vector<LevelState>& states, const NetHierarchy& h, double s,
                           int max_depth = 3);

// Phantom masses of flat terminal net points, filled into an existing table.
void assign_phantom(MassTable& t, const std::vector<LevelState>& states, const NetHierarchy& h);

struct MassBoundReport {
    double mass = 0;
    double rhs = 0;  // r0^s (1 + excess sum + non-flat sum)
    double ratio = 0;
};
MassBoundReport mass_bound_report(const MassTable& t, const NetHierarchy& h, const LineFitTable& fits,
                                  const Params& prm);

struct CoverReport {
    double cover_sum = 0;  // sum over V_m of (2 C* rho_{m+1} r0 / (1 - xi2))^s
    double constant = 0;   // (2 C* xi2 / (1 - xi2))^s
    double level_sum = 0;  // sum over the level-m records of diam^s
    double mass = 0;
    bool holds = true;     // cover_sum <= constant * level_sum <= constant * mass
};
CoverReport hausdorff_lower_check(const std::vector<LevelState>& states, const MassTable& t,
                                  const NetHierarchy& h);

struct SpecialBridgeReport {
    int max_per_interval = 0;
    int worst_level = -1, worst_record = -1;
    bool ok() const { return max_per_interval <= 2; }
};
// For each edge or bridge J of a level, special bridges born later inside J that
// touch a net point interval outside J at their birth level.
SpecialBridgeReport special_bridge_check(const std::vector<LevelState>& states);

struct MassLemmaReport {
    bool bridge_exact = true;
    bool frozen_zero = true;
    bool superadditive = true;
    bool persistent = true;
    std::string witness;
    bool ok() const { return bridge_exact && frozen_zero && superadditive && persistent; }
};
MassLemmaReport check_mass_lemmas(const MassTable& t, const std::vector<LevelState>& states,
                                  const NetHierarchy& h, double tol = 1e-12);

}  // namespace htsp
