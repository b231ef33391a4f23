#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "htsp/nets.hpp"
#include "htsp/tour.hpp"

namespace htsp {

enum class Kind { edge, bridge, netpoint, frozen };
std::string to_string(Kind k);

// How a record came to exist at its level.
enum class Origin {
    step0,
    kept_bridge,    // bridge carried over
    kept_frozen,    // frozen carried over
    nonflat_edge,   // edge with no flat endpoint turned bridge
    flat_edge,      // child of an edge with a flat endpoint
    nonterminal,    // point interval of a non-terminal flat vertex, kept
    one_sided,      // child of a 1-sided terminal point interval
    two_sided,      // child of a 2-sided terminal point interval
    nonflat_point,  // child of a point interval with non-flat image
    continuum_end   // end interval of the flat-continuum variant
};

enum class VertexClass { nonterminal, one_sided, two_sided, nonflat };
std::string to_string(VertexClass c);

struct IntervalRecord {
    double a = 0, b = 0;
    Kind kind = Kind::netpoint;
    Origin origin = Origin::step0;
    int born = 0;           // level at which (a, b) first appeared with this kind
    int va = -1, vb = -1;   // point ids of the images of a and b
    int parent = -1;        // index in the previous level
    bool special = false;   // bridge cut from a flat edge at a long gap
    std::optional<Point> detour;  // apex of a rerouted bridge

    bool is_point() const { return kind == Kind::netpoint || kind == Kind::frozen; }
    bool is_segment() const { return !is_point(); }
};

struct LevelDiagnostics {
    int claim_conflicts = 0;      // a point already owned when a second owner wanted it
    int shared_edge_fallbacks = 0;  // both traversals of an edge kept as Edge in one tour
    int adjacency_misses = 0;     // no constancy piece could face every outside edge
    int mirrored = 0;             // layouts flipped so a vertex faces its outside edge
};

struct LevelState {
    int k = 0;
    std::vector<IntervalRecord> records;
    // Classes of the flat and non-flat points of V_{k-1}, assigned while refining into
    // this level (empty on level 0).
    std::vector<std::pair<int, VertexClass>> classes;
    LevelDiagnostics diag;
};

// Resolutions of the free choices. The defaults are deterministic; a nonzero
// seed shuffles the order of non-flat point intervals and the twin that keeps
// the point intervals.
struct ChoiceLedger {
    std::uint64_t seed = 0;
    std::optional<double> alpha_relaxed;  // treat a vertex as flat only below this
    std::optional<double> reach_relaxed;  // accepted, strict choice always taken
    std::vector<std::string> log;
};

// Effective flatness threshold after the optional relaxation.
double flat_threshold(const Params& prm, const ChoiceLedger& ledger);

LevelState initialize(const NetHierarchy& h, const LineFitTable& fits, const Params& prm, ChoiceLedger& ledger);
LevelState refine(const LevelState& st, const NetHierarchy& h, const LineFitTable& fits, const Params& prm,
                  ChoiceLedger& ledger);

// Levels 0..min(prm.depth, fits.levels() - 1). With verify set, each level is
// checked and the first failure raises PropertyViolation.
std::vector<LevelState> run(const NetHierarchy& h, const LineFitTable& fits, const Params& prm,
                            ChoiceLedger& ledger, bool verify = true);

struct PropertyCheck {
    std::string name;
    bool ok = true;
    std::string witness;
};

struct PropertyReport {
    std::vector<PropertyCheck> checks;
    bool ok() const;
    bool passed(const std::string& name) const;
    std::string first_failure() const;
};

PropertyReport check_properties(const LevelState& st, const NetHierarchy& h, const LineFitTable& fits,
                                const Params& prm, const ChoiceLedger& ledger = {});

// f_k as a function on [0,1].
Point evaluate(const LevelState& st, const NetHierarchy& h, double x);
// Breakpoints (x, f(x)) of the piecewise-linear map, left to right.
std::vector<std::pair<double, Point>> breakpoints(const LevelState& st, const NetHierarchy& h);
double sup_distance(const LevelState& a, const LevelState& b, const NetHierarchy& h);

// Number of distinct points where two segments meet (2 for an overlap).
int segment_contacts(const Point& p0, const Point& p1, const Point& q0, const Point& q1, double tol = 1e-12);
double segment_distance(const Point& p0, const Point& p1, const Point& q0, const Point& q1);

// Bridge rerouting: every bridge image becomes a two-segment detour through an
// apex offset perpendicular to the chord, so bridges meet edges in finitely
// many points and the two traversals of a bridge image coincide.
struct RerouteReport {
    int bridges = 0;
    int contacts = 0;       // bridge/edge contact points after rerouting
    bool overlaps = false;  // any positive-length overlap left
    double max_excess = 0;  // detour length minus chord, largest over bridges
};
RerouteReport make_essentially_two_to_one(std::vector<LevelState>& states, const NetHierarchy& h);

// ---- flat continuum variant ----

struct ContinuumOptions {
    double beta1 = 1.0 / 8192.0;
    int depth = 6;
    bool precheck = true;
};

struct ContinuumLevelCheck {
    bool no_bridges = true;
    bool injective = true;      // (P4') on the edge images
    bool singly_covered = true; // (P6')
    bool alternating = true;    // (P7')
    bool short_edges = true;    // diam f_k(I) < 3 * 2^-k r0
    bool ok() const { return no_bridges && injective && singly_covered && alternating && short_edges; }
};

struct ContinuumResult {
    NetHierarchy h;
    LineFitTable fits;
    Params prm;
    std::vector<LevelState> states;
    std::vector<ContinuumLevelCheck> checks;
    double max_beta = 0;  // largest beta seen by the precheck
};

ContinuumResult run_flat_continuum(const std::vector<Point>& sample, double s, const ContinuumOptions& opt = {});
ContinuumLevelCheck check_continuum_level(const LevelState& st, const NetHierarchy& h);

}  // namespace htsp
