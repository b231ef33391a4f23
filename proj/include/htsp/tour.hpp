#pragma once

#include <utility>
#include <vector>

#include "htsp/geom.hpp"

namespace htsp {

struct SimpleGraph {
    std::vector<Point> vertices;
    std::vector<std::pair<int, int>> edges;
};

// Vertex index lists of the connected components, each in increasing order;
// components sorted by their first vertex.
std::vector<std::vector<int>> component_indices(const SimpleGraph& g);
std::vector<SimpleGraph> components(const SimpleGraph& g);

// Closed walk from v0 covering every edge twice. Constancy component c sits at
// walk[c]; segment c joins walk[c] to walk[c+1].
struct TourWalk {
    std::vector<int> walk;
    std::vector<int> designated;  // per vertex: a constancy index meeting property (4)
};

// first_neighbor < 0 picks the lowest-index neighbor of v0.
TourWalk tour_walk(const SimpleGraph& g, int v0, int first_neighbor = -1);

// Constancy indices c with walk[c] == v that touch a preimage of every edge at v.
std::vector<int> designation_candidates(const SimpleGraph& g, const std::vector<int>& walk, int v);

struct TourPiece {
    double a = 0, b = 0;
    bool constant = true;
    int from = -1;  // image of the left end
    int to = -1;    // image of the right end (== from when constant)
};

struct GraphTour {
    std::vector<TourPiece> pieces;  // alternating constant / segment, equal lengths
    std::vector<int> designated;    // per vertex: index into pieces
    std::vector<int> walk;
};

GraphTour graph_tour(const SimpleGraph& g, int v0, double a, double b, int first_neighbor = -1);

struct TourCheck {
    bool endpoints = true;   // (1)
    bool vertices = true;    // (2)
    bool twice = true;       // (3)
    bool adjacency = true;   // (4)
    bool continuity = true;
    bool ok() const { return endpoints && vertices && twice && adjacency && continuity; }
};

TourCheck check_tour(const SimpleGraph& g, int v0, const GraphTour& t);

}  // namespace htsp
