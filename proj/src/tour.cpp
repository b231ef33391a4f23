#include "htsp/tour.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <string>

namespace htsp {

namespace {

std::vector<std::vector<int>> adjacency(const SimpleGraph& g) {
    const int n = static_cast<int>(g.vertices.size());
    std::vector<std::vector<int>> adj(g.vertices.size());
    std::set<std::pair<int, int>> seen;
    for (auto [u, w] : g.edges) {
        if (u < 0 || w < 0 || u >= n || w >= n) throw BadParameter("edge endpoint out of range");
        if (u == w) throw BadParameter("loop edge at vertex " + std::to_string(u));
        if (!seen.insert({std::min(u, w), std::max(u, w)}).second) throw BadParameter("multi-edge");
        adj[static_cast<std::size_t>(u)].push_back(w);
        adj[static_cast<std::size_t>(w)].push_back(u);
    }
    for (auto& a : adj) std::sort(a.begin(), a.end());
    return adj;
}

}  // namespace

std::vector<std::vector<int>> component_indices(const SimpleGraph& g) {
    const auto adj = adjacency(g);
    std::vector<int> comp(g.vertices.size(), -1);
    std::vector<std::vector<int>> out;
    for (int s = 0; s < static_cast<int>(g.vertices.size()); ++s) {
        if (comp[static_cast<std::size_t>(s)] >= 0) continue;
        std::vector<int> stack{s}, members;
        comp[static_cast<std::size_t>(s)] = static_cast<int>(out.size());
        while (!stack.empty()) {
            const int u = stack.back();
            stack.pop_back();
            members.push_back(u);
            for (int w : adj[static_cast<std::size_t>(u)])
                if (comp[static_cast<std::size_t>(w)] < 0) {
                    comp[static_cast<std::size_t>(w)] = comp[static_cast<std::size_t>(s)];
                    stack.push_back(w);
                }
        }
        std::sort(members.begin(), members.end());
        out.push_back(std::move(members));
    }
    return out;
}

std::vector<SimpleGraph> components(const SimpleGraph& g) {
    std::vector<SimpleGraph> out;
    for (const auto& members : component_indices(g)) {
        std::map<int, int> local;
        SimpleGraph c;
        for (int u : members) {
            local[u] = static_cast<int>(c.vertices.size());
            c.vertices.push_back(g.vertices[static_cast<std::size_t>(u)]);
        }
        for (auto [u, w] : g.edges)
            if (local.count(u)) c.edges.push_back({local[u], local[w]});
        out.push_back(std::move(c));
    }
    return out;
}

TourWalk tour_walk(const SimpleGraph& g, int v0, int first_neighbor) {
    const int n = static_cast<int>(g.vertices.size());
    if (v0 < 0 || v0 >= n) throw BadParameter("start vertex out of range");
    const auto adj = adjacency(g);
    for (int u = 0; u < n; ++u)
        if (adj[static_cast<std::size_t>(u)].size() > 2)
            throw ValenceExceeded("vertex " + std::to_string(u) + " has valence " +
                                  std::to_string(adj[static_cast<std::size_t>(u)].size()));
    if (component_indices(g).size() != 1) throw NotConnected("tour needs a connected graph");

    TourWalk t;
    t.designated.assign(g.vertices.size(), 0);
    if (n == 1) {
        t.walk = {v0};
        return t;
    }
    const auto& nb0 = adj[static_cast<std::size_t>(v0)];
    const bool cycle =
        std::all_of(adj.begin(), adj.end(), [](const std::vector<int>& a) { return a.size() == 2; });
    int first = first_neighbor;
    if (first < 0 || std::find(nb0.begin(), nb0.end(), first) == nb0.end()) first = nb0.front();

    // march from `from` through `next` until the path ends or closes
    auto march = [&](int from, int next) {
        std::vector<int> seq{from};
        int prev = from, cur = next;
        while (cur != from) {
            seq.push_back(cur);
            const auto& a = adj[static_cast<std::size_t>(cur)];
            int nxt = -1;
            for (int w : a)
                if (w != prev) nxt = w;
            if (nxt < 0) break;
            prev = cur;
            cur = nxt;
        }
        return seq;
    };

    if (cycle) {
        const auto u = march(v0, first);  // u[0] = v0, ..., u[k-1]
        const int k = static_cast<int>(u.size());
        for (int rep = 0; rep < 2; ++rep)
            for (int i = 0; i < k; ++i) t.walk.push_back(u[static_cast<std::size_t>(i)]);
        t.walk.push_back(v0);
        for (int i = 1; i < k; ++i) t.designated[static_cast<std::size_t>(u[static_cast<std::size_t>(i)])] = i;
        t.designated[static_cast<std::size_t>(v0)] = k;
        return t;
    }

    // Arc: head toward `first` until an end (u^1), sweep to the other end, return.
    std::vector<int> toward = march(v0, first);  // v0 ... u^1
    std::vector<int> arc(toward.rbegin(), toward.rend());
    if (nb0.size() == 2) {
        const int other = nb0[0] == first ? nb0[1] : nb0[0];
        const auto rest = march(v0, other);
        arc.insert(arc.end(), rest.begin() + 1, rest.end());
    }
    // arc = u^1 .. u^k ; v0 = u^l
    const int k = static_cast<int>(arc.size());
    const int l = static_cast<int>(std::find(arc.begin(), arc.end(), v0) - arc.begin()) + 1;
    for (int i = l; i >= 1; --i) t.walk.push_back(arc[static_cast<std::size_t>(i - 1)]);
    for (int i = 2; i <= k; ++i) t.walk.push_back(arc[static_cast<std::size_t>(i - 1)]);
    for (int i = k - 1; i >= l; --i) t.walk.push_back(arc[static_cast<std::size_t>(i - 1)]);
    for (int i = 1; i <= k; ++i) t.designated[static_cast<std::size_t>(arc[static_cast<std::size_t>(i - 1)])] = l - 1 + i - 1;
    return t;
}

std::vector<int> designation_candidates(const SimpleGraph& g, const std::vector<int>& walk, int v) {
    std::set<std::pair<int, int>> need;
    for (auto [a, b] : g.edges)
        if (a == v || b == v) need.insert({std::min(a, b), std::max(a, b)});
    std::vector<int> out;
    const int m = static_cast<int>(walk.size());
    for (int c = 0; c < m; ++c) {
        if (walk[static_cast<std::size_t>(c)] != v) continue;
        std::set<std::pair<int, int>> touch;
        if (c > 0) {
            const int a = walk[static_cast<std::size_t>(c - 1)];
            touch.insert({std::min(a, v), std::max(a, v)});
        }
        if (c + 1 < m) {
            const int b = walk[static_cast<std::size_t>(c + 1)];
            touch.insert({std::min(b, v), std::max(b, v)});
        }
        if (std::includes(touch.begin(), touch.end(), need.begin(), need.end())) out.push_back(c);
    }
    return out;
}

GraphTour graph_tour(const SimpleGraph& g, int v0, double a, double b, int first_neighbor) {
    if (!(b > a)) throw BadParameter("tour interval must be nondegenerate");
    const TourWalk w = tour_walk(g, v0, first_neighbor);
    GraphTour t;
    t.walk = w.walk;
    const int m = static_cast<int>(w.walk.size());
    const int pieces = 2 * m - 1;
    const double h = (b - a) / pieces;
    for (int i = 0; i < pieces; ++i) {
        TourPiece p;
        p.a = i == 0 ? a : a + i * h;
        p.b = i == pieces - 1 ? b : a + (i + 1) * h;
        p.constant = i % 2 == 0;
        p.from = w.walk[static_cast<std::size_t>(i / 2)];
        p.to = p.constant ? p.from : w.walk[static_cast<std::size_t>(i / 2 + 1)];
        t.pieces.push_back(p);
    }
    for (std::size_t u = 0; u < w.designated.size(); ++u) t.designated.push_back(2 * w.designated[u]);
    return t;
}

TourCheck check_tour(const SimpleGraph& g, int v0, const GraphTour& t) {
    TourCheck r;
    if (t.pieces.empty()) return {false, false, false, false, false};
    r.endpoints = t.pieces.front().from == v0 && t.pieces.back().to == v0 && t.pieces.front().constant &&
                  t.pieces.back().constant;
    for (std::size_t i = 0; i + 1 < t.pieces.size(); ++i)
        if (t.pieces[i].to != t.pieces[i + 1].from || t.pieces[i].b != t.pieces[i + 1].a) r.continuity = false;

    std::vector<char> hit(g.vertices.size(), 0);
    std::map<std::pair<int, int>, int> cover;
    for (const auto& p : t.pieces) {
        if (p.constant) {
            hit[static_cast<std::size_t>(p.from)] = 1;
        } else {
            cover[{std::min(p.from, p.to), std::max(p.from, p.to)}]++;
        }
    }
    r.vertices = std::all_of(hit.begin(), hit.end(), [](char c) { return c != 0; });
    std::set<std::pair<int, int>> edges;
    for (auto [a, b] : g.edges) edges.insert({std::min(a, b), std::max(a, b)});
    for (const auto& [e, c] : cover)
        if (c != 2 || !edges.count(e)) r.twice = false;
    if (cover.size() != edges.size()) r.twice = false;

    for (int v = 0; v < static_cast<int>(g.vertices.size()); ++v) {
        if (static_cast<std::size_t>(v) >= t.designated.size()) {
            r.adjacency = false;
            break;
        }
        const int c = t.designated[static_cast<std::size_t>(v)];
        if (c < 0 || c >= static_cast<int>(t.pieces.size()) || !t.pieces[static_cast<std::size_t>(c)].constant ||
            t.pieces[static_cast<std::size_t>(c)].from != v) {
            r.adjacency = false;
            continue;
        }
        for (auto [a, b] : g.edges) {
            if (a != v && b != v) continue;
            const std::pair<int, int> e{std::min(a, b), std::max(a, b)};
            bool found = false;
            for (int d : {c - 1, c + 1}) {
                if (d < 0 || d >= static_cast<int>(t.pieces.size())) continue;
                const auto& p = t.pieces[static_cast<std::size_t>(d)];
                if (std::pair<int, int>{std::min(p.from, p.to), std::max(p.from, p.to)} == e) found = true;
            }
            if (!found) r.adjacency = false;
        }
    }
    return r;
}

}  // namespace htsp
