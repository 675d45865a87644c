#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <queue>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ddslt/rng.hpp"

namespace ddslt {

struct Point {
    double x = 0.0;
    double y = 0.0;
};

/// Random geometric graph on the unit square: nodes are adjacent iff their
/// Euclidean distance is <= radius (ties count as edges). Immutable after
/// construction.
struct Graph {
    int n = 0;
    double radius = 0.0;
    std::vector<Point> positions;
    std::vector<std::vector<int>> adjacency;  // per node, sorted neighbor ids

    int node_degree(int u) const { return static_cast<int>(adjacency[u].size()); }

    int max_node_degree() const {
        int m = 0;
        for (const auto& a : adjacency) m = std::max(m, static_cast<int>(a.size()));
        return m;
    }

    bool has_edge(int u, int v) const {
        const auto& a = adjacency[u];
        return std::binary_search(a.begin(), a.end(), v);
    }

    std::size_t edge_count() const {
        std::size_t total = 0;
        for (const auto& a : adjacency) total += a.size();
        return total / 2;
    }
};

inline double squared_distance(const Point& a, const Point& b) {
    const double dx = a.x - b.x;
    const double dy = a.y - b.y;
    return dx * dx + dy * dy;
}

/// n positions drawn uniformly over [0,1]^2 from the given seed, adjacency
/// by the distance rule. Deterministic: same (n, radius, seed) gives an
/// identical graph.
inline Graph generate_rgg(int n, double radius, std::uint64_t seed) {
    if (n < 1) throw std::invalid_argument("generate_rgg: n must be >= 1");
    if (!(radius > 0.0)) throw std::invalid_argument("generate_rgg: radius must be > 0");
    Graph g;
    g.n = n;
    g.radius = radius;
    g.positions.resize(n);
    Rand rng(seed);
    for (int i = 0; i < n; ++i) {
        g.positions[i].x = rng.unit();
        g.positions[i].y = rng.unit();
    }
    g.adjacency.assign(n, {});
    const double r2 = radius * radius;
    for (int u = 0; u < n; ++u) {
        for (int v = u + 1; v < n; ++v) {
            if (squared_distance(g.positions[u], g.positions[v]) <= r2) {
                g.adjacency[u].push_back(v);
                g.adjacency[v].push_back(u);
            }
        }
    }
    // u < v insertion order already leaves each list sorted
    return g;
}

/// BFS from node 0 reaches all n nodes.
inline bool is_connected(const Graph& g) {
    if (g.n == 0) return true;
    std::vector<char> seen(g.n, 0);
    std::queue<int> q;
    q.push(0);
    seen[0] = 1;
    int reached = 1;
    while (!q.empty()) {
        const int u = q.front();
        q.pop();
        for (int v : g.adjacency[u]) {
            if (!seen[v]) {
                seen[v] = 1;
                ++reached;
                q.push(v);
            }
        }
    }
    return reached == g.n;
}

/// Rejection sampling for a connected instance: tries seed, seed+1, ...
/// until is_connected, up to max_retries attempts.
inline Graph generate_connected_rgg(int n, double radius, std::uint64_t seed,
                                    int max_retries = 100) {
    if (max_retries < 1) {
        throw std::invalid_argument("generate_connected_rgg: max_retries must be >= 1");
    }
    for (int attempt = 0; attempt < max_retries; ++attempt) {
        Graph g = generate_rgg(n, radius, seed + static_cast<std::uint64_t>(attempt));
        if (is_connected(g)) return g;
    }
    throw std::runtime_error("generate_connected_rgg: connectivity budget exhausted after " +
                             std::to_string(max_retries) + " attempts (n=" +
                             std::to_string(n) + ", radius=" + std::to_string(radius) + ")");
}

}  // namespace ddslt
