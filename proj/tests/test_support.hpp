#pragma once

#include <deque>
#include <initializer_list>
#include <stdexcept>

#include "ddslt/graph.hpp"
#include "ddslt/rng.hpp"

namespace ddslt::testing {

/// Scripted accept/reject outcomes; throws if the code under test draws
/// more often than the script allows.
struct ScriptedBernoulli final : BernoulliSource {
    std::deque<bool> outcomes;
    std::deque<double> seen_probs;

    ScriptedBernoulli() = default;
    ScriptedBernoulli(std::initializer_list<bool> xs) : outcomes(xs) {}

    bool draw(double p) override {
        if (outcomes.empty()) throw std::logic_error("ScriptedBernoulli: unexpected draw");
        seen_probs.push_back(p);
        const bool out = outcomes.front();
        outcomes.pop_front();
        return out;
    }
};

/// Graph from an explicit edge list, for hand-built fixtures.
inline Graph graph_from_edges(int n, const std::vector<std::pair<int, int>>& edges) {
    Graph g;
    g.n = n;
    g.radius = 1.0;
    g.positions.assign(n, {0.0, 0.0});
    g.adjacency.assign(n, {});
    for (auto [u, v] : edges) {
        g.adjacency[u].push_back(v);
        g.adjacency[v].push_back(u);
    }
    for (auto& a : g.adjacency) std::sort(a.begin(), a.end());
    return g;
}

inline Graph triangle_graph() { return graph_from_edges(3, {{0, 1}, {1, 2}, {0, 2}}); }

inline Graph path_graph(int n) {
    std::vector<std::pair<int, int>> edges;
    for (int i = 0; i + 1 < n; ++i) edges.emplace_back(i, i + 1);
    return graph_from_edges(n, edges);
}

}  // namespace ddslt::testing
