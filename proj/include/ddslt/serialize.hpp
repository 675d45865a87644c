#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "ddslt/graph.hpp"
#include "ddslt/simulator.hpp"

namespace ddslt {

using ordered_json = nlohmann::ordered_json;

inline std::string to_hex(const Payload& p) {
    static const char* digits = "0123456789abcdef";
    std::string out;
    out.reserve(p.size() * 2);
    for (std::uint8_t b : p) {
        out.push_back(digits[b >> 4]);
        out.push_back(digits[b & 0xf]);
    }
    return out;
}

inline Payload from_hex(const std::string& s) {
    if (s.size() % 2 != 0) throw std::invalid_argument("hex string has odd length");
    auto nibble = [](char c) -> int {
        if (c >= '0' && c <= '9') return c - '0';
        if (c >= 'a' && c <= 'f') return c - 'a' + 10;
        if (c >= 'A' && c <= 'F') return c - 'A' + 10;
        throw std::invalid_argument("invalid hex digit");
    };
    Payload out(s.size() / 2);
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = static_cast<std::uint8_t>(nibble(s[2 * i]) << 4 | nibble(s[2 * i + 1]));
    }
    return out;
}

/// {"n", "radius", "positions": [[x,y],...], "edges": [[u,v],...]} with u < v.
inline ordered_json graph_to_json(const Graph& g) {
    ordered_json j;
    j["n"] = g.n;
    j["radius"] = g.radius;
    auto& pos = j["positions"] = ordered_json::array();
    for (const auto& p : g.positions) pos.push_back({p.x, p.y});
    auto& edges = j["edges"] = ordered_json::array();
    for (int u = 0; u < g.n; ++u) {
        for (int v : g.adjacency[u]) {
            if (u < v) edges.push_back({u, v});
        }
    }
    return j;
}

inline Graph graph_from_json(const ordered_json& j) {
    Graph g;
    g.n = j.at("n").get<int>();
    g.radius = j.at("radius").get<double>();
    g.positions.reserve(g.n);
    for (const auto& p : j.at("positions")) {
        g.positions.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
    }
    if (static_cast<int>(g.positions.size()) != g.n) {
        throw std::invalid_argument("graph json: positions length != n");
    }
    g.adjacency.assign(g.n, {});
    for (const auto& e : j.at("edges")) {
        const int u = e.at(0).get<int>();
        const int v = e.at(1).get<int>();
        if (u < 0 || v < 0 || u >= g.n || v >= g.n || u == v) {
            throw std::invalid_argument("graph json: bad edge");
        }
        g.adjacency[u].push_back(v);
        g.adjacency[v].push_back(u);
    }
    for (auto& a : g.adjacency) std::sort(a.begin(), a.end());
    return g;
}

/// {"nodes": [{"id", "xor_ids", "buffer_hex"}], "sources": {"0": payload_hex, ...}}
inline ordered_json snapshot_to_json(const StorageSnapshot& s) {
    ordered_json j;
    auto& nodes = j["nodes"] = ordered_json::array();
    for (int u = 0; u < s.n; ++u) {
        ordered_json rec;
        rec["id"] = u;
        rec["xor_ids"] = s.node_xor_ids[u];
        rec["buffer_hex"] = to_hex(s.node_buffers[u]);
        nodes.push_back(std::move(rec));
    }
    auto& sources = j["sources"] = ordered_json::object();
    for (int i = 0; i < s.k; ++i) {
        sources[std::to_string(i)] = to_hex(s.source_payloads[i]);
    }
    return j;
}

/// Wire-format load; fields the format does not carry (source node map,
/// final code degrees) stay empty.
inline StorageSnapshot snapshot_from_json(const ordered_json& j) {
    StorageSnapshot s;
    const auto& nodes = j.at("nodes");
    s.n = static_cast<int>(nodes.size());
    s.node_xor_ids.resize(s.n);
    s.node_buffers.resize(s.n);
    for (const auto& rec : nodes) {
        const int id = rec.at("id").get<int>();
        if (id < 0 || id >= s.n) throw std::invalid_argument("snapshot json: bad node id");
        s.node_xor_ids[id] = rec.at("xor_ids").get<std::vector<int>>();
        std::sort(s.node_xor_ids[id].begin(), s.node_xor_ids[id].end());
        s.node_buffers[id] = from_hex(rec.at("buffer_hex").get<std::string>());
    }
    const auto& sources = j.at("sources");
    s.k = static_cast<int>(sources.size());
    s.source_payloads.resize(s.k);
    for (const auto& [key, val] : sources.items()) {
        const int id = std::stoi(key);
        if (id < 0 || id >= s.k) throw std::invalid_argument("snapshot json: bad source id");
        s.source_payloads[id] = from_hex(val.get<std::string>());
    }
    if (s.k > 0) s.payload_len = s.source_payloads[0].size();
    return s;
}

}  // namespace ddslt
