#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ddslt/graph.hpp"
#include "ddslt/protocol.hpp"
#include "ddslt/rng.hpp"
#include "ddslt/soliton.hpp"
#include "ddslt/transition.hpp"

namespace ddslt {

/// Walk length ceil(c1 * n * ln n), the cover-time scale of a connected
/// random graph.
inline int walk_length(int n, double c1) {
    if (n < 2) throw std::invalid_argument("walk_length: n must be >= 2");
    if (!(c1 > 0.0)) throw std::invalid_argument("walk_length: c1 must be > 0");
    return static_cast<int>(std::ceil(c1 * n * std::log(static_cast<double>(n))));
}

struct SimConfig {
    int n = 100;
    int k = 10;
    double c1 = 5.0;
    double radius_coeff = 2.0;  // transmission radius is radius_coeff / sqrt(n)
    PolicyId policy = PolicyId::ddslt;
    DegreeRule degree_rule{};
    std::size_t payload_len = 16;
    std::uint64_t seed = 1;
    int snapshot_every = 1;
    int max_connect_retries = 100;
    bool check_invariants = true;

    double radius() const { return radius_coeff / std::sqrt(static_cast<double>(n)); }

    void validate() const {
        if (n < 2) throw std::invalid_argument("SimConfig: n must be >= 2");
        if (k < 1 || k > n) throw std::invalid_argument("SimConfig: need 1 <= k <= n");
        if (!(c1 > 0.0)) throw std::invalid_argument("SimConfig: c1 must be > 0");
        if (!(radius_coeff > 0.0)) throw std::invalid_argument("SimConfig: radius_coeff must be > 0");
        if (payload_len == 0) throw std::invalid_argument("SimConfig: payload_len must be > 0");
        if (snapshot_every < 1) throw std::invalid_argument("SimConfig: snapshot_every must be >= 1");
    }
};

struct TraceSample {
    int step = 0;
    double fraction_k_reached = 0.0;      // share of nodes with k_est == k
    double fraction_degree_fulfilled = 0.0;  // share of nodes with Sd == d
};

struct Trace {
    std::vector<TraceSample> samples;
    long long total_transmissions = 0;

    /// Value of a metric at a given step: the latest sample at or before it.
    double fraction_k_reached_at(int step) const {
        double out = 0.0;
        for (const auto& s : samples) {
            if (s.step > step) break;
            out = s.fraction_k_reached;
        }
        return out;
    }
    double fraction_degree_fulfilled_at(int step) const {
        double out = 0.0;
        for (const auto& s : samples) {
            if (s.step > step) break;
            out = s.fraction_degree_fulfilled;
        }
        return out;
    }
};

/// Final storage state of a run. Source ids are remapped to 0..k-1 (in
/// ascending node-id order); the mapping and the ground-truth payloads ride
/// along for decoding and verification.
struct StorageSnapshot {
    int n = 0;
    int k = 0;
    std::size_t payload_len = 0;
    std::vector<int> source_nodes;               // remapped source id -> node id
    std::vector<std::vector<int>> node_xor_ids;  // per node, remapped source ids, sorted
    std::vector<Payload> node_buffers;
    std::vector<Payload> source_payloads;        // ground truth by remapped id
    CodeDegreeVector code_degrees;               // final d_u per node
};

struct RunResult {
    StorageSnapshot snapshot;
    Trace trace;
};

/// One record per receive event, for debugging and invariant replay.
struct ReceiveEvent {
    int step = 0;
    int node = -1;
    int source_id = -1;  // remapped
    ReceiveAction action = ReceiveAction::skip;
    int k_est = 0;
    int d = 0;
    int sd = 0;
};

using ReceiveObserver = std::function<void(const ReceiveEvent&)>;

namespace detail {

// stream salts for deriving independent generators from the run seed
inline constexpr std::uint64_t kSaltAlpha = 0xA1;
inline constexpr std::uint64_t kSaltBernoulli = 0xB2;
inline constexpr std::uint64_t kSaltForward = 0xF3;
inline constexpr std::uint64_t kSaltSources = 0x54;
inline constexpr std::uint64_t kSaltPayload = 0x9A;
inline constexpr std::uint64_t kSaltUpdate = 0xD7;

/// Next hop from node u under the current table: neighbors in adjacency
/// order, then the self-loop as the remainder bucket.
inline int sample_next_hop(const TransitionMatrix& tp, const Graph& g, int u, Rand& rng) {
    const double roll = rng.unit();
    double cum = 0.0;
    for (int v : g.adjacency[u]) {
        cum += tp.at(u, v);
        if (roll < cum) return v;
    }
    return u;
}

inline Payload random_payload(std::size_t len, std::uint64_t seed) {
    Rand rng(seed);
    Payload p(len);
    for (auto& b : p) b = rng.byte();
    return p;
}

}  // namespace detail

/// Synchronous-round dissemination: k source packets walk
/// walk_length(n, c1) hops each through the per-node protocol machines.
/// Rounds are two-phase (all sends sampled, then all deliveries applied, in
/// sender-id order); under the ddslt policy, forwarding rows touched by
/// code-degree changes are rebuilt at round boundaries. Fully deterministic
/// in cfg.seed.
inline RunResult run_dissemination(const SimConfig& cfg, const ReceiveObserver& observer = {}) {
    cfg.validate();
    const Graph g = generate_connected_rgg(cfg.n, cfg.radius(), cfg.seed, cfg.max_connect_retries);
    const int wl = walk_length(cfg.n, cfg.c1);

    // pick k source nodes uniformly without replacement; remap ascending
    std::vector<int> ids(cfg.n);
    std::iota(ids.begin(), ids.end(), 0);
    Rand source_rng(mix64(cfg.seed, detail::kSaltSources));
    source_rng.shuffle(ids);
    std::vector<int> source_nodes(ids.begin(), ids.begin() + cfg.k);
    std::sort(source_nodes.begin(), source_nodes.end());
    std::vector<int> remap(cfg.n, -1);  // node id -> remapped source id
    for (int i = 0; i < cfg.k; ++i) remap[source_nodes[i]] = i;

    std::vector<Payload> source_payloads(cfg.k);
    for (int i = 0; i < cfg.k; ++i) {
        source_payloads[i] = detail::random_payload(cfg.payload_len, mix64(cfg.seed, detail::kSaltPayload, i));
    }

    // per-node state and streams
    std::vector<NodeState> nodes;
    nodes.reserve(cfg.n);
    std::vector<RandBernoulli> bern;
    bern.reserve(cfg.n);
    std::vector<Rand> fwd;
    fwd.reserve(cfg.n);
    for (int u = 0; u < cfg.n; ++u) {
        const double alpha = Rand(mix64(cfg.seed, detail::kSaltAlpha, u)).unit();
        if (remap[u] >= 0) {
            nodes.push_back(init_source_node(remap[u], alpha, source_payloads[remap[u]]));
        } else {
            nodes.push_back(init_storage_node(-1, alpha, cfg.payload_len));
        }
        bern.emplace_back(mix64(cfg.seed, detail::kSaltBernoulli, u));
        fwd.emplace_back(mix64(cfg.seed, detail::kSaltForward, u));
    }

    // forwarding table
    CodeDegreeVector degrees(cfg.n, 1);
    const bool dynamic_rows = cfg.policy == PolicyId::ddslt;
    TransitionMatrix tp = dynamic_rows ? build_ddslt(g, degrees) : build_uniform(g);
    if (cfg.policy == PolicyId::ltcds1) {
        // LTCDS-I fixes each node's degree up front from the known k
        const DegreeDistribution dist = cfg.degree_rule.make(cfg.k);
        for (int u = 0; u < cfg.n; ++u) {
            nodes[u].code_degree = degree_from_alpha(dist, nodes[u].alpha);
            degrees[u] = nodes[u].code_degree;
        }
    }

    // emit one source packet per source, into the source's own queue
    for (int node_id : source_nodes) {
        NodeState& s = nodes[node_id];
        s.forward_queue.push_back(make_source_packet(s, wl, source_payloads[s.id]));
    }

    // post-receive the packet's SC equals the receiver's k_est, so checking
    // k_est covers the SC <= k packet invariant too
    auto check_receive_invariants = [&](int u, const NodeState& st) {
        if (!cfg.check_invariants) return;
        if (st.k_est > cfg.k) {
            throw std::logic_error("invariant violated: k_est > k at node " + std::to_string(u));
        }
        if (cfg.policy == PolicyId::ddslt && st.xored_count > st.code_degree) {
            throw std::logic_error("invariant violated: Sd > d at node " + std::to_string(u));
        }
    };

    Trace trace;
    auto sample_trace = [&](int step) {
        int k_reached = 0;
        int fulfilled = 0;
        for (const auto& st : nodes) {
            if (st.k_est == cfg.k) ++k_reached;
            if (st.xored_count == st.code_degree) ++fulfilled;
        }
        trace.samples.push_back({step,
                                 static_cast<double>(k_reached) / cfg.n,
                                 static_cast<double>(fulfilled) / cfg.n});
    };

    struct Send {
        int from;
        int to;
        Packet pkt;
    };

    int round = 0;
    std::vector<Send> sends;
    std::vector<int> dirty;
    bool queues_left = cfg.k > 0;
    while (queues_left) {
        ++round;
        sends.clear();
        for (int u = 0; u < cfg.n; ++u) {
            if (nodes[u].forward_queue.empty()) continue;
            Packet pkt = std::move(nodes[u].forward_queue.front());
            nodes[u].forward_queue.pop_front();
            sends.push_back({u, detail::sample_next_hop(tp, g, u, fwd[u]), std::move(pkt)});
        }
        trace.total_transmissions += static_cast<long long>(sends.size());

        dirty.clear();
        for (auto& s : sends) {
            NodeState& dst = nodes[s.to];
            const int before = dst.code_degree;
            const int src = s.pkt.source_id;
            ReceiveAction action;
            if (cfg.policy == PolicyId::ddslt) {
                action = handle_receive_ddslt(dst, std::move(s.pkt), bern[s.to], cfg.degree_rule);
            } else {
                action = handle_receive_ltcds(dst, std::move(s.pkt), bern[s.to], cfg.k);
            }
            check_receive_invariants(s.to, dst);
            if (dst.code_degree != before) dirty.push_back(s.to);
            if (observer) {
                observer({round, s.to, src, action, dst.k_est, dst.code_degree, dst.xored_count});
            }
        }

        if (dynamic_rows && !dirty.empty()) {
            std::set<int> rows;
            for (int u : dirty) {
                degrees[u] = nodes[u].code_degree;
                for (int r : two_hop_closure(g, u)) rows.insert(r);
            }
            rebuild_ddslt_rows(tp, g, degrees, {rows.begin(), rows.end()});
        }

        queues_left = false;
        for (const auto& st : nodes) {
            if (!st.forward_queue.empty()) {
                queues_left = true;
                break;
            }
        }
        if (round % cfg.snapshot_every == 0 || !queues_left) sample_trace(round);
    }

    if (trace.total_transmissions != static_cast<long long>(cfg.k) * wl) {
        throw std::logic_error("invariant violated: total transmissions " +
                               std::to_string(trace.total_transmissions) + " != k * walk_length");
    }

    // end of dissemination: held-first packets become stored packets
    for (auto& st : nodes) finalize_provisional(st);

    StorageSnapshot snap;
    snap.n = cfg.n;
    snap.k = cfg.k;
    snap.payload_len = cfg.payload_len;
    snap.source_nodes = source_nodes;
    snap.source_payloads = source_payloads;
    snap.node_xor_ids.resize(cfg.n);
    snap.node_buffers.resize(cfg.n);
    snap.code_degrees.resize(cfg.n);
    for (int u = 0; u < cfg.n; ++u) {
        snap.node_xor_ids[u].assign(nodes[u].xor_ids.begin(), nodes[u].xor_ids.end());
        snap.node_buffers[u] = nodes[u].buffer;
        snap.code_degrees[u] = nodes[u].code_degree;
    }

    if (cfg.check_invariants) {
        for (int u = 0; u < cfg.n; ++u) {
            Payload expect(cfg.payload_len, 0);
            for (int sid : snap.node_xor_ids[u]) xor_into(expect, source_payloads[sid]);
            if (expect != snap.node_buffers[u]) {
                throw std::logic_error("invariant violated: buffer of node " + std::to_string(u) +
                                       " does not match the XOR of its stored sources");
            }
        }
    }
    return {std::move(snap), std::move(trace)};
}

/// Post-dissemination data update: one update packet (old XOR new) walks
/// walk_length steps from the source; every node whose buffer combines that
/// source applies the delta on the packet's first visit. Returns the
/// updated snapshot, with the ground-truth table refreshed.
inline StorageSnapshot run_update_phase(const StorageSnapshot& snapshot, const Graph& g,
                                        int source_id, const Payload& new_payload,
                                        const SimConfig& cfg) {
    cfg.validate();
    if (source_id < 0 || source_id >= snapshot.k) {
        throw std::invalid_argument("run_update_phase: unknown source id " +
                                    std::to_string(source_id));
    }
    if (new_payload.size() != snapshot.payload_len) {
        throw std::invalid_argument("run_update_phase: payload length mismatch");
    }
    const int wl = walk_length(cfg.n, cfg.c1);
    const TransitionMatrix tp = cfg.policy == PolicyId::ddslt
                                    ? build_ddslt(g, snapshot.code_degrees)
                                    : build_uniform(g);

    NodeState shim;
    shim.role = NodeRole::source;
    shim.id = source_id;
    const Payload& old_payload = snapshot.source_payloads[source_id];
    const Packet update = make_update_packet(shim, old_payload, new_payload, wl);

    StorageSnapshot out = snapshot;
    std::vector<char> visited(out.n, 0);
    std::vector<Rand> fwd;
    fwd.reserve(out.n);
    for (int u = 0; u < out.n; ++u) fwd.emplace_back(mix64(cfg.seed, detail::kSaltUpdate, u));

    auto apply_at = [&](int u) {
        if (visited[u]) return;
        visited[u] = 1;
        const auto& ids = out.node_xor_ids[u];
        if (std::binary_search(ids.begin(), ids.end(), source_id)) {
            xor_into(out.node_buffers[u], update.payload);
        }
    };

    int cur = snapshot.source_nodes[source_id];
    apply_at(cur);  // the source updates its own stored copy when it emits
    for (int hop = 0; hop < wl; ++hop) {
        cur = detail::sample_next_hop(tp, g, cur, fwd[cur]);
        apply_at(cur);
    }
    out.source_payloads[source_id] = new_payload;
    return out;
}

}  // namespace ddslt
