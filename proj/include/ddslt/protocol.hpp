#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <set>
#include <stdexcept>
#include <vector>

#include "ddslt/rng.hpp"
#include "ddslt/soliton.hpp"

namespace ddslt {

enum class PolicyId { ddslt, ltcds1 };

enum class NodeRole { source, storage };

using Payload = std::vector<std::uint8_t>;

inline void xor_into(Payload& dst, const Payload& src) {
    if (dst.size() != src.size()) throw std::invalid_argument("payload length mismatch");
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] ^= src[i];
}

/// Random-walk message: [source ID, remaining hop counter L, source counter
/// SC, update flag UF, payload].
struct Packet {
    int source_id = -1;
    int hop_counter = 0;      // L, remaining transmissions
    int source_counter = 1;   // SC, traveling estimate of k
    bool update_flag = false; // UF
    Payload payload;
};

/// Per-node protocol state. buffer always equals the XOR of the original
/// payloads of xor_ids (plus the provisional payload while one is held).
struct NodeState {
    NodeRole role = NodeRole::storage;
    int id = -1;
    double alpha = 0.0;            // fixed at init, drives degree selection
    int k_est = 0;                 // k'_u
    int code_degree = 1;           // d_u
    int xored_count = 0;           // Sd_u
    int sources_seen = 0;          // SN_u
    std::set<int> seen_ids;        // source ids whose packets have visited
    std::set<int> xor_ids;         // source ids combined in the buffer
    Payload buffer;
    std::optional<int> provisional_first;  // first packet held pending the deferred trial
    Payload provisional_payload;
    std::deque<Packet> forward_queue;
};

/// What a receive did with the packet content, for trace logs and tests.
enum class ReceiveAction { hold, accept, reject, skip };

inline const char* to_string(ReceiveAction a) {
    switch (a) {
        case ReceiveAction::hold: return "hold";
        case ReceiveAction::accept: return "accept";
        case ReceiveAction::reject: return "reject";
        default: return "skip";
    }
}

inline NodeState init_storage_node(int id, double alpha, std::size_t payload_len) {
    if (alpha < 0.0 || alpha > 1.0) throw std::invalid_argument("alpha must be in [0,1]");
    NodeState s;
    s.role = NodeRole::storage;
    s.id = id;
    s.alpha = alpha;
    s.k_est = 0;
    s.code_degree = 1;
    s.xored_count = 0;
    s.sources_seen = 0;
    s.buffer.assign(payload_len, 0);
    return s;
}

/// Source nodes hold their own data from the start: k'=1, d=1, Sd=1, SN=1,
/// own id in both id sets, buffer = own payload.
inline NodeState init_source_node(int id, double alpha, const Payload& own_payload) {
    if (alpha < 0.0 || alpha > 1.0) throw std::invalid_argument("alpha must be in [0,1]");
    NodeState s;
    s.role = NodeRole::source;
    s.id = id;
    s.alpha = alpha;
    s.k_est = 1;
    s.code_degree = 1;
    s.xored_count = 1;
    s.sources_seen = 1;
    s.seen_ids.insert(id);
    s.xor_ids.insert(id);
    s.buffer = own_payload;
    return s;
}

inline Packet make_source_packet(const NodeState& node, int walk_len, const Payload& payload) {
    if (node.role != NodeRole::source) {
        throw std::invalid_argument("make_source_packet: node is not a source");
    }
    if (walk_len < 0) throw std::invalid_argument("make_source_packet: negative walk length");
    Packet p;
    p.source_id = node.id;
    p.hop_counter = walk_len;
    p.source_counter = 1;
    p.update_flag = false;
    p.payload = payload;
    return p;
}

/// Re-selects d_u from the current degree distribution formed at K = k'_u,
/// keyed by the node's fixed alpha. With the Ideal Soliton the new value is
/// never smaller than the old one.
inline void update_code_degree(NodeState& node, const DegreeRule& rule) {
    if (node.k_est < 1) throw std::invalid_argument("update_code_degree: k_est is 0");
    node.code_degree = degree_from_alpha(rule.make(node.k_est), node.alpha);
}

/// DDSLT receive path, in order: (a) counter maintenance, (b) code-degree
/// update, (c) the XORing decision, (d) hop decrement + requeue or drop.
/// Returns the action taken on the packet content. The packet is consumed
/// into the node's forward queue unless its walk ended.
inline ReceiveAction handle_receive_ddslt(NodeState& node, Packet pkt, BernoulliSource& bern,
                                          const DegreeRule& rule) {
    if (pkt.hop_counter < 1) throw std::invalid_argument("received packet with spent walk");
    if (pkt.update_flag) throw std::invalid_argument("update packets go to apply_update");

    const bool first_ever = node.sources_seen == 0;

    // (a) counters: new source ids bump SN; k'_u and SC_j meet at
    // max(k'_u, SN_u, SC_j) on every receipt.
    if (node.seen_ids.insert(pkt.source_id).second) {
        node.sources_seen += 1;
    }
    const int merged = std::max(node.k_est, std::max(node.sources_seen, pkt.source_counter));
    node.k_est = merged;
    pkt.source_counter = merged;

    // (b)
    update_code_degree(node, rule);

    // (c) XORing
    ReceiveAction action;
    if (first_ever) {
        // very first packet is held with probability one, decision deferred
        node.provisional_first = pkt.source_id;
        node.provisional_payload = pkt.payload;
        node.buffer = pkt.payload;
        action = ReceiveAction::hold;
    } else if (node.provisional_first && pkt.source_id != *node.provisional_first) {
        // first packet from a second distinct source: run the deferred trial
        // on the held payload, then give the new packet its own trial
        const double p = static_cast<double>(node.code_degree) / node.k_est;
        if (bern.draw(p)) {
            node.xor_ids.insert(*node.provisional_first);
            node.xored_count = 1;
        } else {
            node.buffer.assign(node.buffer.size(), 0);
        }
        node.provisional_first.reset();
        node.provisional_payload.clear();
        if (node.xored_count >= node.code_degree) {
            action = ReceiveAction::skip;
        } else if (bern.draw(p)) {
            xor_into(node.buffer, pkt.payload);
            node.xor_ids.insert(pkt.source_id);
            node.xored_count += 1;
            action = ReceiveAction::accept;
        } else {
            action = ReceiveAction::reject;
        }
    } else if (node.provisional_first) {
        // duplicate of the held source before any second source showed up
        action = ReceiveAction::skip;
    } else if (node.xored_count < node.code_degree && !node.xor_ids.count(pkt.source_id)) {
        // steady state: the trial re-runs on every visit until saturation
        const double p = static_cast<double>(node.code_degree) / node.k_est;
        if (bern.draw(p)) {
            xor_into(node.buffer, pkt.payload);
            node.xor_ids.insert(pkt.source_id);
            node.xored_count += 1;
            action = ReceiveAction::accept;
        } else {
            action = ReceiveAction::reject;
        }
    } else {
        action = ReceiveAction::skip;  // saturated or already combined
    }

    // (d)
    pkt.hop_counter -= 1;
    if (pkt.hop_counter > 0) node.forward_queue.push_back(std::move(pkt));
    return action;
}

/// LTCDS-I baseline receive: the code degree was fixed at init from the
/// Soliton with known k; a packet gets one Bernoulli trial with success
/// probability d/k on its first visit only, and is never reconsidered.
inline ReceiveAction handle_receive_ltcds(NodeState& node, Packet pkt, BernoulliSource& bern,
                                          int k_known) {
    if (pkt.hop_counter < 1) throw std::invalid_argument("received packet with spent walk");
    if (pkt.update_flag) throw std::invalid_argument("update packets go to apply_update");
    if (k_known < 1) throw std::invalid_argument("handle_receive_ltcds: k_known required");

    ReceiveAction action = ReceiveAction::skip;
    if (node.seen_ids.insert(pkt.source_id).second) {
        node.sources_seen += 1;
        const double p = static_cast<double>(node.code_degree) / k_known;
        if (bern.draw(p)) {
            xor_into(node.buffer, pkt.payload);
            node.xor_ids.insert(pkt.source_id);
            node.xored_count += 1;
            action = ReceiveAction::accept;
        } else {
            action = ReceiveAction::reject;
        }
    }

    pkt.hop_counter -= 1;
    if (pkt.hop_counter > 0) node.forward_queue.push_back(std::move(pkt));
    return action;
}

/// Update packet for a source that changed its data: payload carries
/// old XOR new, so applying it to any buffer that contains the old data
/// swaps in the new data.
inline Packet make_update_packet(const NodeState& source, const Payload& old_payload,
                                 const Payload& new_payload, int walk_len) {
    if (source.role != NodeRole::source) {
        throw std::invalid_argument("make_update_packet: node is not a source");
    }
    if (old_payload.size() != new_payload.size()) {
        throw std::invalid_argument("make_update_packet: payload length mismatch");
    }
    Packet p;
    p.source_id = source.id;
    p.hop_counter = walk_len;
    p.source_counter = 1;
    p.update_flag = true;
    p.payload = old_payload;
    xor_into(p.payload, new_payload);
    return p;
}

/// Applies an update delta to a node that has the source combined in its
/// buffer; all counter and XORing steps are skipped for update packets.
/// The caller is responsible for applying a given update packet at most
/// once per node. Returns true when the buffer changed.
inline bool apply_update(NodeState& node, const Packet& pkt) {
    if (!pkt.update_flag) throw std::invalid_argument("apply_update: not an update packet");
    if (node.xor_ids.count(pkt.source_id)) {
        xor_into(node.buffer, pkt.payload);
        return true;
    }
    return false;
}

/// End-of-dissemination cleanup: a node still holding its first packet
/// provisionally (no second source ever arrived) keeps it as accepted.
inline void finalize_provisional(NodeState& node) {
    if (node.provisional_first) {
        node.xor_ids.insert(*node.provisional_first);
        node.xored_count = static_cast<int>(node.xor_ids.size());
        node.provisional_first.reset();
        node.provisional_payload.clear();
    }
}

}  // namespace ddslt
