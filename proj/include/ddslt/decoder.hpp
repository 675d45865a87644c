#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "ddslt/protocol.hpp"
#include "ddslt/rng.hpp"
#include "ddslt/simulator.hpp"

namespace ddslt {

/// Collected encoded packets: each row is the id set of source packets
/// XOR-combined into one stored buffer, plus that buffer.
struct EncodedSet {
    int k = 0;
    std::vector<std::vector<int>> id_sets;
    std::vector<Payload> payloads;
};

enum class DecodeCriterion { rank, peel };

struct DecodeResult {
    std::map<int, Payload> recovered;
    // (source id, number of input rows consumed when it resolved)
    std::vector<std::pair<int, int>> peel_steps;
};

namespace detail {

inline std::vector<std::uint64_t> pack_row(const std::vector<int>& ids, int k) {
    std::vector<std::uint64_t> row((k + 63) / 64, 0);
    for (int id : ids) {
        if (id < 0 || id >= k) throw std::invalid_argument("gf2_rank: id out of range");
        row[id / 64] |= std::uint64_t{1} << (id % 64);
    }
    return row;
}

}  // namespace detail

/// Rank over GF(2) of the coefficient matrix, by elimination on bit-packed
/// rows.
inline int gf2_rank(const std::vector<std::vector<int>>& id_sets, int k) {
    if (k < 0) throw std::invalid_argument("gf2_rank: k must be >= 0");
    const int words = (k + 63) / 64;
    std::vector<std::vector<std::uint64_t>> basis;  // pivot rows, by pivot bit
    std::vector<int> pivots;
    for (const auto& ids : id_sets) {
        auto row = detail::pack_row(ids, k);
        for (std::size_t b = 0; b < basis.size(); ++b) {
            const int p = pivots[b];
            if (row[p / 64] >> (p % 64) & 1) {
                for (int w = 0; w < words; ++w) row[w] ^= basis[b][w];
            }
        }
        int pivot = -1;
        for (int bit = 0; bit < k && pivot < 0; ++bit) {
            if (row[bit / 64] >> (bit % 64) & 1) pivot = bit;
        }
        if (pivot >= 0) {
            basis.push_back(std::move(row));
            pivots.push_back(pivot);
        }
    }
    return static_cast<int>(basis.size());
}

/// LT peeling with online bookkeeping: rows are consumed in order, and after
/// each arrival every degree-1 row resolves its source and substitutes into
/// the rest, to fixpoint. Partial recovery is a valid outcome.
inline DecodeResult peel_decode(const EncodedSet& enc) {
    if (enc.id_sets.size() != enc.payloads.size()) {
        throw std::invalid_argument("peel_decode: rows and payloads differ in length");
    }
    DecodeResult res;
    struct Row {
        std::vector<int> ids;  // unresolved ids
        Payload payload;
    };
    std::vector<Row> rows;
    rows.reserve(enc.id_sets.size());

    std::vector<char> resolved(enc.k, 0);
    std::vector<Payload> values(enc.k);

    auto reduce = [&](Row& r) {
        // substitute already-resolved sources out of the row
        auto it = std::remove_if(r.ids.begin(), r.ids.end(), [&](int id) {
            if (resolved[id]) {
                xor_into(r.payload, values[id]);
                return true;
            }
            return false;
        });
        r.ids.erase(it, r.ids.end());
    };

    int consumed = 0;
    for (std::size_t i = 0; i < enc.id_sets.size(); ++i) {
        for (int id : enc.id_sets[i]) {
            if (id < 0 || id >= enc.k) throw std::invalid_argument("peel_decode: id out of range");
        }
        rows.push_back({enc.id_sets[i], enc.payloads[i]});
        ++consumed;
        bool progress = true;
        while (progress) {
            progress = false;
            for (auto& r : rows) {
                reduce(r);
                if (r.ids.size() == 1) {
                    const int id = r.ids.front();
                    resolved[id] = 1;
                    values[id] = r.payload;
                    res.peel_steps.emplace_back(id, consumed);
                    r.ids.clear();
                    progress = true;
                }
            }
        }
    }
    for (int id = 0; id < enc.k; ++id) {
        if (resolved[id]) res.recovered[id] = values[id];
    }
    return res;
}

/// Rows held by a chosen set of nodes. Nodes that stored nothing contribute
/// empty rows.
inline EncodedSet encoded_set_from_nodes(const StorageSnapshot& snap,
                                         const std::vector<int>& node_ids) {
    EncodedSet enc;
    enc.k = snap.k;
    enc.id_sets.reserve(node_ids.size());
    enc.payloads.reserve(node_ids.size());
    for (int u : node_ids) {
        enc.id_sets.push_back(snap.node_xor_ids[u]);
        enc.payloads.push_back(snap.node_buffers[u]);
    }
    return enc;
}

/// Fraction of trials in which h = round(eta * k) uniformly sampled nodes
/// suffice to decode all k sources. Trial t uses a permutation derived from
/// (seed, t) and takes its first h entries, so subsets are nested across eta
/// values under a common seed.
inline double decoding_probability(const StorageSnapshot& snap, double eta, int trials,
                                   std::uint64_t seed,
                                   DecodeCriterion criterion = DecodeCriterion::rank) {
    if (trials < 1) throw std::invalid_argument("decoding_probability: trials must be >= 1");
    if (eta < 0.0) throw std::invalid_argument("decoding_probability: eta must be >= 0");
    const int h = static_cast<int>(std::lround(eta * snap.k));
    if (h > snap.n) {
        throw std::invalid_argument("decoding_probability: h = " + std::to_string(h) +
                                    " exceeds n = " + std::to_string(snap.n));
    }
    if (h == 0) return 0.0;

    int successes = 0;
    std::vector<int> ids(snap.n);
    for (int t = 0; t < trials; ++t) {
        std::iota(ids.begin(), ids.end(), 0);
        Rand rng(mix64(seed, 0xDEC0DE, static_cast<std::uint64_t>(t)));
        rng.shuffle(ids);
        const std::vector<int> chosen(ids.begin(), ids.begin() + h);
        if (criterion == DecodeCriterion::rank) {
            std::vector<std::vector<int>> rows;
            rows.reserve(h);
            for (int u : chosen) rows.push_back(snap.node_xor_ids[u]);
            if (gf2_rank(rows, snap.k) == snap.k) ++successes;
        } else {
            const DecodeResult res = peel_decode(encoded_set_from_nodes(snap, chosen));
            if (static_cast<int>(res.recovered.size()) == snap.k) ++successes;
        }
    }
    return static_cast<double>(successes) / trials;
}

}  // namespace ddslt
