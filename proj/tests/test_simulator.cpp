#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <map>

#include "ddslt/decoder.hpp"
#include "ddslt/serialize.hpp"
#include "ddslt/simulator.hpp"

using namespace ddslt;

TEST_CASE("walk_length") {
    REQUIRE(walk_length(100, 5.0) == 2303);
    REQUIRE(walk_length(10, 1.0) == 24);
    REQUIRE_THROWS_AS(walk_length(1, 5.0), std::invalid_argument);
    REQUIRE_THROWS_AS(walk_length(100, 0.0), std::invalid_argument);
}

TEST_CASE("two-node network, one source: held packet survives the walk") {
    SimConfig cfg;
    cfg.n = 2;
    cfg.k = 1;
    cfg.c1 = 0.1;  // walk length 1: a single hop to the storage node
    cfg.radius_coeff = 2.0;
    cfg.seed = 3;
    REQUIRE(walk_length(2, 0.1) == 1);
    const RunResult rr = run_dissemination(cfg);
    REQUIRE(rr.trace.total_transmissions == 1);
    // both nodes hold source 0 (source by default, storage via finalization)
    REQUIRE(rr.snapshot.node_xor_ids[0] == std::vector<int>{0});
    REQUIRE(rr.snapshot.node_xor_ids[1] == std::vector<int>{0});
    REQUIRE(decoding_probability(rr.snapshot, 1.0, 20, 5, DecodeCriterion::rank) == 1.0);
    REQUIRE(decoding_probability(rr.snapshot, 1.0, 20, 5, DecodeCriterion::peel) == 1.0);
}

TEST_CASE("dissemination is deterministic in the config") {
    SimConfig cfg;
    cfg.n = 40;
    cfg.k = 4;
    cfg.c1 = 2.0;
    cfg.seed = 11;
    const RunResult a = run_dissemination(cfg);
    const RunResult b = run_dissemination(cfg);
    REQUIRE(snapshot_to_json(a.snapshot).dump() == snapshot_to_json(b.snapshot).dump());
    REQUIRE(a.trace.samples.size() == b.trace.samples.size());
    for (std::size_t i = 0; i < a.trace.samples.size(); ++i) {
        REQUIRE(a.trace.samples[i].step == b.trace.samples[i].step);
        REQUIRE(a.trace.samples[i].fraction_k_reached == b.trace.samples[i].fraction_k_reached);
    }
    SimConfig other = cfg;
    other.seed = 12;
    const RunResult c = run_dissemination(other);
    REQUIRE(snapshot_to_json(a.snapshot).dump() != snapshot_to_json(c.snapshot).dump());
}

TEST_CASE("walk budget conservation") {
    for (auto policy : {PolicyId::ddslt, PolicyId::ltcds1}) {
        SimConfig cfg;
        cfg.n = 30;
        cfg.k = 3;
        cfg.c1 = 1.5;
        cfg.seed = 21;
        cfg.policy = policy;
        const RunResult rr = run_dissemination(cfg);
        REQUIRE(rr.trace.total_transmissions ==
                static_cast<long long>(cfg.k) * walk_length(cfg.n, cfg.c1));
    }
}

TEST_CASE("fraction_k_reached never decreases within a run") {
    SimConfig cfg;
    cfg.n = 50;
    cfg.k = 5;
    cfg.c1 = 3.0;
    cfg.seed = 8;
    const RunResult rr = run_dissemination(cfg);
    double prev = 0.0;
    for (const auto& s : rr.trace.samples) {
        REQUIRE(s.fraction_k_reached >= prev);
        prev = s.fraction_k_reached;
    }
    REQUIRE(prev == 1.0);  // long walk: everyone learns k
}

TEST_CASE("per-node code degree traces are non-decreasing (ideal rule)") {
    SimConfig cfg;
    cfg.n = 40;
    cfg.k = 6;
    cfg.c1 = 2.0;
    cfg.seed = 17;
    std::map<int, int> last_degree;
    std::map<int, int> last_k_est;
    run_dissemination(cfg, [&](const ReceiveEvent& ev) {
        auto it = last_degree.find(ev.node);
        if (it != last_degree.end()) {
            REQUIRE(ev.d >= it->second);
            REQUIRE(ev.k_est >= last_k_est[ev.node]);
        }
        REQUIRE(ev.k_est <= cfg.k);
        REQUIRE(ev.sd <= ev.d);
        last_degree[ev.node] = ev.d;
        last_k_est[ev.node] = ev.k_est;
    });
}

TEST_CASE("final buffers equal the XOR of their stored sources") {
    SimConfig cfg;
    cfg.n = 50;
    cfg.k = 5;
    cfg.c1 = 3.0;
    cfg.seed = 14;
    for (auto policy : {PolicyId::ddslt, PolicyId::ltcds1}) {
        cfg.policy = policy;
        const RunResult rr = run_dissemination(cfg);  // engine checks this too
        for (int u = 0; u < cfg.n; ++u) {
            Payload expect(cfg.payload_len, 0);
            for (int sid : rr.snapshot.node_xor_ids[u]) {
                xor_into(expect, rr.snapshot.source_payloads[sid]);
            }
            REQUIRE(expect == rr.snapshot.node_buffers[u]);
        }
    }
}

TEST_CASE("encoding nearly finishes by half the default walk (seed 42)") {
    SimConfig cfg;
    cfg.seed = 42;
    const RunResult rr = run_dissemination(cfg);
    const int half = static_cast<int>(std::ceil(2.5 * cfg.n * std::log(double(cfg.n))));
    REQUIRE(half == 1152);
    REQUIRE(rr.trace.fraction_degree_fulfilled_at(half) >= 0.95);
}

TEST_CASE("robust degree rule runs end to end") {
    SimConfig cfg;
    cfg.n = 30;
    cfg.k = 3;
    cfg.c1 = 2.0;
    cfg.seed = 19;
    SECTION("parameters valid at every estimate") {
        cfg.degree_rule = {DistKind::robust, 0.9, 0.1};
        const RunResult rr = run_dissemination(cfg);
        REQUIRE(rr.trace.total_transmissions == 3LL * walk_length(30, 2.0));
    }
    SECTION("degenerate small-K parameters fall back to ideal without aborting") {
        cfg.degree_rule = {DistKind::robust, 0.1, 0.5};
        REQUIRE_NOTHROW(run_dissemination(cfg));
    }
}

TEST_CASE("graph generation failures propagate") {
    SimConfig cfg;
    cfg.n = 100;
    cfg.k = 5;
    cfg.radius_coeff = 0.1;  // radius 0.01, hopeless
    cfg.max_connect_retries = 3;
    REQUIRE_THROWS_WITH(run_dissemination(cfg),
                        Catch::Matchers::ContainsSubstring("connectivity budget exhausted"));
}

TEST_CASE("config validation") {
    SimConfig cfg;
    cfg.k = 0;
    REQUIRE_THROWS_AS(run_dissemination(cfg), std::invalid_argument);
    cfg.k = 200;
    cfg.n = 100;
    REQUIRE_THROWS_AS(run_dissemination(cfg), std::invalid_argument);
}

TEST_CASE("update phase") {
    SimConfig cfg;
    cfg.n = 60;
    cfg.k = 6;
    cfg.c1 = 5.0;
    cfg.seed = 31;
    const Graph g = generate_connected_rgg(cfg.n, cfg.radius(), cfg.seed, cfg.max_connect_retries);
    const RunResult rr = run_dissemination(cfg);

    SECTION("identical payload is a byte-identical no-op") {
        const StorageSnapshot upd =
            run_update_phase(rr.snapshot, g, 0, rr.snapshot.source_payloads[0], cfg);
        REQUIRE(snapshot_to_json(upd).dump() == snapshot_to_json(rr.snapshot).dump());
    }
    SECTION("new data replaces the old everywhere it was stored") {
        Payload new_x(cfg.payload_len, 0x5C);
        const StorageSnapshot upd = run_update_phase(rr.snapshot, g, 2, new_x, cfg);
        REQUIRE(upd.source_payloads[2] == new_x);
        // every buffer must now be consistent with the refreshed ground truth
        for (int u = 0; u < cfg.n; ++u) {
            Payload expect(cfg.payload_len, 0);
            for (int sid : upd.node_xor_ids[u]) xor_into(expect, upd.source_payloads[sid]);
            REQUIRE(expect == upd.node_buffers[u]);
        }
        // and decoding from full coverage recovers the new table
        std::vector<int> all(cfg.n);
        std::iota(all.begin(), all.end(), 0);
        const DecodeResult dec = peel_decode(encoded_set_from_nodes(upd, all));
        REQUIRE(static_cast<int>(dec.recovered.size()) == upd.k);
        for (const auto& [sid, payload] : dec.recovered) {
            REQUIRE(payload == upd.source_payloads[sid]);
        }
    }
    SECTION("unknown source id is rejected") {
        REQUIRE_THROWS_AS(run_update_phase(rr.snapshot, g, 77, Payload(cfg.payload_len, 1), cfg),
                          std::invalid_argument);
    }
}
