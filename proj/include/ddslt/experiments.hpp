#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <future>
#include <map>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "ddslt/decoder.hpp"
#include "ddslt/simulator.hpp"
#include "ddslt/soliton.hpp"
#include "ddslt/thresholds.hpp"
#include "ddslt/transition.hpp"

namespace ddslt {

/// Shared knobs for the experiment drivers. Each driver reads the fields it
/// needs; base.seed anchors every derived stream.
struct ExperimentSpec {
    SimConfig base{};
    std::vector<double> r_list{1.5, 2.0, 2.5};
    std::vector<double> c1_grid;   // defaults to 0, 0.25, ..., base.c1
    std::vector<double> eta_grid;  // defaults to 1.0, 1.25, ..., 2.5
    int seeds = 20;
    int trials = 200;
    int threads = 1;  // execution hint only; results never depend on it

    std::vector<double> c1_checkpoints() const {
        if (!c1_grid.empty()) return c1_grid;
        std::vector<double> out;
        for (double c = 0.0; c <= base.c1 + 1e-9; c += 0.25) out.push_back(c);
        return out;
    }
    std::vector<double> eta_checkpoints() const {
        if (!eta_grid.empty()) return eta_grid;
        std::vector<double> out;
        for (double e = 1.0; e <= 2.5 + 1e-9; e += 0.25) out.push_back(e);
        return out;
    }
};

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};

inline std::string format_double(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.10g", x);
    return buf;
}

inline void write_csv(const Table& t, std::ostream& os) {
    for (std::size_t i = 0; i < t.header.size(); ++i) {
        os << (i ? "," : "") << t.header[i];
    }
    os << "\n";
    for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            os << (i ? "," : "") << format_double(row[i]);
        }
        os << "\n";
    }
}

namespace detail {

/// Deterministic fan-out: body(i) for i in [0, count), chunked over up to
/// `threads` workers. Callers write results into index i of a pre-sized
/// container, so scheduling cannot change the output.
template <typename F>
void parallel_for(int count, int threads, F&& body) {
    threads = std::max(1, std::min(threads, count));
    if (threads == 1) {
        for (int i = 0; i < count; ++i) body(i);
        return;
    }
    std::vector<std::future<void>> futs;
    futs.reserve(threads);
    for (int w = 0; w < threads; ++w) {
        futs.push_back(std::async(std::launch::async, [&, w] {
            for (int i = w; i < count; i += threads) body(i);
        }));
    }
    for (auto& f : futs) f.get();
}

/// Dense per-step metric curves from a sampled trace.
struct DenseTrace {
    std::vector<double> k_reached;   // index = step
    std::vector<double> fulfilled;
};

inline DenseTrace densify(const Trace& tr, int max_step) {
    DenseTrace d;
    d.k_reached.assign(max_step + 1, 0.0);
    d.fulfilled.assign(max_step + 1, 0.0);
    std::size_t i = 0;
    double kr = 0.0, ff = 0.0;
    for (int s = 0; s <= max_step; ++s) {
        while (i < tr.samples.size() && tr.samples[i].step <= s) {
            kr = tr.samples[i].fraction_k_reached;
            ff = tr.samples[i].fraction_degree_fulfilled;
            ++i;
        }
        d.k_reached[s] = kr;
        d.fulfilled[s] = ff;
    }
    return d;
}

inline double median(std::vector<double> v) {
    if (v.empty()) throw std::invalid_argument("median of empty set");
    std::sort(v.begin(), v.end());
    const std::size_t m = v.size() / 2;
    return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

}  // namespace detail

/// Inputs of the encoding-success lower bound.
struct BoundInputs {
    int d = 1;           // code degree of the node
    int k = 10;          // number of source packets
    double L = 0.0;      // walk length
    double sigma_d = 0;  // sum of code degrees over all nodes
    DegreeDistribution omega;  // desired degree distribution (support k)
};

/// Lower bound on Pr(Sd_u = d_u): the degree-distribution mass at d times
/// the number of d-subsets times the probability that d packets, each
/// visiting the expected L*d/sigma_d times, are all accepted. Clamped to 1
/// (the combinatorial factor makes it exceed 1 for mid-range degrees).
inline double acceptance_bound(const BoundInputs& b) {
    if (b.d < 1) throw std::invalid_argument("acceptance_bound: d must be >= 1");
    if (b.d > b.k) throw std::invalid_argument("acceptance_bound: d must not exceed k");
    if (!(b.L > 0.0)) throw std::invalid_argument("acceptance_bound: L must be > 0");
    if (!(b.sigma_d > 0.0)) throw std::invalid_argument("acceptance_bound: sigma_d must be > 0");
    if (b.omega.K < b.d) throw std::invalid_argument("acceptance_bound: omega support too small");

    double comb = 1.0;
    for (int i = 1; i <= b.d; ++i) comb *= static_cast<double>(b.k - b.d + i) / i;
    const double visits = b.L * b.d / b.sigma_d;          // expected visits per packet
    const double miss = std::pow(1.0 - static_cast<double>(b.d) / b.k, visits);
    const double raw = b.omega.pmf[b.d - 1] * comb * std::pow(1.0 - miss, b.d);
    return std::min(1.0, raw);
}

/// Share of nodes that know k, at walk-length checkpoints, for several
/// communication radii. One dissemination per (r, seed) read at every
/// checkpoint step.
inline Table run_fig1(const ExperimentSpec& spec) {
    const auto checkpoints = spec.c1_checkpoints();
    Table t;
    t.header = {"r", "c1", "fraction_k_reached"};
    for (double r : spec.r_list) {
        std::vector<detail::DenseTrace> traces(spec.seeds);
        const int max_step = walk_length(spec.base.n, spec.base.c1);
        detail::parallel_for(spec.seeds, spec.threads, [&](int i) {
            SimConfig cfg = spec.base;
            cfg.radius_coeff = r;
            cfg.policy = PolicyId::ddslt;
            cfg.seed = spec.base.seed + static_cast<std::uint64_t>(i);
            cfg.snapshot_every = 1;
            traces[i] = detail::densify(run_dissemination(cfg).trace, max_step);
        });
        for (double c1 : checkpoints) {
            const int step = static_cast<int>(
                std::ceil(c1 * spec.base.n * std::log(static_cast<double>(spec.base.n))));
            double acc = 0.0;
            for (const auto& tr : traces) acc += tr.k_reached[std::min(step, max_step)];
            t.rows.push_back({r, c1, acc / spec.seeds});
        }
    }
    return t;
}

struct Fig2Result {
    Table table;  // eta, ddslt_prob, ltcds1_prob
    // per-seed success probabilities, indexed [eta][seed]
    std::vector<std::vector<double>> ddslt_by_seed;
    std::vector<std::vector<double>> ltcds_by_seed;
};

/// Successful-decoding probability versus decoding ratio for both policies,
/// aggregated over dissemination seeds x decode trials (rank criterion,
/// nested decode subsets across the eta grid).
inline Fig2Result run_fig2(const ExperimentSpec& spec) {
    const auto etas = spec.eta_checkpoints();
    Fig2Result res;
    res.ddslt_by_seed.assign(etas.size(), std::vector<double>(spec.seeds, 0.0));
    res.ltcds_by_seed.assign(etas.size(), std::vector<double>(spec.seeds, 0.0));

    detail::parallel_for(spec.seeds, spec.threads, [&](int i) {
        for (const PolicyId policy : {PolicyId::ddslt, PolicyId::ltcds1}) {
            SimConfig cfg = spec.base;
            cfg.policy = policy;
            cfg.seed = spec.base.seed + static_cast<std::uint64_t>(i);
            cfg.snapshot_every = 1 << 20;  // only the final sample is needed
            const StorageSnapshot snap = run_dissemination(cfg).snapshot;
            for (std::size_t e = 0; e < etas.size(); ++e) {
                const double p = decoding_probability(snap, etas[e], spec.trials,
                                                      mix64(cfg.seed, 0xF16), DecodeCriterion::rank);
                (policy == PolicyId::ddslt ? res.ddslt_by_seed : res.ltcds_by_seed)[e][i] = p;
            }
        }
    });

    res.table.header = {"eta", "ddslt_prob", "ltcds1_prob"};
    for (std::size_t e = 0; e < etas.size(); ++e) {
        double sd = 0.0, sl = 0.0;
        for (int i = 0; i < spec.seeds; ++i) {
            sd += res.ddslt_by_seed[e][i];
            sl += res.ltcds_by_seed[e][i];
        }
        res.table.rows.push_back({etas[e], sd / spec.seeds, sl / spec.seeds});
    }
    return res;
}

struct Fig3Result {
    Table table;  // degree, ddslt_pmf, ltcds1_pmf, ideal_pmf
    double mean_tv_ddslt = 0.0;
    double mean_tv_ltcds = 0.0;
    double mean_empty_mass_ltcds = 0.0;
};

/// Final storage-degree profile (share of nodes that combined 0..k source
/// packets) for both policies, against the Ideal Soliton reference.
inline Fig3Result run_fig3(const ExperimentSpec& spec) {
    const int k = spec.base.k;
    const DegreeDistribution ideal = ideal_soliton(k);
    const auto ideal_pmf = degree_indexed_pmf(ideal);

    std::vector<std::vector<double>> pmf_d(spec.seeds), pmf_l(spec.seeds);
    detail::parallel_for(spec.seeds, spec.threads, [&](int i) {
        for (const PolicyId policy : {PolicyId::ddslt, PolicyId::ltcds1}) {
            SimConfig cfg = spec.base;
            cfg.policy = policy;
            cfg.seed = spec.base.seed + static_cast<std::uint64_t>(i);
            cfg.snapshot_every = 1 << 20;
            const StorageSnapshot snap = run_dissemination(cfg).snapshot;
            std::vector<double> pmf(k + 1, 0.0);
            for (const auto& ids : snap.node_xor_ids) {
                pmf[std::min<std::size_t>(ids.size(), k)] += 1.0 / snap.n;
            }
            (policy == PolicyId::ddslt ? pmf_d : pmf_l)[i] = pmf;
        }
    });

    Fig3Result res;
    std::vector<double> mean_d(k + 1, 0.0), mean_l(k + 1, 0.0);
    for (int i = 0; i < spec.seeds; ++i) {
        res.mean_tv_ddslt += tv_distance(pmf_d[i], ideal_pmf) / spec.seeds;
        res.mean_tv_ltcds += tv_distance(pmf_l[i], ideal_pmf) / spec.seeds;
        res.mean_empty_mass_ltcds += pmf_l[i][0] / spec.seeds;
        for (int b = 0; b <= k; ++b) {
            mean_d[b] += pmf_d[i][b] / spec.seeds;
            mean_l[b] += pmf_l[i][b] / spec.seeds;
        }
    }
    res.table.header = {"degree", "ddslt_pmf", "ltcds1_pmf", "ideal_pmf"};
    for (int b = 0; b <= k; ++b) {
        res.table.rows.push_back({static_cast<double>(b), mean_d[b], mean_l[b], ideal_pmf[b]});
    }
    return res;
}

/// Share of nodes with fulfilled code degree per step, mean over seeds.
inline Table run_fig4(const ExperimentSpec& spec) {
    const int max_step = walk_length(spec.base.n, spec.base.c1);
    std::vector<detail::DenseTrace> traces(spec.seeds);
    detail::parallel_for(spec.seeds, spec.threads, [&](int i) {
        SimConfig cfg = spec.base;
        cfg.policy = PolicyId::ddslt;
        cfg.seed = spec.base.seed + static_cast<std::uint64_t>(i);
        cfg.snapshot_every = 1;
        traces[i] = detail::densify(run_dissemination(cfg).trace, max_step);
    });
    Table t;
    t.header = {"step", "fraction_fulfilled"};
    for (int s = 1; s <= max_step; ++s) {
        double acc = 0.0;
        for (const auto& tr : traces) acc += tr.fulfilled[s];
        t.rows.push_back({static_cast<double>(s), acc / spec.seeds});
    }
    return t;
}

struct Table1Result {
    Table table;  // seed, slem_uniform, slem_eq1, slem_eq2
    double median_uniform = 0.0;
    double median_eq1 = 0.0;
    double median_eq2 = 0.0;
};

/// SLEM of the three forwarding constructions on seeded connected geometric
/// graphs with per-node code degrees sampled from the Ideal Soliton.
inline Table1Result run_table1(const ExperimentSpec& spec) {
    const DegreeDistribution dist = ideal_soliton(spec.base.k);
    std::vector<std::array<double, 3>> rows(spec.seeds);
    detail::parallel_for(spec.seeds, spec.threads, [&](int i) {
        const std::uint64_t seed = spec.base.seed + static_cast<std::uint64_t>(i);
        const Graph g = generate_connected_rgg(spec.base.n, spec.base.radius(), seed,
                                               spec.base.max_connect_retries);
        CodeDegreeVector d(spec.base.n);
        for (int u = 0; u < spec.base.n; ++u) {
            const double alpha = Rand(mix64(seed, detail::kSaltAlpha, u)).unit();
            d[u] = degree_from_alpha(dist, alpha);
        }
        rows[i] = {slem(build_uniform(g)), slem(build_ddslt(g, d)), slem(build_metropolis(g, d))};
    });

    Table1Result res;
    res.table.header = {"seed", "slem_uniform", "slem_eq1", "slem_eq2"};
    std::vector<double> u, e1, e2;
    for (int i = 0; i < spec.seeds; ++i) {
        res.table.rows.push_back({static_cast<double>(spec.base.seed + i), rows[i][0], rows[i][1],
                                  rows[i][2]});
        u.push_back(rows[i][0]);
        e1.push_back(rows[i][1]);
        e2.push_back(rows[i][2]);
    }
    res.median_uniform = detail::median(u);
    res.median_eq1 = detail::median(e1);
    res.median_eq2 = detail::median(e2);
    return res;
}

struct BoundResult {
    Table table;  // d, bound, empirical
    std::vector<long long> class_counts;    // nodes observed per degree class
    std::vector<long long> class_success;   // of which fulfilled
};

/// Empirical fulfillment probability per final-degree class against the
/// clamped lower bound, pooled over seeds.
inline BoundResult run_bound(const ExperimentSpec& spec) {
    const int k = spec.base.k;
    const double L = walk_length(spec.base.n, spec.base.c1);
    std::vector<std::vector<int>> degs(spec.seeds), sds(spec.seeds);
    detail::parallel_for(spec.seeds, spec.threads, [&](int i) {
        SimConfig cfg = spec.base;
        cfg.policy = PolicyId::ddslt;
        cfg.seed = spec.base.seed + static_cast<std::uint64_t>(i);
        cfg.snapshot_every = 1 << 20;
        const StorageSnapshot snap = run_dissemination(cfg).snapshot;
        degs[i] = snap.code_degrees;
        std::vector<int> sd(snap.n);
        for (int u = 0; u < snap.n; ++u) sd[u] = static_cast<int>(snap.node_xor_ids[u].size());
        sds[i] = sd;
    });

    double sigma_sum = 0.0;
    for (const auto& d : degs) {
        for (int x : d) sigma_sum += x;
    }
    const double sigma_d = sigma_sum / spec.seeds;

    BoundResult res;
    res.class_counts.assign(k + 1, 0);
    res.class_success.assign(k + 1, 0);
    for (int i = 0; i < spec.seeds; ++i) {
        for (std::size_t u = 0; u < degs[i].size(); ++u) {
            const int d = degs[i][u];
            res.class_counts[d] += 1;
            if (sds[i][u] == d) res.class_success[d] += 1;
        }
    }
    const DegreeDistribution omega = ideal_soliton(k);
    res.table.header = {"d", "bound", "empirical"};
    for (int d = 1; d <= k; ++d) {
        if (res.class_counts[d] == 0) continue;
        const double emp = static_cast<double>(res.class_success[d]) / res.class_counts[d];
        const double b = acceptance_bound({d, k, L, sigma_d, omega});
        res.table.rows.push_back({static_cast<double>(d), b, emp});
    }
    return res;
}

}  // namespace ddslt
