// Command-line front end: graph/distribution generators, the dissemination
// simulator, decoder evaluation, and the experiment drivers. All randomness
// flows from --seed; identical flags give byte-identical outputs.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ddslt/decoder.hpp"
#include "ddslt/experiments.hpp"
#include "ddslt/graph.hpp"
#include "ddslt/serialize.hpp"
#include "ddslt/simulator.hpp"
#include "ddslt/soliton.hpp"

namespace {

using namespace ddslt;

std::vector<double> parse_grid(const std::string& s) {
    // "start:stop:step", inclusive of stop within fp slack
    double start = 0, stop = 0, step = 0;
    if (std::sscanf(s.c_str(), "%lf:%lf:%lf", &start, &stop, &step) != 3 || step <= 0) {
        throw CLI::ValidationError("grid", "expected start:stop:step with step > 0");
    }
    std::vector<double> out;
    for (double x = start; x <= stop + 1e-9; x += step) out.push_back(x);
    if (out.empty()) throw CLI::ValidationError("grid", "empty grid");
    return out;
}

void write_text(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open output file: " + path);
    os << text;
}

std::string csv_string(const Table& t) {
    std::ostringstream os;
    write_csv(t, os);
    return os.str();
}

DistKind parse_kind(const std::string& s) {
    if (s == "ideal") return DistKind::ideal;
    if (s == "robust") return DistKind::robust;
    throw CLI::ValidationError("--dist", "must be ideal or robust");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"DDSLT distributed-storage simulator and analysis tools"};
    app.require_subcommand(1);

    // shared experiment knobs; subcommands expose the subset they use
    SimConfig base;
    ExperimentSpec spec;
    std::string out_path;
    std::string dist_name = "ideal";
    std::uint64_t seed = 1;
    int threads = 1;

    auto add_base_flags = [&](CLI::App* cmd, bool with_k = true) {
        cmd->add_option("--n", base.n, "number of nodes");
        if (with_k) cmd->add_option("--k", base.k, "number of source nodes");
        cmd->add_option("--c1", base.c1, "walk-length coefficient");
        cmd->add_option("--radius-coeff", base.radius_coeff, "transmission radius coefficient r (radius = r/sqrt(n))");
        cmd->add_option("--seed", seed, "base seed");
        cmd->add_option("--out", out_path, "output path (default stdout)");
        cmd->add_option("--threads", threads, "parallelism hint; never affects results");
    };

    // gen-graph
    auto* cmd_graph = app.add_subcommand("gen-graph", "generate a random geometric graph (JSON)");
    bool want_connected = false;
    int max_retries = 100;
    cmd_graph->add_option("--n", base.n, "number of nodes")->required();
    cmd_graph->add_option("--radius-coeff", base.radius_coeff, "radius coefficient r (radius = r/sqrt(n))");
    cmd_graph->add_option("--seed", seed, "seed");
    cmd_graph->add_option("--out", out_path, "output path");
    cmd_graph->add_flag("--connected", want_connected, "retry seeds until connected");
    cmd_graph->add_option("--max-retries", max_retries, "connectivity retry budget");

    // dist
    auto* cmd_dist = app.add_subcommand("dist", "emit a Soliton degree distribution (CSV)");
    int dist_k = 10;
    double robust_c = 0.1, robust_delta = 0.5;
    cmd_dist->add_option("--kind", dist_name, "ideal or robust")->required();
    cmd_dist->add_option("--k", dist_k, "support size")->required();
    cmd_dist->add_option("--c", robust_c, "robust parameter c");
    cmd_dist->add_option("--delta", robust_delta, "robust failure parameter delta");
    cmd_dist->add_option("--out", out_path, "output path");

    // simulate
    auto* cmd_sim = app.add_subcommand("simulate", "run one dissemination, write snapshot JSON");
    std::string policy_name = "ddslt";
    std::string trace_path, event_log_path;
    add_base_flags(cmd_sim);
    cmd_sim->add_option("--policy", policy_name, "ddslt or ltcds1");
    cmd_sim->add_option("--dist", dist_name, "ideal or robust");
    cmd_sim->add_option("--c", robust_c, "robust parameter c");
    cmd_sim->add_option("--delta", robust_delta, "robust failure parameter delta");
    cmd_sim->add_option("--payload-len", base.payload_len, "payload bytes per packet");
    cmd_sim->add_option("--snapshot-every", base.snapshot_every, "steps between trace samples");
    cmd_sim->add_option("--trace-out", trace_path, "also write the metric trace CSV here");
    cmd_sim->add_option("--event-log", event_log_path, "write per-receive JSON lines here");

    // decode-eval
    auto* cmd_dec = app.add_subcommand("decode-eval", "decoding probability over an eta grid");
    std::string snapshot_path, eta_grid_str = "1.0:2.5:0.25", criterion_name = "rank";
    int trials = 200;
    cmd_dec->add_option("--snapshot", snapshot_path, "snapshot JSON from `simulate`")->required();
    cmd_dec->add_option("--eta-grid", eta_grid_str, "start:stop:step");
    cmd_dec->add_option("--trials", trials, "decode subsets per grid point");
    cmd_dec->add_option("--criterion", criterion_name, "rank or peel");
    cmd_dec->add_option("--seed", seed, "subset-sampling seed");
    cmd_dec->add_option("--out", out_path, "output path");

    // experiment drivers
    auto* cmd_fig1 = app.add_subcommand("fig1", "share of nodes that know k vs walk length");
    add_base_flags(cmd_fig1);
    std::string r_list_str = "1.5,2.0,2.5";
    cmd_fig1->add_option("--r-list", r_list_str, "comma-separated radius coefficients");
    cmd_fig1->add_option("--seeds", spec.seeds, "dissemination seeds");

    auto* cmd_fig2 = app.add_subcommand("fig2", "decoding probability vs decoding ratio");
    add_base_flags(cmd_fig2);
    cmd_fig2->add_option("--trials", spec.trials, "decode subsets per grid point");
    cmd_fig2->add_option("--eta-grid", eta_grid_str, "start:stop:step");
    cmd_fig2->add_option("--seeds", spec.seeds, "dissemination seeds");

    auto* cmd_fig3 = app.add_subcommand("fig3", "final storage-degree profile per policy");
    add_base_flags(cmd_fig3);
    cmd_fig3->add_option("--seeds", spec.seeds, "dissemination seeds");

    auto* cmd_fig4 = app.add_subcommand("fig4", "fulfilled code degree vs step");
    add_base_flags(cmd_fig4);
    cmd_fig4->add_option("--seeds", spec.seeds, "dissemination seeds");

    auto* cmd_table1 = app.add_subcommand("table1", "SLEM of the three forwarding tables");
    add_base_flags(cmd_table1);
    cmd_table1->add_option("--seeds", spec.seeds, "graph seeds");

    auto* cmd_bound = app.add_subcommand("bound", "encoding-success lower bound");
    int bound_d = -1;
    double bound_L = -1.0, bound_sigma = -1.0;
    cmd_bound->add_option("--d", bound_d, "code degree (scalar mode)");
    cmd_bound->add_option("--k", base.k, "number of source packets");
    cmd_bound->add_option("--L", bound_L, "walk length (scalar mode)");
    cmd_bound->add_option("--sigma-d", bound_sigma, "sum of code degrees (scalar mode)");
    cmd_bound->add_option("--n", base.n, "number of nodes (experiment mode)");
    cmd_bound->add_option("--c1", base.c1, "walk-length coefficient (experiment mode)");
    cmd_bound->add_option("--seeds", spec.seeds, "dissemination seeds (experiment mode)");
    cmd_bound->add_option("--seed", seed, "base seed");
    cmd_bound->add_option("--out", out_path, "CSV output switches to experiment mode");
    cmd_bound->add_option("--threads", threads, "parallelism hint");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);  // exits 0 with help text
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        base.seed = seed;
        spec.base = base;
        spec.threads = threads;

        if (cmd_graph->parsed()) {
            const double radius = base.radius_coeff / std::sqrt(static_cast<double>(base.n));
            const Graph g = want_connected
                                ? generate_connected_rgg(base.n, radius, seed, max_retries)
                                : generate_rgg(base.n, radius, seed);
            write_text(out_path, graph_to_json(g).dump(2) + "\n");
        } else if (cmd_dist->parsed()) {
            const DistKind kind = parse_kind(dist_name);
            const DegreeDistribution d = kind == DistKind::ideal
                                             ? ideal_soliton(dist_k)
                                             : robust_soliton(dist_k, robust_c, robust_delta);
            Table t;
            t.header = {"degree", "pmf", "cdf"};
            for (int i = 1; i <= d.K; ++i) {
                t.rows.push_back({static_cast<double>(i), d.pmf[i - 1], d.cdf[i - 1]});
            }
            write_text(out_path, csv_string(t));
        } else if (cmd_sim->parsed()) {
            base.policy = policy_name == "ltcds1" ? PolicyId::ltcds1 : PolicyId::ddslt;
            if (policy_name != "ddslt" && policy_name != "ltcds1") {
                throw std::runtime_error("unknown policy: " + policy_name);
            }
            base.degree_rule = {parse_kind(dist_name), robust_c, robust_delta};
            std::ofstream event_os;
            ReceiveObserver obs;
            if (!event_log_path.empty()) {
                event_os.open(event_log_path, std::ios::binary);
                if (!event_os) throw std::runtime_error("cannot open event log: " + event_log_path);
                obs = [&event_os](const ReceiveEvent& ev) {
                    ordered_json j;
                    j["step"] = ev.step;
                    j["node"] = ev.node;
                    j["source_id"] = ev.source_id;
                    j["action"] = to_string(ev.action);
                    j["k_est"] = ev.k_est;
                    j["d"] = ev.d;
                    j["Sd"] = ev.sd;
                    event_os << j.dump() << "\n";
                };
            }
            const RunResult rr = run_dissemination(base, obs);
            write_text(out_path, snapshot_to_json(rr.snapshot).dump(2) + "\n");
            if (!trace_path.empty()) {
                Table t;
                t.header = {"step", "fraction_k_reached", "fraction_degree_fulfilled"};
                for (const auto& s : rr.trace.samples) {
                    t.rows.push_back({static_cast<double>(s.step), s.fraction_k_reached,
                                      s.fraction_degree_fulfilled});
                }
                write_text(trace_path, csv_string(t));
            }
        } else if (cmd_dec->parsed()) {
            std::ifstream is(snapshot_path);
            if (!is) throw std::runtime_error("cannot open snapshot: " + snapshot_path);
            ordered_json j;
            is >> j;
            const StorageSnapshot snap = snapshot_from_json(j);
            const DecodeCriterion crit =
                criterion_name == "peel" ? DecodeCriterion::peel : DecodeCriterion::rank;
            if (criterion_name != "rank" && criterion_name != "peel") {
                throw std::runtime_error("unknown criterion: " + criterion_name);
            }
            Table t;
            t.header = {"eta", "success_prob", "trials"};
            for (double eta : parse_grid(eta_grid_str)) {
                t.rows.push_back({eta, decoding_probability(snap, eta, trials, seed, crit),
                                  static_cast<double>(trials)});
            }
            write_text(out_path, csv_string(t));
        } else if (cmd_fig1->parsed()) {
            spec.r_list.clear();
            std::stringstream ss(r_list_str);
            for (std::string tok; std::getline(ss, tok, ',');) {
                if (!tok.empty()) spec.r_list.push_back(std::stod(tok));
            }
            if (spec.r_list.empty()) throw std::runtime_error("empty --r-list");
            write_text(out_path, csv_string(run_fig1(spec)));
        } else if (cmd_fig2->parsed()) {
            spec.eta_grid = parse_grid(eta_grid_str);
            write_text(out_path, csv_string(run_fig2(spec).table));
        } else if (cmd_fig3->parsed()) {
            write_text(out_path, csv_string(run_fig3(spec).table));
        } else if (cmd_fig4->parsed()) {
            write_text(out_path, csv_string(run_fig4(spec)));
        } else if (cmd_table1->parsed()) {
            write_text(out_path, csv_string(run_table1(spec).table));
        } else if (cmd_bound->parsed()) {
            if (out_path.empty()) {
                if (bound_d < 0 || bound_L <= 0 || bound_sigma <= 0) {
                    throw std::runtime_error("scalar mode needs --d, --L and --sigma-d");
                }
                const double b = acceptance_bound(
                    {bound_d, base.k, bound_L, bound_sigma, ideal_soliton(base.k)});
                char buf[32];
                std::snprintf(buf, sizeof(buf), "%.3f\n", b);
                std::cout << buf;
            } else {
                write_text(out_path, csv_string(run_bound(spec).table));
            }
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
