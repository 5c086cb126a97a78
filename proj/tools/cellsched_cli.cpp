// Experiment runner for the downlink scheduler simulator.
//
//   cellsched run           strategy table (logALPT / ALPT mean and std)
//   cellsched sweep-linear  logALPT of TAS + alpha * DAS over an alpha grid
//   cellsched sweep-prob    logALPT of the T/TAS/DAS mixture over a simplex grid
//   cellsched dump-workload generated arrivals as CSV
//   cellsched trace         per-slot trace of one run as CSV

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "cellsched/cellsched.hpp"
#include "cellsched/report_io.hpp"

namespace fs = std::filesystem;
using namespace cellsched;

namespace {

struct CommonOptions {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> replications;
    std::optional<std::string> out;
    std::optional<unsigned> threads;
};

void add_common(CLI::App* cmd, CommonOptions& o) {
    cmd->add_option("--config", o.config_path, "experiment config (INI)")->check(CLI::ExistingFile);
    cmd->add_option("--seed", o.seed, "base seed (replication i uses seed + i)");
    cmd->add_option("--replications", o.replications, "number of replications (>= 2)");
    cmd->add_option("--out", o.out, "output directory");
    cmd->add_option("--threads", o.threads, "worker threads (0 = all cores)");
}

ExperimentConfig load(const CommonOptions& o) {
    ExperimentConfig cfg;
    if (o.config_path.empty()) {
        cfg = default_experiment_config();
    } else {
        std::ifstream in(o.config_path);
        if (!in) throw ConfigError("cannot open config " + o.config_path);
        cfg = load_experiment_config(in);
    }
    if (o.seed) {
        cfg.base_seed = *o.seed;
        cfg.seeds.clear();
    }
    if (o.replications) {
        cfg.replications = *o.replications;
        cfg.seeds.clear();
    }
    if (o.out) cfg.output_dir = *o.out;
    if (o.threads) cfg.threads = *o.threads;
    return cfg;
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    out << content;
    if (!out) throw Error("write failed for " + path.string());
}

/// Writes every file plus manifest.json into the output directory.
void emit(const ExperimentConfig& cfg, std::string_view command,
          const std::vector<std::pair<std::string, std::string>>& files) {
    const fs::path dir(cfg.output_dir);
    fs::create_directories(dir);
    for (const auto& [name, content] : files) write_file(dir / name, content);
    write_file(dir / "manifest.json", manifest_json(cfg, command, files).dump(2) + "\n");
}

SimConfig sim_for(const ExperimentConfig& cfg, const StrategySpec& strategy, std::uint64_t seed) {
    SimConfig sim = cfg.sim;
    sim.strategy = strategy;
    sim.workload.seed = seed;
    sim.workload.horizon = sim.horizon;
    return sim;
}

std::string trace_run(const SimConfig& sim) {
    const auto flows = generate_workload(sim.workload);
    std::string csv = trace_csv_header();
    run_simulation(sim, flows, KeyedChannel(sim.channel, sim.workload.seed),
                   [&](const SlotEvent& ev, const SimState&) { csv += trace_csv_row(ev); });
    return csv;
}

int cmd_run(const CommonOptions& o, bool with_trace) {
    const auto cfg = load(o);
    const auto report = run_experiment(cfg);
    std::vector<std::pair<std::string, std::string>> files{{"table.csv", table_csv(report)},
                                                           {"report.json", report_json(report).dump(2) + "\n"}};
    if (with_trace) {
        for (std::size_t i = 0; i < cfg.strategies.size(); ++i)
            files.emplace_back("trace_" + std::to_string(i) + ".csv",
                               trace_run(sim_for(cfg, cfg.strategies[i], cfg.seed_list().front())));
    }
    emit(cfg, "run", files);
    std::cout << files.front().second;
    return 0;
}

int cmd_sweep_linear(const CommonOptions& o) {
    const auto cfg = load(o);
    const auto csv = curve_csv(sweep_linear(cfg, cfg.linear_grid));
    emit(cfg, "sweep-linear", {{"linear_sweep.csv", csv}});
    std::cout << csv;
    return 0;
}

int cmd_sweep_prob(const CommonOptions& o) {
    const auto cfg = load(o);
    const auto csv = surface_csv(sweep_probabilistic(cfg, cfg.simplex_grid));
    emit(cfg, "sweep-prob", {{"prob_sweep.csv", csv}});
    std::cout << csv;
    return 0;
}

void output_single(const CommonOptions& o, const std::string& name, const std::string& csv) {
    if (o.out) {
        fs::create_directories(*o.out);
        write_file(fs::path(*o.out) / name, csv);
    } else {
        std::cout << csv;
    }
}

int cmd_dump_workload(const CommonOptions& o) {
    const auto cfg = load(o);
    WorkloadConfig wc = cfg.sim.workload;
    wc.horizon = cfg.sim.horizon;
    wc.seed = cfg.seed_list().front();
    output_single(o, "workload.csv", workload_csv(generate_workload(wc)));
    return 0;
}

int cmd_trace(const CommonOptions& o, const std::string& strategy) {
    const auto cfg = load(o);
    StrategySpec spec = strategy.empty() ? (cfg.strategies.empty() ? cfg.index_defaults : cfg.strategies.front())
                                         : parse_strategy(strategy, cfg.index_defaults);
    output_single(o, "trace.csv", trace_run(sim_for(cfg, spec, cfg.seed_list().front())));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Slot-level downlink scheduler simulator and index-strategy experiments"};
    app.require_subcommand(1);

    CommonOptions run_o, lin_o, prob_o, dump_o, trace_o;
    bool with_trace = false;
    std::string trace_strategy;

    auto* run = app.add_subcommand("run", "compare strategies by logALPT / ALPT");
    add_common(run, run_o);
    run->add_flag("--trace", with_trace, "also write a per-slot trace of replication 0 per strategy");

    auto* lin = app.add_subcommand("sweep-linear", "sweep I = TAS + alpha * DAS");
    add_common(lin, lin_o);
    auto* prob = app.add_subcommand("sweep-prob", "sweep the T/TAS/DAS probabilistic mixture");
    add_common(prob, prob_o);
    auto* dump = app.add_subcommand("dump-workload", "print the generated arrival stream");
    add_common(dump, dump_o);
    auto* trace = app.add_subcommand("trace", "per-slot trace t,chosen_id,transfer_kb,active_count");
    add_common(trace, trace_o);
    trace->add_option("--strategy", trace_strategy, "strategy expression (default: first in config)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) return cmd_run(run_o, with_trace);
        if (*lin) return cmd_sweep_linear(lin_o);
        if (*prob) return cmd_sweep_prob(prob_o);
        if (*dump) return cmd_dump_workload(dump_o);
        if (*trace) return cmd_trace(trace_o, trace_strategy);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 1;
}
