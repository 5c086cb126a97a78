#pragma once

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <numbers>
#include <string>
#include <thread>
#include <vector>

#include "cellsched/error.hpp"
#include "cellsched/metrics.hpp"
#include "cellsched/simcore.hpp"
#include "cellsched/strategies.hpp"
#include "cellsched/workload.hpp"

namespace cellsched {

using SimplexPoint = std::array<double, 3>;  // (p_T, p_TAS, p_DAS)

struct ExperimentConfig {
    SimConfig sim;
    std::vector<StrategySpec> strategies;
    std::size_t replications = 10;
    std::uint64_t base_seed = 1;
    std::vector<std::uint64_t> seeds;  // explicit list; overrides base_seed + i when non-empty
    std::vector<double> linear_grid;   // alpha values for I = TAS + alpha * DAS
    std::vector<SimplexPoint> simplex_grid;
    StrategySpec index_defaults;  // T parameters (C, prefactor) shared by every T occurrence
    double log_base = std::numbers::e;
    std::string output_dir = "results";
    unsigned threads = 0;  // 0: hardware concurrency

    std::vector<std::uint64_t> seed_list() const {
        if (!seeds.empty()) return seeds;
        std::vector<std::uint64_t> out(replications);
        for (std::size_t i = 0; i < replications; ++i) out[i] = base_seed + i;
        return out;
    }

    void validate() const {
        if (seed_list().size() < 2) throw ConfigError("at least two replications are required");
        sim.validate();
    }
};

struct ExperimentRow {
    std::string strategy;
    AggregateReport summary;
    std::vector<MetricsReport> replications;
};

struct ExperimentReport {
    std::vector<ExperimentRow> rows;  // sorted by logALPT mean, descending
    std::vector<std::uint64_t> seeds;
};

struct CurvePoint {
    double alpha;
    Summary log_alpt;
};

struct SurfacePoint {
    SimplexPoint p;
    Summary log_alpt;
};

/// Default alpha grid 0, 0.1, ..., 2.
inline std::vector<double> default_linear_grid() {
    std::vector<double> g;
    for (int i = 0; i <= 20; ++i) g.push_back(i / 10.0);
    return g;
}

/// All points of the 2-simplex with coordinates on multiples of 1/n.
inline std::vector<SimplexPoint> simplex_grid(int n) {
    if (n < 1) throw ParameterError("simplex resolution must be >= 1");
    std::vector<SimplexPoint> g;
    for (int i = n; i >= 0; --i)
        for (int j = n - i; j >= 0; --j)
            g.push_back({static_cast<double>(i) / n, static_cast<double>(j) / n,
                         static_cast<double>(n - i - j) / n});
    return g;
}

inline StrategySpec linear_tas_das(double alpha) {
    return StrategySpec::linear(
        {{StrategySpec::atomic(StrategyKind::tas), 1.0}, {StrategySpec::atomic(StrategyKind::das), alpha}});
}

inline StrategySpec mixture_t_tas_das(const SimplexPoint& p, const StrategySpec& t_template) {
    StrategySpec t = t_template;
    t.kind = StrategyKind::t;
    t.children.clear();
    return StrategySpec::probabilistic({{t, p[0]},
                                        {StrategySpec::atomic(StrategyKind::tas), p[1]},
                                        {StrategySpec::atomic(StrategyKind::das), p[2]}});
}

namespace detail {

/// Runs fn(i) for i in [0, n) on up to `threads` workers. The first
/// exception in index order is rethrown after all workers finish.
template <class Fn>
void parallel_for(std::size_t n, unsigned threads, Fn&& fn) {
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));
    std::vector<std::exception_ptr> errors(n);
    auto work = [&](std::atomic<std::size_t>& next) {
        for (std::size_t i = next++; i < n; i = next++) {
            try {
                fn(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    std::atomic<std::size_t> next{0};
    if (threads <= 1) {
        work(next);
    } else {
        std::vector<std::jthread> pool;
        for (unsigned k = 0; k < threads; ++k) pool.emplace_back([&] { work(next); });
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

}  // namespace detail

/// Paired evaluation: replication r of every strategy runs on the workload
/// and channel draws of seeds[r]. Result [strategy][replication].
inline std::vector<std::vector<MetricsReport>> evaluate_strategies(const ExperimentConfig& config,
                                                                   const std::vector<StrategySpec>& strategies) {
    const auto seeds = config.seed_list();
    std::vector<std::vector<FlowSpec>> workloads(seeds.size());
    detail::parallel_for(seeds.size(), config.threads, [&](std::size_t r) {
        WorkloadConfig wc = config.sim.workload;
        wc.horizon = config.sim.horizon;
        wc.seed = seeds[r];
        workloads[r] = generate_workload(wc);
    });

    std::vector<std::vector<MetricsReport>> out(strategies.size(), std::vector<MetricsReport>(seeds.size()));
    detail::parallel_for(strategies.size() * seeds.size(), config.threads, [&](std::size_t task) {
        const std::size_t s = task / seeds.size();
        const std::size_t r = task % seeds.size();
        SimConfig c = config.sim;
        c.strategy = strategies[s];
        c.workload.seed = seeds[r];
        try {
            const auto res = run_simulation(c, workloads[r]);
            out[s][r] = evaluate(res.records, res.unfinished, config.log_base);
        } catch (const CapabilityError&) {
            throw;  // already carries the strategy name
        } catch (const Error& e) {
            throw Error(strategies[s].name() + ": " + e.what());
        }
    });
    return out;
}

inline ExperimentReport run_experiment(const ExperimentConfig& config) {
    config.validate();
    ExperimentReport report;
    report.seeds = config.seed_list();
    const auto results = evaluate_strategies(config, config.strategies);
    for (std::size_t s = 0; s < config.strategies.size(); ++s)
        report.rows.push_back({config.strategies[s].name(), aggregate(results[s]), results[s]});
    std::stable_sort(report.rows.begin(), report.rows.end(), [](const ExperimentRow& a, const ExperimentRow& b) {
        return a.summary.log_alpt.mean > b.summary.log_alpt.mean;
    });
    return report;
}

inline std::vector<CurvePoint> sweep_linear(const ExperimentConfig& config, const std::vector<double>& grid) {
    config.validate();
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!(grid[i] >= 0.0)) throw ConfigError("linear sweep weights must be >= 0");
        if (i && grid[i] < grid[i - 1]) throw ConfigError("linear sweep grid must be sorted");
    }
    std::vector<StrategySpec> specs;
    for (double a : grid) specs.push_back(linear_tas_das(a));
    const auto results = evaluate_strategies(config, specs);
    std::vector<CurvePoint> curve;
    for (std::size_t i = 0; i < grid.size(); ++i) curve.push_back({grid[i], aggregate(results[i]).log_alpt});
    return curve;
}

/// The T vertex takes its parameters from config.index_defaults.
inline std::vector<SurfacePoint> sweep_probabilistic(const ExperimentConfig& config,
                                                     const std::vector<SimplexPoint>& grid) {
    config.validate();
    std::vector<StrategySpec> specs;
    for (const auto& p : grid) {
        for (double x : p)
            if (x < 0.0) throw ConfigError("simplex coordinates must be >= 0");
        if (std::abs(p[0] + p[1] + p[2] - 1.0) > 1e-9) throw ConfigError("simplex point does not sum to 1");
        specs.push_back(mixture_t_tas_das(p, config.index_defaults));
    }
    const auto results = evaluate_strategies(config, specs);
    std::vector<SurfacePoint> surface;
    for (std::size_t i = 0; i < grid.size(); ++i) surface.push_back({grid[i], aggregate(results[i]).log_alpt});
    return surface;
}

// CSV rendering. Fixed formatting so reruns are byte-identical.

inline std::string format_number(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

inline std::string csv_quote(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + '"';
}

inline std::string table_csv(const ExperimentReport& report) {
    std::string out = "strategy,logalpt_mean,logalpt_std,alpt_mean,alpt_std,completed_mean,unfinished_mean\n";
    for (const auto& row : report.rows) {
        const auto& s = row.summary;
        out += csv_quote(row.strategy) + ',' + format_number(s.log_alpt.mean) + ',' + format_number(s.log_alpt.std) +
               ',' + format_number(s.alpt.mean) + ',' + format_number(s.alpt.std) + ',' +
               format_number(s.completed.mean) + ',' + format_number(s.unfinished.mean) + '\n';
    }
    return out;
}

inline std::string curve_csv(const std::vector<CurvePoint>& curve) {
    std::string out = "alpha,logalpt_mean,logalpt_std\n";
    for (const auto& p : curve)
        out += format_number(p.alpha) + ',' + format_number(p.log_alpt.mean) + ',' + format_number(p.log_alpt.std) + '\n';
    return out;
}

inline std::string surface_csv(const std::vector<SurfacePoint>& surface) {
    std::string out = "p_t,p_tas,p_das,logalpt_mean,logalpt_std\n";
    for (const auto& s : surface)
        out += format_number(s.p[0]) + ',' + format_number(s.p[1]) + ',' + format_number(s.p[2]) + ',' +
               format_number(s.log_alpt.mean) + ',' + format_number(s.log_alpt.std) + '\n';
    return out;
}

inline std::string workload_csv(const std::vector<FlowSpec>& flows) {
    std::string out = "id,arrival_slot,file_size_kb,mean_rate_kbps\n";
    for (const auto& f : flows)
        out += std::to_string(f.id) + ',' + std::to_string(f.arrival_slot) + ',' + format_number(f.file_size) + ',' +
               format_number(f.mean_rate) + '\n';
    return out;
}

inline std::string trace_csv_header() { return "t,chosen_id,transfer_kb,active_count\n"; }

inline std::string trace_csv_row(const SlotEvent& ev) {
    return std::to_string(ev.t) + ',' + (ev.chosen ? std::to_string(*ev.chosen) : std::string()) + ',' +
           format_number(ev.transfer) + ',' + std::to_string(ev.active_count) + '\n';
}

}  // namespace cellsched
