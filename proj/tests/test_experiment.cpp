#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <string>

#include "cellsched/config.hpp"
#include "cellsched/experiment.hpp"
#include "cellsched/report_io.hpp"

using namespace cellsched;
using Catch::Approx;

namespace {

ExperimentConfig small_config(std::string strategies = "T, tas, das") {
    return load_experiment_config_string("[experiment]\nreplications = 3\nseed = 5\nstrategies = " + strategies +
                                         "\n[sim]\nhorizon = 3000\n");
}

}  // namespace

TEST_CASE("number and grid parsing", "[config]") {
    CHECK(parse_number("0.25") == 0.25);
    CHECK(parse_number(" 1/4 ") == 0.25);
    CHECK_THROWS_AS(parse_number("abc"), ConfigError);
    CHECK_THROWS_AS(parse_number("1/0"), ConfigError);
    CHECK(parse_number_list("1, 2,3") == std::vector<double>{1, 2, 3});
    const auto g = parse_grid("0:1:0.25");
    REQUIRE(g.size() == 5);
    CHECK(g.back() == Approx(1.0));
    CHECK(parse_grid("0, 0.5") == std::vector<double>{0, 0.5});
    CHECK(parse_bool("yes"));
    CHECK_FALSE(parse_bool("false"));
    CHECK_THROWS_AS(parse_bool("maybe"), ConfigError);
}

TEST_CASE("strategy expressions", "[config]") {
    const auto l = parse_strategy("linear(tas:1, das:0.5)");
    CHECK(l.kind == StrategyKind::linear);
    REQUIRE(l.children.size() == 2);
    CHECK(l.children[1].weight == 0.5);

    const auto p = parse_strategy("probabilistic(T:1/2, tas:1/4, das:1/4)");
    CHECK(p.kind == StrategyKind::probabilistic);
    CHECK(p.children[0].spec.kind == StrategyKind::t);

    StrategySpec base;
    base.c_const = 2.0;
    CHECK(parse_strategy("T", base).c_const == 2.0);
    CHECK(parse_strategy_list("T, TK, linear(tas:1,das:0)").size() == 3);

    CHECK_THROWS_AS(parse_strategy("bogus"), ConfigError);
    CHECK_THROWS_AS(parse_strategy("linear(tas)"), ConfigError);
    CHECK_THROWS_AS(parse_strategy("linear(linear(tas:1):1)"), Error);
    CHECK_THROWS_AS(parse_strategy("probabilistic(tas:0.5)"), Error);
}

TEST_CASE("experiment config loading", "[config]") {
    const auto cfg = load_experiment_config_string(R"(
[experiment]
replications = 4
seed = 9
strategies = T, tas
[workload]
lambda = 0.05
[channel]
envelope_mode = time_varying
[buffer]
mode = tcp_refill
rtt = 12
[sim]
horizon = 777
[strategy]
c_const = 0.6/0.6190392084062235
[metrics]
log_base = 10
[sweep]
linear_alphas = 0:1:0.5
simplex_step = 0.5
)");
    CHECK(cfg.replications == 4);
    CHECK(cfg.seed_list() == std::vector<std::uint64_t>{9, 10, 11, 12});
    CHECK(cfg.sim.workload.lambda == 0.05);
    CHECK(cfg.sim.channel.envelope_mode == EnvelopeMode::time_varying);
    CHECK(cfg.sim.buffer.mode == BufferMode::tcp_refill);
    CHECK(cfg.sim.buffer.rtt == 12);
    CHECK(cfg.sim.horizon == 777);
    CHECK(cfg.strategies.size() == 2);
    CHECK(cfg.strategies[0].c_const == Approx(default_c_const()).epsilon(1e-12));
    CHECK(cfg.log_base == 10.0);
    CHECK(cfg.linear_grid.size() == 3);
    CHECK(cfg.simplex_grid.size() == 6);

    const auto d = default_experiment_config();
    CHECK(d.strategies.size() == 7);
    CHECK(d.linear_grid.size() == 21);
    CHECK(d.simplex_grid.size() == 66);
}

TEST_CASE("config errors", "[config]") {
    CHECK_THROWS_AS(load_experiment_config_string("[nonsense]\nx = 1\n"), ConfigError);
    CHECK_THROWS_AS(load_experiment_config_string("[workload]\nlamda = 1\n"), ConfigError);
    CHECK_THROWS_AS(load_experiment_config_string("[workload]\nlambda = -1\n"), ConfigError);
    CHECK_THROWS_AS(load_experiment_config_string("[buffer]\nmode = lossy\n"), ConfigError);
    CHECK_THROWS_AS(load_experiment_config_string("[sweep]\nsimplex_step = 0.3\n"), ConfigError);
    CHECK_THROWS_AS(load_experiment_config_string("[workload]\nscales = 1, 2\n"), ConfigError);
    auto one = load_experiment_config_string("[experiment]\nreplications = 1\n");
    CHECK_THROWS_AS(run_experiment(one), ConfigError);
}

TEST_CASE("duplicated seeds give zero spread", "[experiment]") {
    auto cfg = small_config("tas");
    cfg.seeds = {7, 7};
    const auto rep = run_experiment(cfg);
    REQUIRE(rep.rows.size() == 1);
    CHECK(rep.rows[0].summary.log_alpt.std == 0.0);
    CHECK(rep.rows[0].summary.alpt.std == 0.0);
}

TEST_CASE("empty strategy list is a vacuous run", "[experiment]") {
    auto cfg = small_config("tas");
    cfg.strategies.clear();
    const auto rep = run_experiment(cfg);
    CHECK(rep.rows.empty());
    CHECK(table_csv(rep) == "strategy,logalpt_mean,logalpt_std,alpt_mean,alpt_std,completed_mean,unfinished_mean\n");
}

TEST_CASE("rows are sorted by logALPT", "[experiment]") {
    const auto rep = run_experiment(small_config("round_robin, max_ci, tas, das, pf"));
    REQUIRE(rep.rows.size() == 5);
    for (std::size_t i = 1; i < rep.rows.size(); ++i)
        CHECK(rep.rows[i - 1].summary.log_alpt.mean >= rep.rows[i].summary.log_alpt.mean);
}

TEST_CASE("capability error names the strategy", "[experiment]") {
    auto cfg = small_config("tas, sectf");
    CHECK_THROWS_WITH(run_experiment(cfg), Catch::Matchers::ContainsSubstring("sectf"));
    CHECK_THROWS_AS(run_experiment(cfg), CapabilityError);
}

TEST_CASE("sweep endpoints replay the pure strategies", "[experiment]") {
    const auto cfg = small_config("tas, T");
    const auto rep = run_experiment(cfg);
    auto row = [&](const std::string& name) {
        for (const auto& r : rep.rows)
            if (r.strategy == name) return r.summary.log_alpt;
        FAIL("missing row " << name);
        return Summary{};
    };

    const auto curve = sweep_linear(cfg, {0.0});
    REQUIRE(curve.size() == 1);
    CHECK(curve[0].log_alpt.mean == row("tas").mean);
    CHECK(curve[0].log_alpt.std == row("tas").std);

    const auto surf = sweep_probabilistic(cfg, {{1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}});
    REQUIRE(surf.size() == 2);
    CHECK(surf[0].log_alpt.mean == row("T").mean);
    CHECK(surf[1].log_alpt.mean == row("tas").mean);

    CHECK_THROWS_AS(sweep_linear(cfg, {0.5, 0.1}), ConfigError);
    CHECK_THROWS_AS(sweep_probabilistic(cfg, {{0.5, 0.2, 0.2}}), ConfigError);
}

TEST_CASE("thread count does not change results", "[experiment]") {
    auto cfg = small_config("T, das");
    cfg.threads = 1;
    const auto a = table_csv(run_experiment(cfg));
    cfg.threads = 4;
    CHECK(table_csv(run_experiment(cfg)) == a);
    CHECK(table_csv(run_experiment(cfg)) == a);
}

TEST_CASE("simplex grid", "[experiment]") {
    const auto g = simplex_grid(10);
    CHECK(g.size() == 66);
    CHECK(g.front() == SimplexPoint{1.0, 0.0, 0.0});
    for (const auto& p : g) CHECK(p[0] + p[1] + p[2] == Approx(1.0).epsilon(1e-12));
    CHECK(simplex_grid(1).size() == 3);
    CHECK_THROWS_AS(simplex_grid(0), ParameterError);
}

TEST_CASE("csv rendering", "[experiment]") {
    CHECK(curve_csv({{0.5, {1.25, 0.125}}}) == "alpha,logalpt_mean,logalpt_std\n0.500000,1.250000,0.125000\n");
    SlotEvent idle{3, std::nullopt, 0.0, 0};
    CHECK(trace_csv_row(idle) == "3,,0.000000,0\n");
    SlotEvent busy{4, FlowId{2}, 12.5, 3};
    CHECK(trace_csv_row(busy) == "4,2,12.500000,3\n");
    CHECK(workload_csv({{0, 1, 2.5, 3.0}}) == "id,arrival_slot,file_size_kb,mean_rate_kbps\n0,1,2.500000,3.000000\n");
}

TEST_CASE("git blob hash", "[io]") {
    CHECK(git_blob_hash("") == "e69de29bb2d1d6434b8b29ae775ad8c2e48c5391");
    CHECK(git_blob_hash("hello\n") == "ce013625030ba8dba906f756967f9e9ca394464a");
}

TEST_CASE("json round trip and manifest", "[io]") {
    const MetricsReport r{12.5, 2.25, 40, 2};
    const nlohmann::json j = r;
    const auto back = j.get<MetricsReport>();
    CHECK(back.alpt == r.alpt);
    CHECK(back.log_alpt == r.log_alpt);
    CHECK(back.completed == r.completed);
    CHECK(back.unfinished == r.unfinished);

    const auto cfg = small_config();
    const auto m = manifest_json(cfg, "run", {{"table.csv", "x\n"}});
    CHECK(m["command"] == "run");
    CHECK(m["seeds"].size() == 3);
    CHECK(m["files"]["table.csv"] == git_blob_hash("x\n"));
    CHECK(m["config"]["workload"]["lambda"] == 0.09);
    CHECK(m["config"]["experiment"]["strategies"].size() == 3);
}
