// Runs each index strategy once on the reference workload and prints
// logALPT / ALPT.

#include <cstdio>

#include "cellsched/cellsched.hpp"

int main() {
    using namespace cellsched;
    SimConfig sim;
    sim.horizon = 20000;
    sim.workload.seed = 7;

    WorkloadConfig wc = sim.workload;
    wc.horizon = sim.horizon;
    const auto flows = generate_workload(wc);
    std::printf("%zu flows, mean file size %.1f kB\n", flows.size(), mixture_mean(wc.size_mixture));

    for (const char* name : {"T", "TK", "round_robin", "tas", "max_ci", "das", "pf"}) {
        sim.strategy = parse_strategy(name);
        const auto res = run_simulation(sim, flows);
        const auto m = evaluate(res.records, res.unfinished);
        std::printf("%-12s logALPT %.4f  ALPT %.1f kB/slot\n", name, m.log_alpt, m.alpt);
    }
}
