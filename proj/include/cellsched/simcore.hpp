#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cellsched/channel.hpp"
#include "cellsched/error.hpp"
#include "cellsched/metrics.hpp"
#include "cellsched/random.hpp"
#include "cellsched/strategies.hpp"
#include "cellsched/workload.hpp"

namespace cellsched {

enum class BufferMode {
    infinite,    // the whole file is staged at the station on arrival
    tcp_refill,  // station buffer refilled one window per RTT once drained
};

inline BufferMode parse_buffer_mode(std::string_view s) {
    if (s == "infinite") return BufferMode::infinite;
    if (s == "tcp_refill") return BufferMode::tcp_refill;
    throw ConfigError("unknown buffer mode '" + std::string(s) + "' (expected infinite | tcp_refill)");
}

inline std::string_view to_string(BufferMode m) { return m == BufferMode::infinite ? "infinite" : "tcp_refill"; }

struct BufferModel {
    BufferMode mode = BufferMode::infinite;
    Slot rtt = 30;
    double initial_window = 64.0;  // kB
    double max_window = 4096.0;    // kB

    void validate() const {
        if (rtt < 0) throw ParameterError("rtt must be >= 0");
        if (!(initial_window > 0.0 && initial_window <= max_window))
            throw ParameterError("windows must satisfy 0 < initial <= max");
    }
};

struct SimConfig {
    WorkloadConfig workload;
    ChannelConfig channel;
    BufferModel buffer;
    StrategySpec strategy;
    Slot horizon = 100000;
    bool drain_after_horizon = true;
    bool oracle = true;               // expose true sizes to anticipating strategies
    bool use_true_mean_rate = false;  // T/TK read the model mean rate instead of the running estimate

    void validate() const {
        if (horizon <= 0) throw ParameterError("horizon must be > 0");
        workload.validate();
        channel.validate();
        buffer.validate();
        strategy.validate();
        if (is_anticipating(strategy) && !oracle)
            throw CapabilityError(strategy.name() + ": srpt requires oracle mode");
        if (needs_buffer(strategy) && buffer.mode != BufferMode::tcp_refill)
            throw CapabilityError(strategy.name() + ": sectf requires the tcp_refill buffer model");
    }
};

struct FlowState {
    FlowSpec spec;
    double served = 0.0;      // R(t), kB delivered to the client
    double buffer = 0.0;      // b(t), kB staged at the station
    double unbuffered = 0.0;  // kB still at the origin server
    std::optional<Slot> refill_due;
    double congestion_window = 0.0;
    std::optional<Slot> departure_slot;
    double rate_history_sum = 0.0;
    std::int64_t rate_history_count = 0;
    std::optional<Slot> last_served;

    bool finished() const noexcept { return departure_slot.has_value(); }
};

struct SimState {
    std::vector<FlowState> active;  // ordered by id
    std::vector<FlowRecord> records;
    std::size_t next_pending = 0;   // cursor into the arrival list
    double total_transferred = 0.0;
};

/// What happened in one slot.
struct SlotEvent {
    Slot t = 0;
    std::optional<FlowId> chosen;
    double transfer = 0.0;
    std::size_t active_count = 0;
};

/// Moves every pending flow with arrival_slot == t into the active set.
inline void admit_arrivals(SimState& state, Slot t, std::span<const FlowSpec> pending, const BufferModel& buffer) {
    while (state.next_pending < pending.size() && pending[state.next_pending].arrival_slot <= t) {
        const FlowSpec& spec = pending[state.next_pending];
        if (spec.arrival_slot < t) throw SchedulingError("pending flows are not sorted by arrival slot");
        const auto pos = std::lower_bound(state.active.begin(), state.active.end(), spec.id,
                                          [](const FlowState& f, FlowId id) { return f.spec.id < id; });
        if (pos != state.active.end() && pos->spec.id == spec.id)
            throw SchedulingError("duplicate flow id " + std::to_string(spec.id));
        FlowState f;
        f.spec = spec;
        if (buffer.mode == BufferMode::infinite) {
            f.buffer = spec.file_size;
        } else {
            f.buffer = std::min(buffer.initial_window, spec.file_size);
            f.unbuffered = spec.file_size - f.buffer;
            f.congestion_window = buffer.initial_window;
        }
        state.active.insert(pos, f);
        ++state.next_pending;
    }
}

/// Window-per-RTT refill: a drained flow requests its next window, which
/// lands rtt slots later; the window then doubles up to max_window.
inline void refill_buffers(SimState& state, Slot t, const BufferModel& buffer) {
    if (buffer.mode != BufferMode::tcp_refill) return;
    for (auto& f : state.active) {
        if (f.buffer == 0.0 && f.unbuffered > 0.0 && !f.refill_due) f.refill_due = t + buffer.rtt;
        if (f.refill_due && *f.refill_due == t) {
            const double add = std::min(f.congestion_window, f.unbuffered);
            f.buffer += add;
            f.unbuffered -= add;
            f.congestion_window = std::min(2.0 * f.congestion_window, buffer.max_window);
            f.refill_due.reset();
        }
    }
}

/// Serves `chosen` at rate rates[i] (aligned with state.active), records
/// rate history for every active flow, and retires a completed flow with
/// departure slot t + 1.
inline SlotEvent serve_slot(SimState& state, Slot t, std::span<const double> rates, std::optional<FlowId> chosen) {
    if (rates.size() != state.active.size()) throw SchedulingError("one rate per active flow is required");
    SlotEvent ev{t, chosen, 0.0, state.active.size()};

    for (std::size_t i = 0; i < state.active.size(); ++i) {
        state.active[i].rate_history_sum += rates[i];
        ++state.active[i].rate_history_count;
    }
    if (!chosen) return ev;

    const auto pos = std::lower_bound(state.active.begin(), state.active.end(), *chosen,
                                      [](const FlowState& f, FlowId id) { return f.spec.id < id; });
    if (pos == state.active.end() || pos->spec.id != *chosen)
        throw SchedulingError("scheduled flow " + std::to_string(*chosen) + " is not active");
    if (!(pos->buffer > 0.0))
        throw SchedulingError("scheduled flow " + std::to_string(*chosen) + " has an empty buffer");

    FlowState& f = *pos;
    const double rate = rates[static_cast<std::size_t>(pos - state.active.begin())];
    f.last_served = t;
    if (rate >= f.buffer) {
        ev.transfer = f.buffer;
        f.buffer = 0.0;
        if (f.unbuffered == 0.0) {
            f.served = f.spec.file_size;
            f.departure_slot = t + 1;
        } else {
            f.served = std::min(f.served + ev.transfer, f.spec.file_size);
        }
    } else {
        ev.transfer = rate;
        f.buffer -= rate;
        f.served = std::min(f.served + rate, f.spec.file_size);
    }
    state.total_transferred += ev.transfer;

    if (f.departure_slot) {
        state.records.push_back({f.spec.id, f.spec.file_size, f.spec.arrival_slot, *f.departure_slot});
        state.active.erase(pos);
    }
    return ev;
}

/// Snapshot of active flow `f` for the strategy at slot t.
inline FlowView make_view(const FlowState& f, Slot t, double rate, const SimConfig& config, bool expose_size,
                          bool expose_buffer) {
    FlowView v;
    v.id = f.spec.id;
    v.t = t;
    v.age = static_cast<double>(t - f.spec.arrival_slot);
    v.served = f.served;
    v.rate = rate;
    if (config.use_true_mean_rate) {
        const auto iv = rate_interval(f.spec, t, config.channel);
        v.mean_rate_est = 0.5 * (iv.lo + iv.hi);
    } else {
        v.mean_rate_est = (f.rate_history_sum + rate) / static_cast<double>(f.rate_history_count + 1);
    }
    v.throughput = v.age > 0.0 ? f.served / v.age : 0.0;
    if (expose_size) v.true_size = f.spec.file_size;
    if (expose_buffer) v.buffer = f.buffer;
    v.last_served = f.last_served;
    return v;
}

struct SimResult {
    std::vector<FlowRecord> records;  // in completion order
    std::uint64_t unfinished = 0;     // admitted but not completed at stop
    Slot slots = 0;                   // slots simulated, drain included
};

struct NullObserver {
    void operator()(const SlotEvent&, const SimState&) const noexcept {}
};

/// Runs the slot loop over a sorted arrival list. `rate(flow, t)` supplies
/// r_k(t); `observer(event, state)` sees every slot after service.
template <class RateFn, class Observer = NullObserver>
SimResult run_simulation(const SimConfig& config, std::span<const FlowSpec> flows, RateFn&& rate,
                         Observer&& observer = {}) {
    config.validate();
    for (std::size_t i = 1; i < flows.size(); ++i)
        if (flows[i].arrival_slot < flows[i - 1].arrival_slot)
            throw SchedulingError("arrival list is not sorted by arrival slot");

    const bool expose_size = is_anticipating(config.strategy) && config.oracle;
    const bool expose_buffer = config.buffer.mode == BufferMode::tcp_refill;
    const std::uint64_t strategy_seed =
        derive_seed(config.workload.seed, static_cast<std::uint64_t>(StreamTag::strategy));

    SimState state;
    std::vector<double> rates;
    std::vector<FlowView> views;
    std::vector<double> scratch;

    Slot t = 0;
    for (;; ++t) {
        const bool admitting = t < config.horizon;
        if (!admitting && (!config.drain_after_horizon || state.active.empty())) break;
        if (admitting) admit_arrivals(state, t, flows, config.buffer);
        refill_buffers(state, t, config.buffer);

        rates.clear();
        views.clear();
        for (const auto& f : state.active) {
            const double r = rate(f.spec, t);
            rates.push_back(r);
            if (f.buffer > 0.0) views.push_back(make_view(f, t, r, config, expose_size, expose_buffer));
        }

        auto rng = keyed_stream(strategy_seed, t);
        std::optional<FlowId> chosen;
        try {
            chosen = select_client(config.strategy, std::span<const FlowView>(views), rng, scratch);
        } catch (const CapabilityError& e) {
            throw CapabilityError(config.strategy.name() + ": " + e.what());
        }
        const SlotEvent ev = serve_slot(state, t, rates, chosen);
        observer(ev, std::as_const(state));
    }

    SimResult result;
    result.records = std::move(state.records);
    result.unfinished = state.active.size();
    result.slots = t;
    return result;
}

/// Stochastic run: keyed channel draws from config.workload.seed.
inline SimResult run_simulation(const SimConfig& config, std::span<const FlowSpec> flows) {
    return run_simulation(config, flows, KeyedChannel(config.channel, config.workload.seed));
}

/// Generates the workload from config (horizon taken from config.horizon)
/// and runs it.
inline SimResult run_simulation(const SimConfig& config) {
    WorkloadConfig wc = config.workload;
    wc.horizon = config.horizon;
    const auto flows = generate_workload(wc);
    return run_simulation(config, flows);
}

}  // namespace cellsched
