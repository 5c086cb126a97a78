#pragma once

#include <cmath>
#include <cstdio>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cellsched/error.hpp"
#include "cellsched/random.hpp"
#include "cellsched/workload.hpp"

namespace cellsched {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// What the base station knows about one active flow at slot t.
struct FlowView {
    FlowId id = 0;
    Slot t = 0;
    double age = 0.0;                 // t - T0
    double served = 0.0;              // R(t-1), kB
    std::optional<double> buffer;     // b(t); only under a finite buffer model
    double rate = 0.0;                // r(t), kB per slot
    double mean_rate_est = 0.0;       // rbar(t)
    std::optional<double> true_size;  // A; only for anticipating strategies
    double throughput = 0.0;          // R(t-1) / age
    std::optional<Slot> last_served;  // slot of the most recent service
};

enum class StrategyKind {
    round_robin,
    max_ci,
    tas,
    das,
    pf,
    srpt,
    sectf,
    t,
    tk_inst,
    tk_mean,
    linear,
    probabilistic,
};

inline std::string_view to_string(StrategyKind kind);
inline StrategyKind parse_strategy_kind(std::string_view name);

inline double default_c_const() { return 0.6 / std::log(13.0 / 7.0); }

struct StrategyChild;

/// An atomic index or a one-level combination of atomic indices.
struct StrategySpec {
    StrategyKind kind = StrategyKind::round_robin;
    double c_const = default_c_const();  // index T
    double pareto_alpha = 5.5;           // index T, used when size_prefactor is set
    bool size_prefactor = false;         // multiply T by alpha / (alpha - 1)
    std::vector<StrategyChild> children;  // linear weights or mixture probabilities

    bool is_combinator() const noexcept {
        return kind == StrategyKind::linear || kind == StrategyKind::probabilistic;
    }

    static StrategySpec atomic(StrategyKind kind) {
        StrategySpec s;
        s.kind = kind;
        return s;
    }
    static StrategySpec linear(std::vector<StrategyChild> children);
    static StrategySpec probabilistic(std::vector<StrategyChild> children);

    void validate() const;
    std::string name() const;
};

struct StrategyChild {
    StrategySpec spec;
    double weight;
};

inline StrategySpec StrategySpec::linear(std::vector<StrategyChild> children) {
    StrategySpec s;
    s.kind = StrategyKind::linear;
    s.children = std::move(children);
    return s;
}

inline StrategySpec StrategySpec::probabilistic(std::vector<StrategyChild> children) {
    StrategySpec s;
    s.kind = StrategyKind::probabilistic;
    s.children = std::move(children);
    return s;
}

inline std::string_view to_string(StrategyKind kind) {
    switch (kind) {
        case StrategyKind::round_robin: return "round_robin";
        case StrategyKind::max_ci: return "max_ci";
        case StrategyKind::tas: return "tas";
        case StrategyKind::das: return "das";
        case StrategyKind::pf: return "pf";
        case StrategyKind::srpt: return "srpt";
        case StrategyKind::sectf: return "sectf";
        case StrategyKind::t: return "T";
        case StrategyKind::tk_inst: return "TK";
        case StrategyKind::tk_mean: return "tk_mean";
        case StrategyKind::linear: return "linear";
        case StrategyKind::probabilistic: return "probabilistic";
    }
    return "?";
}

inline StrategyKind parse_strategy_kind(std::string_view name) {
    if (name == "round_robin") return StrategyKind::round_robin;
    if (name == "max_ci") return StrategyKind::max_ci;
    if (name == "tas") return StrategyKind::tas;
    if (name == "das") return StrategyKind::das;
    if (name == "pf") return StrategyKind::pf;
    if (name == "srpt") return StrategyKind::srpt;
    if (name == "sectf") return StrategyKind::sectf;
    if (name == "T") return StrategyKind::t;
    if (name == "TK" || name == "tk_inst") return StrategyKind::tk_inst;
    if (name == "tk_mean") return StrategyKind::tk_mean;
    if (name == "linear") return StrategyKind::linear;
    if (name == "probabilistic") return StrategyKind::probabilistic;
    throw ConfigError("unknown strategy kind '" + std::string(name) + "'");
}

inline void StrategySpec::validate() const {
    if (!is_combinator()) {
        if (!children.empty()) throw ParameterError("atomic strategy cannot have children");
        if (kind == StrategyKind::t && !(c_const > 0.0)) throw ParameterError("T constant C must be > 0");
        if (kind == StrategyKind::t && size_prefactor && !(pareto_alpha > 1.0))
            throw ParameterError("pareto_alpha must exceed 1");
        return;
    }
    if (children.empty()) throw ParameterError(std::string(to_string(kind)) + " needs at least one child");
    double total = 0.0;
    bool any_positive = false;
    for (const auto& c : children) {
        if (c.spec.is_combinator()) throw ParameterError("combinators nest one level deep");
        c.spec.validate();
        if (!(c.weight >= 0.0)) throw ParameterError("combinator weights must be >= 0");
        any_positive = any_positive || c.weight > 0.0;
        total += c.weight;
    }
    if (kind == StrategyKind::linear && !any_positive)
        throw ParameterError("linear combination needs a positive weight");
    if (kind == StrategyKind::probabilistic && std::abs(total - 1.0) > 1e-9)
        throw ParameterError("mixture probabilities must sum to 1");
}

inline std::string StrategySpec::name() const {
    if (!is_combinator()) return std::string(to_string(kind));
    std::string out(to_string(kind));
    out += '(';
    for (std::size_t i = 0; i < children.size(); ++i) {
        if (i) out += ',';
        out += children[i].spec.name();
        out += ':';
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.6g", children[i].weight);
        out += buf;
    }
    out += ')';
    return out;
}

/// True when the strategy (or any child) reads true file sizes.
inline bool is_anticipating(const StrategySpec& spec) {
    if (spec.kind == StrategyKind::srpt) return true;
    for (const auto& c : spec.children)
        if (is_anticipating(c.spec)) return true;
    return false;
}

/// True when the strategy (or any child) reads buffer occupancy.
inline bool needs_buffer(const StrategySpec& spec) {
    if (spec.kind == StrategyKind::sectf) return true;
    for (const auto& c : spec.children)
        if (needs_buffer(c.spec)) return true;
    return false;
}

namespace detail {

// num / den with a zero denominator mapped to +inf.
inline double ratio(double num, double den) { return den == 0.0 ? kInfinity : num / den; }

}  // namespace detail

/// Mean of the truncated Pareto posterior of A given R = served:
/// alpha / (alpha - 1) * served.
inline double expected_file_size(double served, double alpha) {
    if (!(alpha > 1.0)) throw ParameterError("expected file size needs alpha > 1");
    if (served == 0.0) return 0.0;
    return alpha / (alpha - 1.0) * served;
}

inline double linear_combine(std::span<const double> weights, std::span<const double> values);

/// Index value of one flow. Larger is served first; a zero denominator
/// yields +inf. Never NaN.
inline double compute_index(const StrategySpec& spec, const FlowView& v) {
    using detail::ratio;
    switch (spec.kind) {
        case StrategyKind::round_robin: return ratio(1.0, v.age);
        case StrategyKind::max_ci: return v.rate;
        case StrategyKind::tas: return ratio(v.rate, v.age);
        case StrategyKind::das: return ratio(v.rate, v.served);
        case StrategyKind::pf: return ratio(v.rate * v.age, v.served);
        case StrategyKind::srpt:
            if (!v.true_size) throw CapabilityError("srpt needs true file sizes (oracle mode)");
            return ratio(v.rate, *v.true_size - v.served);
        case StrategyKind::sectf:
            if (!v.buffer) throw CapabilityError("sectf needs a finite buffer model (tcp_refill)");
            return ratio(v.rate, *v.buffer);
        case StrategyKind::t: {
            // remaining-time estimate R / (C * rbar); nothing served means no estimate
            const double remaining = v.served == 0.0 ? 0.0 : ratio(v.served, spec.c_const * v.mean_rate_est);
            const double value = ratio(v.served, v.age + remaining);
            return spec.size_prefactor ? expected_file_size(1.0, spec.pareto_alpha) * value : value;
        }
        case StrategyKind::tk_inst: return ratio(v.rate * v.served, v.age);
        case StrategyKind::tk_mean: return ratio(v.mean_rate_est * v.served, v.age);
        case StrategyKind::linear: {
            std::vector<double> w, x;
            w.reserve(spec.children.size());
            x.reserve(spec.children.size());
            for (const auto& c : spec.children) {
                w.push_back(c.weight);
                x.push_back(c.weight > 0.0 ? compute_index(c.spec, v) : 0.0);
            }
            return linear_combine(w, x);
        }
        case StrategyKind::probabilistic:
            throw ParameterError("a probabilistic mixture has no single index; use select_client");
    }
    return 0.0;
}

/// sum w_i * v_i; zero weights mask their term, a positively weighted
/// +inf makes the sum +inf.
inline double linear_combine(std::span<const double> weights, std::span<const double> values) {
    if (weights.size() != values.size()) throw ParameterError("weights and index values differ in length");
    double sum = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        if (weights[i] < 0.0) throw ParameterError("linear weights must be >= 0");
        if (weights[i] == 0.0) continue;
        if (values[i] == kInfinity) return kInfinity;
        sum += weights[i] * values[i];
    }
    return sum;
}

/// Argmax over precomputed index values. Exact ties (including several
/// +inf) go to the flow served least recently, never-served first, then to
/// the smallest id.
inline std::optional<FlowId> argmax_client(std::span<const FlowView> views, std::span<const double> values) {
    if (views.size() != values.size()) throw ParameterError("views and index values differ in length");
    std::optional<std::size_t> best;
    for (std::size_t i = 0; i < views.size(); ++i) {
        if (!best) {
            best = i;
            continue;
        }
        const double a = values[i];
        const double b = values[*best];
        if (a > b) {
            best = i;
        } else if (a == b) {
            const Slot la = views[i].last_served.value_or(std::numeric_limits<Slot>::min());
            const Slot lb = views[*best].last_served.value_or(std::numeric_limits<Slot>::min());
            if (la < lb || (la == lb && views[i].id < views[*best].id)) best = i;
        }
    }
    if (!best) return std::nullopt;
    return views[*best].id;
}

/// Index of the mixture child chosen by a uniform draw u in [0, 1).
inline std::size_t pick_child(const StrategySpec& spec, double u) {
    double acc = 0.0;
    for (std::size_t i = 0; i < spec.children.size(); ++i) {
        acc += spec.children[i].weight;
        if (u < acc) return i;
    }
    for (std::size_t i = spec.children.size(); i-- > 0;)
        if (spec.children[i].weight > 0.0) return i;
    return spec.children.size() - 1;
}

/// Chooses the flow to serve. A probabilistic spec always consumes exactly
/// one draw from rng; every other spec consumes none. `scratch` holds the
/// index values between calls.
template <Rng64 G>
std::optional<FlowId> select_client(const StrategySpec& spec, std::span<const FlowView> views, G& rng,
                                    std::vector<double>& scratch) {
    const StrategySpec* active = &spec;
    if (spec.kind == StrategyKind::probabilistic)
        active = &spec.children[pick_child(spec, unit_closed_open(rng()))].spec;
    if (views.empty()) return std::nullopt;

    scratch.clear();
    for (const auto& v : views) scratch.push_back(compute_index(*active, v));
    return argmax_client(views, scratch);
}

template <Rng64 G>
std::optional<FlowId> select_client(const StrategySpec& spec, std::span<const FlowView> views, G& rng) {
    std::vector<double> scratch;
    return select_client(spec, views, rng, scratch);
}

}  // namespace cellsched
