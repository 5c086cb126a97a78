#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "cellsched/error.hpp"
#include "cellsched/random.hpp"

namespace cellsched {

using Slot = std::int64_t;
using FlowId = std::uint64_t;

struct ParetoComponent {
    double weight;  // probability of this file type
    double scale;   // kB, Pareto lower bound m_i
};

/// Mixture of Pareto laws sharing one shape parameter.
struct ParetoMixture {
    std::vector<ParetoComponent> components;
    double alpha = 5.5;

    /// Throws ParameterError unless weights form a distribution, scales are
    /// positive and alpha > 1.
    void validate() const {
        if (components.empty()) throw ParameterError("pareto mixture has no components");
        if (!(alpha > 1.0)) throw ParameterError("pareto shape must exceed 1");
        double total = 0.0;
        for (const auto& c : components) {
            if (!(c.weight >= 0.0)) throw ParameterError("pareto mixture weight must be >= 0");
            if (!(c.scale > 0.0)) throw ParameterError("pareto mixture scale must be > 0");
            total += c.weight;
        }
        if (std::abs(total - 1.0) > 1e-9) throw ParameterError("pareto mixture weights must sum to 1");
    }

    double min_scale() const {
        double m = components.front().scale;
        for (const auto& c : components) m = std::min(m, c.scale);
        return m;
    }

    /// File-type mix used in the reference experiments (text page, app,
    /// audio, video).
    static ParetoMixture reference() {
        return {{{0.4, 500.0}, {0.3, 5000.0}, {0.2, 25000.0}, {0.1, 62500.0}}, 5.5};
    }
};

struct WorkloadConfig {
    double lambda = 0.09;  // arrivals per slot
    ParetoMixture size_mixture = ParetoMixture::reference();
    double rate_lo_mult = 1.0 / 3.0;
    double rate_hi_mult = 3.0;
    Slot horizon = 100000;
    std::uint64_t seed = 1;

    void validate() const {
        if (!(lambda > 0.0)) throw ParameterError("lambda must be > 0");
        if (horizon < 0) throw ParameterError("horizon must be >= 0");
        if (!(rate_lo_mult > 0.0 && rate_lo_mult < rate_hi_mult))
            throw ParameterError("rate multipliers must satisfy 0 < lo < hi");
        size_mixture.validate();
    }
};

/// One client download as generated.
struct FlowSpec {
    FlowId id = 0;
    Slot arrival_slot = 0;
    double file_size = 0.0;  // kB
    double mean_rate = 0.0;  // kB per slot

    friend bool operator==(const FlowSpec&, const FlowSpec&) = default;
};

// Inverse CDFs, exposed separately so the samplers can be checked at fixed
// uniforms.

/// Exponential inverse CDF for u in (0, 1].
inline double exponential_from_uniform(double u, double lambda) {
    if (!(lambda > 0.0)) throw ParameterError("lambda must be > 0");
    return -std::log(u) / lambda;
}

/// Pareto(m, alpha) inverse CDF for u in (0, 1).
inline double pareto_from_uniform(double u, double scale, double alpha) {
    return scale * std::pow(u, -1.0 / alpha);
}

template <Rng64 G>
double sample_interarrival(G& rng, double lambda) {
    if (!(lambda > 0.0)) throw ParameterError("lambda must be > 0");
    return exponential_from_uniform(unit_open_closed(rng()), lambda);
}

/// Component index for a categorical draw u in [0, 1).
inline std::size_t pick_component(const ParetoMixture& mixture, double u) {
    double acc = 0.0;
    for (std::size_t i = 0; i < mixture.components.size(); ++i) {
        acc += mixture.components[i].weight;
        if (u < acc) return i;
    }
    // u landed in the rounding gap above the last cumulative weight
    for (std::size_t i = mixture.components.size(); i-- > 0;)
        if (mixture.components[i].weight > 0.0) return i;
    return mixture.components.size() - 1;
}

template <Rng64 G>
double sample_file_size(G& rng, const ParetoMixture& mixture) {
    mixture.validate();
    const auto i = pick_component(mixture, unit_closed_open(rng()));
    return pareto_from_uniform(unit_open(rng()), mixture.components[i].scale, mixture.alpha);
}

/// Mean file size, sum_i p_i * alpha * m_i / (alpha - 1).
inline double mixture_mean(const ParetoMixture& mixture) {
    if (!(mixture.alpha > 1.0)) throw ParameterError("pareto mean diverges for alpha <= 1");
    const double factor = mixture.alpha / (mixture.alpha - 1.0);
    double mean = 0.0;
    for (const auto& c : mixture.components) mean += c.weight * factor * c.scale;
    return mean;
}

/// Mean-rate support bounds [lo * lambda * A, hi * lambda * A].
struct RateBounds {
    double lo;
    double hi;
};

inline RateBounds mean_rate_bounds(double lambda, double a_bar, double lo_mult = 1.0 / 3.0,
                                   double hi_mult = 3.0) {
    if (!(lambda > 0.0) || !(a_bar > 0.0))
        throw ParameterError("lambda and mean file size must be > 0");
    return {lo_mult * lambda * a_bar, hi_mult * lambda * a_bar};
}

inline double mean_rate_from_uniform(double u, const RateBounds& b) { return b.lo + u * (b.hi - b.lo); }

template <Rng64 G>
double sample_mean_rate(G& rng, double lambda, double a_bar, double lo_mult = 1.0 / 3.0,
                        double hi_mult = 3.0) {
    return mean_rate_from_uniform(unit_closed_open(rng()),
                                  mean_rate_bounds(lambda, a_bar, lo_mult, hi_mult));
}

/// Arrival stream over [0, horizon). Arrivals sit at the ceiling of the
/// cumulative exponential clock, so several flows may share a slot.
template <Rng64 G>
std::vector<FlowSpec> generate_workload(const WorkloadConfig& config, G& rng) {
    config.validate();
    std::vector<FlowSpec> flows;
    if (config.horizon == 0) return flows;
    const double a_bar = mixture_mean(config.size_mixture);
    flows.reserve(static_cast<std::size_t>(config.lambda * static_cast<double>(config.horizon) * 1.1) + 16);

    double clock = 0.0;
    for (FlowId id = 0;; ++id) {
        clock += sample_interarrival(rng, config.lambda);
        const double slot = std::ceil(clock);
        if (slot >= static_cast<double>(config.horizon)) break;
        FlowSpec f;
        f.id = id;
        f.arrival_slot = static_cast<Slot>(slot);
        f.file_size = sample_file_size(rng, config.size_mixture);
        f.mean_rate = sample_mean_rate(rng, config.lambda, a_bar, config.rate_lo_mult, config.rate_hi_mult);
        flows.push_back(f);
    }
    return flows;
}

/// Convenience overload seeding the workload stream from config.seed.
inline std::vector<FlowSpec> generate_workload(const WorkloadConfig& config) {
    std::mt19937_64 rng(derive_seed(config.seed, static_cast<std::uint64_t>(StreamTag::workload)));
    return generate_workload(config, rng);
}

}  // namespace cellsched
