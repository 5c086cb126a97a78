#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <string_view>

#include "cellsched/error.hpp"
#include "cellsched/random.hpp"
#include "cellsched/workload.hpp"

namespace cellsched {

enum class EnvelopeMode {
    literal,       // sine argument freq + phase, constant in t
    time_varying,  // sine argument freq * t + phase
};

inline EnvelopeMode parse_envelope_mode(std::string_view s) {
    if (s == "literal") return EnvelopeMode::literal;
    if (s == "time_varying") return EnvelopeMode::time_varying;
    throw ConfigError("unknown envelope_mode '" + std::string(s) + "' (expected literal | time_varying)");
}

inline std::string_view to_string(EnvelopeMode m) {
    return m == EnvelopeMode::literal ? "literal" : "time_varying";
}

/// Per-slot channel model: r_k(t) ~ U[lo * E(t) * rbar_k, hi * E(t) * rbar_k].
struct ChannelConfig {
    double lo_coeff = 0.7;
    double hi_coeff = 1.3;
    double envelope_amplitude = 1.5;
    double envelope_freq = 5e-4;
    double envelope_phase = 0.1;
    EnvelopeMode envelope_mode = EnvelopeMode::literal;

    void validate() const {
        if (!(lo_coeff > 0.0 && lo_coeff < hi_coeff))
            throw ParameterError("channel coefficients must satisfy 0 < lo < hi");
        if (!(envelope_amplitude > 0.0)) throw ParameterError("envelope amplitude must be > 0");
    }
};

inline double envelope_factor(Slot t, const ChannelConfig& config) {
    const double arg = config.envelope_mode == EnvelopeMode::literal
                           ? config.envelope_freq + config.envelope_phase
                           : config.envelope_freq * static_cast<double>(t) + config.envelope_phase;
    // clamp tiny negative rounding at the sine minimum
    return std::max(0.0, config.envelope_amplitude * (std::sin(arg) + 1.0));
}

struct RateInterval {
    double lo;
    double hi;
};

inline RateInterval rate_interval(const FlowSpec& flow, Slot t, const ChannelConfig& config) {
    const double scale = envelope_factor(t, config) * flow.mean_rate;
    return {config.lo_coeff * scale, config.hi_coeff * scale};
}

inline double rate_from_uniform(double u, const RateInterval& iv) { return iv.lo + u * (iv.hi - iv.lo); }

template <Rng64 G>
double sample_rate(G& rng, const FlowSpec& flow, Slot t, const ChannelConfig& config) {
    return rate_from_uniform(unit_closed_open(rng()), rate_interval(flow, t, config));
}

/// Rate source keyed by (seed, flow id, slot): the value of r_k(t) is the
/// same whatever the scheduler did earlier.
class KeyedChannel {
public:
    KeyedChannel(ChannelConfig config, std::uint64_t seed)
        : config_(config), seed_(derive_seed(seed, static_cast<std::uint64_t>(StreamTag::channel))) {}

    double operator()(const FlowSpec& flow, Slot t) const {
        auto rng = keyed_stream(seed_, flow.id, t);
        return sample_rate(rng, flow, t, config_);
    }

    const ChannelConfig& config() const noexcept { return config_; }

private:
    ChannelConfig config_;
    std::uint64_t seed_;
};

}  // namespace cellsched
