#pragma once

#include <concepts>
#include <cstdint>
#include <limits>
#include <random>

namespace cellsched {

// Random streams.
//
// Two kinds are used. Sequential streams (std::mt19937_64) drive the
// workload generator. Counter-keyed streams derive an independent generator
// from (seed, key...) so that a draw for flow k at slot t never depends on
// how many draws other components consumed before it.

namespace detail {

constexpr std::uint64_t splitmix_finalize(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace detail

/// SplitMix64 generator; satisfies std::uniform_random_bit_generator.
class SplitMix64 {
public:
    using result_type = std::uint64_t;

    constexpr explicit SplitMix64(std::uint64_t seed = 0) noexcept : state_(seed) {}

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    constexpr result_type operator()() noexcept {
        state_ += 0x9e3779b97f4a7c15ULL;
        return detail::splitmix_finalize(state_);
    }

private:
    std::uint64_t state_;
};

/// Hashes a seed and any number of integer keys into a new 64-bit seed.
template <std::integral... Keys>
constexpr std::uint64_t derive_seed(std::uint64_t seed, Keys... keys) noexcept {
    std::uint64_t h = detail::splitmix_finalize(seed + 0x9e3779b97f4a7c15ULL);
    ((h = detail::splitmix_finalize(h ^ (static_cast<std::uint64_t>(keys) + 0x9e3779b97f4a7c15ULL +
                                         (h << 6) + (h >> 2)))),
     ...);
    return h;
}

/// Independent generator for one (seed, keys...) cell.
template <std::integral... Keys>
constexpr SplitMix64 keyed_stream(std::uint64_t seed, Keys... keys) noexcept {
    return SplitMix64(derive_seed(seed, keys...));
}

/// Stream identifiers for derive_seed; keep distinct per consumer.
enum class StreamTag : std::uint64_t {
    workload = 0x574f524b,  // "WORK"
    channel = 0x4348414e,   // "CHAN"
    strategy = 0x53545241,  // "STRA"
};

template <class G>
concept Rng64 = std::uniform_random_bit_generator<G> && (G::min() == 0) &&
                (G::max() == std::numeric_limits<std::uint64_t>::max());

// Bit-exact conversions of a 64-bit word to doubles (53 bits of mantissa).
inline constexpr double kTwoPowMinus53 = 1.0 / 9007199254740992.0;

/// Uniform on [0, 1).
constexpr double unit_closed_open(std::uint64_t bits) noexcept {
    return static_cast<double>(bits >> 11) * kTwoPowMinus53;
}

/// Uniform on (0, 1].
constexpr double unit_open_closed(std::uint64_t bits) noexcept {
    return static_cast<double>((bits >> 11) + 1) * kTwoPowMinus53;
}

/// Uniform on (0, 1), centred on the 2^-53 lattice.
constexpr double unit_open(std::uint64_t bits) noexcept {
    return (static_cast<double>(bits >> 11) + 0.5) * kTwoPowMinus53;
}

}  // namespace cellsched
