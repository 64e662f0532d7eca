#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>

namespace dyadnet {

// Counter-based randomness: every draw is addressed by (root seed, stream tag, coordinates),
// so a given dyad/date always sees the same substream no matter how many other dates or
// dyads are simulated, or in which order threads visit them.

inline constexpr std::uint64_t splitmix64_mix(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline constexpr std::uint64_t hash_combine(std::uint64_t a, std::uint64_t b) noexcept {
    return splitmix64_mix(a ^ (splitmix64_mix(b) + 0x9e3779b97f4a7c15ULL + (a << 6) + (a >> 2)));
}

enum class Stream : std::uint64_t {
    shock = 1,
    covariate = 2,
    heterogeneity = 3,
    initial_network = 4,
    sampling = 5,
    enumeration = 6,
    experiment = 7,
};

/// SplitMix64 generator; satisfies UniformRandomBitGenerator.
class CounterRng {
public:
    using result_type = std::uint64_t;

    explicit constexpr CounterRng(std::uint64_t key) noexcept : state_(key) {}

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    constexpr result_type operator()() noexcept {
        state_ += 0x9e3779b97f4a7c15ULL;
        return splitmix64_mix(state_);
    }

    /// Uniform on the open interval (0, 1).
    double uniform() noexcept { return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53; }

    /// Uniform integer in [0, bound) by rejection; bound > 0.
    std::uint64_t below(std::uint64_t bound) noexcept {
        const std::uint64_t limit = max() - max() % bound;
        std::uint64_t x;
        do {
            x = (*this)();
        } while (x >= limit);
        return x % bound;
    }

    /// Standard normal via the cosine branch of Box-Muller.
    double normal() noexcept {
        const double u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    bool bernoulli(double p) noexcept { return uniform() < p; }

private:
    std::uint64_t state_;
};

inline CounterRng substream(std::uint64_t root, Stream tag, std::uint64_t a = 0, std::uint64_t b = 0,
                            std::uint64_t c = 0) noexcept {
    std::uint64_t k = hash_combine(root, static_cast<std::uint64_t>(tag));
    k = hash_combine(k, a);
    k = hash_combine(k, b);
    k = hash_combine(k, c);
    return CounterRng(k);
}

}  // namespace dyadnet
