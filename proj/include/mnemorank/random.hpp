#pragma once

#include <cstdint>
#include <random>

namespace mnemorank {

// All randomness goes through std::mt19937_64, whose output sequence is fixed
// by the standard, plus the helpers below. The standard distributions are
// implementation-defined and are not used, so results do not depend on the
// standard library in use.
using Rng = std::mt19937_64;

// Independent purposes draw from disjoint stream families.
enum class StreamDomain : std::uint64_t {
    Tree = 1,
    Bag = 2,
    Wagging = 3,
    Stratify = 4,
    Fold = 5,
    SynthFamily = 6,
    SynthSample = 7,
};

std::uint64_t splitmix64(std::uint64_t& state) noexcept;

// Seeded stream for (seed, domain, id). Streams with different ids are
// statistically independent and fully reproducible.
Rng derive_stream(std::uint64_t seed, StreamDomain domain, std::uint64_t id);

// Derives a child seed, used to hand a seed to a nested component.
std::uint64_t derive_seed(std::uint64_t seed, StreamDomain domain, std::uint64_t id);

// Uniform in [0, 1), 53 bits.
double uniform01(Rng& rng) noexcept;

// Uniform in (0, 1].
double uniform01_open_zero(Rng& rng) noexcept;

// Uniform integer in [0, bound), bound > 0. Unbiased (rejection sampling).
std::uint64_t uniform_index(Rng& rng, std::uint64_t bound) noexcept;

template <typename It>
void shuffle(It first, It last, Rng& rng) {
    const auto n = static_cast<std::uint64_t>(last - first);
    for (std::uint64_t i = n; i > 1; --i) {
        const auto j = uniform_index(rng, i);
        std::iter_swap(first + static_cast<std::ptrdiff_t>(i - 1),
                       first + static_cast<std::ptrdiff_t>(j));
    }
}

} // namespace mnemorank
