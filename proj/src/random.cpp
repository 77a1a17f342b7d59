#include "mnemorank/random.hpp"

namespace mnemorank {

std::uint64_t splitmix64(std::uint64_t& state) noexcept {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::uint64_t derive_seed(std::uint64_t seed, StreamDomain domain, std::uint64_t id) {
    std::uint64_t state = seed;
    std::uint64_t mixed = splitmix64(state);
    state = mixed ^ (static_cast<std::uint64_t>(domain) * 0xd1342543de82ef95ULL);
    mixed = splitmix64(state);
    state = mixed ^ id;
    return splitmix64(state);
}

Rng derive_stream(std::uint64_t seed, StreamDomain domain, std::uint64_t id) {
    std::uint64_t state = derive_seed(seed, domain, id);
    // Fill the full state through seed_seq; its algorithm is specified exactly.
    std::seed_seq seq{static_cast<std::uint32_t>(splitmix64(state)),
                      static_cast<std::uint32_t>(splitmix64(state)),
                      static_cast<std::uint32_t>(splitmix64(state)),
                      static_cast<std::uint32_t>(splitmix64(state))};
    return Rng(seq);
}

double uniform01(Rng& rng) noexcept {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double uniform01_open_zero(Rng& rng) noexcept {
    return (static_cast<double>(rng() >> 11) + 1.0) * 0x1.0p-53;
}

std::uint64_t uniform_index(Rng& rng, std::uint64_t bound) noexcept {
    // Reject the top partial copy of [0, bound) so the result is unbiased.
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
    std::uint64_t x = rng();
    while (x >= limit) {
        x = rng();
    }
    return x % bound;
}

} // namespace mnemorank
