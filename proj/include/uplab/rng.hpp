#ifndef UPLAB_RNG_HPP
#define UPLAB_RNG_HPP

#include <array>
#include <cstdint>

namespace uplab {

// Deterministic 64-bit-seed PRNG used everywhere weights or noise are drawn.
// The generator is xoshiro256++ with its state filled from splitmix64, both
// with the reference constants (Blackman & Vigna, public domain). The output
// stream for a given seed is pinned by golden tests; changing this generator
// changes every randomized artifact in the repo.

inline std::uint64_t splitmix64_next(std::uint64_t& state) {
    state += 0x9E3779B97F4A7C15ull;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

/// Seed for sub-stream `index` of a parent seed: the (index+1)-th output of
/// the splitmix64 sequence started at the parent seed. Used to give each
/// layer of a stack its own independent stream.
inline std::uint64_t derive_seed(std::uint64_t parent, std::size_t index) {
    std::uint64_t state = parent;
    std::uint64_t z = 0;
    for (std::size_t k = 0; k <= index; ++k) z = splitmix64_next(state);
    return z;
}

class Rng {
  public:
    explicit Rng(std::uint64_t seed) {
        std::uint64_t st = seed;
        for (auto& word : state_) word = splitmix64_next(st);
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    /// Uniform double in [0, 1), 53-bit resolution.
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) {
        return lo + next_double() * (hi - lo);
    }

  private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }
    std::array<std::uint64_t, 4> state_{};
};

} // namespace uplab

#endif
