#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace tickimpact {

// Seed mixer (splitmix64). Used to derive independent per-replicate /
// per-group seeds so parallel work is schedule-invariant.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Deterministic draws on top of std::mt19937_64. The standard fully
// specifies the mt19937_64 sequence; the conversions below avoid
// std::uniform_real_distribution / std::normal_distribution, whose output
// is implementation-defined, so results are portable across platforms.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t next_u64() { return eng_(); }

    // uniform in [0, 1), 53-bit resolution
    double uniform() { return double(eng_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // index in [0, n)
    std::size_t index(std::size_t n) { return std::size_t(uniform() * double(n)) % n; }

    // standard normal via Box-Muller (no cached state)
    double normal() {
        double u1 = uniform(), u2 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586477 * u2);
    }

  private:
    std::mt19937_64 eng_;
};

}  // namespace tickimpact
