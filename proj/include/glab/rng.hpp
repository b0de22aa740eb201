#ifndef GLAB_RNG_HPP
#define GLAB_RNG_HPP

#include <cmath>
#include <cstdint>

namespace glab {

/// Seed for one reproducible stream. stream_index keys independent
/// substreams (one per trial / worker slot), so results do not depend on
/// how trials are distributed over workers.
struct RngSeed {
    std::uint64_t seed = 0;
    std::uint64_t stream_index = 0;

    RngSeed with_stream(std::uint64_t s) const { return {seed, s}; }
};

/// xoshiro256++ seeded through splitmix64. All distributions below are
/// implemented explicitly (no std::*_distribution) so that sequences are
/// bit-reproducible across standard libraries.
class Rng {
  public:
    explicit Rng(RngSeed s) {
        std::uint64_t x = s.seed ^ (0x9e3779b97f4a7c15ULL * (s.stream_index + 1));
        for (int i = 0; i < 4; ++i) state_[i] = splitmix64(x);
        // avoid the all-zero state
        if ((state_[0] | state_[1] | state_[2] | state_[3]) == 0) state_[0] = 1;
    }
    Rng(std::uint64_t seed, std::uint64_t stream) : Rng(RngSeed{seed, stream}) {}

    std::uint64_t next_u64() {
        std::uint64_t* s = state_;
        std::uint64_t result = rotl(s[0] + s[3], 23) + s[0];
        std::uint64_t t = s[1] << 17;
        s[2] ^= s[0];
        s[3] ^= s[1];
        s[1] ^= s[2];
        s[0] ^= s[3];
        s[2] ^= t;
        s[3] = rotl(s[3], 45);
        return result;
    }

    /// uniform in [0,1)
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// uniform in (0,1], for logs
    double uniform_pos() { return 1.0 - uniform(); }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// standard normal via Box-Muller (two uniforms per draw, no cached state)
    double gaussian() {
        double u1 = uniform_pos();
        double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
    }

    /// two-sided (Laplace) with unit variance: scale 1/sqrt(2)
    double laplace_unit() {
        double e = -std::log(uniform_pos());
        double s = (next_u64() & 1u) ? 1.0 : -1.0;
        return s * e / 1.4142135623730950488;
    }

    std::uint64_t below(std::uint64_t n) { return next_u64() % n; }

  private:
    static std::uint64_t splitmix64(std::uint64_t& x) {
        std::uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    std::uint64_t state_[4];
};

}  // namespace glab

#endif
