#pragma once

#include <cmath>
#include <cstdint>

namespace fsde {

// Counter-keyed random streams. Every (master seed, path, mode) triple owns an
// independent stream, so sampled ensembles do not depend on scheduling or on
// how work is split across threads.

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// xoshiro256++ (Blackman/Vigna), state seeded through splitmix64.
class Xoshiro256pp {
  public:
    Xoshiro256pp(std::uint64_t seed_a, std::uint64_t seed_b = 0, std::uint64_t seed_c = 0) {
        std::uint64_t sm = seed_a;
        sm ^= 0x6a09e667f3bcc909ULL + (seed_b << 1);
        sm += splitmix64(sm) ^ seed_c;
        for (auto& w : state_) w = splitmix64(sm);
    }

    std::uint64_t next() {
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

    // uniform in (0,1); never returns 0 so log() below is safe
    double uniform() { return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53; }

  private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
    std::uint64_t state_[4];
};

// Standard normal draws via Box-Muller on the fixed-consumption form: two
// uniforms per pair, so a stream is a pure function of its key.
class GaussStream {
  public:
    GaussStream(std::uint64_t master_seed, std::uint64_t path, std::uint64_t mode)
        : rng_(master_seed, path * 0x9e3779b97f4a7c15ULL + 1, mode * 0xd1342543de82ef95ULL + 1) {}

    double next() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = rng_.uniform();
        const double u2 = rng_.uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

  private:
    Xoshiro256pp rng_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

} // namespace fsde
