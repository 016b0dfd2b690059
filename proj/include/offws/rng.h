// Counter-style random number streams. Every (seed, purpose, id...) tuple maps
// to an independent xoshiro256++ stream, so results do not depend on thread
// scheduling or worker count.

#pragma once

#include "geom.h"

#include <cstdint>

namespace offws {

inline uint64_t splitmix64(uint64_t& state) {
    uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

class Rng {
  public:
    Rng() : Rng(0x853c49e6748fea9bull) {}

    explicit Rng(uint64_t seed) {
        uint64_t sm = seed;
        for (auto& w : state_) w = splitmix64(sm);
    }

    uint64_t next() {
        uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
        uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // uniform in [0, 1)
    double uniform() { return double(next() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    template <int DIM>
    Vec<DIM> unitVector() {
        if constexpr (DIM == 2) {
            double a = uniform(0.0, 2.0 * kPi);
            return Vec2(std::cos(a), std::sin(a));
        } else {
            double z = 1.0 - 2.0 * uniform();
            double a = uniform(0.0, 2.0 * kPi);
            double s = std::sqrt(std::max(0.0, 1.0 - z * z));
            return Vec3(s * std::cos(a), s * std::sin(a), z);
        }
    }

  private:
    static uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    uint64_t state_[4];
};

// Stream purposes; mixed into the stream key so distinct uses never collide.
enum class StreamTag : uint64_t {
    Stage1 = 0x5354414745ull,
    PairSource = 0x50414952ull,
    Walk = 0x57414c4bull,
    Gradient = 0x47524144ull,
    Scratch = 0x53435241ull,
};

inline Rng streamRng(uint64_t seed, StreamTag tag, uint64_t a = 0, uint64_t b = 0,
                     uint64_t c = 0) {
    uint64_t s = seed;
    (void)splitmix64(s);
    s ^= static_cast<uint64_t>(tag) * 0xda942042e4dd58b5ull;
    (void)splitmix64(s);
    s ^= a * 0xe7037ed1a0b428dbull;
    (void)splitmix64(s);
    s ^= b * 0x9e6c63d0876a9a47ull;
    (void)splitmix64(s);
    s ^= c * 0xc2b2ae3d27d4eb4full;
    return Rng(splitmix64(s));
}

}  // namespace offws
