#pragma once

#include <cstdint>
#include <random>

namespace latdet {

/* splitmix64 finalizer; used to spread seeds before they reach the engine. */
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/* Deterministic random stream.
 *
 * Every concurrent task must own its own stream; derive() builds an
 * independent substream from a tag so results never depend on thread
 * scheduling. Identical (seed, tag) always reproduces the same draws.
 */
class Rng {
public:
    explicit Rng(std::uint64_t seed) : seed_(seed), engine_(mix64(seed)) {}

    Rng derive(std::uint64_t tag) const {
        return Rng(mix64(seed_ ^ mix64(tag ^ 0x6a09e667f3bcc909ULL)));
    }
    Rng derive(std::uint64_t a, std::uint64_t b) const {
        return derive(mix64(a) ^ mix64(b ^ 0xbb67ae8584caa73bULL));
    }

    double gaussian() { return normal_(engine_); }

    double uniform() { return unif_(engine_); } // [0, 1)

    /* uniform integer in [0, bound) */
    std::uint32_t uniform_int(std::uint32_t bound) {
        std::uniform_int_distribution<std::uint32_t> dist(0, bound - 1);
        return dist(engine_);
    }

    std::uint64_t seed() const { return seed_; }
    std::mt19937_64& engine() { return engine_; }

private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
    std::uniform_real_distribution<double> unif_{0.0, 1.0};
};

} // namespace latdet
