#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace polsar {

// Deterministic random stream (xoshiro256++ core, splitmix64 seeding).
//
// The standard library engines are deterministic but the distribution
// adapters are not specified bit-for-bit across implementations, so the
// variate transforms here are spelled out explicitly. Two streams built
// from the same seed produce identical sequences on any platform.
//
// split(key) derives an independent child stream from the *construction*
// seed and the key only; it does not depend on how far the parent has
// advanced. This is what makes multi-threaded Monte Carlo runs independent
// of the worker count: give every task its own (seed, key) stream.
class RngState {
public:
    explicit RngState(std::uint64_t seed = 1) : seed_(seed) {
        std::uint64_t x = seed;
        for (auto& w : state_) w = splitmix64(x);
    }

    std::uint64_t seed() const { return seed_; }

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

    // Uniform on [0, 1), 53-bit resolution.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform on (0, 1]; safe as a log() argument.
    double uniform_pos() { return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53; }

    // Standard normal via Box-Muller; the spare value is cached, so a
    // stream yields the same sequence regardless of call grouping.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double r = std::sqrt(-2.0 * std::log(uniform_pos()));
        const double a = 2.0 * std::numbers::pi * uniform();
        spare_ = r * std::sin(a);
        has_spare_ = true;
        return r * std::cos(a);
    }

    RngState split(std::uint64_t key) const {
        std::uint64_t x = seed_;
        const std::uint64_t a = splitmix64(x);
        x ^= 0xd1b54a32d192ed03ULL + key;
        const std::uint64_t b = splitmix64(x);
        return RngState(a ^ b ^ (key * 0x9e3779b97f4a7c15ULL));
    }

private:
    static std::uint64_t rotl(std::uint64_t v, int k) { return (v << k) | (v >> (64 - k)); }

    static std::uint64_t splitmix64(std::uint64_t& x) {
        x += 0x9e3779b97f4a7c15ULL;
        std::uint64_t z = x;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::uint64_t seed_;
    std::uint64_t state_[4];
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace polsar
