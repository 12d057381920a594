#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace sriqa {

/// splitmix64 step; used to expand seeds and to derive independent streams.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// xoshiro256++ generator. The standard library engines are portable but the
/// standard distributions are implementation-defined, so all sampling here is
/// spelled out explicitly; every stream is bit-exact across platforms.
class Rng {
public:
    explicit Rng(std::uint64_t seed) { reseed(seed); }

    /// Derives an independent stream, e.g. Rng(seed).stream(tag).
    Rng stream(std::uint64_t tag) const {
        std::uint64_t mix = state_[0] ^ (tag * 0x9e3779b97f4a7c15ULL);
        return Rng(mix);
    }

    void reseed(std::uint64_t seed) {
        std::uint64_t sm = seed;
        for (auto& word : state_) word = splitmix64(sm);
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

    /// Unbiased integer in [0, n). n must be nonzero.
    std::uint64_t next_below(std::uint64_t n) {
        // rejection sampling: threshold = 2^64 mod n
        const std::uint64_t threshold = (0 - n) % n;
        for (;;) {
            std::uint64_t r = next_u64();
            if (r >= threshold) return r % n;
        }
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Standard normal via Box-Muller. Draws two uniforms per call; no cache,
    /// so the stream position is a pure function of the call count.
    double next_normal() {
        double u1 = 0.0;
        while (u1 == 0.0) u1 = next_double();
        const double u2 = next_double();
        const double r = std::sqrt(-2.0 * std::log(u1));
        return r * std::cos(6.283185307179586476925286766559 * u2);
    }

    /// Fisher-Yates shuffle with the explicit bounded sampler.
    template <typename Vec>
    void shuffle(Vec& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(next_below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

    std::array<std::uint64_t, 4> state() const { return state_; }
    void set_state(const std::array<std::uint64_t, 4>& s) { state_ = s; }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }

    std::array<std::uint64_t, 4> state_{};
};

} // namespace sriqa
