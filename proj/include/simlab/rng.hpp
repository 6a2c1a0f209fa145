#pragma once

// Deterministic 64-bit RNG with independent streams (PCG, 128-bit state,
// XSL-RR output).  The (seed, stream) pair fully determines the sequence,
// bit-for-bit across runs and worker threads; distinct streams use distinct
// LCG increments and never share state.  Golden outputs are pinned in the
// test suite, so any change here is a deliberate format break.

#include <cstdint>

namespace simlab {

// Stateless mix used to derive stream/seed material from indices.
inline std::uint64_t splitmix64(std::uint64_t x) {
    std::uint64_t z = x + 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

class RngStream {
public:
    RngStream(std::uint64_t seed, std::uint64_t stream) {
        inc_ = ((static_cast<u128>(stream) << 1) | 1u);
        state_ = 0;
        step();
        state_ += seed;
        step();
    }

    std::uint64_t next_u64() {
        const std::uint64_t out = output(state_);
        step();
        return out;
    }

    // 53-bit uniform in [0, 1).
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform in (0, 1): rejects exact zeros so callers may take logs.
    double next_double_open() {
        for (;;) {
            const double u = next_double();
            if (u > 0.0) return u;
        }
    }

private:
    using u128 = unsigned __int128;

    static constexpr u128 kMult =
        (static_cast<u128>(2549297995355413924ULL) << 64) | 4865540595714422341ULL;

    static std::uint64_t output(u128 state) {
        const unsigned rot = static_cast<unsigned>(state >> 122);
        const std::uint64_t xored =
            static_cast<std::uint64_t>((state >> 64) ^ state);
        return (xored >> rot) | (xored << ((64u - rot) & 63u));
    }

    void step() { state_ = state_ * kMult + inc_; }

    u128 state_ = 0;
    u128 inc_ = 1;
};

}  // namespace simlab
