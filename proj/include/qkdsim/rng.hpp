#pragma once

// Deterministic random streams. The standard library engines are portable but
// its distributions are not, so conversion to doubles and bounded integers is
// done explicitly. Streams are cheap to construct; simulation code derives a
// fresh stream per (seed, index) pair instead of sharing one across units of
// work, which keeps results independent of batching and thread count.

#include <cstdint>

namespace qkdsim {

// splitmix64 finalizer (Stafford mix 13). Bijective on 64-bit words.
inline constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Derive an independent child seed from a base seed and an index.
/// derive_seed(s, i) != derive_seed(s, j) for i != j.
inline constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) noexcept {
    return mix64(base + 0x9e3779b97f4a7c15ULL * (index + 1));
}

struct SplitMix64 {
    std::uint64_t state = 0;
    constexpr std::uint64_t next() noexcept {
        state += 0x9e3779b97f4a7c15ULL;
        return mix64(state);
    }
};

/// xoshiro256++ stream, seeded through splitmix64 as its authors recommend.
class RandomStream {
public:
    explicit constexpr RandomStream(std::uint64_t seed) noexcept {
        SplitMix64 sm{seed};
        for (auto& word : state_) word = sm.next();
    }

    constexpr std::uint64_t next_u64() noexcept {
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

    /// Uniform double in [0, 1), 53 significant bits.
    constexpr double next_double() noexcept {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Uniform integer in [0, n). Multiply-shift reduction; the residual bias
    /// of ~n/2^64 is far below anything the statistics here can resolve.
    constexpr std::uint32_t next_below(std::uint32_t n) noexcept {
        return static_cast<std::uint32_t>(
            (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
    }

    constexpr bool next_bernoulli(double p) noexcept { return next_double() < p; }

    /// +1 with probability p_plus, else -1.
    constexpr int next_sign(double p_plus) noexcept { return next_bernoulli(p_plus) ? +1 : -1; }

private:
    static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
        return (x << k) | (x >> (64 - k));
    }

    std::uint64_t state_[4]{};
};

}  // namespace qkdsim
