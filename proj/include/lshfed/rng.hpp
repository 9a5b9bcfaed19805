#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>

// Counter-based deterministic randomness. Every draw is a pure function of
// (seed, index), so results are bit-identical across platforms and independent
// of evaluation order. Derived seeds give cheap domain separation between
// unrelated streams (per round, per node, per purpose).
namespace lshfed::rng {

inline constexpr uint64_t golden = 0x9e3779b97f4a7c15ull;

/// SplitMix64 finalizer (Steele et al., "Fast splittable pseudorandom number
/// generators"). Full-avalanche 64-bit mixer.
constexpr uint64_t mix64(uint64_t z) {
    z ^= z >> 30;
    z *= 0xbf58476d1ce4e5b9ull;
    z ^= z >> 27;
    z *= 0x94d049bb133111ebull;
    z ^= z >> 31;
    return z;
}

/// 64 random bits at position `index` of the stream identified by `seed`.
constexpr uint64_t bits_at(uint64_t seed, uint64_t index) {
    return mix64(seed + (index + 1) * golden);
}

/// Child seed for a tagged sub-stream.
constexpr uint64_t derive(uint64_t seed, uint64_t tag) {
    return mix64(seed ^ mix64(tag + golden));
}
constexpr uint64_t derive(uint64_t seed, uint64_t a, uint64_t b) {
    return derive(derive(seed, a), b);
}
constexpr uint64_t derive(uint64_t seed, uint64_t a, uint64_t b, uint64_t c) {
    return derive(derive(seed, a, b), c);
}

/// Uniform double in [0, 1) with 53 random mantissa bits.
inline double u01_at(uint64_t seed, uint64_t index) {
    return static_cast<double>(bits_at(seed, index) >> 11) * 0x1.0p-53;
}

/// Standard normal via Box-Muller (cosine branch). Consumes stream positions
/// 2*index and 2*index+1.
inline double normal_at(uint64_t seed, uint64_t index) {
    const double u1 =
        static_cast<double>((bits_at(seed, 2 * index) >> 11) + 1) * 0x1.0p-53; // (0,1]
    const double u2 =
        static_cast<double>(bits_at(seed, 2 * index + 1) >> 11) * 0x1.0p-53; // [0,1)
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

/// Uniform integer in [0, m). Exact (bias-free) when m is a power of two.
constexpr uint64_t uniform_mod_at(uint64_t seed, uint64_t index, uint64_t m) {
    const uint64_t x = bits_at(seed, index);
    return (m & (m - 1)) == 0 ? (x & (m - 1)) : (x % m);
}

/// Sequential adapter over the counter stream for consumers that need a
/// variable number of draws (e.g. rejection sampling). Still deterministic:
/// the sequence is fixed by the seed alone.
class stream {
public:
    explicit stream(uint64_t seed) : seed_(seed) {}

    uint64_t next_bits() { return bits_at(seed_, n_++); }
    double next_u01() { return static_cast<double>(next_bits() >> 11) * 0x1.0p-53; }
    double next_normal() {
        const double u1 = static_cast<double>((next_bits() >> 11) + 1) * 0x1.0p-53;
        const double u2 = static_cast<double>(next_bits() >> 11) * 0x1.0p-53;
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }
    uint64_t next_below(uint64_t m) {
        const uint64_t x = next_bits();
        return (m & (m - 1)) == 0 ? (x & (m - 1)) : (x % m);
    }

private:
    uint64_t seed_;
    uint64_t n_ = 0;
};

/// FNV-1a 64-bit digest of a byte string.
constexpr uint64_t fnv1a(const uint8_t* data, size_t n) {
    uint64_t h = 0xcbf29ce484222325ull;
    for (size_t i = 0; i < n; ++i) {
        h ^= data[i];
        h *= 0x100000001b3ull;
    }
    return h;
}

/// MurmurHash3 fmix64 finalizer.
constexpr uint64_t fmix64(uint64_t k) {
    k ^= k >> 33;
    k *= 0xff51afd7ed558ccdull;
    k ^= k >> 33;
    k *= 0xc4ceb9fe1a85ec53ull;
    k ^= k >> 33;
    return k;
}

/// 64-bit hash of a byte string: FNV-1a digest pushed through fmix64 so that
/// near-constant short inputs still avalanche.
constexpr uint64_t hash64(const uint8_t* data, size_t n) {
    return fmix64(fnv1a(data, n));
}

} // namespace lshfed::rng
