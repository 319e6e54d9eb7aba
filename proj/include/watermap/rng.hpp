#pragma once

#include <cstdint>

namespace watermap {

/// SplitMix64 (Steele, Lea & Flood 2014): state += 0x9E3779B97F4A7C15, then the
/// standard xor-shift-multiply finaliser. Chosen so seeds reproduce bit-for-bit
/// in any language; std:: engines and distributions are not portable.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /// Uniform double in (0, 1): top 53 bits, offset by half an ulp.
    double uniform() { return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53; }

    /// Standard normal via the Box-Muller cosine branch (one variate per two uniforms).
    double normal();

private:
    std::uint64_t state_;
};

/// Derives an independent stream seed from a parent seed and an index.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

}  // namespace watermap
