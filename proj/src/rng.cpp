#include "watermap/rng.hpp"

#include <cmath>
#include <numbers>

namespace watermap {

double SplitMix64::normal() {
    const double u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
    SplitMix64 g(seed ^ (index * 0xD1B54A32D192ED03ULL));
    return g.next();
}

}  // namespace watermap
