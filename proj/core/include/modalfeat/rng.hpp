#pragma once

#include <cmath>
#include <cstdint>

namespace modalfeat {

// SplitMix64 (Steele, Lea & Flood). The dataset protocol depends on splits
// replicating across platforms, so we carry our own generator instead of
// std::mt19937 whose distributions are implementation-defined.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    // Uniform draw in [0, bound) via Lemire's multiply-shift reduction.
    std::uint64_t next_below(std::uint64_t bound) {
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(next()) * bound) >> 64);
    }

    // Uniform double in [0, 1), 53 mantissa bits.
    double next_double() {
        return static_cast<double>(next() >> 11) * 0x1.0p-53;
    }

    // Standard normal, Box-Muller (polar rejection avoided so the draw count
    // per call is fixed and streams stay aligned).
    double next_gaussian() {
        double u1 = next_double();
        double u2 = next_double();
        if (u1 < 1e-300) u1 = 1e-300;
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
    }

private:
    std::uint64_t state_;
};

// Decorrelated per-stream seed from a base seed and stream index; gives each
// texture class / source image its own reproducible sequence.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
    SplitMix64 g(base ^ (0x9e3779b97f4a7c15ull * (stream + 1)));
    return g.next();
}

}  // namespace modalfeat
