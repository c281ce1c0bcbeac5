#ifndef TKIT_RNG_HPP
#define TKIT_RNG_HPP

#include <cmath>
#include <cstdint>

namespace tkit {

// SplitMix64 run in counter mode: output i is a pure function of
// (seed, i), so streams with nearby seeds are independent for any
// realistic stream length and replicate results do not depend on
// evaluation order or thread scheduling.
class SplitMixRng {
public:
    explicit SplitMixRng(std::uint64_t seed) : state_(mix(seed ^ 0x5851f42d4c957f2dULL)) {}

    std::uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ULL;
        return mix(state_);
    }

    // Uniform on (0,1]; never returns 0 so log() is always safe.
    double next_uniform() {
        return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
    }

    double next_uniform(double lo, double hi) { return lo + (hi - lo) * next_uniform(); }

    // Standard normal via Box-Muller. Draws two uniforms per call and keeps
    // no cached spare, so the draw sequence is a simple function of the
    // counter position.
    double next_normal() {
        double u1 = next_uniform();
        double u2 = next_uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586477 * u2);
    }

    double next_normal(double mean, double sd) { return mean + sd * next_normal(); }

private:
    static std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::uint64_t state_;
};

}  // namespace tkit

#endif  // TKIT_RNG_HPP
