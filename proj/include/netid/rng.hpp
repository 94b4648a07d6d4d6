#pragma once

#include <cmath>
#include <cstdint>

namespace netid {

/// Counter-based Gaussian generator. Every draw is a pure function of
/// (seed, stream, index), so concurrent consumers produce identical
/// sequences regardless of scheduling.
class CounterRng {
   public:
    explicit CounterRng(uint64_t seed) : seed_(seed) {}

    uint64_t bits(uint64_t stream, uint64_t index) const {
        uint64_t x = seed_;
        x = mix(x ^ (0x9e3779b97f4a7c15ULL * (stream + 1)));
        x = mix(x ^ (0xbf58476d1ce4e5b9ULL * (index + 1)));
        return mix(x);
    }

    // uniform in (0, 1)
    double uniform(uint64_t stream, uint64_t index) const {
        return (static_cast<double>(bits(stream, index) >> 11) + 0.5) * 0x1p-53;
    }

    // standard normal via Box-Muller on two counter draws
    double normal(uint64_t stream, uint64_t index) const {
        const double u1 = uniform(stream, 2 * index);
        const double u2 = uniform(stream, 2 * index + 1);
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }

    uint64_t seed() const { return seed_; }

   private:
    static uint64_t mix(uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    uint64_t seed_;
};

}  // namespace netid
