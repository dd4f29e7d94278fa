#pragma once

#include <array>
#include <cstdint>

namespace cmahk {

// Deterministic 64-bit linear congruential generator (Knuth MMIX constants).
// Used everywhere randomness is needed so that identical seeds reproduce
// identical sample sequences on every platform.  The double mapping keeps the
// top 53 bits, giving uniforms in [0, 1).
class Lcg64 {
public:
    explicit Lcg64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        state_ = state_ * 6364136223846793005ULL + 1442695040888963407ULL;
        return state_;
    }

    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) {
        return lo + (hi - lo) * next_double();
    }

private:
    std::uint64_t state_;
};

} // namespace cmahk
