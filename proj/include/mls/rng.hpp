#pragma once

#include <cmath>
#include <cstdint>

#include "mls/common.hpp"

namespace mls {

// SplitMix64 (Steele, Lea, Flood 2014). Fixed published algorithm so streams
// are reproducible across platforms; no system randomness anywhere.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0,1) with 53 random bits.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform in (0,1], safe as a log argument.
    double uniform_pos() { return 1.0 - uniform(); }

    // Box-Muller transform; the spare variate is cached.
    double gaussian() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = uniform_pos();
        double u2 = uniform();
        double rad = std::sqrt(-2.0 * std::log(u1));
        double ang = 2.0 * kPi * u2;
        spare_ = rad * std::sin(ang);
        has_spare_ = true;
        return rad * std::cos(ang);
    }

  private:
    std::uint64_t state_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

// Seed for an individual replication stream.
inline std::uint64_t replication_seed(std::uint64_t base, std::uint64_t index) { return base ^ index; }

}  // namespace mls
