#pragma once

#include <cstdint>
#include <random>

#include "beltrami/grid.hpp"

namespace beltrami {

/// Deterministic random source. Doubles are derived from raw engine bits so
/// the stream is identical across standard library implementations.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t bits() { return eng_(); }

    double uniform() {  // [0, 1)
        return static_cast<double>(bits() >> 11) * 0x1.0p-53;
    }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    double log_uniform(double lo, double hi);

    cd unit_phase();
    cd in_disk(double radius);
    cd in_square(double half_width);
    cd in_annulus(double r_lo, double r_hi);

  private:
    std::mt19937_64 eng_;
};

}  // namespace beltrami
