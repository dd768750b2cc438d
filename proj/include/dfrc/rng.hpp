// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <random>

#include "dfrc/types.hpp"

namespace dfrc {

/// Seedable 64-bit generator (MT19937-64) with distribution transforms written
/// out explicitly, so that draws are identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Independent generator for a (seed, stream) pair; streams separate the
  /// channel draw from solver initialization.
  static Rng stream(std::uint64_t seed, std::uint64_t stream_id);

  std::uint64_t next() { return engine_(); }
  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Circularly-symmetric complex Gaussian with E|z|^2 = 1.
  cdouble complex_normal();
  /// Unit-modulus entry with uniform phase on [0, 2pi).
  cdouble unit_phase();

  CMatrix complex_normal(Index rows, Index cols);
  CMatrix unit_phase(Index rows, Index cols);

 private:
  std::mt19937_64 engine_;
};

}  // namespace dfrc
