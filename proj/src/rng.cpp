// SPDX-License-Identifier: Apache-2.0
#include "dfrc/rng.hpp"

#include <cmath>
#include <numbers>

namespace dfrc {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

Rng Rng::stream(std::uint64_t seed, std::uint64_t stream_id) {
  return Rng(splitmix64(seed ^ splitmix64(stream_id + 0x5851f42d4c957f2dULL)));
}

double Rng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

cdouble Rng::complex_normal() {
  // Box-Muller in polar form: |z|^2 ~ Exp(1), phase uniform.
  const double u1 = 1.0 - uniform();  // (0, 1]
  const double u2 = uniform();
  const double radius = std::sqrt(-std::log(u1));
  const double phase = 2.0 * std::numbers::pi * u2;
  return {radius * std::cos(phase), radius * std::sin(phase)};
}

cdouble Rng::unit_phase() { return std::polar(1.0, 2.0 * std::numbers::pi * uniform()); }

CMatrix Rng::complex_normal(Index rows, Index cols) {
  CMatrix m(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) m(i, j) = complex_normal();
  return m;
}

CMatrix Rng::unit_phase(Index rows, Index cols) {
  CMatrix m(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) m(i, j) = unit_phase();
  return m;
}

}  // namespace dfrc
