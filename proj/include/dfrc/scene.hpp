// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <numbers>
#include <optional>
#include <vector>

#include "dfrc/system.hpp"
#include "dfrc/types.hpp"

namespace dfrc {

inline constexpr double kHalfPi = std::numbers::pi / 2.0;

inline double deg2rad(double deg) { return deg * std::numbers::pi / 180.0; }
inline double rad2deg(double rad) { return rad * 180.0 / std::numbers::pi; }

/// Half-wavelength ULA response, entry k = exp(j pi k sin(theta)) / sqrt(n).
template <typename Real>
ComplexVector<Real> steering(Real theta, Index n) {
  if (n < 1) throw DimensionError("steering: antenna count must be positive");
  const Real s = std::sin(theta);
  const Real scale = Real(1) / std::sqrt(static_cast<Real>(n));
  ComplexVector<Real> a(n);
  for (Index k = 0; k < n; ++k)
    a(k) = std::polar(scale, std::numbers::pi_v<Real> * static_cast<Real>(k) * s);
  return a;
}

/// Transmit beampattern (1/N_s) ||F^H a(theta)||^2, N_s = F.cols().
template <typename Derived>
double beampattern(const Eigen::MatrixBase<Derived>& f, double theta) {
  const CVector a = steering(theta, f.rows());
  return (f.adjoint() * a).squaredNorm() / static_cast<double>(f.cols());
}

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

/// Union of disjoint angular intervals inside [-pi/2, pi/2] with a quadrature step.
class AngularRegion {
 public:
  AngularRegion(std::vector<Interval> intervals, double grid_step);

  const std::vector<Interval>& intervals() const { return intervals_; }
  double grid_step() const { return grid_step_; }
  double measure() const;
  bool contains(double theta) const;

 private:
  std::vector<Interval> intervals_;
  double grid_step_;
};

/// Composite midpoint rule for the integral of a(theta) a(theta)^H over the region.
CMatrix region_integral(const AngularRegion& region, Index n_tx);

/// Geometry used to derive mainlobe/sidelobe regions from target angles.
struct SceneGeometry {
  std::vector<double> targets_rad{deg2rad(-30.0), deg2rad(30.0)};
  double mainlobe_halfwidth_rad = deg2rad(5.0);
  double guard_rad = deg2rad(2.0);
  double grid_step_rad = deg2rad(0.5);
};

class RadarScene {
 public:
  RadarScene(AngularRegion mainlobe, AngularRegion sidelobe, Index n_tx);

  /// Mainlobe = each target +- halfwidth; sidelobe = rest of the domain minus guards.
  static RadarScene from_targets(const SceneGeometry& geometry, Index n_tx);

  const AngularRegion& mainlobe() const { return mainlobe_; }
  const AngularRegion& sidelobe() const { return sidelobe_; }
  const CMatrix& block_m() const { return block_m_; }
  const CMatrix& block_s() const { return block_s_; }
  Index n_tx() const { return block_m_.rows(); }

 private:
  AngularRegion mainlobe_;
  AngularRegion sidelobe_;
  CMatrix block_m_;
  CMatrix block_s_;
};

/// Integrated sidelobe-to-mainlobe ratio tr(F^H A_s F) / tr(F^H A_m F).
double ismr(const CMatrix& f, const RadarScene& scene);

/// Radar-only reference: principal generalized eigenvector of (A_m, A_s + loading I),
/// replicated across the N_s columns and scaled to ||F||_F^2 = N_s. Loading
/// defaults to 1e-8 tr(A_s) / N_t.
CMatrix radar_reference(const RadarScene& scene, const SystemConfig& cfg,
                        std::optional<double> loading = std::nullopt);

}  // namespace dfrc
