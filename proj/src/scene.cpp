// SPDX-License-Identifier: Apache-2.0
#include "dfrc/scene.hpp"

#include <algorithm>
#include <string>

#include "dfrc/numerics.hpp"

namespace dfrc {

namespace {

std::vector<Interval> merge(std::vector<Interval> v) {
  std::sort(v.begin(), v.end(), [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  std::vector<Interval> out;
  for (const Interval& iv : v) {
    if (!out.empty() && iv.lo <= out.back().hi)
      out.back().hi = std::max(out.back().hi, iv.hi);
    else
      out.push_back(iv);
  }
  return out;
}

Interval clip(Interval iv) { return {std::max(iv.lo, -kHalfPi), std::min(iv.hi, kHalfPi)}; }

}  // namespace

AngularRegion::AngularRegion(std::vector<Interval> intervals, double grid_step)
    : intervals_(std::move(intervals)), grid_step_(grid_step) {
  if (!(grid_step_ > 0.0)) throw ConfigError("angular region: grid_step must be positive");
  if (intervals_.empty()) throw ConfigError("angular region: no intervals");
  constexpr double slack = 1e-12;
  std::sort(intervals_.begin(), intervals_.end(),
            [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  for (std::size_t i = 0; i < intervals_.size(); ++i) {
    const Interval& iv = intervals_[i];
    if (!(iv.lo < iv.hi)) throw ConfigError("angular region: interval with lo >= hi");
    if (iv.lo < -kHalfPi - slack || iv.hi > kHalfPi + slack)
      throw ConfigError("angular region: interval outside [-pi/2, pi/2]");
    if (i > 0 && iv.lo < intervals_[i - 1].hi)
      throw ConfigError("angular region: overlapping intervals");
  }
}

double AngularRegion::measure() const {
  double m = 0.0;
  for (const Interval& iv : intervals_) m += iv.hi - iv.lo;
  return m;
}

bool AngularRegion::contains(double theta) const {
  return std::any_of(intervals_.begin(), intervals_.end(),
                     [&](const Interval& iv) { return theta >= iv.lo && theta <= iv.hi; });
}

CMatrix region_integral(const AngularRegion& region, Index n_tx) {
  CMatrix acc = CMatrix::Zero(n_tx, n_tx);
  for (const Interval& iv : region.intervals()) {
    const double width = iv.hi - iv.lo;
    const auto cells = std::max<long>(1, std::lround(width / region.grid_step()));
    const double h = width / static_cast<double>(cells);
    for (long c = 0; c < cells; ++c) {
      const CVector a = steering(iv.lo + (static_cast<double>(c) + 0.5) * h, n_tx);
      acc.noalias() += h * (a * a.adjoint());
    }
  }
  return 0.5 * (acc + acc.adjoint());
}

RadarScene::RadarScene(AngularRegion mainlobe, AngularRegion sidelobe, Index n_tx)
    : mainlobe_(std::move(mainlobe)),
      sidelobe_(std::move(sidelobe)),
      block_m_(region_integral(mainlobe_, n_tx)),
      block_s_(region_integral(sidelobe_, n_tx)) {}

RadarScene RadarScene::from_targets(const SceneGeometry& g, Index n_tx) {
  if (g.targets_rad.empty()) throw ConfigError("scene: no target angles");
  if (!(g.mainlobe_halfwidth_rad > 0.0)) throw ConfigError("scene: mainlobe half-width must be positive");
  if (g.guard_rad < 0.0) throw ConfigError("scene: guard band must be non-negative");

  std::vector<Interval> main;
  std::vector<Interval> excluded;
  for (double t : g.targets_rad) {
    if (t < -kHalfPi || t > kHalfPi) throw ConfigError("scene: target angle outside [-90, 90] degrees");
    main.push_back(clip({t - g.mainlobe_halfwidth_rad, t + g.mainlobe_halfwidth_rad}));
    excluded.push_back(clip({t - g.mainlobe_halfwidth_rad - g.guard_rad, t + g.mainlobe_halfwidth_rad + g.guard_rad}));
  }
  main = merge(std::move(main));
  excluded = merge(std::move(excluded));

  std::vector<Interval> side;
  double cursor = -kHalfPi;
  for (const Interval& ex : excluded) {
    if (ex.lo > cursor) side.push_back({cursor, ex.lo});
    cursor = std::max(cursor, ex.hi);
  }
  if (cursor < kHalfPi) side.push_back({cursor, kHalfPi});
  if (side.empty()) throw ConfigError("scene: mainlobe and guards cover the whole domain");

  return RadarScene(AngularRegion(std::move(main), g.grid_step_rad),
                    AngularRegion(std::move(side), g.grid_step_rad), n_tx);
}

double ismr(const CMatrix& f, const RadarScene& scene) {
  if (f.rows() != scene.n_tx()) throw DimensionError("ismr: precoder rows do not match the array size");
  const double side = real_inner(f, scene.block_s() * f);
  const double main = real_inner(f, scene.block_m() * f);
  const double power = f.squaredNorm() * (scene.mainlobe().measure() + scene.sidelobe().measure());
  if (!(main > 1e-15 * power)) throw NumericalError("ismr: no power inside the mainlobe region");
  return side / main;
}

CMatrix radar_reference(const RadarScene& scene, const SystemConfig& cfg, std::optional<double> loading) {
  const Index n = scene.n_tx();
  if (cfg.n_tx != n) throw DimensionError("radar_reference: scene and system disagree on n_tx");
  const double mu = loading.value_or(1e-8 * scene.block_s().trace().real() / static_cast<double>(n));
  if (mu < 0.0) throw ConfigError("radar_reference: loading must be non-negative");
  const CMatrix loaded = scene.block_s() + mu * CMatrix::Identity(n, n);
  const PrincipalPair p = generalized_eig_principal(scene.block_m(), loaded);
  CMatrix f = p.vector * CVector::Ones(cfg.n_streams).transpose();
  f *= std::sqrt(static_cast<double>(cfg.n_streams)) / f.norm();
  return f;
}

}  // namespace dfrc
