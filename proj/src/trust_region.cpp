// SPDX-License-Identifier: Apache-2.0
#include "dfrc/trust_region.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <memory>
#include <string>

#include "dfrc/rng.hpp"

namespace dfrc {

namespace {

// Shares the analog-phase stream with the fully-connected solver so that both
// structures start from the same phases for a given seed.
constexpr std::uint64_t kInitStream = 2;
constexpr std::uint64_t kBasebandStream = 3;

double bb_radius(Index n_tx, Index n_rf, Index n_streams) {
  return std::sqrt(static_cast<double>(n_streams) * static_cast<double>(n_rf) / static_cast<double>(n_tx));
}

}  // namespace

void TrConfig::validate() const {
  if (!(delta_bar > 0.0) || !std::isfinite(delta_bar)) throw ConfigError("trust_region.delta_bar must be positive");
  if (!(delta0 > 0.0 && delta0 < delta_bar)) throw ConfigError("trust_region.delta0 must lie in (0, delta_bar)");
  if (!(rho_prime >= 0.0 && rho_prime < 0.25)) throw ConfigError("trust_region.rho_prime must lie in [0, 1/4)");
  if (k_max < 0) throw ConfigError("trust_region.k_max must be non-negative");
  if (!(grad_tol > 0.0)) throw ConfigError("trust_region.grad_tol must be positive");
  if (!(min_step >= 0.0)) throw ConfigError("trust_region.min_step must be non-negative");
  if (tcg.max_inner < 0) throw ConfigError("trust_region.tcg.max_inner must be non-negative");
  if (!(tcg.kappa > 0.0 && tcg.kappa < 1.0)) throw ConfigError("trust_region.tcg.kappa must lie in (0, 1)");
  if (!(tcg.theta > 0.0)) throw ConfigError("trust_region.tcg.theta must be positive");
}

TrConfig TrConfig::resolved(Index manifold_dim) const {
  TrConfig c = *this;
  if (c.delta_bar == 0.0) c.delta_bar = std::sqrt(static_cast<double>(manifold_dim));
  if (c.delta0 == 0.0) c.delta0 = c.delta_bar / 8.0;
  if (c.tcg.max_inner == 0) c.tcg.max_inner = static_cast<int>(manifold_dim);
  c.validate();
  return c;
}

Index product_manifold_dim(Index n_tx, Index n_rf, Index n_streams) {
  return n_tx * n_rf + 2 * n_rf * n_streams - 1;
}

double model_value(const PartialPoint& pt, const TangentPair& z, const ReferencePair& refs, double phi,
                   const ConnectionMask& mask) {
  if (!is_circle_tangent(pt.f_ps.matrix(), z.ps) || !is_sphere_tangent(pt.f_bb.matrix(), z.bb))
    throw NumericalError("model_value: direction is not tangent");
  return LocalModel(pt, mask, refs, phi).model(z);
}

TcgResult<TangentPair> tcg_solve(const LocalModel& model, double delta, const TcgConfig& cfg) {
  if (!(delta > 0.0)) throw NumericalError("tcg: radius must be positive");
  const TangentPair& g = model.rgrad();
  int max_inner = cfg.max_inner;
  if (max_inner == 0)
    max_inner = static_cast<int>(product_manifold_dim(g.ps.rows(), g.ps.cols(), g.bb.cols()));
  return truncated_cg(
      g, [&](const TangentPair& v) { return model.hess(v); },
      [](const TangentPair& a, const TangentPair& b) { return product_inner(a, b); }, delta, cfg, max_inner);
}

TangentPair tcg_subproblem(const PartialPoint& pt, const ReferencePair& refs, double phi,
                           const ConnectionMask& mask, double delta, const TcgConfig& cfg) {
  return tcg_solve(LocalModel(pt, mask, refs, phi), delta, cfg).z;
}

double rho_value(double j_old, double j_new, double model_decrease) {
  const double num = j_old - j_new;
  const double eps = 1e-15 * std::abs(j_old);
  if (std::abs(model_decrease) <= eps) {
    if (std::abs(num) <= eps) return 1.0;
    return -std::numeric_limits<double>::infinity();
  }
  return num / model_decrease;
}

double rho_ratio(const PartialPoint& pt, const PartialPoint& candidate, const TangentPair& z,
                 const ReferencePair& refs, double phi, const ConnectionMask& mask) {
  const LocalModel m(pt, mask, refs, phi);
  const double decrease = m.value() - m.model(z);
  return rho_value(m.value(), weighted_objective(candidate, mask, refs, phi), decrease);
}

PartialPoint accept_step(const TrState& state, const PartialPoint& candidate, double rho, double rho_prime) {
  return rho > rho_prime ? candidate : state.point;
}

double radius_update(double delta, double rho, double step_norm, double delta_bar) {
  if (rho < 0.25) return delta / 4.0;
  if (rho > 0.75 && std::abs(step_norm - delta) <= 1e-10 * delta) return std::min(2.0 * delta, delta_bar);
  return delta;
}

PartialPoint retract(const PartialPoint& pt, const TangentPair& z) {
  return {circle_retract(pt.f_ps, z.ps, 1.0), sphere_retract(pt.f_bb, z.bb, 1.0)};
}

PartialPoint rpmtr_init(Index n_tx, Index n_rf, Index n_streams, std::uint64_t seed) {
  if (n_tx < 1 || n_rf < 1 || n_streams < 1) throw DimensionError("rpmtr_init: dimensions must be positive");
  Rng phases = Rng::stream(seed, kInitStream);
  Rng gauss = Rng::stream(seed, kBasebandStream);
  return {CirclePoint(phases.unit_phase(n_tx, n_rf)),
          SpherePoint::normalized(gauss.complex_normal(n_rf, n_streams), bb_radius(n_tx, n_rf, n_streams))};
}

SolveResult rpmtr_solve(const ReferencePair& refs, double phi, const ConnectionMask& mask, const TrConfig& cfg,
                        const PartialPoint& init) {
  const auto t_start = std::chrono::steady_clock::now();
  refs.validate();
  TradeoffConfig{phi}.validate();
  const Index n_tx = refs.n_tx(), n_rf = mask.n_rf(), n_s = refs.n_streams();
  require_same_shape(init.f_ps.matrix(), mask.matrix(), "rpmtr_solve");
  if (init.f_bb.matrix().rows() != n_rf || init.f_bb.matrix().cols() != n_s)
    throw DimensionError("rpmtr_solve: F_BB shape inconsistent with mask and references");
  const TrConfig c = cfg.resolved(product_manifold_dim(n_tx, n_rf, n_s));

  TrState state{init, c.delta0, 0.0, 0};
  auto model = std::make_unique<LocalModel>(state.point, mask, refs, phi);
  double gnorm = product_norm(model->rgrad());

  SolveResult res;
  SolverReport& rep = res.report;
  rep.status = "max_iterations";
  for (int k = 1; k <= c.k_max; ++k) {
    if (gnorm <= c.grad_tol) break;
    try {
      const TcgResult<TangentPair> t = tcg_solve(*model, state.delta, c.tcg);
      const double step = product_norm(t.z);
      const PartialPoint cand = retract(state.point, t.z);
      const double j_new = weighted_objective(cand, mask, refs, phi);
      const double decrease = -(product_inner(model->rgrad(), t.z) + 0.5 * product_inner(t.hz, t.z));
      state.rho = rho_value(model->value(), j_new, decrease);
      const bool accepted = state.rho > c.rho_prime;
      state.point = accept_step(state, cand, state.rho, c.rho_prime);
      state.delta = radius_update(state.delta, state.rho, step, c.delta_bar);
      state.iter = k;
      if (accepted) {
        model = std::make_unique<LocalModel>(state.point, mask, refs, phi);
        gnorm = product_norm(model->rgrad());
      }
      rep.objective_trace.push_back(model->value());
      rep.grad_norm_trace.push_back(gnorm);
      rep.iterations = k;
      if (accepted && step < c.min_step) {
        rep.status = "small_step";
        break;
      }
      if (state.delta < 1e-12 * c.delta_bar) {
        rep.status = "radius_collapsed";
        break;
      }
    } catch (const Error& e) {
      throw NumericalError("rpmtr_solve: iteration " + std::to_string(k) + ": " + e.what());
    }
  }
  if (gnorm <= c.grad_tol) rep.status = "converged";

  const CMatrix f_rf = mask.apply(state.point.f_ps.matrix());
  res.beamformer = HybridBeamformer{Structure::partially_connected, f_rf, state.point.f_bb.matrix()};
  rep.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t_start).count();
  return res;
}

}  // namespace dfrc
