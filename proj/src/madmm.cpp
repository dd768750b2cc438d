// SPDX-License-Identifier: Apache-2.0
#include "dfrc/madmm.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <string>

#include "dfrc/numerics.hpp"
#include "dfrc/rng.hpp"

namespace dfrc {

namespace {

// Stream 1 draws channels; solver initialization uses its own stream so that
// changing the solver never perturbs the channel realization.
constexpr std::uint64_t kInitStream = 2;

bool in_open_unit(double x) { return x > 0.0 && x < 1.0; }

struct LineSearch {
  bool ok = false;
  double step = 0.0;
  CMatrix point;
  double value = 0.0;
};

LineSearch armijo(const CMatrix& x, double g0, const CMatrix& dir, double slope, double t0,
                  const CMatrix& f_target, const CMatrix& f_bb, const ArmijoConfig& cfg) {
  LineSearch ls;
  double t = t0;
  for (int b = 0; b <= cfg.max_backtracks; ++b, t *= cfg.shrink) {
    CMatrix cand = circle_retract(x, dir, t);
    const double g = (f_target - cand * f_bb).squaredNorm();
    if (g <= g0 + cfg.sufficient_decrease * t * slope) {
      ls.ok = true;
      ls.step = t;
      ls.point = std::move(cand);
      ls.value = g;
      return ls;
    }
  }
  return ls;
}

// Newton step along dir: -slope / <dir, Hess dir>, with the circle's Riemannian
// Hessian. The Weingarten term matters here: on the circle ||X F_BB||^2 is not
// the quadratic it appears to be, so the Euclidean curvature alone misjudges
// the step badly. Returns 0 if the curvature is not positive.
double newton_step(const CMatrix& x, const CMatrix& egrad, const CMatrix& dir, double slope, const CMatrix& f_bb) {
  double curv = 2.0 * (dir * f_bb).squaredNorm();
  curv -= ((egrad.array() * x.array().conjugate()).real() * dir.array().abs2()).sum();
  if (!(curv > 0.0)) return 0.0;
  return -slope / curv;
}

}  // namespace

void RcgConfig::validate() const {
  if (k_max < 0) throw ConfigError("rcg.k_max must be non-negative");
  if (!(grad_tol > 0.0)) throw ConfigError("rcg.grad_tol must be positive");
  if (!(armijo.initial_step > 0.0)) throw ConfigError("rcg.armijo.initial_step must be positive");
  if (!in_open_unit(armijo.shrink)) throw ConfigError("rcg.armijo.shrink must lie in (0, 1)");
  if (!in_open_unit(armijo.sufficient_decrease))
    throw ConfigError("rcg.armijo.sufficient_decrease must lie in (0, 1)");
  if (armijo.max_backtracks < 0) throw ConfigError("rcg.armijo.max_backtracks must be non-negative");
}

void MadmmConfig::validate() const {
  if (!(alpha0 > 0.0) || !std::isfinite(alpha0)) throw ConfigError("madmm.alpha0 must be positive");
  if (!(beta > 1.0)) throw ConfigError("madmm.beta must exceed 1");
  if (!(gamma > 1.0)) throw ConfigError("madmm.gamma must exceed 1");
  if (n_max < 1) throw ConfigError("madmm.n_max must be positive");
  if (!(primal_tol > 0.0)) throw ConfigError("madmm.primal_tol must be positive");
  rcg.validate();
}

RcgResult rcg_solve(const CMatrix& f_target, const CMatrix& f_bb, const CirclePoint& init, const RcgConfig& cfg) {
  cfg.validate();
  if (init.cols() != f_bb.rows() || init.rows() != f_target.rows() || f_bb.cols() != f_target.cols())
    throw DimensionError("rcg_solve: shapes are not conformable");

  RcgResult out{init, {}};
  RcgTrace& trace = out.trace;
  CMatrix x = init.matrix();
  SubproblemEval ev = madmm_sub_value_grad(x, f_target, f_bb);
  CMatrix grad = circle_project(x, ev.egrad);
  double gnorm = grad.norm();
  trace.objective.push_back(ev.value);
  trace.grad_norm.push_back(gnorm);

  CMatrix dir = -grad;
  trace.status = RcgStatus::max_iterations;
  int k = 0;
  for (; k < cfg.k_max; ++k) {
    if (gnorm <= cfg.grad_tol) break;
    double slope = real_inner(grad, dir);
    if (!(slope < 0.0)) {
      dir = -grad;
      slope = -gnorm * gnorm;
    }
    double t0 = cfg.armijo.initial_step;
    if (cfg.armijo.quadratic_hint) {
      const double tq = newton_step(x, ev.egrad, dir, slope, f_bb);
      if (tq > 0.0 && std::isfinite(tq)) t0 = tq;
    }
    LineSearch ls = armijo(x, ev.value, dir, slope, t0, f_target, f_bb, cfg.armijo);
    if (!ls.ok) {
      // Fall back to steepest descent before giving up.
      dir = -grad;
      slope = -gnorm * gnorm;
      ls = armijo(x, ev.value, dir, slope, cfg.armijo.initial_step, f_target, f_bb, cfg.armijo);
      if (!ls.ok) {
        trace.status = RcgStatus::line_search_failed;
        break;
      }
    }

    CMatrix x_new = std::move(ls.point);
    SubproblemEval ev_new = madmm_sub_value_grad(x_new, f_target, f_bb);
    CMatrix grad_new = circle_project(x_new, ev_new.egrad);
    // PR+ with the previous gradient and direction transported by projection.
    const CMatrix grad_old_t = circle_project(x_new, grad);
    const double denom = gnorm * gnorm;
    const double sigma = std::max(0.0, real_inner(grad_new, grad_new - grad_old_t) / denom);
    dir = -grad_new + sigma * circle_project(x_new, dir);

    x = std::move(x_new);
    ev = std::move(ev_new);
    grad = std::move(grad_new);
    gnorm = grad.norm();
    trace.objective.push_back(ev.value);
    trace.grad_norm.push_back(gnorm);
  }
  if (trace.status != RcgStatus::line_search_failed && gnorm <= cfg.grad_tol) trace.status = RcgStatus::converged;
  trace.iterations = k;
  out.f_rf = CirclePoint::normalized(x);
  return out;
}

MadmmState MadmmState::from_analog(const ReferencePair& refs, const CirclePoint& f_rf, double alpha0) {
  refs.validate();
  if (f_rf.rows() != refs.n_tx()) throw DimensionError("MadmmState: F_RF rows must equal n_tx");
  MadmmState s{CMatrix(), f_rf, CMatrix(), CMatrix(), alpha0, 0};
  s.f_bb = fbb_update(f_rf.matrix(), refs.f_com);
  s.f = f_rf.matrix() * s.f_bb;
  const double n = s.f.norm();
  if (!(n > 0.0)) throw NumericalError("MadmmState: initial hybrid precoder is zero");
  s.f *= std::sqrt(static_cast<double>(refs.n_streams())) / n;
  s.lambda = CMatrix::Zero(refs.n_tx(), refs.n_streams());
  return s;
}

MadmmState MadmmState::initial(const ReferencePair& refs, Index n_rf, std::uint64_t seed, double alpha0) {
  if (n_rf < 1) throw DimensionError("MadmmState: n_rf must be positive");
  Rng rng = Rng::stream(seed, kInitStream);
  return from_analog(refs, CirclePoint(rng.unit_phase(refs.n_tx(), n_rf)), alpha0);
}

CMatrix f_update(const MadmmState& state, const ReferencePair& refs, double phi) {
  const CMatrix hybrid = state.f_rf.matrix() * state.f_bb;
  require_same_shape(hybrid, refs.f_com, "f_update");
  require_same_shape(state.lambda, refs.f_com, "f_update");
  const CMatrix fbar =
      2.0 * phi * refs.f_com + 2.0 * (1.0 - phi) * refs.f_rad - state.lambda + state.alpha * hybrid;
  const double n = fbar.norm();
  const double scale = 2.0 * refs.f_com.norm() + 2.0 * refs.f_rad.norm() + state.lambda.norm() +
                       std::abs(state.alpha) * hybrid.norm();
  if (!(n > 1e-14 * scale) || !std::isfinite(n))
    throw NumericalError("f_update: degenerate Fbar (norm " + std::to_string(n) + ")");
  return (std::sqrt(static_cast<double>(refs.n_streams())) / n) * fbar;
}

CMatrix fbb_update(const CMatrix& f_rf, const CMatrix& f_target) {
  if (f_rf.rows() != f_target.rows()) throw DimensionError("fbb_update: row mismatch");
  CMatrix g = f_rf.adjoint() * f_rf;
  g = (g + g.adjoint()).eval() * 0.5;
  const HermitianEig eig = hermitian_eig(g);
  const double lmax = eig.values(eig.values.size() - 1);
  const double lmin = eig.values(0);
  if (!(lmax > 0.0)) throw NumericalError("fbb_update: F_RF is zero");
  if (lmin < lmax * 1e-12) g.diagonal().array() += lmax * 1e-12;
  try {
    return solve_hpd(g, f_rf.adjoint() * f_target);
  } catch (const NotPositiveDefinite& e) {
    throw NumericalError(std::string("fbb_update: singular normal matrix: ") + e.what());
  }
}

double penalty_update(double alpha, double primal_res, double dual_delta, double beta, double gamma) {
  if (!(dual_delta > 0.0)) return alpha;
  const double r = primal_res / dual_delta;
  if (r > gamma) return beta * alpha;
  if (r < 1.0 / gamma) return alpha / beta;
  return alpha;
}

SolveResult madmm_solve(const ReferencePair& refs, double phi, const MadmmConfig& cfg, MadmmState state) {
  const auto t_start = std::chrono::steady_clock::now();
  cfg.validate();
  TradeoffConfig{phi}.validate();
  refs.validate();
  require_same_shape(state.f, refs.f_com, "madmm_solve");
  require_same_shape(state.lambda, refs.f_com, "madmm_solve");
  if (state.f_bb.rows() != state.f_rf.cols() || state.f_bb.cols() != refs.n_streams())
    throw DimensionError("madmm_solve: F_BB shape inconsistent with F_RF and references");

  const double n_s = static_cast<double>(refs.n_streams());
  SolveResult res;
  SolverReport& rep = res.report;
  rep.status = "max_iterations";

  for (int n = 1; n <= cfg.n_max; ++n) {
    try {
      const CMatrix f_prev = state.f;
      state.f = f_update(state, refs, phi);
      const CMatrix target = state.f + state.lambda / state.alpha;
      RcgResult rcg = rcg_solve(target, state.f_bb, state.f_rf, cfg.rcg);
      state.f_rf = std::move(rcg.f_rf);
      state.f_bb = fbb_update(state.f_rf.matrix(), target);

      const CMatrix hybrid = state.f_rf.matrix() * state.f_bb;
      const CMatrix primal = state.f - hybrid;
      const double primal_norm = primal.norm();
      const CMatrix dlambda = state.alpha * primal;
      state.lambda += dlambda;
      state.alpha = penalty_update(state.alpha, primal_norm * primal_norm, dlambda.norm(), cfg.beta, cfg.gamma);
      state.iter = n;

      const double hn = hybrid.norm();
      const double obj = hn > 0.0 ? weighted_objective((std::sqrt(n_s) / hn) * hybrid, refs, phi)
                                  : std::numeric_limits<double>::quiet_NaN();
      rep.objective_trace.push_back(obj);
      rep.primal_residual_trace.push_back(primal_norm);
      rep.grad_norm_trace.push_back(rcg.trace.grad_norm.back());
      rep.iterations = n;

      if (primal_norm < cfg.primal_tol && (state.f - f_prev).norm() < cfg.primal_tol) {
        rep.status = "converged";
        break;
      }
    } catch (const Error& e) {
      throw NumericalError("madmm_solve: iteration " + std::to_string(n) + ": " + e.what());
    }
  }

  CMatrix f_bb = state.f_bb;
  const double hn = (state.f_rf.matrix() * f_bb).norm();
  if (!(hn > 0.0)) throw NumericalError("madmm_solve: final hybrid precoder is zero");
  f_bb *= std::sqrt(n_s) / hn;
  res.beamformer = HybridBeamformer{Structure::fully_connected, state.f_rf.matrix(), std::move(f_bb)};
  rep.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t_start).count();
  return res;
}

}  // namespace dfrc
