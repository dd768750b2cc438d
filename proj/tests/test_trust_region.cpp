// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <limits>

#include "dfrc/madmm.hpp"
#include "dfrc/trust_region.hpp"
#include "oracles.hpp"

using namespace dfrc;

namespace {

using Vec = Eigen::VectorXd;

auto dot = [](const Vec& a, const Vec& b) { return a.dot(b); };

Eigen::MatrixXd spd(Rng& rng, int n, double shift) {
  Eigen::MatrixXd a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = rng.uniform(-1.0, 1.0);
  return a * a.transpose() + shift * Eigen::MatrixXd::Identity(n, n);
}

Vec random_vec(Rng& rng, int n) {
  Vec v(n);
  for (int i = 0; i < n; ++i) v(i) = rng.uniform(-1.0, 1.0);
  return v;
}

PartialPoint point_from(const HybridBeamformer& b, const ConnectionMask& mask) {
  // Off-block entries are irrelevant to the objective; fill them with ones.
  CMatrix ps = b.f_rf;
  for (Index i = 0; i < ps.rows(); ++i)
    for (Index j = 0; j < ps.cols(); ++j)
      if (mask.matrix()(i, j) == 0.0) ps(i, j) = 1.0;
  return {CirclePoint::normalized(ps), SpherePoint::normalized(b.f_bb, b.f_bb.norm())};
}

}  // namespace

TEST_CASE("truncated CG returns the Newton step when it lies inside the region") {
  Rng rng(1);
  const Eigen::MatrixXd h = spd(rng, 6, 1.0);
  const Vec g = 0.05 * random_vec(rng, 6);
  const Vec newton = -h.ldlt().solve(g);
  const TcgConfig cfg;
  const auto r = truncated_cg(g, [&](const Vec& v) -> Vec { return h * v; }, dot, 10.0 * newton.norm(), cfg, 6);
  CHECK(r.stop == TcgStop::residual);
  const double tol = g.norm() * std::min(cfg.kappa, std::pow(g.norm(), cfg.theta));
  CHECK((h * r.z + g).norm() <= tol);
  CHECK((r.z - newton).norm() <= tol / h.selfadjointView<Eigen::Lower>().eigenvalues().minCoeff());
  CHECK((r.hz - h * r.z).norm() <= 1e-12);
}

TEST_CASE("truncated CG stops on the boundary for small radii and negative curvature") {
  Rng rng(2);
  const Eigen::MatrixXd h = spd(rng, 5, 0.5);
  const Vec g = 10.0 * random_vec(rng, 5);
  const auto r = truncated_cg(g, [&](const Vec& v) -> Vec { return h * v; }, dot, 1e-3, TcgConfig{}, 5);
  CHECK(r.stop == TcgStop::boundary);
  CHECK(std::abs(r.z.norm() - 1e-3) <= 1e-10 * 1e-3);

  const Eigen::MatrixXd neg = -h;
  const auto n = truncated_cg(g, [&](const Vec& v) -> Vec { return neg * v; }, dot, 0.7, TcgConfig{}, 5);
  CHECK(n.stop == TcgStop::negative_curvature);
  CHECK(n.z.norm() == doctest::Approx(0.7));
  CHECK(g.dot(n.z) < 0.0);

  const auto z = truncated_cg(Vec::Zero(5).eval(), [&](const Vec& v) -> Vec { return h * v; }, dot, 1.0, TcgConfig{}, 5);
  CHECK(z.stop == TcgStop::zero_gradient);
  CHECK(z.z.norm() == 0.0);
}

TEST_CASE("rho is one on an exactly quadratic function") {
  Rng rng(3);
  const Eigen::MatrixXd h = spd(rng, 8, 0.2);
  const Vec b = random_vec(rng, 8), x = random_vec(rng, 8);
  auto q = [&](const Vec& y) { return 0.5 * y.dot(h * y) + b.dot(y); };
  const Vec g = h * x + b;
  for (double delta : {0.01, 0.3, 100.0}) {
    const auto r = truncated_cg(g, [&](const Vec& v) -> Vec { return h * v; }, dot, delta, TcgConfig{}, 8);
    const double dec = -(g.dot(r.z) + 0.5 * r.hz.dot(r.z));
    const double rho = rho_value(q(x), q(x + r.z), dec);
    CHECK(std::abs(rho - 1.0) <= 1e-9);
    // With rho' = 0 the first step is accepted.
    CHECK(rho > 0.0);
  }
}

TEST_CASE("rho guard, acceptance and radius rules") {
  CHECK(rho_value(5.0, 5.0, 0.0) == 1.0);
  CHECK(rho_value(5.0, 4.0, 0.0) == -std::numeric_limits<double>::infinity());
  CHECK(rho_value(5.0, 6.0, 0.5) < 0.0);
  CHECK(rho_value(0.0, 0.0, 0.0) == 1.0);

  CHECK(radius_update(1.0, 0.1, 0.5, 8.0) == 0.25);
  CHECK(radius_update(1.0, 0.9, 1.0, 8.0) == 2.0);
  CHECK(radius_update(5.0, 0.9, 5.0, 8.0) == 8.0);
  CHECK(radius_update(1.0, 0.9, 0.5, 8.0) == 1.0);
  CHECK(radius_update(1.0, 0.5, 1.0, 8.0) == 1.0);

  const auto prob = oracle::make_problem(4, 2, 2, 2, 0);
  const PartialPoint a = rpmtr_init(4, 2, 2, 1), b = rpmtr_init(4, 2, 2, 2);
  const TrState st{a, 1.0, 0.0, 0};
  CHECK((accept_step(st, b, 0.3, 0.1).f_bb.matrix() - b.f_bb.matrix()).norm() == 0.0);
  CHECK((accept_step(st, b, 0.05, 0.1).f_bb.matrix() - a.f_bb.matrix()).norm() == 0.0);
  CHECK((accept_step(st, b, 0.1, 0.1).f_bb.matrix() - a.f_bb.matrix()).norm() == 0.0);
}

TEST_CASE("model value and subproblem on the product manifold") {
  const auto prob = oracle::make_problem(8, 2, 4, 2, 4);
  const ConnectionMask mask = ConnectionMask::partially_connected(8, 4);
  const PartialPoint pt = rpmtr_init(8, 4, 2, 5);
  const LocalModel m(pt, mask, prob.refs, 0.5);
  const TangentPair zero{CMatrix::Zero(8, 4), CMatrix::Zero(4, 2)};
  CHECK(model_value(pt, zero, prob.refs, 0.5, mask) == doctest::Approx(m.value()));
  Rng rng(9);
  CHECK_THROWS_AS(model_value(pt, TangentPair{rng.complex_normal(8, 4), rng.complex_normal(4, 2)}, prob.refs, 0.5,
                              mask),
                  NumericalError);

  // Cauchy decrease for a range of radii.
  const TangentPair& g = m.rgrad();
  const double gn = product_norm(g);
  const double curv = product_inner(g, m.hess(g));
  for (double delta : {1e-3, 1e-2, 0.1, 1.0, 10.0}) {
    const TangentPair z = tcg_subproblem(pt, prob.refs, 0.5, mask, delta, TcgConfig{});
    CHECK(product_norm(z) <= delta * (1.0 + 1e-12));
    double t = delta / gn;
    if (curv > 0.0) t = std::min(t, gn * gn / curv);
    const TangentPair zc = -t * g;
    CHECK(m.value() - m.model(z) >= m.value() - m.model(zc) - 1e-12);
  }
  // Steep gradient with a tiny radius lands on the boundary.
  const TangentPair zb = tcg_subproblem(pt, prob.refs, 0.5, mask, 1e-6, TcgConfig{});
  CHECK(std::abs(product_norm(zb) - 1e-6) <= 1e-10 * 1e-6);

  const double rho0 = rho_ratio(pt, pt, zero, prob.refs, 0.5, mask);
  CHECK(rho0 == 1.0);
}

TEST_CASE("trust-region configuration") {
  const TrConfig c = TrConfig{}.resolved(100);
  CHECK(c.delta_bar == doctest::Approx(10.0));
  CHECK(c.delta0 == doctest::Approx(1.25));
  TrConfig bad;
  bad.delta_bar = 1.0;
  bad.delta0 = 2.0;
  CHECK_THROWS_AS(bad.resolved(10), ConfigError);
  bad = TrConfig{};
  bad.rho_prime = 0.25;
  CHECK_THROWS_AS(bad.resolved(10), ConfigError);
  CHECK(product_manifold_dim(32, 16, 6) == 32 * 16 + 2 * 16 * 6 - 1);
}

TEST_CASE("rpmtr_init is seeded, feasible and shares phases with the MADMM start") {
  const PartialPoint a = rpmtr_init(32, 16, 6, 7), b = rpmtr_init(32, 16, 6, 7);
  CHECK((a.f_ps.matrix() - b.f_ps.matrix()).norm() == 0.0);
  CHECK(a.f_bb.matrix().squaredNorm() == doctest::Approx(6.0 * 16.0 / 32.0));
  const auto prob = oracle::make_problem(32, 6, 16, 6, 0);
  const MadmmState m = MadmmState::initial(prob.refs, 16, 7, 1.0);
  CHECK((m.f_rf.matrix() - a.f_ps.matrix()).norm() == 0.0);
}

TEST_CASE("rpmtr on the default 32-antenna instance") {
  const auto prob = oracle::make_problem(32, 6, 16, 6, 0);
  const ConnectionMask mask = ConnectionMask::partially_connected(32, 16);
  const SolveResult r = rpmtr_solve(prob.refs, 0.5, mask, TrConfig{}, rpmtr_init(32, 16, 6, 0));
  const auto& gn = r.report.grad_norm_trace;
  REQUIRE_FALSE(gn.empty());
  CHECK(gn.back() <= 1e-6);
  CHECK(r.report.iterations <= 50);
  CHECK(r.report.status == "converged");
  const auto& obj = r.report.objective_trace;
  for (std::size_t k = 1; k < obj.size(); ++k) CHECK(obj[k] <= obj[k - 1]);
  CHECK(validate(r.beamformer).empty());
  CHECK(r.beamformer.f_bb.squaredNorm() == doctest::Approx(3.0).epsilon(1e-12));

  // Restarting from the solution stops immediately.
  const SolveResult again = rpmtr_solve(prob.refs, 0.5, mask, TrConfig{}, point_from(r.beamformer, mask));
  CHECK(again.report.iterations == 0);
  CHECK(again.report.status == "converged");
}

TEST_CASE("rpmtr tiny instance against brute force") {
  for (std::uint64_t seed : {0u, 1u, 2u}) {
    const auto prob = oracle::make_problem(2, 1, 1, 1, seed);
    const ConnectionMask mask = ConnectionMask::partially_connected(2, 1);
    const SolveResult r = rpmtr_solve(prob.refs, 0.5, mask, TrConfig{}, rpmtr_init(2, 1, 1, seed));
    const double j = weighted_objective(effective_precoder(r.beamformer), prob.refs, 0.5);
    const double bf = oracle::rpmtr_tiny_brute_force(prob.refs, 0.5, 512);
    CHECK(std::abs(j - bf) <= 0.05 * bf);
  }
}

TEST_CASE("rpmtr argument errors") {
  const auto prob = oracle::make_problem(8, 2, 4, 2, 0);
  const ConnectionMask mask = ConnectionMask::partially_connected(8, 4);
  CHECK_THROWS_AS(rpmtr_solve(prob.refs, 0.5, mask, TrConfig{}, rpmtr_init(8, 2, 2, 0)), DimensionError);
  CHECK_THROWS_AS(rpmtr_solve(prob.refs, -0.5, mask, TrConfig{}, rpmtr_init(8, 4, 2, 0)), ConfigError);
  TrConfig c;
  c.k_max = 0;
  const SolveResult r = rpmtr_solve(prob.refs, 0.5, mask, c, rpmtr_init(8, 4, 2, 0));
  CHECK(r.report.iterations == 0);
  CHECK(r.report.status == "max_iterations");
}
