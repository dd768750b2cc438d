// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "dfrc/experiment.hpp"

using namespace dfrc;

namespace {

const char* kSmall = R"({"system": {"n_tx": 8, "n_rx": 2, "n_rf": 4, "n_streams": 2},
                         "phi_grid": [0.0, 0.5, 1.0], "snr_grid_db": [-10, 0, 10], "nrf_grid": [2, 4, 8],
                         "seeds": [3, 1], "structure": "both"})";

int count_lines(const std::string& s) {
  int n = 0;
  for (char c : s) n += c == '\n';
  return n;
}

}  // namespace

TEST_CASE("config parsing applies presets and overrides") {
  const ExperimentConfig d = parse_config("{}");
  CHECK(d.system.n_tx == 32);
  CHECK(d.system.n_rf == 16);
  CHECK(d.system.n_streams == 6);
  CHECK(d.phi == 0.5);

  const ExperimentConfig n = parse_config(R"({"preset": "nrf"})");
  CHECK(n.system.n_streams == 4);
  CHECK(n.phi == doctest::Approx(0.4));

  const ExperimentConfig c = parse_config(R"({"phi": 0.25, "scene": {"targets_deg": [-10, 40]},
                                              "madmm": {"rcg": {"armijo": {"shrink": 0.7}}},
                                              "trust_region": {"tcg": {"kappa": 0.05}}})");
  CHECK(c.phi == 0.25);
  CHECK(c.scene.targets_rad[1] == doctest::Approx(deg2rad(40.0)));
  CHECK(c.madmm.rcg.armijo.shrink == 0.7);
  CHECK(c.trust_region.tcg.kappa == 0.05);
}

TEST_CASE("config parsing rejects bad input") {
  CHECK_THROWS_AS(parse_config("{"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"phy": 0.5})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"madmm": {"rcg": {"armijo": {"shrnk": 0.5}}}})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"phi": 1.5})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"phi": "half"})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"preset": "huge"})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"seeds": [1, 1]})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"system": {"n_rx": 4}})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"structure": "partial", "system": {"n_rf": 5}})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"scene": {"targets_deg": [95]}})"), ConfigError);
  CHECK_THROWS_AS(load_config("/nonexistent/dfrc.json"), IoError);
  try {
    parse_config(R"({"trust_region": {"tcg": {"kapa": 1}}})");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("trust_region.tcg.kapa") != std::string::npos);
  }
}

TEST_CASE("phi sweep rows") {
  const ExperimentConfig cfg = parse_config(kSmall);
  const auto rows = run_sweep(cfg, SweepAxis::phi, SweepOptions{});
  // 3 phi values x 2 seeds x (2 structures + 2 references)
  REQUIRE(rows.size() == 24);
  CHECK(rows.front().phi == 0.0);
  CHECK(rows.front().seed == 1);
  for (const ResultRow& r : rows) {
    CHECK(r.status.rfind("error", 0) == std::string::npos);
    CHECK(std::isfinite(r.eval.rate_bits_s_hz));
    CHECK(r.wall_ms == 0.0);
    if (r.algorithm == "reference") CHECK(r.iterations == 0);
  }
  const std::string csv = rows_to_csv(rows);
  CHECK(csv.rfind(kSweepSchema, 0) == 0);
  CHECK(count_lines(csv) == 2 + 24);

  SweepOptions par;
  par.jobs = 3;
  CHECK(rows_to_csv(run_sweep(cfg, SweepAxis::phi, par)) == csv);
}

TEST_CASE("snr sweep designs once and evaluates per SNR") {
  const ExperimentConfig cfg = parse_config(kSmall);
  const auto rows = run_sweep(cfg, SweepAxis::snr, SweepOptions{});
  REQUIRE(rows.size() == 3 * 2 * 4);
  for (const ResultRow& r : rows) CHECK(r.axis_value == r.snr_db);
  // The rate grows with SNR for the same design.
  double prev = -1.0;
  for (const ResultRow& r : rows)
    if (r.structure == "full" && r.seed == 1) {
      CHECK(r.eval.rate_bits_s_hz > prev);
      prev = r.eval.rate_bits_s_hz;
    }
}

TEST_CASE("nrf sweep validates each grid entry") {
  ExperimentConfig cfg = parse_config(kSmall);
  const auto rows = run_sweep(cfg, SweepAxis::nrf, SweepOptions{});
  CHECK(rows.size() == 3 * 2 * 4);
  cfg.nrf_grid = {3};
  CHECK_THROWS_AS(run_sweep(cfg, SweepAxis::nrf, SweepOptions{}), ConfigError);
  SweepOptions bad;
  bad.jobs = 0;
  CHECK_THROWS_AS(run_sweep(cfg, SweepAxis::phi, bad), ConfigError);
}

TEST_CASE("failed cells become error rows") {
  ExperimentConfig cfg = parse_config(kSmall);
  cfg.madmm.rcg.k_max = 1;
  cfg.madmm.n_max = 1;
  for (const ResultRow& r : run_sweep(cfg, SweepAxis::phi, SweepOptions{}))
    if (r.algorithm == "madmm") CHECK(r.status == "max_iterations");

  // An explicit initial radius that is valid for N_RF = 4 (max radius sqrt(47))
  // but not for N_RF = 2 (max radius sqrt(23)).
  cfg = parse_config(kSmall);
  cfg.trust_region.delta0 = 5.5;
  cfg.nrf_grid = {2, 4};
  const auto rows = run_sweep(cfg, SweepAxis::nrf, SweepOptions{});
  int errors = 0;
  for (const ResultRow& r : rows) {
    const bool failed = r.structure == "partial" && r.n_rf == 2;
    CHECK((r.status == "error:config") == failed);
    if (failed) {
      ++errors;
      CHECK(std::isnan(r.eval.rate_bits_s_hz));
    }
  }
  CHECK(errors == 2);
  CHECK(rows_to_csv(rows).find(",nan,") != std::string::npos);
}

TEST_CASE("convergence and beampattern CSV") {
  SolverReport rep;
  rep.objective_trace = {3.0, 2.0, 1.0};
  rep.grad_norm_trace = {0.3, 0.2, 0.1};
  const std::string c = convergence_csv(rep);
  CHECK(c.rfind(kConvergenceSchema, 0) == 0);
  CHECK(count_lines(c) == 5);
  CHECK(c.find("2,2,nan,0.20000000000000001") != std::string::npos);

  const CMatrix iso = CMatrix::Identity(4, 4);
  std::istringstream in(beampattern_csv(iso, 1.0));
  std::string line;
  std::getline(in, line);
  std::getline(in, line);
  CHECK(line == "theta_deg,power_db");
  int n = 0;
  while (std::getline(in, line)) {
    const double p = std::stod(line.substr(line.find(',') + 1));
    // (1/N_s) ||I a||^2 = 1/4
    CHECK(std::abs(p - 10.0 * std::log10(0.25)) <= 1e-9);
    ++n;
  }
  CHECK(n == 181);
  CHECK_THROWS_AS(beampattern_csv(iso, 0.0), ConfigError);
}

TEST_CASE("format_double") {
  CHECK(format_double(0.5) == "0.5");
  CHECK(format_double(std::nan("")) == "nan");
  CHECK(format_double(-HUGE_VAL) == "-inf");
  CHECK(std::stod(format_double(0.1)) == 0.1);
}
