// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dfrc/beamformer.hpp"
#include "dfrc/channel.hpp"
#include "dfrc/madmm.hpp"
#include "dfrc/objective.hpp"
#include "dfrc/scene.hpp"
#include "dfrc/system.hpp"
#include "dfrc/trust_region.hpp"

namespace dfrc {

enum class StructureChoice { full, partial, both };

StructureChoice structure_choice_from_string(const std::string& s);
std::vector<Structure> expand(StructureChoice c);

struct ExperimentConfig {
  SystemConfig system;
  SceneGeometry scene;
  std::optional<double> loading;
  double phi = 0.5;
  std::vector<double> phi_grid{0.0, 0.2, 0.4, 0.6, 0.8, 1.0};
  double snr_db = 0.0;  // evaluation SNR for single-point designs and phi/nrf sweeps
  std::vector<double> snr_grid_db{-20.0, -15.0, -10.0, -5.0, 0.0, 5.0, 10.0};
  std::vector<Index> nrf_grid{4, 8, 16, 32};
  std::vector<std::uint64_t> seeds{0};
  StructureChoice structure = StructureChoice::full;
  ZfPower zf_power = ZfPower::streams;
  MadmmConfig madmm;
  TrConfig trust_region;

  /// "default" (defaults) or "nrf" (N_r = N_s = 4, phi = 0.4).
  static ExperimentConfig preset(const std::string& name);
  /// Throws ConfigError on any inconsistency.
  void validate() const;
};

/// Parses a JSON configuration; every field is optional, unknown keys are rejected.
ExperimentConfig parse_config(const std::string& json_text);
/// Reads and parses a file; IoError if unreadable, ConfigError if invalid.
ExperimentConfig load_config(const std::string& path);

/// Channel, scene and both reference precoders for one seed.
struct Instance {
  SystemConfig system;
  ChannelRealization channel;
  RadarScene scene;
  ReferencePair refs;
};

Instance make_instance(const ExperimentConfig& cfg, const SystemConfig& system, std::uint64_t seed);

const char* algorithm_name(Structure s);  // "madmm" | "rpmtr"

/// Runs MADMM (full) or RPM-TR (partial) from the seeded initial point.
SolveResult run_design(const ExperimentConfig& cfg, const Instance& inst, double phi, Structure s,
                       std::uint64_t seed);

struct Evaluation {
  double rate_bits_s_hz = 0.0;
  double ismr_linear = 0.0;
  double ismr_db = 0.0;
  double objective = 0.0;
};

Evaluation evaluate(const CMatrix& f, const Instance& inst, double phi, double snr_db);

enum class SweepAxis { phi, snr, nrf };
SweepAxis sweep_axis_from_string(const std::string& s);
const char* to_string(SweepAxis a);

struct ResultRow {
  double axis_value = 0.0;
  double phi = 0.0;
  std::string structure;  // "full" | "partial" | "digital-com" | "digital-rad"
  std::string algorithm;  // "madmm" | "rpmtr" | "reference"
  std::uint64_t seed = 0;
  double snr_db = 0.0;
  Index n_rf = 0;
  Evaluation eval;
  int iterations = 0;
  double wall_ms = 0.0;
  std::string status;  // solver status, or "error:<kind>" for a failed cell
};

struct SweepOptions {
  int jobs = 1;
  bool timing = false;  // report wall-clock times; off keeps outputs byte-stable
};

/// One row per (grid point x seed x structure [x snr]) plus reference rows, sorted.
std::vector<ResultRow> run_sweep(const ExperimentConfig& cfg, SweepAxis axis, const SweepOptions& opts);

inline constexpr const char* kSweepSchema = "# dfrc-sweep schema 1";
std::string rows_to_csv(const std::vector<ResultRow>& rows);

inline constexpr const char* kConvergenceSchema = "# dfrc-convergence schema 1";
std::string convergence_csv(const SolverReport& report);

inline constexpr const char* kBeampatternSchema = "# dfrc-beampattern schema 1";
/// theta_deg, power_db on the uniform grid over [-90, 90] degrees.
std::string beampattern_csv(const CMatrix& f, double resolution_deg);

/// Design summary: configuration echo, evaluation, traces and feasibility report.
std::string design_report_json(const SolveResult& r, const Evaluation& e, double phi, std::uint64_t seed,
                               double snr_db, bool timing);

/// Exact %.17g rendering used by every text output.
std::string format_double(double x);

}  // namespace dfrc
