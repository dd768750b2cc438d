// SPDX-License-Identifier: Apache-2.0
// dfrc: hybrid beamforming design and experiment driver.
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "dfrc/experiment.hpp"

namespace fs = std::filesystem;
using namespace dfrc;

namespace {

enum Exit { kOk = 0, kConfig = 2, kSolver = 3, kIo = 4 };

struct Common {
  std::string config_path;
  std::optional<double> phi;
  std::string structure;
  std::optional<std::uint64_t> seed;
  std::string out = ".";
  bool check = false;
  bool timing = false;
  int jobs = 1;
};

int report_error(const char* kind, int code, const std::string& message) {
  nlohmann::ordered_json j;
  j["error"] = {{"kind", kind}, {"message", message}};
  j["exit_code"] = code;
  std::cerr << j.dump() << "\n";
  return code;
}

ExperimentConfig load(const Common& c) {
  ExperimentConfig cfg = c.config_path.empty() ? ExperimentConfig{} : load_config(c.config_path);
  if (c.phi) cfg.phi = *c.phi;
  if (!c.structure.empty()) cfg.structure = structure_choice_from_string(c.structure);
  if (c.seed) cfg.seeds = {*c.seed};
  cfg.validate();
  return cfg;
}

Structure single_structure(const ExperimentConfig& cfg) {
  if (cfg.structure == StructureChoice::both)
    throw ConfigError("this command needs a single structure; pass --structure full|partial");
  return expand(cfg.structure).front();
}

void write_file(const fs::path& path, const std::string& text) {
  std::error_code ec;
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
  if (ec) throw IoError("cannot create directory '" + path.parent_path().string() + "': " + ec.message());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << text;
  out.flush();
  if (!out) throw IoError("write failed for '" + path.string() + "'");
  std::cout << path.string() << "\n";
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void check_feasible(const HybridBeamformer& b) {
  const std::vector<Violation> v = validate(b);
  if (v.empty()) return;
  std::string msg = "infeasible beamformer:";
  for (const Violation& x : v) msg += " [" + x.constraint + "] " + x.detail + ";";
  throw NumericalError(msg);
}

int cmd_design(const Common& c) {
  const ExperimentConfig cfg = load(c);
  const Structure s = single_structure(cfg);
  const std::uint64_t seed = cfg.seeds.front();
  const Instance inst = make_instance(cfg, cfg.system, seed);
  const SolveResult r = run_design(cfg, inst, cfg.phi, s, seed);
  if (c.check) check_feasible(r.beamformer);
  const Evaluation e = evaluate(effective_precoder(r.beamformer), inst, cfg.phi, cfg.snr_db);
  write_file(fs::path(c.out) / "beamformer.json", to_json(r.beamformer));
  write_file(fs::path(c.out) / "report.json", design_report_json(r, e, cfg.phi, seed, cfg.snr_db, c.timing));
  return kOk;
}

int cmd_sweep(const Common& c, const std::string& axis_name) {
  const ExperimentConfig cfg = load(c);
  const SweepAxis axis = sweep_axis_from_string(axis_name);
  const std::vector<ResultRow> rows = run_sweep(cfg, axis, SweepOptions{c.jobs, c.timing});
  write_file(fs::path(c.out) / ("sweep_" + axis_name + ".csv"), rows_to_csv(rows));
  return kOk;
}

int cmd_beampattern(const Common& c, const std::string& file, double resolution) {
  const HybridBeamformer b = beamformer_from_json(read_file(file));
  if (c.check) check_feasible(b);
  write_file(fs::path(c.out) / "beampattern.csv", beampattern_csv(b.f_rf * b.f_bb, resolution));
  return kOk;
}

int cmd_convergence(const Common& c) {
  const ExperimentConfig cfg = load(c);
  const Structure s = single_structure(cfg);
  const std::uint64_t seed = cfg.seeds.front();
  const Instance inst = make_instance(cfg, cfg.system, seed);
  const SolveResult r = run_design(cfg, inst, cfg.phi, s, seed);
  if (c.check) check_feasible(r.beamformer);
  write_file(fs::path(c.out) / (std::string("convergence_") + algorithm_name(s) + ".csv"),
             convergence_csv(r.report));
  return kOk;
}

void add_common(CLI::App* app, Common& c, bool solver_flags) {
  app->add_option("--out", c.out, "Output directory")->capture_default_str();
  app->add_flag("--check", c.check, "Fail (exit 3) if the beamformer violates a constraint");
  if (!solver_flags) return;
  app->add_option("--config", c.config_path, "JSON configuration file");
  app->add_option("--phi", c.phi, "Trade-off parameter in [0, 1]");
  app->add_option("--structure", c.structure, "full | partial (sweeps also accept both)");
  app->add_option("--seed", c.seed, "Seed; overrides the configured seed list");
  app->add_flag("--timing", c.timing, "Record wall-clock times (outputs are no longer reproducible)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hybrid beamforming design for dual-function radar-communication transmitters"};
  app.require_subcommand(1);
  Common common;
  std::string axis;
  std::string bf_file;
  double resolution = 0.5;

  CLI::App* design = app.add_subcommand("design", "Design one hybrid beamformer");
  add_common(design, common, true);
  CLI::App* sweep = app.add_subcommand("sweep", "Parameter sweep over phi, SNR or RF chains");
  add_common(sweep, common, true);
  sweep->add_option("--axis", axis, "phi | snr | nrf")->required();
  sweep->add_option("--jobs", common.jobs, "Worker threads")->capture_default_str();
  CLI::App* pattern = app.add_subcommand("beampattern", "Radar beampattern of a stored beamformer");
  add_common(pattern, common, false);
  pattern->add_option("--beamformer", bf_file, "Beamformer JSON file")->required();
  pattern->add_option("--resolution", resolution, "Angular step in degrees")->capture_default_str();
  CLI::App* conv = app.add_subcommand("convergence", "Per-iteration solver traces");
  add_common(conv, common, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return report_error("config", kConfig, e.what());
  }

  try {
    if (*design) return cmd_design(common);
    if (*sweep) return cmd_sweep(common, axis);
    if (*pattern) return cmd_beampattern(common, bf_file, resolution);
    if (*conv) return cmd_convergence(common);
  } catch (const ConfigError& e) {
    return report_error("config", kConfig, e.what());
  } catch (const IoError& e) {
    return report_error("io", kIo, e.what());
  } catch (const Error& e) {
    return report_error("solver", kSolver, e.what());
  } catch (const std::exception& e) {
    return report_error("internal", kSolver, e.what());
  }
  return kOk;
}
