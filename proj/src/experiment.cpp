// SPDX-License-Identifier: Apache-2.0
#include "dfrc/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>
#include <tuple>

#include <json.hpp>

namespace dfrc {

using nlohmann::json;
using nlohmann::ordered_json;

StructureChoice structure_choice_from_string(const std::string& s) {
  if (s == "both") return StructureChoice::both;
  return structure_from_string(s) == Structure::fully_connected ? StructureChoice::full : StructureChoice::partial;
}

std::vector<Structure> expand(StructureChoice c) {
  switch (c) {
    case StructureChoice::full: return {Structure::fully_connected};
    case StructureChoice::partial: return {Structure::partially_connected};
    case StructureChoice::both: return {Structure::fully_connected, Structure::partially_connected};
  }
  return {};
}

ExperimentConfig ExperimentConfig::preset(const std::string& name) {
  ExperimentConfig c;
  if (name == "default") return c;
  if (name == "nrf") {
    c.system.n_rx = 4;
    c.system.n_streams = 4;
    c.phi = 0.4;
    return c;
  }
  throw ConfigError("unknown preset '" + name + "' (expected default or nrf)");
}

void ExperimentConfig::validate() const {
  for (Structure s : expand(structure)) system.validate(s);
  if (system.n_rx != system.n_streams)
    throw ConfigError("zero-forcing reference needs n_rx == n_streams");
  TradeoffConfig{phi}.validate();
  if (phi_grid.empty()) throw ConfigError("phi_grid must be non-empty");
  for (double p : phi_grid) TradeoffConfig{p}.validate();
  if (!std::isfinite(snr_db)) throw ConfigError("snr_db must be finite");
  if (snr_grid_db.empty()) throw ConfigError("snr_grid_db must be non-empty");
  for (double s : snr_grid_db)
    if (!std::isfinite(s)) throw ConfigError("snr_grid_db entries must be finite");
  if (nrf_grid.empty()) throw ConfigError("nrf_grid must be non-empty");
  if (seeds.empty()) throw ConfigError("seeds must be non-empty");
  if (std::set<std::uint64_t>(seeds.begin(), seeds.end()).size() != seeds.size())
    throw ConfigError("seeds must be distinct");
  if (scene.targets_rad.empty()) throw ConfigError("scene.targets_deg must be non-empty");
  for (double t : scene.targets_rad)
    if (!(std::abs(t) < kHalfPi)) throw ConfigError("scene targets must lie strictly inside (-90, 90) degrees");
  if (!(scene.mainlobe_halfwidth_rad > 0.0)) throw ConfigError("scene.mainlobe_halfwidth_deg must be positive");
  if (!(scene.guard_rad >= 0.0)) throw ConfigError("scene.guard_deg must be non-negative");
  if (!(scene.grid_step_rad > 0.0)) throw ConfigError("scene.grid_step_deg must be positive");
  if (loading && !(*loading >= 0.0)) throw ConfigError("scene.loading must be non-negative");
  madmm.validate();
  trust_region.resolved(product_manifold_dim(system.n_tx, system.n_rf, system.n_streams));
}

// ---------------------------------------------------------------------------
// JSON configuration
// ---------------------------------------------------------------------------

namespace {

void check_keys(const json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) throw ConfigError(where + ": expected an object");
  for (const auto& item : obj.items()) {
    bool known = false;
    for (const char* a : allowed) known = known || item.key() == a;
    if (!known) throw ConfigError("unknown key '" + where + (where.empty() ? "" : ".") + item.key() + "'");
  }
}

template <typename T>
void read(const json& obj, const char* key, const std::string& where, T& out) {
  const auto it = obj.find(key);
  if (it == obj.end()) return;
  const std::string name = where.empty() ? key : where + "." + key;
  try {
    if constexpr (std::is_same_v<T, double>) {
      if (!it->is_number()) throw ConfigError(name + ": expected a number");
      out = it->template get<double>();
    } else if constexpr (std::is_same_v<T, bool>) {
      if (!it->is_boolean()) throw ConfigError(name + ": expected a boolean");
      out = it->template get<bool>();
    } else if constexpr (std::is_integral_v<T>) {
      if (!it->is_number_integer()) throw ConfigError(name + ": expected an integer");
      if (std::is_unsigned_v<T> && !it->is_number_unsigned())
        throw ConfigError(name + ": expected a non-negative integer");
      out = it->template get<T>();
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (!it->is_string()) throw ConfigError(name + ": expected a string");
      out = it->template get<std::string>();
    } else {
      if (!it->is_array()) throw ConfigError(name + ": expected an array");
      T v;
      for (const auto& e : *it) {
        typename T::value_type x{};
        json wrap = {{"v", e}};
        read(wrap, "v", name + "[]", x);
        v.push_back(x);
      }
      out = std::move(v);
    }
  } catch (const json::exception& e) {
    throw ConfigError(name + ": " + e.what());
  }
}

void read_degrees(const json& obj, const char* key, const std::string& where, double& rad) {
  if (!obj.contains(key)) return;
  double deg = 0.0;
  read(obj, key, where, deg);
  rad = deg2rad(deg);
}

void parse_system(const json& j, SystemConfig& s) {
  check_keys(j, "system", {"n_tx", "n_rx", "n_rf", "n_streams", "n_clusters", "n_rays"});
  read(j, "n_tx", "system", s.n_tx);
  read(j, "n_rx", "system", s.n_rx);
  read(j, "n_rf", "system", s.n_rf);
  read(j, "n_streams", "system", s.n_streams);
  read(j, "n_clusters", "system", s.n_clusters);
  read(j, "n_rays", "system", s.n_rays);
}

void parse_scene(const json& j, ExperimentConfig& c) {
  check_keys(j, "scene", {"targets_deg", "mainlobe_halfwidth_deg", "guard_deg", "grid_step_deg", "loading"});
  if (j.contains("targets_deg")) {
    std::vector<double> deg;
    read(j, "targets_deg", "scene", deg);
    c.scene.targets_rad.clear();
    for (double d : deg) c.scene.targets_rad.push_back(deg2rad(d));
  }
  read_degrees(j, "mainlobe_halfwidth_deg", "scene", c.scene.mainlobe_halfwidth_rad);
  read_degrees(j, "guard_deg", "scene", c.scene.guard_rad);
  read_degrees(j, "grid_step_deg", "scene", c.scene.grid_step_rad);
  if (j.contains("loading") && !j.at("loading").is_null()) {
    double mu = 0.0;
    read(j, "loading", "scene", mu);
    c.loading = mu;
  }
}

void parse_madmm(const json& j, MadmmConfig& m) {
  check_keys(j, "madmm", {"alpha0", "beta", "gamma", "n_max", "primal_tol", "rcg"});
  read(j, "alpha0", "madmm", m.alpha0);
  read(j, "beta", "madmm", m.beta);
  read(j, "gamma", "madmm", m.gamma);
  read(j, "n_max", "madmm", m.n_max);
  read(j, "primal_tol", "madmm", m.primal_tol);
  if (!j.contains("rcg")) return;
  const json& r = j.at("rcg");
  check_keys(r, "madmm.rcg", {"k_max", "grad_tol", "armijo"});
  read(r, "k_max", "madmm.rcg", m.rcg.k_max);
  read(r, "grad_tol", "madmm.rcg", m.rcg.grad_tol);
  if (!r.contains("armijo")) return;
  const json& a = r.at("armijo");
  const std::string w = "madmm.rcg.armijo";
  check_keys(a, w, {"initial_step", "shrink", "sufficient_decrease", "max_backtracks", "quadratic_hint"});
  read(a, "initial_step", w, m.rcg.armijo.initial_step);
  read(a, "shrink", w, m.rcg.armijo.shrink);
  read(a, "sufficient_decrease", w, m.rcg.armijo.sufficient_decrease);
  read(a, "max_backtracks", w, m.rcg.armijo.max_backtracks);
  read(a, "quadratic_hint", w, m.rcg.armijo.quadratic_hint);
}

void parse_trust_region(const json& j, TrConfig& t) {
  const std::string w = "trust_region";
  check_keys(j, w, {"delta_bar", "delta0", "rho_prime", "k_max", "grad_tol", "min_step", "tcg"});
  read(j, "delta_bar", w, t.delta_bar);
  read(j, "delta0", w, t.delta0);
  read(j, "rho_prime", w, t.rho_prime);
  read(j, "k_max", w, t.k_max);
  read(j, "grad_tol", w, t.grad_tol);
  read(j, "min_step", w, t.min_step);
  if (!j.contains("tcg")) return;
  const json& c = j.at("tcg");
  check_keys(c, "trust_region.tcg", {"max_inner", "kappa", "theta"});
  read(c, "max_inner", "trust_region.tcg", t.tcg.max_inner);
  read(c, "kappa", "trust_region.tcg", t.tcg.kappa);
  read(c, "theta", "trust_region.tcg", t.tcg.theta);
}

}  // namespace

ExperimentConfig parse_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  check_keys(j, "", {"preset", "system", "scene", "phi", "phi_grid", "snr_db", "snr_grid_db", "nrf_grid", "seeds",
                     "structure", "zf_power", "madmm", "trust_region"});
  std::string preset = "default";
  read(j, "preset", "", preset);
  ExperimentConfig c = ExperimentConfig::preset(preset);
  if (j.contains("system")) parse_system(j.at("system"), c.system);
  if (j.contains("scene")) parse_scene(j.at("scene"), c);
  read(j, "phi", "", c.phi);
  read(j, "phi_grid", "", c.phi_grid);
  read(j, "snr_db", "", c.snr_db);
  read(j, "snr_grid_db", "", c.snr_grid_db);
  read(j, "nrf_grid", "", c.nrf_grid);
  read(j, "seeds", "", c.seeds);
  if (j.contains("structure")) {
    std::string s;
    read(j, "structure", "", s);
    c.structure = structure_choice_from_string(s);
  }
  if (j.contains("zf_power")) {
    std::string s;
    read(j, "zf_power", "", s);
    c.zf_power = zf_power_from_string(s);
  }
  if (j.contains("madmm")) parse_madmm(j.at("madmm"), c.madmm);
  if (j.contains("trust_region")) parse_trust_region(j.at("trust_region"), c.trust_region);
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

// ---------------------------------------------------------------------------
// Design and evaluation
// ---------------------------------------------------------------------------

Instance make_instance(const ExperimentConfig& cfg, const SystemConfig& system, std::uint64_t seed) {
  ChannelRealization ch = sample_channel(system, seed);
  RadarScene scene = RadarScene::from_targets(cfg.scene, system.n_tx);
  ReferencePair refs{zf_precoder(ch.h, cfg.zf_power), radar_reference(scene, system, cfg.loading)};
  return Instance{system, std::move(ch), std::move(scene), std::move(refs)};
}

const char* algorithm_name(Structure s) { return s == Structure::fully_connected ? "madmm" : "rpmtr"; }

SolveResult run_design(const ExperimentConfig& cfg, const Instance& inst, double phi, Structure s,
                       std::uint64_t seed) {
  const SystemConfig& sys = inst.system;
  sys.validate(s);
  if (s == Structure::fully_connected)
    return madmm_solve(inst.refs, phi, cfg.madmm, MadmmState::initial(inst.refs, sys.n_rf, seed, cfg.madmm.alpha0));
  const ConnectionMask mask = ConnectionMask::partially_connected(sys.n_tx, sys.n_rf);
  return rpmtr_solve(inst.refs, phi, mask, cfg.trust_region, rpmtr_init(sys.n_tx, sys.n_rf, sys.n_streams, seed));
}

Evaluation evaluate(const CMatrix& f, const Instance& inst, double phi, double snr_db) {
  Evaluation e;
  e.rate_bits_s_hz = spectral_efficiency(inst.channel.h, f, LinkBudget{snr_db}, inst.system.n_streams);
  e.ismr_linear = ismr(f, inst.scene);
  e.ismr_db = 10.0 * std::log10(e.ismr_linear);
  e.objective = weighted_objective(f, inst.refs, phi);
  return e;
}

// ---------------------------------------------------------------------------
// Sweeps
// ---------------------------------------------------------------------------

SweepAxis sweep_axis_from_string(const std::string& s) {
  if (s == "phi") return SweepAxis::phi;
  if (s == "snr") return SweepAxis::snr;
  if (s == "nrf") return SweepAxis::nrf;
  throw ConfigError("unknown sweep axis '" + s + "' (expected phi, snr or nrf)");
}

const char* to_string(SweepAxis a) {
  switch (a) {
    case SweepAxis::phi: return "phi";
    case SweepAxis::snr: return "snr";
    case SweepAxis::nrf: return "nrf";
  }
  return "?";
}

namespace {

struct Cell {
  double axis_value;
  std::uint64_t seed;
};

const char* error_kind(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e)) return "config";
  if (dynamic_cast<const IoError*>(&e)) return "io";
  if (dynamic_cast<const DimensionError*>(&e)) return "dimension";
  if (dynamic_cast<const NumericalError*>(&e)) return "numerical";
  return "internal";
}

ResultRow failed_row(double axis_value, double phi, const std::string& structure, const std::string& algorithm,
                     std::uint64_t seed, double snr_db, Index n_rf, const std::exception& e) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  ResultRow r{axis_value, phi, structure, algorithm, seed, snr_db, n_rf, {nan, nan, nan, nan}, 0, 0.0, ""};
  r.status = std::string("error:") + error_kind(e);
  return r;
}

// Everything belonging to one (axis value, seed): solver rows for every
// requested structure and the fully-digital reference rows.
std::vector<ResultRow> run_cell(const ExperimentConfig& cfg, SweepAxis axis, const Cell& cell, bool timing) {
  std::vector<ResultRow> rows;
  SystemConfig sys = cfg.system;
  double phi = cfg.phi;
  if (axis == SweepAxis::phi) phi = cell.axis_value;
  if (axis == SweepAxis::nrf) sys.n_rf = static_cast<Index>(cell.axis_value);
  const std::vector<double> snrs = axis == SweepAxis::snr ? cfg.snr_grid_db : std::vector<double>{cfg.snr_db};

  std::optional<Instance> inst;
  try {
    inst = make_instance(cfg, sys, cell.seed);
  } catch (const std::exception& e) {
    for (double snr : snrs) {
      for (Structure s : expand(cfg.structure))
        rows.push_back(failed_row(cell.axis_value, phi, to_string(s), algorithm_name(s), cell.seed, snr, sys.n_rf, e));
      rows.push_back(failed_row(cell.axis_value, phi, "digital-com", "reference", cell.seed, snr, sys.n_rf, e));
      rows.push_back(failed_row(cell.axis_value, phi, "digital-rad", "reference", cell.seed, snr, sys.n_rf, e));
    }
    return rows;
  }

  for (Structure s : expand(cfg.structure)) {
    try {
      const SolveResult res = run_design(cfg, *inst, phi, s, cell.seed);
      const CMatrix f = effective_precoder(res.beamformer);
      for (double snr : snrs) {
        rows.push_back(ResultRow{cell.axis_value, phi, to_string(s), algorithm_name(s), cell.seed, snr, sys.n_rf,
                                 evaluate(f, *inst, phi, snr), res.report.iterations,
                                 timing ? res.report.wall_ms : 0.0, res.report.status});
      }
    } catch (const std::exception& e) {
      for (double snr : snrs)
        rows.push_back(failed_row(cell.axis_value, phi, to_string(s), algorithm_name(s), cell.seed, snr, sys.n_rf, e));
    }
  }
  const std::pair<const char*, const CMatrix*> refs[] = {{"digital-com", &inst->refs.f_com},
                                                         {"digital-rad", &inst->refs.f_rad}};
  for (const auto& [name, f] : refs) {
    for (double snr : snrs) {
      try {
        rows.push_back(ResultRow{cell.axis_value, phi, name, "reference", cell.seed, snr, sys.n_rf,
                                 evaluate(*f, *inst, phi, snr), 0, 0.0, "reference"});
      } catch (const std::exception& e) {
        rows.push_back(failed_row(cell.axis_value, phi, name, "reference", cell.seed, snr, sys.n_rf, e));
      }
    }
  }
  return rows;
}

}  // namespace

std::vector<ResultRow> run_sweep(const ExperimentConfig& cfg, SweepAxis axis, const SweepOptions& opts) {
  cfg.validate();
  if (opts.jobs < 1) throw ConfigError("--jobs must be at least 1");
  std::vector<double> axis_values;
  switch (axis) {
    case SweepAxis::phi: axis_values = cfg.phi_grid; break;
    case SweepAxis::snr: axis_values = {cfg.snr_db}; break;  // designs do not depend on the SNR
    case SweepAxis::nrf:
      for (Index n : cfg.nrf_grid) {
        SystemConfig s = cfg.system;
        s.n_rf = n;
        try {
          for (Structure st : expand(cfg.structure)) s.validate(st);
        } catch (const ConfigError& e) {
          throw ConfigError("nrf_grid entry " + std::to_string(n) + ": " + e.what());
        }
        axis_values.push_back(static_cast<double>(n));
      }
      break;
  }
  std::vector<Cell> cells;
  for (double v : axis_values)
    for (std::uint64_t s : cfg.seeds) cells.push_back({v, s});

  std::vector<std::vector<ResultRow>> results(cells.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < cells.size(); i = next++) results[i] = run_cell(cfg, axis, cells[i], opts.timing);
  };
  const int n_threads = std::min<int>(opts.jobs, static_cast<int>(cells.size()));
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  std::vector<ResultRow> rows;
  for (auto& r : results) rows.insert(rows.end(), std::make_move_iterator(r.begin()), std::make_move_iterator(r.end()));
  // The snr axis is keyed by the evaluation SNR itself.
  if (axis == SweepAxis::snr)
    for (auto& r : rows) r.axis_value = r.snr_db;
  std::stable_sort(rows.begin(), rows.end(), [](const ResultRow& a, const ResultRow& b) {
    return std::tie(a.axis_value, a.seed, a.structure, a.algorithm, a.snr_db) <
           std::tie(b.axis_value, b.seed, b.structure, b.algorithm, b.snr_db);
  });
  return rows;
}

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string rows_to_csv(const std::vector<ResultRow>& rows) {
  std::string out = std::string(kSweepSchema) + "\n";
  out += "phi,structure,algorithm,seed,snr_db,n_rf,rate_bits_s_hz,ismr_linear,ismr_db,objective,iterations,wall_ms,status\n";
  for (const ResultRow& r : rows) {
    out += format_double(r.phi) + "," + r.structure + "," + r.algorithm + "," + std::to_string(r.seed) + "," +
           format_double(r.snr_db) + "," + std::to_string(r.n_rf) + "," + format_double(r.eval.rate_bits_s_hz) + "," +
           format_double(r.eval.ismr_linear) + "," + format_double(r.eval.ismr_db) + "," +
           format_double(r.eval.objective) + "," + std::to_string(r.iterations) + "," + format_double(r.wall_ms) +
           "," + r.status + "\n";
  }
  return out;
}

std::string convergence_csv(const SolverReport& report) {
  std::string out = std::string(kConvergenceSchema) + "\n";
  out += "iteration,objective,primal_residual,grad_norm\n";
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t i = 0; i < report.objective_trace.size(); ++i) {
    const double pr = i < report.primal_residual_trace.size() ? report.primal_residual_trace[i] : nan;
    const double gn = i < report.grad_norm_trace.size() ? report.grad_norm_trace[i] : nan;
    out += std::to_string(i + 1) + "," + format_double(report.objective_trace[i]) + "," + format_double(pr) + "," +
           format_double(gn) + "\n";
  }
  return out;
}

std::string beampattern_csv(const CMatrix& f, double resolution_deg) {
  if (!(resolution_deg > 0.0) || resolution_deg > 180.0)
    throw ConfigError("beampattern resolution must lie in (0, 180] degrees");
  if (f.size() == 0 || !f.allFinite()) throw NumericalError("beampattern: empty or non-finite precoder");
  const long n = std::lround(std::floor(180.0 / resolution_deg + 1e-9));
  std::string out = std::string(kBeampatternSchema) + "\n";
  out += "theta_deg,power_db\n";
  for (long k = 0; k <= n; ++k) {
    const double deg = -90.0 + static_cast<double>(k) * resolution_deg;
    const double p = beampattern(f, deg2rad(deg));
    out += format_double(deg) + "," + format_double(10.0 * std::log10(std::max(p, 1e-300))) + "\n";
  }
  return out;
}

std::string design_report_json(const SolveResult& r, const Evaluation& e, double phi, std::uint64_t seed,
                               double snr_db, bool timing) {
  ordered_json j;
  j["structure"] = to_string(r.beamformer.structure);
  j["algorithm"] = algorithm_name(r.beamformer.structure);
  j["phi"] = phi;
  j["seed"] = seed;
  j["snr_db"] = snr_db;
  j["status"] = r.report.status;
  j["iterations"] = r.report.iterations;
  j["wall_ms"] = timing ? r.report.wall_ms : 0.0;
  j["evaluation"] = {{"rate_bits_s_hz", e.rate_bits_s_hz},
                     {"ismr_linear", e.ismr_linear},
                     {"ismr_db", e.ismr_db},
                     {"objective", e.objective}};
  j["traces"] = {{"objective", r.report.objective_trace},
                 {"primal_residual", r.report.primal_residual_trace},
                 {"grad_norm", r.report.grad_norm_trace}};
  ordered_json viol = ordered_json::array();
  for (const Violation& v : validate(r.beamformer))
    viol.push_back({{"constraint", v.constraint}, {"detail", v.detail}, {"value", v.value}, {"excess", v.excess}});
  j["violations"] = viol;
  return j.dump(2) + "\n";
}

}  // namespace dfrc
