// SPDX-License-Identifier: Apache-2.0
#include "dfrc/beamformer.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <json.hpp>

namespace dfrc {

namespace {

constexpr double kModulusTol = 1e-10;
constexpr double kPowerTol = 1e-8;

std::string at(Index i, Index j) { return "(" + std::to_string(i) + "," + std::to_string(j) + ")"; }

nlohmann::json matrix_to_json(const CMatrix& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Index j = 0; j < m.cols(); ++j) row.push_back({m(i, j).real(), m(i, j).imag()});
    rows.push_back(std::move(row));
  }
  return rows;
}

CMatrix matrix_from_json(const nlohmann::json& j, Index rows, Index cols, const char* name) {
  if (!j.is_array() || static_cast<Index>(j.size()) != rows)
    throw IoError(std::string("beamformer json: '") + name + "' has wrong row count");
  CMatrix m(rows, cols);
  for (Index r = 0; r < rows; ++r) {
    const auto& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Index>(row.size()) != cols)
      throw IoError(std::string("beamformer json: '") + name + "' has wrong column count");
    for (Index c = 0; c < cols; ++c) {
      const auto& e = row[static_cast<std::size_t>(c)];
      if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number())
        throw IoError(std::string("beamformer json: '") + name + "' entries must be [re, im]");
      m(r, c) = {e[0].get<double>(), e[1].get<double>()};
    }
  }
  if (!m.allFinite()) throw IoError(std::string("beamformer json: '") + name + "' has non-finite entries");
  return m;
}

}  // namespace

std::vector<Violation> validate(const HybridBeamformer& b) {
  std::vector<Violation> out;
  if (b.f_rf.cols() != b.f_bb.rows() || b.f_rf.size() == 0 || b.f_bb.size() == 0) {
    out.push_back({"shape", "F_RF columns must match F_BB rows", 0.0, 1.0});
    return out;
  }
  const bool partial = b.structure == Structure::partially_connected;
  if (partial && b.n_tx() % b.n_rf() != 0) {
    out.push_back({"shape", "n_rf does not divide n_tx", 0.0, 1.0});
    return out;
  }
  const Index z = partial ? b.n_tx() / b.n_rf() : 0;
  for (Index j = 0; j < b.n_rf(); ++j) {
    for (Index i = 0; i < b.n_tx(); ++i) {
      const double m = std::abs(b.f_rf(i, j));
      const bool on_block = !partial || i / z == j;
      if (on_block && std::abs(m - 1.0) > kModulusTol) {
        std::ostringstream s;
        s << "F_RF" << at(i, j) << " has modulus " << m;
        out.push_back({"unit_modulus", s.str(), m, std::abs(m - 1.0)});
      } else if (!on_block && m > 0.0) {
        std::ostringstream s;
        s << "F_RF" << at(i, j) << " lies off the connection blocks with magnitude " << m;
        out.push_back({"off_block_zero", s.str(), m, m});
      }
    }
  }
  const double ns = static_cast<double>(b.n_streams());
  if (partial) {
    const double target = ns * static_cast<double>(b.n_rf()) / static_cast<double>(b.n_tx());
    const double ratio = b.f_bb.squaredNorm() / target;
    if (std::abs(ratio - 1.0) > kPowerTol) {
      std::ostringstream s;
      s << "||F_BB||_F^2 / (N_s N_RF / N_t) = " << ratio;
      out.push_back({"power", s.str(), ratio, std::abs(ratio - 1.0)});
    }
  } else {
    const double ratio = (b.f_rf * b.f_bb).squaredNorm() / ns;
    if (std::abs(ratio - 1.0) > kPowerTol) {
      std::ostringstream s;
      s << "||F_RF F_BB||_F^2 / N_s = " << ratio;
      out.push_back({"power", s.str(), ratio, std::abs(ratio - 1.0)});
    }
  }
  return out;
}

CMatrix effective_precoder(const HybridBeamformer& b) {
  const auto issues = validate(b);
  if (!issues.empty()) {
    const auto worst = std::max_element(issues.begin(), issues.end(), [](const Violation& x, const Violation& y) { return x.excess < y.excess; });
    throw NumericalError("infeasible beamformer: " + worst->constraint + ": " + worst->detail);
  }
  return b.f_rf * b.f_bb;
}

std::string to_json(const HybridBeamformer& b, int indent) {
  nlohmann::ordered_json j;
  j["structure"] = to_string(b.structure);
  j["n_tx"] = b.n_tx();
  j["n_rf"] = b.n_rf();
  j["n_streams"] = b.n_streams();
  j["f_rf"] = matrix_to_json(b.f_rf);
  j["f_bb"] = matrix_to_json(b.f_bb);
  return j.dump(indent);
}

HybridBeamformer beamformer_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("beamformer json: ") + e.what());
  }
  for (const char* key : {"structure", "n_tx", "n_rf", "n_streams", "f_rf", "f_bb"})
    if (!j.contains(key)) throw IoError(std::string("beamformer json: missing '") + key + "'");
  HybridBeamformer b;
  try {
    b.structure = structure_from_string(j.at("structure").get<std::string>());
    const auto n_tx = j.at("n_tx").get<Index>();
    const auto n_rf = j.at("n_rf").get<Index>();
    const auto n_s = j.at("n_streams").get<Index>();
    if (n_tx < 1 || n_rf < 1 || n_s < 1) throw IoError("beamformer json: dimensions must be positive");
    b.f_rf = matrix_from_json(j.at("f_rf"), n_tx, n_rf, "f_rf");
    b.f_bb = matrix_from_json(j.at("f_bb"), n_rf, n_s, "f_bb");
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("beamformer json: ") + e.what());
  } catch (const ConfigError& e) {
    throw IoError(std::string("beamformer json: ") + e.what());
  }
  return b;
}

}  // namespace dfrc
