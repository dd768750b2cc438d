// SPDX-License-Identifier: Apache-2.0
#include "dfrc/channel.hpp"

#include <cmath>
#include <numbers>

#include "dfrc/numerics.hpp"
#include "dfrc/rng.hpp"
#include "dfrc/scene.hpp"

namespace dfrc {

namespace {
constexpr std::uint64_t kChannelStream = 1;
}

double LinkBudget::linear() const { return std::pow(10.0, snr_db / 10.0); }

ZfPower zf_power_from_string(const std::string& s) {
  if (s == "unit") return ZfPower::unit;
  if (s == "streams") return ZfPower::streams;
  throw ConfigError("unknown zf power mode '" + s + "' (expected unit|streams)");
}

CMatrix clustered_channel(Index n_rx, Index n_tx, const std::vector<cdouble>& gains,
                          const std::vector<double>& aod, const std::vector<double>& aoa) {
  if (gains.empty() || gains.size() != aod.size() || gains.size() != aoa.size())
    throw DimensionError("clustered_channel: gains and angle lists must have equal, nonzero length");
  const double paths = static_cast<double>(gains.size());
  const double scale = std::sqrt(static_cast<double>(n_tx * n_rx) / paths);
  CMatrix h = CMatrix::Zero(n_rx, n_tx);
  for (std::size_t p = 0; p < gains.size(); ++p)
    h.noalias() += gains[p] * steering(aoa[p], n_rx) * steering(aod[p], n_tx).adjoint();
  return scale * h;
}

ChannelRealization sample_channel(const SystemConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  Rng rng = Rng::stream(seed, kChannelStream);
  const auto paths = static_cast<std::size_t>(cfg.n_clusters * cfg.n_rays);
  ChannelRealization out;
  out.seed = seed;
  out.gains.reserve(paths);
  out.aod.reserve(paths);
  out.aoa.reserve(paths);
  for (std::size_t p = 0; p < paths; ++p) {
    out.gains.push_back(rng.complex_normal());
    out.aod.push_back(rng.uniform(0.0, 2.0 * std::numbers::pi));
    out.aoa.push_back(rng.uniform(0.0, 2.0 * std::numbers::pi));
  }
  out.h = clustered_channel(cfg.n_rx, cfg.n_tx, out.gains, out.aod, out.aoa);
  return out;
}

CMatrix zf_precoder(const CMatrix& h, ZfPower mode) {
  if (h.rows() > h.cols()) throw DimensionError("zf_precoder: needs n_rx <= n_tx");
  const CMatrix gram = h * h.adjoint();
  CMatrix inv_gram;
  try {
    inv_gram = solve_hpd(gram, CMatrix::Identity(gram.rows(), gram.cols()));
  } catch (const NotPositiveDefinite&) {
    throw NumericalError("zf_precoder: channel is rank deficient");
  }
  // Reject numerically singular Gram matrices that still pass Cholesky.
  if (!inv_gram.allFinite() || (gram * inv_gram - CMatrix::Identity(gram.rows(), gram.cols())).norm() > 1e-6)
    throw NumericalError("zf_precoder: channel is rank deficient");
  double c = 1.0 / std::sqrt(inv_gram.trace().real());
  if (mode == ZfPower::streams) c *= std::sqrt(static_cast<double>(h.rows()));
  return c * (h.adjoint() * inv_gram);
}

double spectral_efficiency(const CMatrix& h, const CMatrix& f, const LinkBudget& link, Index n_streams) {
  if (h.cols() != f.rows()) throw DimensionError("spectral_efficiency: H and F are not conformable");
  if (n_streams < 1) throw DimensionError("spectral_efficiency: n_streams must be positive");
  const CMatrix hf = h * f;
  CMatrix gram = (link.linear() / static_cast<double>(n_streams)) * (hf * hf.adjoint());
  gram = 0.5 * (gram + gram.adjoint());
  return std::max(0.0, logdet_plus(gram));
}

}  // namespace dfrc
