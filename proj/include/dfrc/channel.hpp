// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

#include "dfrc/system.hpp"
#include "dfrc/types.hpp"

namespace dfrc {

struct ChannelRealization {
  CMatrix h;                  // n_rx x n_tx
  std::vector<cdouble> gains;  // alpha_il, cluster-major
  std::vector<double> aod;     // departure angles [rad]
  std::vector<double> aoa;     // arrival angles [rad]
  std::uint64_t seed = 0;
};

/// SNR as rho / sigma_n^2 in dB.
struct LinkBudget {
  double snr_db = 0.0;
  double linear() const;
};

enum class ZfPower { unit, streams };

ZfPower zf_power_from_string(const std::string& s);

/// Clustered narrowband channel sqrt(Nt Nr / (Ncl Nray)) sum alpha a_r(aoa) a_t(aod)^H.
CMatrix clustered_channel(Index n_rx, Index n_tx, const std::vector<cdouble>& gains,
                          const std::vector<double>& aod, const std::vector<double>& aoa);

/// Draws CN(0,1) gains and U[0, 2pi) angles from the seeded generator.
ChannelRealization sample_channel(const SystemConfig& cfg, std::uint64_t seed);

/// Zero-forcing precoder c H^H (H H^H)^{-1}; c = 1/sqrt(tr (H H^H)^{-1}) in unit
/// mode, times sqrt(n_rx) in streams mode.
CMatrix zf_precoder(const CMatrix& h, ZfPower mode = ZfPower::streams);

/// log2 det(I + snr / N_s H F F^H H^H) in bits/s/Hz.
double spectral_efficiency(const CMatrix& h, const CMatrix& f, const LinkBudget& link, Index n_streams);

}  // namespace dfrc
