#pragma once

#include <vector>

#include "hybridbf/beamdesign.hpp"
#include "hybridbf/types.hpp"

namespace hbf {

struct RateReport {
  std::vector<double> per_subcarrier;  // bits/s/Hz
  double mean = 0.0;
};

/// Gaussian-input mutual information averaged over subcarriers:
///   log2 det(I + (P/N_s) R_n^{-1} G G^H),  G = W_BB^H W_RF^H H F_RF F_BB,
///   R_n = sigma^2 W_BB^H W_RF^H W_RF W_BB.
/// Throws std::runtime_error naming the subcarrier when R_n is singular.
RateReport spectral_efficiency(const MatrixSeries& channel, const HybridBeamformer& bf,
                               double power, double noise_var);

/// Unconstrained SVD transmission with equal power over the top N_s modes.
RateReport full_digital_bound(const MatrixSeries& channel, double power, double noise_var,
                              int num_streams);

}  // namespace hbf
