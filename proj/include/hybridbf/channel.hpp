#pragma once

#include <vector>

#include "hybridbf/types.hpp"

namespace hbf {

/// Geometric multipath description: one entry per path in every array.
struct PathSet {
  std::vector<cd> gains;
  std::vector<double> delays;  // seconds
  std::vector<double> aoa;     // radians, [-pi/2, pi/2]
  std::vector<double> aod;     // radians, [-pi/2, pi/2]

  std::size_t size() const { return gains.size(); }

  /// Throws std::invalid_argument if the arrays disagree in length, an angle
  /// leaves [-pi/2, pi/2], or a delay falls outside [0, max_delay].
  void validate(double max_delay) const;
};

/// Path set plus its per-subcarrier frequency response H[k] (N_r x N_t).
struct ChannelRealization {
  PathSet paths;
  double sample_period = 1.0;
  double rolloff = 0.8;
  MatrixSeries freq;

  std::size_t num_subcarriers() const { return freq.size(); }
  Eigen::Index num_rx() const { return freq.empty() ? 0 : freq.front().rows(); }
  Eigen::Index num_tx() const { return freq.empty() ? 0 : freq.front().cols(); }
};

/// Half-wavelength ULA steering vector: element n is exp(j*pi*n*sin(angle)).
CVector array_response(double angle, Eigen::Index num_elements);

/// Raised-cosine impulse response sampled at t. The removable singularity at
/// |t| = T_s/(2*beta) is replaced by its limit (pi/4)*sinc(1/(2*beta)).
double raised_cosine(double t, double sample_period, double rolloff);

/// Draws L paths: CN(0,1) gains, delays uniform on [0, (N_cp-1)*T_s], and
/// angles uniform on [-pi/2, pi/2].
PathSet sample_paths(Rng& rng, int num_paths, int cp_length, double sample_period);

/// Frequency-domain channel over N subcarriers:
///   H[k] = sum_d sum_l alpha_l f(d*T_s - tau_l) a_r(aoa_l) a_t(aod_l)^H e^{-j2pi k d / N}
/// with the tap sum running over d = 0..N-1.
ChannelRealization frequency_channel(const PathSet& paths, int num_subcarriers,
                                     double sample_period, Eigen::Index num_rx,
                                     Eigen::Index num_tx, double rolloff);

}  // namespace hbf
