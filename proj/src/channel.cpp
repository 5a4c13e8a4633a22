#include "hybridbf/channel.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace hbf {

namespace {

double sinc(double x) {
  if (x == 0.0) return 1.0;
  return std::sin(kPi * x) / (kPi * x);
}

}  // namespace

void PathSet::validate(double max_delay) const {
  const auto n = gains.size();
  if (delays.size() != n || aoa.size() != n || aod.size() != n) {
    throw std::invalid_argument("channel: path arrays have inconsistent lengths");
  }
  for (std::size_t l = 0; l < n; ++l) {
    for (double a : {aoa[l], aod[l]}) {
      if (!(a >= -kPi / 2 && a <= kPi / 2)) {
        throw std::invalid_argument("channel: path " + std::to_string(l) +
                                    " angle outside [-pi/2, pi/2]");
      }
    }
    if (!(delays[l] >= 0.0 && delays[l] <= max_delay)) {
      throw std::invalid_argument("channel: path " + std::to_string(l) +
                                  " delay outside the cyclic prefix");
    }
  }
}

CVector array_response(double angle, Eigen::Index num_elements) {
  if (!std::isfinite(angle)) {
    throw std::invalid_argument("channel: array_response angle must be finite");
  }
  if (num_elements < 1) {
    throw std::invalid_argument("channel: array_response needs at least one element");
  }
  const double s = std::sin(angle);
  CVector a(num_elements);
  for (Eigen::Index n = 0; n < num_elements; ++n) {
    a(n) = std::polar(1.0, kPi * static_cast<double>(n) * s);
  }
  return a;
}

double raised_cosine(double t, double sample_period, double rolloff) {
  if (!(sample_period > 0.0)) {
    throw std::invalid_argument("channel: raised_cosine sample period must be positive");
  }
  if (!(rolloff >= 0.0 && rolloff <= 1.0)) {
    throw std::invalid_argument("channel: raised_cosine rolloff must lie in [0, 1]");
  }
  const double x = t / sample_period;
  if (rolloff > 0.0) {
    const double edge = 1.0 / (2.0 * rolloff);
    if (std::abs(std::abs(x) - edge) < 1e-12) {
      return (kPi / 4.0) * sinc(edge);
    }
  }
  const double denom = 1.0 - 4.0 * rolloff * rolloff * x * x;
  return sinc(x) * std::cos(kPi * rolloff * x) / denom;
}

PathSet sample_paths(Rng& rng, int num_paths, int cp_length, double sample_period) {
  if (num_paths < 1) throw std::invalid_argument("channel: need at least one path");
  if (cp_length < 1) throw std::invalid_argument("channel: cyclic prefix length must be positive");
  if (!(sample_period > 0.0)) {
    throw std::invalid_argument("channel: sample period must be positive");
  }
  std::uniform_real_distribution<double> angle(-kPi / 2, kPi / 2);
  std::uniform_real_distribution<double> delay(0.0, (cp_length - 1) * sample_period);

  PathSet p;
  p.gains.reserve(num_paths);
  p.delays.reserve(num_paths);
  p.aoa.reserve(num_paths);
  p.aod.reserve(num_paths);
  // Draw order is part of the reproducibility contract.
  for (int l = 0; l < num_paths; ++l) {
    p.gains.push_back(complex_gaussian(rng));
    p.delays.push_back(cp_length > 1 ? delay(rng) : 0.0);
    p.aoa.push_back(angle(rng));
    p.aod.push_back(angle(rng));
  }
  return p;
}

ChannelRealization frequency_channel(const PathSet& paths, int num_subcarriers,
                                     double sample_period, Eigen::Index num_rx,
                                     Eigen::Index num_tx, double rolloff) {
  if (num_subcarriers < 1) throw std::invalid_argument("channel: need at least one subcarrier");
  if (num_rx < 1 || num_tx < 1) {
    throw std::invalid_argument("channel: antenna counts must be positive");
  }
  const auto n_paths = paths.size();
  if (paths.delays.size() != n_paths || paths.aoa.size() != n_paths ||
      paths.aod.size() != n_paths) {
    throw std::invalid_argument("channel: path arrays have inconsistent lengths");
  }

  const int n_sc = num_subcarriers;
  // Per-path frequency response g_l[k] = alpha_l sum_d f(d T_s - tau_l) e^{-j2pi k d/N}.
  // Each H[k] is then a sum of L rank-one outer products.
  std::vector<CVector> ar(n_paths), at(n_paths);
  std::vector<std::vector<cd>> g(n_paths, std::vector<cd>(n_sc, cd{0.0, 0.0}));
  for (std::size_t l = 0; l < n_paths; ++l) {
    ar[l] = array_response(paths.aoa[l], num_rx);
    at[l] = array_response(paths.aod[l], num_tx);
    std::vector<double> taps(n_sc);
    for (int d = 0; d < n_sc; ++d) {
      taps[d] = raised_cosine(d * sample_period - paths.delays[l], sample_period, rolloff);
    }
    for (int k = 0; k < n_sc; ++k) {
      cd acc{0.0, 0.0};
      for (int d = 0; d < n_sc; ++d) {
        // k*d reduced mod N keeps the phase argument small.
        const auto kd = static_cast<long long>(k) * d % n_sc;
        acc += taps[d] * std::polar(1.0, -2.0 * kPi * static_cast<double>(kd) / n_sc);
      }
      g[l][k] = paths.gains[l] * acc;
    }
  }

  ChannelRealization ch;
  ch.paths = paths;
  ch.sample_period = sample_period;
  ch.rolloff = rolloff;
  ch.freq.reserve(n_sc);
  for (int k = 0; k < n_sc; ++k) {
    CMatrix h = CMatrix::Zero(num_rx, num_tx);
    for (std::size_t l = 0; l < n_paths; ++l) {
      h.noalias() += g[l][k] * (ar[l] * at[l].adjoint());
    }
    ch.freq.push_back(std::move(h));
  }
  return ch;
}

}  // namespace hbf
