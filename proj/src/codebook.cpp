#include "hybridbf/codebook.hpp"

#include <cmath>
#include <stdexcept>

#include "hybridbf/channel.hpp"

namespace hbf {

namespace {

CMatrix steering_matrix(Eigen::Index num_antennas, const std::vector<double>& angles) {
  CMatrix m(num_antennas, static_cast<Eigen::Index>(angles.size()));
  for (std::size_t i = 0; i < angles.size(); ++i) {
    m.col(static_cast<Eigen::Index>(i)) = array_response(angles[i], num_antennas);
  }
  return m;
}

std::vector<double> uniform_grid(Eigen::Index count) {
  std::vector<double> g(count);
  const double step = kPi / static_cast<double>(count);
  for (Eigen::Index i = 0; i < count; ++i) g[i] = -kPi / 2 + static_cast<double>(i) * step;
  return g;
}

}  // namespace

BeamCodebook build_codebook(Eigen::Index num_antennas, Eigen::Index num_beams) {
  if (num_beams < 1) throw std::invalid_argument("codebook: need at least one beam");
  if (num_antennas < 1) throw std::invalid_argument("codebook: need at least one antenna");
  BeamCodebook cb;
  cb.angles = uniform_grid(num_beams);
  cb.vectors = steering_matrix(num_antennas, cb.angles);
  return cb;
}

Eigen::Index dictionary_size(double resolution_deg) {
  if (!(resolution_deg > 0.0) || resolution_deg > 180.0) {
    throw std::invalid_argument("codebook: dictionary resolution must lie in (0, 180] degrees");
  }
  const double ratio = 180.0 / resolution_deg;
  const double rounded = std::round(ratio);
  if (std::abs(ratio - rounded) > 1e-9 * ratio) {
    throw std::invalid_argument("codebook: dictionary resolution must divide 180 degrees");
  }
  return static_cast<Eigen::Index>(rounded);
}

AngleDictionary build_dictionary(Eigen::Index num_antennas, double resolution_deg) {
  if (num_antennas < 1) throw std::invalid_argument("codebook: need at least one antenna");
  const auto count = dictionary_size(resolution_deg);
  AngleDictionary d;
  d.grid_angles = uniform_grid(count);
  d.atoms = steering_matrix(num_antennas, d.grid_angles);
  return d;
}

}  // namespace hbf
