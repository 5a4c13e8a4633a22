#pragma once

#include <vector>

#include "hybridbf/types.hpp"

namespace hbf {

/// Constant-modulus analog beams, one steering vector per column.
struct BeamCodebook {
  CMatrix vectors;              // num_antennas x num_beams
  std::vector<double> angles;   // radians, strictly increasing in [-pi/2, pi/2)

  Eigen::Index num_antennas() const { return vectors.rows(); }
  Eigen::Index size() const { return vectors.cols(); }
};

/// Steering-vector dictionary used as the sparse basis for channel recovery.
struct AngleDictionary {
  CMatrix atoms;                    // num_antennas x grid size
  std::vector<double> grid_angles;  // radians

  Eigen::Index num_antennas() const { return atoms.rows(); }
  Eigen::Index size() const { return atoms.cols(); }
};

/// Uniform angle grid: angle[i] = -pi/2 + i*pi/num_beams.
BeamCodebook build_codebook(Eigen::Index num_antennas, Eigen::Index num_beams);

/// Dictionary with 180/resolution_deg atoms on the same left-closed grid over
/// [-90, 90) degrees. Throws if the resolution does not divide 180.
AngleDictionary build_dictionary(Eigen::Index num_antennas, double resolution_deg);

/// Number of grid points for a resolution in degrees, or throws.
Eigen::Index dictionary_size(double resolution_deg);

}  // namespace hbf
