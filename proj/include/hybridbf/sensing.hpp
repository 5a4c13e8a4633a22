#pragma once

#include <vector>

#include "hybridbf/codebook.hpp"
#include "hybridbf/types.hpp"

namespace hbf {

/// M x num_antennas training matrix with entries drawn from {+1, -1, +j, -j}.
struct MeasurementMatrix {
  CMatrix entries;

  Eigen::Index rows() const { return entries.rows(); }
  Eigen::Index num_antennas() const { return entries.cols(); }
};

/// Which side of the link is training. Forward: transmitter beams, receiver
/// measures H[k]*beam. Reverse: receiver beams, transmitter measures H[k]^H*beam.
enum class LinkDirection { forward, reverse };

enum class RecoveryMethod { somp, omp_per_column };

struct SparseEstimate {
  // Selection order for SOMP; sorted union of per-column supports otherwise.
  std::vector<Eigen::Index> support;
  MatrixSeries coefficients;        // grid size x N_RF, zero outside support
  MatrixSeries effective_channel;   // dictionary * coefficients
  // Relative residual after each greedy step (SOMP only), starting at 1.
  std::vector<double> residual_history;
};

MeasurementMatrix generate_measurement_matrix(Rng& rng, Eigen::Index rows,
                                              Eigen::Index num_antennas);

/// Noise-free effective channel seen by the measuring side: column i is
/// H[k]*beams.col(i) (forward) or H[k]^H*beams.col(i) (reverse).
MatrixSeries effective_channel(const MatrixSeries& channel, LinkDirection dir,
                               const CMatrix& beams);

/// R[k] = Phi * (H_eff[k] + N[k]) with N[k] i.i.d. CN(0, noise_std^2), drawn
/// fresh for every subcarrier and training column. No draws when noise_std == 0.
MatrixSeries simulate_training(const MatrixSeries& channel, LinkDirection dir,
                               const CMatrix& beams, const MeasurementMatrix& phi,
                               double noise_std, Rng& rng);

/// Simultaneous OMP: one support shared by every subcarrier and RF column.
SparseEstimate somp_recover(const MatrixSeries& measurements, const MeasurementMatrix& phi,
                            const AngleDictionary& dict, int max_sparsity,
                            double residual_tol);

/// Classic OMP run independently on each (subcarrier, RF column) pair.
SparseEstimate omp_per_column_recover(const MatrixSeries& measurements,
                                      const MeasurementMatrix& phi,
                                      const AngleDictionary& dict, int max_sparsity,
                                      double residual_tol);

SparseEstimate recover(RecoveryMethod method, const MatrixSeries& measurements,
                       const MeasurementMatrix& phi, const AngleDictionary& dict,
                       int max_sparsity, double residual_tol);

}  // namespace hbf
