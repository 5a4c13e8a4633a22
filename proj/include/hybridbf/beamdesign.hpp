#pragma once

#include <cstddef>
#include <vector>

#include "hybridbf/channel.hpp"
#include "hybridbf/codebook.hpp"
#include "hybridbf/sensing.hpp"
#include "hybridbf/types.hpp"

namespace hbf {

/// Column-normalized regularized inverse (H H^H + reg I)^{-1} H, one matrix
/// per subcarrier. Columns that come out exactly zero stay zero and are counted.
struct MmseTarget {
  MatrixSeries columns;
  std::size_t zero_columns = 0;
};

struct AnalogSelection {
  CMatrix analog;                         // copies of codebook columns
  std::vector<Eigen::Index> indices;      // codebook index per RF chain
  std::vector<CVector> basis;             // orthonormal q_i, degenerate columns omitted
  std::vector<Eigen::Index> degenerate;   // RF chains whose beam added no new direction
};

struct DigitalStage {
  MatrixSeries f_bb;  // N_RF x N_s per subcarrier
  MatrixSeries w_bb;  // N_RF x N_s per subcarrier
  std::vector<std::size_t> zero_channel_subcarriers;
};

struct HybridBeamformer {
  CMatrix f_rf;       // N_t x N_RF
  CMatrix w_rf;       // N_r x N_RF
  MatrixSeries f_bb;  // N_RF x N_s
  MatrixSeries w_bb;  // N_RF x N_s
};

MmseTarget mmse_target(const MatrixSeries& effective, double reg);

/// Greedy per-RF-chain codebook search. For chain i, picks the codebook column
/// maximizing sum_k |w^H Gamma[k](:, i)| (ties to the lowest index), then
/// orthogonalizes it against earlier picks and projects that direction out of
/// every later target column.
AnalogSelection select_analog(MmseTarget target, const BeamCodebook& codebook);

/// Baseband stage from the receive-side effective channel H_rx[k] = H[k] F_RF
/// (true or estimated): SVD of W_RF^H H_rx[k], dominant N_s singular vector
/// pairs, then scaling so ||F_RF F_BB[k]||_F^2 = ||W_RF W_BB[k]||_F^2 = N_s.
DigitalStage digital_stage(const CMatrix& w_rf, const CMatrix& f_rf,
                           const MatrixSeries& rx_effective, int num_streams);

enum class CsiMode { estimated, perfect };
enum class ReverseReg { noise_var, unit };

struct DesignCodebooks {
  BeamCodebook tx;
  BeamCodebook rx;
  AngleDictionary tx_dict;
  AngleDictionary rx_dict;
};

struct DesignConfig {
  int num_rf = 4;
  int num_streams = 4;
  int max_iterations = 4;
  Eigen::Index meas_rx = 0;  // M_r
  Eigen::Index meas_tx = 0;  // M_t
  int max_sparsity = 6;
  double residual_tol = 1e-6;
  RecoveryMethod recovery = RecoveryMethod::somp;
  CsiMode csi = CsiMode::estimated;
  ReverseReg reverse_reg = ReverseReg::noise_var;
  // Training SNR P/sigma^2 (linear), per transmit element. Training noise std
  // and the MMSE regularizer follow as sqrt(1/training_snr) and 1/training_snr.
  double training_snr = 1.0;
};

struct IterationRecord {
  std::vector<Eigen::Index> w_indices;
  std::vector<Eigen::Index> f_indices;
  std::size_t degenerate = 0;
};

struct DesignResult {
  HybridBeamformer beamformer;
  std::vector<Eigen::Index> initial_f_indices;
  std::vector<IterationRecord> trace;
  bool converged = false;
  std::size_t zero_channel_subcarriers = 0;
};

/// Alternating forward/reverse analog design followed by the digital stage.
/// Stops once both index sets repeat, or after max_iterations.
DesignResult iterate_design(const ChannelRealization& channel, const DesignCodebooks& books,
                            const DesignConfig& config, Rng& rng);

}  // namespace hbf
