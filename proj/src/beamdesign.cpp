#include "hybridbf/beamdesign.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace hbf {

namespace {

constexpr double kDegenerateTol = 1e-12;
// A deflated target column this much smaller than before carries no usable
// direction; it is zeroed so the next search sees no preference.
constexpr double kExhaustedTol = 1e-10;

std::vector<Eigen::Index> sorted(std::vector<Eigen::Index> v) {
  std::sort(v.begin(), v.end());
  return v;
}

// Rotate a singular pair so the first nonzero entry of v is real-positive.
void fix_phase(Eigen::Ref<CVector> u, Eigen::Ref<CVector> v) {
  const double scale = v.norm();
  for (Eigen::Index n = 0; n < v.size(); ++n) {
    if (std::abs(v(n)) > 1e-12 * scale) {
      const cd rot = std::conj(v(n)) / std::abs(v(n));
      v *= rot;
      u *= rot;
      return;
    }
  }
}

CMatrix gather(const BeamCodebook& cb, const std::vector<Eigen::Index>& idx) {
  CMatrix m(cb.num_antennas(), static_cast<Eigen::Index>(idx.size()));
  for (std::size_t i = 0; i < idx.size(); ++i) {
    m.col(static_cast<Eigen::Index>(i)) = cb.vectors.col(idx[i]);
  }
  return m;
}

}  // namespace

MmseTarget mmse_target(const MatrixSeries& effective, double reg) {
  if (!(reg > 0.0)) throw std::invalid_argument("beamdesign: MMSE regularization must be > 0");
  MmseTarget t;
  t.columns.reserve(effective.size());
  for (const auto& h : effective) {
    // Push-through form H (H^H H + reg I)^{-1}: an N_RF x N_RF solve instead of
    // one over the full array.
    CMatrix gram = h.adjoint() * h;
    gram.diagonal().array() += reg;
    CMatrix g = h * gram.ldlt().solve(CMatrix::Identity(h.cols(), h.cols()));
    for (Eigen::Index i = 0; i < g.cols(); ++i) {
      const double n = g.col(i).norm();
      if (n == 0.0) {
        ++t.zero_columns;
      } else {
        g.col(i) /= n;
      }
    }
    t.columns.push_back(std::move(g));
  }
  return t;
}

AnalogSelection select_analog(MmseTarget target, const BeamCodebook& codebook) {
  auto& gamma = target.columns;
  if (gamma.empty()) throw std::invalid_argument("beamdesign: empty MMSE target");
  const Eigen::Index n_ant = gamma.front().rows();
  const Eigen::Index n_rf = gamma.front().cols();
  if (codebook.num_antennas() != n_ant) {
    throw std::invalid_argument("beamdesign: codebook antenna count " +
                                std::to_string(codebook.num_antennas()) +
                                " does not match target " + std::to_string(n_ant));
  }
  const auto n_sc = static_cast<Eigen::Index>(gamma.size());
  const MatrixSeries original = gamma;

  AnalogSelection sel;
  sel.analog.resize(n_ant, n_rf);
  sel.indices.reserve(n_rf);
  CMatrix col_i(n_ant, n_sc);
  auto gather = [&](const MatrixSeries& src, Eigen::Index i) {
    for (Eigen::Index k = 0; k < n_sc; ++k) col_i.col(k) = src[k].col(i);
  };
  auto argmax = [&](bool skip_used) {
    const RVector score = (codebook.vectors.adjoint() * col_i).cwiseAbs().rowwise().sum();
    Eigen::Index best = -1;
    for (Eigen::Index c = 0; c < score.size(); ++c) {
      if (skip_used &&
          std::find(sel.indices.begin(), sel.indices.end(), c) != sel.indices.end()) {
        continue;
      }
      if (best < 0 || score(c) > score(best)) best = c;
    }
    return best;
  };
  for (Eigen::Index i = 0; i < n_rf; ++i) {
    gather(gamma, i);
    Eigen::Index best = 0;
    if (col_i.norm() != 0.0) {
      best = argmax(false);
    } else {
      // Exhausted target: fall back to the undeflated column, restricted to
      // beams not already in use.
      gather(original, i);
      best = argmax(true);
      if (best < 0) best = 0;
    }
    const CVector w = codebook.vectors.col(best);
    sel.analog.col(i) = w;
    sel.indices.push_back(best);

    CVector q = w;
    for (const auto& prev : sel.basis) q -= prev * prev.dot(w);
    const double qn = q.norm();
    if (qn < kDegenerateTol * w.norm()) {
      sel.degenerate.push_back(i);
      continue;
    }
    q /= qn;
    for (auto& g : gamma) {
      for (Eigen::Index j = i + 1; j < n_rf; ++j) {
        const double before = g.col(j).norm();
        const cd proj = q.dot(g.col(j));
        g.col(j) -= q * proj;
        if (g.col(j).norm() <= kExhaustedTol * before) g.col(j).setZero();
      }
    }
    sel.basis.push_back(std::move(q));
  }
  return sel;
}

DigitalStage digital_stage(const CMatrix& w_rf, const CMatrix& f_rf,
                           const MatrixSeries& rx_effective, int num_streams) {
  const Eigen::Index n_rf = w_rf.cols();
  if (f_rf.cols() != n_rf) {
    throw std::invalid_argument("beamdesign: precoder and combiner RF chain counts differ");
  }
  if (num_streams < 1 || num_streams > n_rf) {
    throw std::invalid_argument("beamdesign: need 1 <= N_s <= N_RF");
  }
  const double target = std::sqrt(static_cast<double>(num_streams));
  DigitalStage out;
  out.f_bb.reserve(rx_effective.size());
  out.w_bb.reserve(rx_effective.size());
  for (std::size_t k = 0; k < rx_effective.size(); ++k) {
    const auto& h = rx_effective[k];
    if (h.rows() != w_rf.rows() || h.cols() != n_rf) {
      throw std::invalid_argument("beamdesign: effective channel at subcarrier " +
                                  std::to_string(k) + " has wrong dimensions");
    }
    const CMatrix he = w_rf.adjoint() * h;
    CMatrix fb, wb;
    if (he.norm() == 0.0) {
      out.zero_channel_subcarriers.push_back(k);
      fb = CMatrix::Identity(n_rf, num_streams);
      wb = CMatrix::Identity(n_rf, num_streams);
    } else {
      Eigen::JacobiSVD<CMatrix> svd(he, Eigen::ComputeFullU | Eigen::ComputeFullV);
      CMatrix u = svd.matrixU().leftCols(num_streams);
      CMatrix v = svd.matrixV().leftCols(num_streams);
      for (Eigen::Index s = 0; s < num_streams; ++s) fix_phase(u.col(s), v.col(s));
      fb = std::move(v);
      wb = std::move(u);
    }
    fb *= target / (f_rf * fb).norm();
    wb *= target / (w_rf * wb).norm();
    out.f_bb.push_back(std::move(fb));
    out.w_bb.push_back(std::move(wb));
  }
  return out;
}

DesignResult iterate_design(const ChannelRealization& channel, const DesignCodebooks& books,
                            const DesignConfig& config, Rng& rng) {
  if (config.max_iterations < 1) {
    throw std::invalid_argument("beamdesign: max_iterations must be >= 1");
  }
  if (!(config.training_snr > 0.0)) {
    throw std::invalid_argument("beamdesign: training SNR must be positive");
  }
  const auto& h = channel.freq;
  const Eigen::Index n_r = channel.num_rx();
  const Eigen::Index n_t = channel.num_tx();
  if (books.tx.num_antennas() != n_t || books.rx.num_antennas() != n_r) {
    throw std::invalid_argument("beamdesign: codebook sizes do not match the channel arrays");
  }
  if (config.num_rf < 1 || config.num_rf > books.tx.size()) {
    throw std::invalid_argument("beamdesign: N_RF must lie in [1, codebook size]");
  }

  const bool estimated = config.csi == CsiMode::estimated;
  // Training symbols carry power P on every element of a unit-modulus beam, so
  // in units of H[k]*beam the noise variance is sigma^2 / P.
  const double noise_var = 1.0 / config.training_snr;
  const double fwd_reg = noise_var;
  const double rev_reg = config.reverse_reg == ReverseReg::unit ? 1.0 : noise_var;

  DesignResult result;

  // Random distinct codebook columns seed the precoder.
  std::vector<Eigen::Index> order(static_cast<std::size_t>(books.tx.size()));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  for (int i = 0; i < config.num_rf; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, order.size() - 1);
    std::swap(order[i], order[pick(rng)]);
  }
  std::vector<Eigen::Index> f_idx(order.begin(), order.begin() + config.num_rf);
  result.initial_f_indices = f_idx;
  CMatrix f_rf = gather(books.tx, f_idx);
  CMatrix w_rf;

  MeasurementMatrix phi_r, phi_t;
  if (estimated) {
    phi_r = generate_measurement_matrix(rng, config.meas_rx, n_r);
    phi_t = generate_measurement_matrix(rng, config.meas_tx, n_t);
  }

  auto estimate = [&](LinkDirection dir, const CMatrix& beams) -> MatrixSeries {
    if (!estimated) return effective_channel(h, dir, beams);
    const bool fwd = dir == LinkDirection::forward;
    const auto& phi = fwd ? phi_r : phi_t;
    const auto& dict = fwd ? books.rx_dict : books.tx_dict;
    const double noise_std = std::sqrt(noise_var);
    const MatrixSeries meas = simulate_training(h, dir, beams, phi, noise_std, rng);
    return recover(config.recovery, meas, phi, dict, config.max_sparsity, config.residual_tol)
        .effective_channel;
  };

  MatrixSeries rx_effective;
  CMatrix rx_effective_beams;
  for (int it = 0; it < config.max_iterations; ++it) {
    rx_effective = estimate(LinkDirection::forward, f_rf);
    rx_effective_beams = f_rf;
    AnalogSelection ws = select_analog(mmse_target(rx_effective, fwd_reg), books.rx);
    w_rf = ws.analog;

    const MatrixSeries tx_effective = estimate(LinkDirection::reverse, w_rf);
    AnalogSelection fs = select_analog(mmse_target(tx_effective, rev_reg), books.tx);
    f_rf = fs.analog;

    IterationRecord rec{ws.indices, fs.indices, ws.degenerate.size() + fs.degenerate.size()};
    const bool repeated =
        !result.trace.empty() &&
        sorted(rec.w_indices) == sorted(result.trace.back().w_indices) &&
        sorted(rec.f_indices) == sorted(result.trace.back().f_indices);
    result.trace.push_back(std::move(rec));
    if (repeated) {
      result.converged = true;
      break;
    }
  }

  // The digital stage needs H[k] F_RF for the final precoder; re-train only if
  // the last forward estimate was taken with different beams.
  if (rx_effective_beams != f_rf) rx_effective = estimate(LinkDirection::forward, f_rf);

  DigitalStage digital = digital_stage(w_rf, f_rf, rx_effective, config.num_streams);
  result.zero_channel_subcarriers = digital.zero_channel_subcarriers.size();
  result.beamformer = HybridBeamformer{std::move(f_rf), std::move(w_rf), std::move(digital.f_bb),
                                       std::move(digital.w_bb)};
  return result;
}

}  // namespace hbf
