#include "hybridbf/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace hbf {

namespace {

RateReport finish(std::vector<double> rates) {
  RateReport r;
  r.mean = rates.empty() ? 0.0
                         : std::accumulate(rates.begin(), rates.end(), 0.0) /
                               static_cast<double>(rates.size());
  r.per_subcarrier = std::move(rates);
  return r;
}

}  // namespace

RateReport spectral_efficiency(const MatrixSeries& channel, const HybridBeamformer& bf,
                               double power, double noise_var) {
  if (!(power >= 0.0)) throw std::invalid_argument("metrics: transmit power must be >= 0");
  if (!(noise_var > 0.0)) throw std::invalid_argument("metrics: noise variance must be > 0");
  if (bf.f_bb.size() != channel.size() || bf.w_bb.size() != channel.size()) {
    throw std::invalid_argument("metrics: digital stage does not cover every subcarrier");
  }
  std::vector<double> rates;
  rates.reserve(channel.size());
  for (std::size_t k = 0; k < channel.size(); ++k) {
    const auto& h = channel[k];
    if (h.rows() != bf.w_rf.rows() || h.cols() != bf.f_rf.rows()) {
      throw std::invalid_argument("metrics: beamformer does not match channel at subcarrier " +
                                  std::to_string(k));
    }
    const CMatrix combiner = bf.w_rf * bf.w_bb[k];  // N_r x N_s
    const CMatrix precoder = bf.f_rf * bf.f_bb[k];  // N_t x N_s
    const auto n_s = combiner.cols();
    if (precoder.cols() != n_s) {
      throw std::invalid_argument("metrics: precoder and combiner stream counts differ");
    }
    const CMatrix g = combiner.adjoint() * h * precoder;
    const CMatrix rn = noise_var * (combiner.adjoint() * combiner);

    // det(I + c Rn^{-1} G G^H) = det(I + c L^{-1} G G^H L^{-H}) with Rn = L L^H,
    // which keeps the argument Hermitian positive definite.
    Eigen::LLT<CMatrix> rn_chol(rn);
    const RVector rn_diag = rn_chol.matrixLLT().diagonal().real();
    if (rn_chol.info() != Eigen::Success ||
        rn_diag.minCoeff() * rn_diag.minCoeff() <= 1e-12 * rn.diagonal().real().maxCoeff()) {
      throw std::runtime_error("metrics: noise covariance is singular at subcarrier " +
                               std::to_string(k));
    }
    const CMatrix whitened = rn_chol.matrixL().solve(g);
    CMatrix m = (power / static_cast<double>(n_s)) * (whitened * whitened.adjoint());
    m.diagonal().array() += 1.0;
    Eigen::LLT<CMatrix> chol(m);
    const RVector diag = chol.matrixLLT().diagonal().real();
    const double log_det = 2.0 * diag.array().log().sum();
    rates.push_back(std::max(0.0, log_det / std::log(2.0)));
  }
  return finish(std::move(rates));
}

RateReport full_digital_bound(const MatrixSeries& channel, double power, double noise_var,
                              int num_streams) {
  if (!(power >= 0.0)) throw std::invalid_argument("metrics: transmit power must be >= 0");
  if (!(noise_var > 0.0)) throw std::invalid_argument("metrics: noise variance must be > 0");
  std::vector<double> rates;
  rates.reserve(channel.size());
  for (const auto& h : channel) {
    if (num_streams < 1 || num_streams > std::min(h.rows(), h.cols())) {
      throw std::invalid_argument("metrics: need 1 <= N_s <= min(N_t, N_r)");
    }
    const RVector s = Eigen::JacobiSVD<CMatrix>(h).singularValues();
    const double snr = power / (static_cast<double>(num_streams) * noise_var);
    double rate = 0.0;
    for (int i = 0; i < num_streams; ++i) rate += std::log2(1.0 + snr * s(i) * s(i));
    rates.push_back(rate);
  }
  return finish(std::move(rates));
}

}  // namespace hbf
