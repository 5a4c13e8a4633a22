#include "hybridbf/sensing.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>
#include <string>

namespace hbf {

namespace {

void check_series(const MatrixSeries& s, const char* what) {
  if (s.empty()) throw std::invalid_argument(std::string("sensing: empty ") + what);
  for (const auto& m : s) {
    if (m.rows() != s.front().rows() || m.cols() != s.front().cols()) {
      throw std::invalid_argument(std::string("sensing: inconsistent ") + what + " dimensions");
    }
  }
}

struct PursuitResult {
  std::vector<Eigen::Index> support;
  CMatrix coeffs;  // support.size() x columns
  std::vector<double> residual_history;
};

// Greedy pursuit over the columns of `y` with a common support. Atoms are
// scored by sum_c |v^H r_c| / ||v|| and the coefficients refit by least squares
// after every selection.
PursuitResult pursue(const CMatrix& sensing, const RVector& atom_norms, const CMatrix& y,
                     int max_sparsity, double residual_tol) {
  PursuitResult out;
  const double y_norm = y.norm();
  out.residual_history.push_back(1.0);
  if (y_norm == 0.0) {
    out.coeffs = CMatrix::Zero(0, y.cols());
    out.residual_history.back() = 0.0;
    return out;
  }

  std::vector<bool> used(sensing.cols(), false);
  CMatrix residual = y;
  CMatrix coeffs(0, y.cols());
  while (static_cast<int>(out.support.size()) < max_sparsity &&
         out.residual_history.back() > residual_tol) {
    const CMatrix corr = sensing.adjoint() * residual;
    Eigen::Index best = -1;
    double best_score = -1.0;
    for (Eigen::Index g = 0; g < sensing.cols(); ++g) {
      if (used[g] || atom_norms(g) == 0.0) continue;
      const double score = corr.row(g).cwiseAbs().sum() / atom_norms(g);
      if (score > best_score) {
        best_score = score;
        best = g;
      }
    }
    if (best < 0) break;
    used[best] = true;
    out.support.push_back(best);

    CMatrix sub(sensing.rows(), static_cast<Eigen::Index>(out.support.size()));
    for (std::size_t s = 0; s < out.support.size(); ++s) {
      sub.col(static_cast<Eigen::Index>(s)) = sensing.col(out.support[s]);
    }
    Eigen::ColPivHouseholderQR<CMatrix> qr(sub);
    if (qr.rank() < sub.cols()) {
      throw std::logic_error("sensing: restricted sensing matrix is rank deficient");
    }
    coeffs = qr.solve(y);
    residual = y - sub * coeffs;
    out.residual_history.push_back(residual.norm() / y_norm);
  }
  out.coeffs = std::move(coeffs);
  return out;
}

struct Prepared {
  CMatrix sensing;
  RVector atom_norms;
  Eigen::Index rows = 0;
  Eigen::Index rf = 0;
  std::size_t n_sc = 0;
};

Prepared prepare(const MatrixSeries& measurements, const MeasurementMatrix& phi,
                 const AngleDictionary& dict, int max_sparsity) {
  check_series(measurements, "measurements");
  if (phi.num_antennas() != dict.num_antennas()) {
    throw std::invalid_argument("sensing: measurement matrix and dictionary antenna counts differ");
  }
  if (measurements.front().rows() != phi.rows()) {
    throw std::invalid_argument("sensing: measurement rows do not match the measurement matrix");
  }
  if (max_sparsity < 1 || max_sparsity > phi.rows() || max_sparsity > dict.size()) {
    throw std::invalid_argument("sensing: max_sparsity must lie in [1, min(M, grid size)]");
  }
  Prepared p;
  p.sensing = phi.entries * dict.atoms;
  p.atom_norms = p.sensing.colwise().norm().transpose();
  p.rows = phi.rows();
  p.rf = measurements.front().cols();
  p.n_sc = measurements.size();
  return p;
}

SparseEstimate assemble(const AngleDictionary& dict, const Prepared& p,
                        MatrixSeries coefficients) {
  SparseEstimate est;
  est.effective_channel.reserve(p.n_sc);
  for (const auto& x : coefficients) est.effective_channel.push_back(dict.atoms * x);
  est.coefficients = std::move(coefficients);
  return est;
}

}  // namespace

MeasurementMatrix generate_measurement_matrix(Rng& rng, Eigen::Index rows,
                                              Eigen::Index num_antennas) {
  if (rows < 1 || num_antennas < 1) {
    throw std::invalid_argument("sensing: measurement matrix dimensions must be positive");
  }
  static constexpr cd kAlphabet[4] = {{1.0, 0.0}, {0.0, 1.0}, {-1.0, 0.0}, {0.0, -1.0}};
  std::uniform_int_distribution<int> pick(0, 3);
  MeasurementMatrix phi{CMatrix(rows, num_antennas)};
  // Row-major fill order keeps the stream layout independent of storage order.
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < num_antennas; ++c) phi.entries(r, c) = kAlphabet[pick(rng)];
  }
  return phi;
}

MatrixSeries effective_channel(const MatrixSeries& channel, LinkDirection dir,
                               const CMatrix& beams) {
  check_series(channel, "channel");
  const auto side = dir == LinkDirection::forward ? channel.front().cols() : channel.front().rows();
  if (beams.rows() != side) {
    throw std::invalid_argument("sensing: training beam length does not match the antenna count");
  }
  MatrixSeries out;
  out.reserve(channel.size());
  for (const auto& h : channel) {
    if (dir == LinkDirection::forward) {
      out.push_back(h * beams);
    } else {
      out.push_back(h.adjoint() * beams);
    }
  }
  return out;
}

MatrixSeries simulate_training(const MatrixSeries& channel, LinkDirection dir,
                               const CMatrix& beams, const MeasurementMatrix& phi,
                               double noise_std, Rng& rng) {
  if (!(noise_std >= 0.0)) throw std::invalid_argument("sensing: noise_std must be >= 0");
  MatrixSeries eff = effective_channel(channel, dir, beams);
  if (eff.front().rows() != phi.num_antennas()) {
    throw std::invalid_argument("sensing: measurement matrix does not match the measuring array");
  }
  const double var = noise_std * noise_std;
  MatrixSeries out;
  out.reserve(eff.size());
  for (auto& h : eff) {
    if (noise_std > 0.0) {
      for (Eigen::Index c = 0; c < h.cols(); ++c) {
        for (Eigen::Index r = 0; r < h.rows(); ++r) h(r, c) += complex_gaussian(rng, var);
      }
    }
    out.push_back(phi.entries * h);
  }
  return out;
}

SparseEstimate somp_recover(const MatrixSeries& measurements, const MeasurementMatrix& phi,
                            const AngleDictionary& dict, int max_sparsity,
                            double residual_tol) {
  const Prepared p = prepare(measurements, phi, dict, max_sparsity);

  // Stack every subcarrier side by side: column k*rf + i holds r_i[k].
  CMatrix stacked(p.rows, p.rf * static_cast<Eigen::Index>(p.n_sc));
  for (std::size_t k = 0; k < p.n_sc; ++k) {
    stacked.middleCols(static_cast<Eigen::Index>(k) * p.rf, p.rf) = measurements[k];
  }
  PursuitResult res = pursue(p.sensing, p.atom_norms, stacked, max_sparsity, residual_tol);

  MatrixSeries coefficients(p.n_sc, CMatrix::Zero(dict.size(), p.rf));
  for (std::size_t k = 0; k < p.n_sc; ++k) {
    for (std::size_t s = 0; s < res.support.size(); ++s) {
      coefficients[k].row(res.support[s]) =
          res.coeffs.row(static_cast<Eigen::Index>(s))
              .segment(static_cast<Eigen::Index>(k) * p.rf, p.rf);
    }
  }
  SparseEstimate est = assemble(dict, p, std::move(coefficients));
  est.support = std::move(res.support);
  est.residual_history = std::move(res.residual_history);
  return est;
}

SparseEstimate omp_per_column_recover(const MatrixSeries& measurements,
                                      const MeasurementMatrix& phi,
                                      const AngleDictionary& dict, int max_sparsity,
                                      double residual_tol) {
  const Prepared p = prepare(measurements, phi, dict, max_sparsity);
  MatrixSeries coefficients(p.n_sc, CMatrix::Zero(dict.size(), p.rf));
  std::set<Eigen::Index> support;
  for (std::size_t k = 0; k < p.n_sc; ++k) {
    for (Eigen::Index i = 0; i < p.rf; ++i) {
      PursuitResult res = pursue(p.sensing, p.atom_norms, measurements[k].col(i),
                                 max_sparsity, residual_tol);
      for (std::size_t s = 0; s < res.support.size(); ++s) {
        coefficients[k](res.support[s], i) = res.coeffs(static_cast<Eigen::Index>(s), 0);
        support.insert(res.support[s]);
      }
    }
  }
  SparseEstimate est = assemble(dict, p, std::move(coefficients));
  est.support.assign(support.begin(), support.end());
  return est;
}

SparseEstimate recover(RecoveryMethod method, const MatrixSeries& measurements,
                       const MeasurementMatrix& phi, const AngleDictionary& dict,
                       int max_sparsity, double residual_tol) {
  if (method == RecoveryMethod::omp_per_column) {
    return omp_per_column_recover(measurements, phi, dict, max_sparsity, residual_tol);
  }
  return somp_recover(measurements, phi, dict, max_sparsity, residual_tol);
}

}  // namespace hbf
