#include <doctest.h>

#include <array>
#include <cmath>
#include <numeric>

#include "hybridbf/channel.hpp"
#include "hybridbf/codebook.hpp"
#include "hybridbf/sensing.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace hbf;

namespace {

// Noise-free forward measurements of K on-grid paths with random per-subcarrier
// and per-RF-chain coefficients.
MatrixSeries on_grid_measurements(Rng& rng, const AngleDictionary& dict,
                                  const MeasurementMatrix& phi,
                                  const std::vector<Eigen::Index>& support, int n_sc, int n_rf,
                                  MatrixSeries* truth = nullptr) {
  MatrixSeries out;
  for (int k = 0; k < n_sc; ++k) {
    CMatrix x = CMatrix::Zero(dict.size(), n_rf);
    for (auto s : support) x.row(s) = testutil::random_matrix(rng, 1, n_rf);
    const CMatrix h = dict.atoms * x;
    if (truth) truth->push_back(h);
    out.push_back(phi.entries * h);
  }
  return out;
}

MeasurementMatrix identity_phi(Eigen::Index n) { return {CMatrix::Identity(n, n)}; }

}  // namespace

TEST_CASE("measurement matrix alphabet and determinism") {
  Rng a(5), b(5);
  const auto phi = generate_measurement_matrix(a, 20, 32);
  CHECK(phi.rows() == 20);
  CHECK(phi.num_antennas() == 32);
  for (Eigen::Index r = 0; r < 20; ++r) {
    for (Eigen::Index c = 0; c < 32; ++c) {
      const cd e = phi.entries(r, c);
      const bool ok = e == cd(1, 0) || e == cd(-1, 0) || e == cd(0, 1) || e == cd(0, -1);
      CHECK(ok);
    }
  }
  CHECK(phi.entries == generate_measurement_matrix(b, 20, 32).entries);
}

TEST_CASE("measurement symbols are equiprobable") {
  Rng rng(77);
  const auto phi = generate_measurement_matrix(rng, 100, 100);
  std::array<int, 4> counts{};
  for (Eigen::Index r = 0; r < 100; ++r) {
    for (Eigen::Index c = 0; c < 100; ++c) {
      const cd e = phi.entries(r, c);
      if (e == cd(1, 0)) ++counts[0];
      else if (e == cd(0, 1)) ++counts[1];
      else if (e == cd(-1, 0)) ++counts[2];
      else ++counts[3];
    }
  }
  // Binomial(1e4, 1/4): std = sqrt(1e4 * 0.25 * 0.75) ~ 43.3 counts.
  const double four_sigma = 4.0 * std::sqrt(1e4 * 0.25 * 0.75);
  for (int c : counts) CHECK(std::abs(c - 2500.0) < four_sigma);
}

TEST_CASE("noiseless training with identity measurements passes the channel through") {
  Rng rng(1);
  const PathSet p = sample_paths(rng, 3, 4, 1.0);
  const auto ch = frequency_channel(p, 8, 1.0, 6, 5, 0.8);
  const CMatrix beams = testutil::random_matrix(rng, 5, 2);
  const auto r = simulate_training(ch.freq, LinkDirection::forward, beams, identity_phi(6), 0.0, rng);
  for (int k = 0; k < 8; ++k) CHECK((r[k] - ch.freq[k] * beams).norm() < 1e-12);

  const CMatrix rbeams = testutil::random_matrix(rng, 6, 2);
  const auto rr =
      simulate_training(ch.freq, LinkDirection::reverse, rbeams, identity_phi(5), 0.0, rng);
  for (int k = 0; k < 8; ++k) CHECK((rr[k] - ch.freq[k].adjoint() * rbeams).norm() < 1e-12);
}

TEST_CASE("single on-grid path training matches the per-path coefficient expansion") {
  const int n_sc = 8, nr = 8, nt = 4;
  const AngleDictionary dict = build_dictionary(nr, 11.25);
  const cd alpha(0.7, -0.4);
  const double tau = 2.3;
  const double aod = 0.4;
  const PathSet p{{alpha}, {tau}, {dict.grid_angles[5]}, {aod}};
  const auto ch = frequency_channel(p, n_sc, 1.0, nr, nt, 0.8);
  Rng rng(2);
  const auto phi = generate_measurement_matrix(rng, 6, nr);
  const CMatrix ones = CMatrix::Ones(nt, 1);
  const auto r = simulate_training(ch.freq, LinkDirection::forward, ones, phi, 0.0, rng);

  // beta = a_t^H f, gamma_k = alpha * beta * sum_d f(d T_s - tau) e^{-j 2 pi k d / N}.
  cd beta = 0.0;
  for (const auto& v : oracle::steering(aod, nt)) beta += std::conj(v);
  for (int k = 0; k < n_sc; ++k) {
    cd gamma = 0.0;
    for (int d = 0; d < n_sc; ++d) {
      gamma += alpha * beta * oracle::raised_cosine(d - tau, 1.0, 0.8) *
               std::exp(cd(0, -2 * oracle::pi * k * d / n_sc));
    }
    const CMatrix expected = phi.entries * (gamma * dict.atoms.col(5));
    CHECK(testutil::rel_err(r[k], expected) < 1e-12);
  }
}

TEST_CASE("noisy training is reproducible for a fixed seed") {
  Rng setup(3);
  const auto ch = frequency_channel(sample_paths(setup, 2, 4, 1.0), 4, 1.0, 8, 8, 0.8);
  const auto phi = generate_measurement_matrix(setup, 10, 8);
  const CMatrix beams = testutil::random_matrix(setup, 8, 2);
  Rng a(10), b(10);
  const auto r1 = simulate_training(ch.freq, LinkDirection::forward, beams, phi, 0.5, a);
  const auto r2 = simulate_training(ch.freq, LinkDirection::forward, beams, phi, 0.5, b);
  for (std::size_t k = 0; k < r1.size(); ++k) CHECK(r1[k] == r2[k]);
}

TEST_CASE("simulate_training rejects mismatched dimensions") {
  Rng rng(4);
  const auto ch = frequency_channel(sample_paths(rng, 1, 4, 1.0), 4, 1.0, 8, 6, 0.8);
  const auto phi8 = generate_measurement_matrix(rng, 4, 8);
  CHECK_THROWS_AS(simulate_training(ch.freq, LinkDirection::forward, CMatrix::Ones(8, 1), phi8,
                                    0.0, rng),
                  std::invalid_argument);
  CHECK_THROWS_AS(simulate_training(ch.freq, LinkDirection::reverse, CMatrix::Ones(8, 1), phi8,
                                    0.0, rng),
                  std::invalid_argument);
  CHECK_THROWS_AS(simulate_training(ch.freq, LinkDirection::forward, CMatrix::Ones(6, 1), phi8,
                                    -1.0, rng),
                  std::invalid_argument);
}

TEST_CASE("single on-grid path is recovered exactly and agrees with exhaustive search") {
  const AngleDictionary dict = build_dictionary(16, 5.625);  // 32 atoms
  const auto phi = identity_phi(16);
  Rng rng(8);
  for (Eigen::Index idx : {0, 7, 16, 31}) {
    MatrixSeries truth;
    const auto meas = on_grid_measurements(rng, dict, phi, {idx}, 4, 2, &truth);
    const SparseEstimate est = somp_recover(meas, phi, dict, 1, 0.0);
    REQUIRE(est.support.size() == 1);
    CHECK(est.support[0] == idx);
    for (std::size_t k = 0; k < truth.size(); ++k) {
      CHECK((est.effective_channel[k] - truth[k]).norm() < 1e-10);
    }
    // Independent single-atom search per stacked column set.
    CMatrix stacked(16, 8);
    for (int k = 0; k < 4; ++k) stacked.middleCols(2 * k, 2) = meas[k];
    CHECK(oracle::best_support(phi.entries * dict.atoms, stacked, 1) ==
          std::vector<Eigen::Index>{idx});
  }
}

TEST_CASE("zero measurements give an empty estimate") {
  const AngleDictionary dict = build_dictionary(8, 11.25);
  Rng rng(9);
  const auto phi = generate_measurement_matrix(rng, 6, 8);
  const MatrixSeries zeros(3, CMatrix::Zero(6, 2));
  const SparseEstimate est = somp_recover(zeros, phi, dict, 3, 1e-6);
  CHECK(est.support.empty());
  for (const auto& h : est.effective_channel) CHECK(h.norm() == 0.0);
  for (const auto& x : est.coefficients) CHECK(x.norm() == 0.0);
}

TEST_CASE("two well-separated on-grid paths: SOMP matches the exhaustive pair search") {
  const AngleDictionary dict = build_dictionary(16, 11.25);  // 16 atoms
  Rng rng(21);
  int agree = 0;
  const std::vector<std::vector<Eigen::Index>> supports{{2, 9}, {4, 12}, {0, 8}, {6, 13}};
  for (const auto& support : supports) {
    const auto phi = generate_measurement_matrix(rng, 8, 16);
    const auto meas = on_grid_measurements(rng, dict, phi, support, 4, 2);
    const SparseEstimate est = somp_recover(meas, phi, dict, 2, 0.0);
    CMatrix stacked(8, 8);
    for (int k = 0; k < 4; ++k) stacked.middleCols(2 * k, 2) = meas[k];
    const auto best = oracle::best_support(phi.entries * dict.atoms, stacked, 2);
    CHECK(best == support);
    CHECK(testutil::sorted(est.support) == support);
    agree += testutil::sorted(est.support) == best;
  }
  CHECK(agree == static_cast<int>(supports.size()));
}

TEST_CASE("SOMP invariants on noisy data") {
  const AngleDictionary dict = build_dictionary(16, 5.625);
  Rng rng(31);
  for (int trial = 0; trial < 20; ++trial) {
    const auto phi = generate_measurement_matrix(rng, 12, 16);
    MatrixSeries meas = on_grid_measurements(rng, dict, phi, {3, 17, 25}, 6, 3);
    for (auto& m : meas) m += 0.1 * testutil::random_matrix(rng, m.rows(), m.cols());
    const SparseEstimate est = somp_recover(meas, phi, dict, 5, 1e-6);

    CHECK(est.support.size() <= 5);
    for (std::size_t i = 1; i < est.residual_history.size(); ++i) {
      CHECK(est.residual_history[i] <= est.residual_history[i - 1] + 1e-12);
    }
    std::vector<bool> on(dict.size(), false);
    for (auto s : est.support) on[s] = true;
    for (std::size_t k = 0; k < meas.size(); ++k) {
      CHECK((dict.atoms * est.coefficients[k] - est.effective_channel[k]).norm() <=
            1e-10 * std::max(1.0, est.effective_channel[k].norm()));
      for (Eigen::Index g = 0; g < dict.size(); ++g) {
        if (!on[g]) CHECK(est.coefficients[k].row(g).norm() == 0.0);
      }
    }
  }
}

TEST_CASE("permuting the dictionary permutes the recovered support") {
  const AngleDictionary dict = build_dictionary(16, 5.625);
  Rng rng(41);
  const auto phi = generate_measurement_matrix(rng, 12, 16);
  MatrixSeries meas = on_grid_measurements(rng, dict, phi, {5, 20}, 4, 2);
  for (auto& m : meas) m += 0.05 * testutil::random_matrix(rng, m.rows(), m.cols());

  std::vector<Eigen::Index> perm(dict.size());
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  AngleDictionary shuffled = dict;
  for (Eigen::Index j = 0; j < dict.size(); ++j) {
    shuffled.atoms.col(j) = dict.atoms.col(perm[j]);
    shuffled.grid_angles[j] = dict.grid_angles[perm[j]];
  }
  const SparseEstimate a = somp_recover(meas, phi, dict, 2, 0.0);
  const SparseEstimate b = somp_recover(meas, phi, shuffled, 2, 0.0);
  std::vector<Eigen::Index> mapped;
  for (auto s : b.support) mapped.push_back(perm[s]);
  CHECK(testutil::sorted(mapped) == testutil::sorted(a.support));
  for (std::size_t k = 0; k < meas.size(); ++k) {
    CHECK((a.effective_channel[k] - b.effective_channel[k]).norm() < 1e-9);
  }
}

TEST_CASE("per-column OMP recovers on-grid paths") {
  const AngleDictionary dict = build_dictionary(16, 5.625);
  Rng rng(51);
  const auto phi = generate_measurement_matrix(rng, 16, 16);
  MatrixSeries truth;
  const auto meas = on_grid_measurements(rng, dict, phi, {4, 22}, 3, 2, &truth);
  const SparseEstimate est = omp_per_column_recover(meas, phi, dict, 2, 0.0);
  CHECK(est.support == std::vector<Eigen::Index>{4, 22});
  for (std::size_t k = 0; k < truth.size(); ++k) {
    CHECK((est.effective_channel[k] - truth[k]).norm() < 1e-9 * truth[k].norm());
  }
  const SparseEstimate via = recover(RecoveryMethod::omp_per_column, meas, phi, dict, 2, 0.0);
  CHECK(via.support == est.support);
}

TEST_CASE("recovery rejects invalid sparsity and dimensions") {
  const AngleDictionary dict = build_dictionary(8, 22.5);
  Rng rng(61);
  const auto phi = generate_measurement_matrix(rng, 4, 8);
  const MatrixSeries meas(2, CMatrix::Ones(4, 1));
  CHECK_THROWS_AS(somp_recover(meas, phi, dict, 5, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(somp_recover(meas, phi, dict, 0, 0.0), std::invalid_argument);
  const MatrixSeries wrong(2, CMatrix::Ones(3, 1));
  CHECK_THROWS_AS(somp_recover(wrong, phi, dict, 2, 0.0), std::invalid_argument);
  const AngleDictionary other = build_dictionary(6, 22.5);
  CHECK_THROWS_AS(somp_recover(meas, phi, other, 2, 0.0), std::invalid_argument);
}
