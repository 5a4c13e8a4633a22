#pragma once

#include <complex>
#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace hbf {

using cd = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;

// One matrix per subcarrier.
using MatrixSeries = std::vector<CMatrix>;

using Rng = std::mt19937_64;

inline constexpr double kPi = 3.14159265358979323846;

// SplitMix64 finalizer; used to derive independent stream seeds.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Counter-based seed derivation: each component is folded in through mix64,
// so distinct (master, tag, a, b) tuples give unrelated streams.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t tag,
                                    std::uint64_t a = 0, std::uint64_t b = 0) {
  std::uint64_t s = mix64(master);
  s = mix64(s ^ tag);
  s = mix64(s ^ a);
  return mix64(s ^ b);
}

// Circularly-symmetric complex Gaussian with variance `var`.
inline cd complex_gaussian(Rng& rng, double var = 1.0) {
  std::normal_distribution<double> n(0.0, std::sqrt(var / 2.0));
  const double re = n(rng);
  const double im = n(rng);
  return {re, im};
}

}  // namespace hbf
