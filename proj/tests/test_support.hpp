#pragma once

#include <cstdint>
#include <random>

#include "berrydet/linalg.hpp"

namespace berrydet::testing {

// Seeded generators for property tests.
class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  double normal() { return std::normal_distribution<double>(0.0, 1.0)(rng_); }
  std::uint64_t seed() { return rng_(); }

  ComplexMatrix complex_matrix(Eigen::Index n) {
    ComplexMatrix m(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j) m(i, j) = Complex(normal(), normal());
    return m;
  }
  ComplexMatrix hermitian(Eigen::Index n) {
    const ComplexMatrix g = complex_matrix(n);
    return 0.5 * (g + g.adjoint());
  }
  ComplexMatrix skew_hermitian(Eigen::Index n) {
    const ComplexMatrix g = complex_matrix(n);
    return 0.5 * (g - g.adjoint());
  }
  ComplexMatrix unitary(Eigen::Index n) {
    Eigen::HouseholderQR<ComplexMatrix> qr(complex_matrix(n));
    ComplexMatrix q = qr.householderQ() * linalg::identity(n);
    const ComplexMatrix r = qr.matrixQR();
    for (Eigen::Index j = 0; j < n; ++j) q.col(j) *= std::polar(1.0, std::arg(r(j, j)));
    return q;
  }

 private:
  std::mt19937_64 rng_;
};

inline double fro(const ComplexMatrix& m) { return m.norm(); }

}  // namespace berrydet::testing
