#pragma once

#include <cstdint>
#include <variant>
#include <vector>

#include "berrydet/linalg.hpp"

namespace berrydet {

/// b0·(sinθ cos t σx + sinθ sin t σy + cosθ σz).
struct SpinHalf {
  double theta = 0.0;
  double b0 = 1.0;
};

/// Constant diagonal family diag(E_1, …, E_N).
struct DiagConst {
  std::vector<double> energies;
};

/// C_0 + Σ_k (C_k e^{ikt} + C_k† e^{−ikt}); harmonics[k-1] holds C_k.
struct FourierSeries {
  ComplexMatrix constant;
  std::vector<ComplexMatrix> harmonics;
};

/// Seeded random Fourier family with a spectral gap at 0.
///
/// C_0 has `n_minus` eigenvalues in [−2, −1] and the rest in [1, 2]; harmonic
/// k is a complex Gaussian matrix scaled by amplitude·2^{−k}/√N. Draws are
/// rejected until the 0-gap margin reaches `target_gap`.
struct RandomGapped {
  std::size_t dim = 4;
  std::size_t harmonics = 2;
  std::uint64_t seed = 1;
  double target_gap = 0.25;
  std::size_t n_minus = 2;
  double amplitude = 1.0;
  std::size_t max_attempts = 500;
};

using FamilySpec = std::variant<SpinHalf, DiagConst, FourierSeries, RandomGapped>;

/// Smooth 2π-periodic Hermitian family H(t), stored as Fourier coefficients
/// lowered from its spec. Immutable after construction.
class PeriodicHamiltonian {
 public:
  PeriodicHamiltonian(FamilySpec spec, ComplexMatrix constant, std::vector<ComplexMatrix> harmonics);

  std::size_t dim() const { return static_cast<std::size_t>(constant_.rows()); }
  const FamilySpec& spec() const { return spec_; }
  const ComplexMatrix& constant_term() const { return constant_; }
  const std::vector<ComplexMatrix>& harmonics() const { return harmonics_; }

  ComplexMatrix operator()(double t) const;
  ComplexMatrix derivative(double t) const;

  /// t ↦ H(t + tau).
  PeriodicHamiltonian shifted(double tau) const;
  /// t ↦ H(−t), the loop traversed backwards.
  PeriodicHamiltonian reversed() const;

 private:
  FamilySpec spec_;
  ComplexMatrix constant_;
  std::vector<ComplexMatrix> harmonics_;
};

PeriodicHamiltonian build_family(const FamilySpec& spec);

inline ComplexMatrix eval(const PeriodicHamiltonian& fam, double t) { return fam(t); }
inline ComplexMatrix eval_derivative(const PeriodicHamiltonian& fam, double t) {
  return fam.derivative(t);
}

/// λ(t) = constant + Σ_k (cos_coeffs[k-1] cos kt + sin_coeffs[k-1] sin kt).
struct LevelCurve {
  double constant = 0.0;
  std::vector<double> cos_coeffs;
  std::vector<double> sin_coeffs;

  double operator()(double t) const;
};

inline constexpr std::size_t kDefaultGapGrid = 256;

/// min over a uniform grid of dist(λ(t), spec H(t)). Throws GapViolation
/// (naming the worst t) when the margin is ≤ tol.
double gap_margin(const PeriodicHamiltonian& fam, const LevelCurve& level,
                  std::size_t grid = kDefaultGapGrid, double tol = 1e-6);

}  // namespace berrydet
