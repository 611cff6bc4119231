#pragma once

#include <cstddef>

#include "berrydet/hamiltonians.hpp"

namespace berrydet {

/// Orthogonal splitting C^N = F⁻ ⊕ F⁺ at one time t.
struct SpectralSplit {
  double t = 0.0;
  ComplexMatrix projector;        // P onto F⁻
  std::size_t n_minus = 0;
  std::size_t n_plus = 0;
  ComplexMatrix frame;            // N × n_minus, orthonormal columns spanning F⁻
  ComplexMatrix complement_frame; // N × n_plus, orthonormal columns spanning F⁺
  RealVector eigenvalues;         // ascending spectrum of H(t)
};

/// Relative tie tolerance between an eigenvalue and the cut.
inline constexpr double kDefaultTieTolerance = 1e-8;

/// P = Σ_{E_j < level} v_j v_j†. Throws GapViolation when an eigenvalue lies
/// within tie_tol·max(1, ‖h‖) of the level.
SpectralSplit projector_below(const ComplexMatrix& h, double level, double t = 0.0,
                              double tie_tol = kDefaultTieTolerance);

/// Projector onto the `count` lowest eigenvectors; requires E_count − E_{count−1}
/// above the tie tolerance.
SpectralSplit projector_lowest(const ComplexMatrix& h, std::size_t count, double t = 0.0,
                               double tie_tol = kDefaultTieTolerance);

enum class DerivativeMethod { FiniteDifference, Analytic };

struct DerivativeOptions {
  DerivativeMethod method = DerivativeMethod::FiniteDifference;
  double step = 1e-5;
};

/// t ↦ P_t for a family and a rule choosing F⁻: either everything below a
/// level curve, or a fixed number of lowest eigenvalues.
class ProjectorField {
 public:
  ProjectorField(PeriodicHamiltonian family, LevelCurve level);
  static ProjectorField lowest(PeriodicHamiltonian family, std::size_t count);

  SpectralSplit split(double t) const;
  ComplexMatrix projector(double t) const { return split(t).projector; }
  /// Ṗ_t by central differences of P (gauge free) or by first-order
  /// eigenvector perturbation theory.
  ComplexMatrix derivative(double t, const DerivativeOptions& opts = {}) const;

  const PeriodicHamiltonian& family() const { return family_; }
  std::size_t dim() const { return family_.dim(); }

 private:
  ProjectorField(PeriodicHamiltonian family, LevelCurve level, std::size_t lowest_count);

  PeriodicHamiltonian family_;
  LevelCurve level_;
  std::size_t lowest_count_ = 0;  // 0 → use the level curve
};

ComplexMatrix projector_derivative(const PeriodicHamiltonian& fam, const LevelCurve& level, double t,
                                   const DerivativeOptions& opts = {});

}  // namespace berrydet
