#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

#include "berrydet/spectral.hpp"

namespace berrydet {

struct KatoOptions {
  std::size_t steps = 2048;
  DerivativeOptions derivative;
  /// Largest unitarity defect a single RK4 step may produce before the
  /// polar projection; larger defects mean the step is too coarse.
  double step_defect_tol = 1e-6;
};

/// Sampled unitary paths on the uniform grid t_j = 2πj/steps, j = 0..steps.
///
/// `kato`, `generator` and `projector` come from kato_evolve. The periodic
/// gauge fields are filled by build_periodic_gauge; until then
/// has_periodic_gauge() is false.
struct GaugePath {
  std::vector<double> grid;
  std::vector<ComplexMatrix> kato;       // U(t_j), U(0) = Id
  std::vector<ComplexMatrix> generator;  // [Ṗ_t, P_t] at t_j
  std::vector<ComplexMatrix> projector;  // P_{t_j}

  std::vector<ComplexMatrix> periodic;   // 𝒰(t_j) = U(t_j)·e^{−i t_j a}
  ComplexMatrix block_frame;             // columns [F_0⁺ | F_0⁻]
  std::size_t n_plus = 0;
  std::size_t n_minus = 0;
  ComplexMatrix log_plus;                // a⁺, e^{2πia⁺} = U⁺(2π), block coordinates
  ComplexMatrix log_minus;               // a⁻
  ComplexMatrix gauge_log;               // a = W diag(a⁺, a⁻) W†, ambient coordinates
  linalg::HermitianEig gauge_log_eig;

  std::size_t intervals() const { return grid.empty() ? 0 : grid.size() - 1; }
  double step() const { return kTwoPi / static_cast<double>(intervals()); }
  bool has_periodic_gauge() const { return !periodic.empty(); }
  /// 𝒰⁻¹𝒰̇ at t_j (skew-Hermitian), from U̇ = [Ṗ,P]U and the known
  /// derivative of the exponential factor.
  ComplexMatrix connection(std::size_t j) const;
};

GaugePath kato_evolve(const ProjectorField& field, const KatoOptions& opts = {});
GaugePath kato_evolve(const PeriodicHamiltonian& fam, const LevelCurve& level,
                      const KatoOptions& opts = {});

/// max_j ‖U_j†U_j − Id‖_F.
double kato_unitarity_defect(const GaugePath& path);
/// max_j ‖U_j⁻¹ P_{t_j} U_j − P_0‖_F.
double kato_intertwining_residual(const GaugePath& path);
/// max_j ‖𝒰_j⁻¹ P_{t_j} 𝒰_j − P_0‖_F.
double periodic_intertwining_residual(const GaugePath& path);
/// max(‖𝒰(0) − Id‖_F, ‖𝒰(2π) − Id‖_F).
double periodic_closure_defect(const GaugePath& path);

enum class BerryMethod { Holonomy, Trace, Wilson, Exterior };

std::string_view berry_method_name(BerryMethod method);
BerryMethod parse_berry_method(std::string_view name);

struct BerryPhase {
  double gamma = 0.0;  // (−π, π]
  BerryMethod method = BerryMethod::Holonomy;
};

/// γ = arg det(F_0† U(2π) F_0).
BerryPhase berry_phase_holonomy(const GaugePath& path, const SpectralSplit& split0);

/// Fills the periodic-gauge fields of `path` from the block form of U(2π).
GaugePath build_periodic_gauge(GaugePath path, const SpectralSplit& split0,
                               double leakage_tol = 1e-5);

/// γ = i ∫ Tr(P_0 𝒰⁻¹𝒰̇ P_0) dt by Simpson's rule on the path grid.
BerryPhase berry_phase_trace(const GaugePath& path, const SpectralSplit& split0);

/// Discrete holonomy arg det(F_0† P_{t_{n−1}} ⋯ P_{t_1} F_0). Independent of
/// the ODE machinery; used as an oracle.
BerryPhase wilson_loop_oracle(const ProjectorField& field, std::size_t points);
BerryPhase wilson_loop_oracle(const PeriodicHamiltonian& fam, const LevelCurve& level,
                              std::size_t points);

/// H ↦ H_k acting on Λ^k C^N by the Leibniz rule, in the basis of ordered
/// k-subsets (lexicographic).
ComplexMatrix exterior_power_matrix(const ComplexMatrix& h, std::size_t k);
PeriodicHamiltonian exterior_power(const PeriodicHamiltonian& fam, std::size_t k);

/// Rank-1 holonomy of the lowest band of H_k with k = dim F⁻.
BerryPhase berry_phase_exterior(const PeriodicHamiltonian& fam, const LevelCurve& level,
                                const KatoOptions& opts = {});

}  // namespace berrydet
