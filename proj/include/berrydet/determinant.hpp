#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "berrydet/transport.hpp"

namespace berrydet {

enum class OperatorKind {
  Generic,
  Schrodinger,         // D_m = −i d/dt − imH
  SchrodingerAdjoint,  // D_m* = −i d/dt + imH
  HatPlus,             // D̂_m⁺
  HatMinus,            // D̂_m⁻
  Hat,                 // D̂_m on F_0⁺ ⊕ F_0⁻
  Deformed,            // D̃_{m,s} = D̂_m − sR
};

struct OperatorLabel {
  OperatorKind kind = OperatorKind::Generic;
  double m = 0.0;
  double s = 0.0;
};

/// 𝒟 = −i d/dt + A(t) on 2π-periodic C^N-valued functions.
///
/// The coefficient is either a closed-form function of t or a table of
/// samples on the uniform grid t_j = 2πj/n (n even). Sampled operators are
/// integrated with step 2·(2π/n) so every RK4 stage lands on a sample.
class FirstOrderOperator {
 public:
  using Coefficient = std::function<ComplexMatrix(double)>;

  FirstOrderOperator(std::size_t dim, Coefficient coefficient, OperatorLabel label = {});
  FirstOrderOperator(std::vector<ComplexMatrix> samples, OperatorLabel label = {});

  std::size_t dim() const { return dim_; }
  const OperatorLabel& label() const { return label_; }
  bool sampled() const { return samples_ != nullptr; }
  /// Number of grid intervals of a sampled coefficient (0 for closed form).
  std::size_t sample_intervals() const { return samples_ ? samples_->size() - 1 : 0; }
  const ComplexMatrix& sample(std::size_t j) const { return (*samples_)[j]; }
  /// A(t); sampled operators only answer on their grid.
  ComplexMatrix coefficient(double t) const;

 private:
  std::size_t dim_ = 0;
  OperatorLabel label_;
  Coefficient coefficient_;
  std::shared_ptr<const std::vector<ComplexMatrix>> samples_;
};

FirstOrderOperator schrodinger_operator(const PeriodicHamiltonian& fam, double m);
FirstOrderOperator adjoint_schrodinger_operator(const PeriodicHamiltonian& fam, double m);

struct MonodromyOptions {
  /// RK4 steps for closed-form coefficients; sampled ones use their grid.
  std::size_t steps = 2048;
  /// A new segment starts once ∫‖A‖_F dt over the current one exceeds this,
  /// so every segment map has norm ≤ e^{segment_log_growth}.
  double segment_log_growth = 4.0;
  /// ‖T(2π)‖ bound above which the dense period map is not formed.
  double overflow_norm = 1e250;
};

/// Period map of T' = −iA T, T(0) = Id, kept as a product of bounded
/// segment maps plus the exact log-determinant ∫ Tr(−iA) dt.
struct Monodromy {
  std::vector<ComplexMatrix> segments;   // T(2π) = segments.back() ⋯ segments.front()
  std::optional<ComplexMatrix> period_map;
  Complex log_det_t = 0.0;
  double log_norm_bound = 0.0;           // Σ log ‖segment‖₂ ≥ log ‖T(2π)‖₂
  bool overflow_risk = false;

  /// Dense T(2π); throws OverflowRisk when it was not representable.
  const ComplexMatrix& T2pi() const;
};

std::size_t monodromy_steps(double m, std::size_t min_steps = 2048, std::size_t steps_per_m = 256);

Monodromy monodromy(const FirstOrderOperator& op, const MonodromyOptions& opts = {});

/// Branch-reduced logarithms of det₊𝒟 and det₋𝒟 from the BFK formula.
struct BfkLogDets {
  Complex plus;   // log det(Id − T(2π))
  Complex minus;  // iπN + i∫Tr A dt + log det(Id − T(2π))
};

/// Evaluates det(Id − T(2π)) as the determinant of the cyclic block matrix
/// of the segment maps, which stays accurate when T(2π) mixes exponentially
/// growing and decaying directions.
BfkLogDets det_pm_bfk(const Monodromy& mon, const FirstOrderOperator& op,
                      double singular_ratio = 1e-12);

/// H̃ = 𝒰⁻¹H𝒰 and 𝒰⁻¹𝒰̇ on the gauge grid, in the block frame [F_0⁺ | F_0⁻].
struct GaugedFamily {
  std::vector<double> grid;
  std::vector<ComplexMatrix> hamiltonian;
  std::vector<ComplexMatrix> connection;
  std::size_t n_plus = 0;
  std::size_t n_minus = 0;
  double leakage = 0.0;     // max ‖off-diagonal blocks of H̃‖_F
  double h_scale = 0.0;     // max ‖H(t_j)‖_F

  std::size_t dim() const { return n_plus + n_minus; }
};

GaugedFamily conjugate_by_gauge(const PeriodicHamiltonian& fam, const GaugePath& gauge,
                                double leakage_tol = 1e-5);

struct HatBlocks {
  double m = 0.0;
  std::size_t n_plus = 0;
  std::size_t n_minus = 0;
  FirstOrderOperator plus;            // coefficient −imH̃⁺ − i(𝒰⁻¹𝒰̇)⁺
  FirstOrderOperator minus;           // coefficient −imH̃⁻ − i(𝒰⁻¹𝒰̇)⁻
  std::vector<ComplexMatrix> coupling;  // R = i·(off-diagonal blocks of 𝒰⁻¹𝒰̇), Hermitian
};

HatBlocks build_hat_blocks(const GaugedFamily& gauged, double m);
HatBlocks build_hat_blocks(const PeriodicHamiltonian& fam, const GaugePath& gauge,
                           const SpectralSplit& split0, double m);

/// D̃_{m,s} = D̂_m − sR as one N×N sampled operator (block coordinates). At
/// s = 1 this is 𝒰⁻¹D_m𝒰 with the full H̃.
FirstOrderOperator deformed_operator(const GaugedFamily& gauged, double m, double s);

struct HatPhase {
  double m = 0.0;
  double imlogdet_plus = 0.0;   // Im log det₊ D̂_m, (−π, π]
  double imlogdet_minus = 0.0;  // Im log det₋ D̂_m
  Complex log_det_identity_minus_t = 0.0;  // log det(Id − T_m(2π))
  Complex log_det_t_minus = 0.0;           // ∫ Tr M⁻ dt = log det T⁻(2π)
  bool overflow = false;
};

/// Im log det± D̂_m without forming the growing block T⁻: propagates (T⁻)⁻¹
/// (a decaying ODE) and keeps log det T⁻ as a quadrature, using
/// det(Id − T⁻) = (−1)^{N⁻} det T⁻ det(Id − (T⁻)⁻¹).
HatPhase det_phase_hat(const HatBlocks& blocks, double singular_ratio = 1e-12);

struct DetPhaseReport {
  double m = 0.0;
  double imlogdet_plus = 0.0;
  double imlogdet_minus = 0.0;
  BerryPhase gamma;
  double predicted_plus = 0.0;   // N⁻π + γ
  double predicted_minus = 0.0;  // N⁺π + γ
  double gap_plus = 0.0;         // circular distance Δ₊(m)
  double gap_minus = 0.0;
  bool overflow = false;
};

struct TheoremOptions {
  KatoOptions kato;               // steps replaced by gauge_steps(max m)
  std::size_t min_steps = 2048;
  std::size_t steps_per_m = 256;
  BerryMethod gamma_source = BerryMethod::Holonomy;
  std::size_t wilson_points = 8192;
  double monotone_slack = 0.10;   // Δ(m') ≤ (1 + slack)·Δ(m) + noise_floor
  double noise_floor = 1e-8;
  bool parallel = true;
};

struct TheoremReport {
  std::vector<DetPhaseReport> rows;  // ordered as the m-list
  std::size_t n_plus = 0;
  std::size_t n_minus = 0;
  bool non_increasing_plus = true;
  bool non_increasing_minus = true;

  bool non_increasing() const { return non_increasing_plus && non_increasing_minus; }
};

/// Grid size of a gauge path fine enough for every m ≤ m_max: twice the
/// monodromy step count, rounded up to a multiple of 64.
std::size_t gauge_steps(double m_max, std::size_t min_steps = 2048, std::size_t steps_per_m = 256);

/// Everything the determinant routes need about one family: the Kato path
/// with its periodic gauge, the t = 0 split and the conjugated samples.
struct GaugeContext {
  SpectralSplit split0;
  GaugePath path;
  GaugedFamily gauged;
};

GaugeContext prepare_gauge(const PeriodicHamiltonian& fam, std::size_t steps,
                           const KatoOptions& kato = {});

BerryPhase berry_phase(const PeriodicHamiltonian& fam, const GaugeContext& ctx, BerryMethod method,
                       std::size_t wilson_points = 8192, const KatoOptions& kato = {});

DetPhaseReport make_phase_report(const HatPhase& phase, const BerryPhase& gamma, std::size_t n_plus,
                                 std::size_t n_minus);

/// Compares Im log det± D̂_m with N∓π + γ over an ascending m-list (level 0).
TheoremReport theorem_verify(const PeriodicHamiltonian& fam, const std::vector<double>& mlist,
                             const TheoremOptions& opts = {});
TheoremReport theorem_verify(const PeriodicHamiltonian& fam, const GaugeContext& ctx,
                             const BerryPhase& gamma, const std::vector<double>& mlist,
                             const TheoremOptions& opts = {});

struct SweepRow {
  double s = 0.0;
  double imlogdet_plus = 0.0;
  double imlogdet_minus = 0.0;
};

struct SweepReport {
  double m = 0.0;
  std::vector<SweepRow> rows;
  double reference_plus = 0.0;          // s = 0
  double delta = 0.0;                   // max_s d(Im log det₊(s), reference)
  std::optional<double> direct_plus;    // Im log det₊ D_m from the family itself
};

struct SweepOptions {
  double max_m = 20.0;
  bool include_direct = true;
  MonodromyOptions monodromy;
};

SweepReport deformation_sweep(const PeriodicHamiltonian& fam, const GaugeContext& ctx, double m,
                              const std::vector<double>& slist, const SweepOptions& opts = {});

struct RadiusSample {
  double t = 0.0;
  double radius_plus = 0.0;        // spectral radius of T⁺(t)
  double bound_plus = 1.0;         // e^{−cmt/2}
  double min_modulus_minus = 1.0;  // min |z|, z ∈ spec T⁻(t)
  double bound_minus = 1.0;        // e^{cmt/2}
};

struct RadiusReport {
  double m = 0.0;
  double c = 0.0;
  std::vector<RadiusSample> samples;
};

/// Checks spec(T⁺(t)) ⊂ {|z| ≤ e^{−cmt/2}} and spec(T⁻(t)) ⊂ {|z| ≥ e^{cmt/2}}
/// at `points` times spanning [0, 2π]; T⁻ is handled through its inverse.
/// Throws BoundViolation naming the first offending (t, m).
RadiusReport spectral_radius_check(const HatBlocks& blocks, double c, std::size_t points = 32,
                                   double rel_slack = 1e-9);

struct ConjugateOptions {
  double max_m = 20.0;
  double tol = 1e-6;
  std::size_t min_steps = 2048;
  std::size_t steps_per_m = 256;
};

struct ConjugateReport {
  double m = 0.0;
  double imlogdet_plus = 0.0;            // Im log det₊ D_m
  double imlogdet_minus = 0.0;           // Im log det₋ D_m
  double adjoint_imlogdet_plus = 0.0;    // Im log det₊ D_m*
  double adjoint_imlogdet_minus = 0.0;   // Im log det₋ D_m*
  double residual = 0.0;                 // d(Im log det₊ D_m, −Im log det₋ D_m*)
  bool passed = false;
};

ConjugateReport conjugate_identity_check(const PeriodicHamiltonian& fam, double m,
                                         const ConjugateOptions& opts = {});

}  // namespace berrydet
