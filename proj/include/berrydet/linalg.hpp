#pragma once

#include <complex>
#include <numbers>
#include <string_view>

#include <Eigen/Dense>

#include "berrydet/error.hpp"

namespace berrydet {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

namespace linalg {

/// Default tolerances of the dense kernels. Every entry point accepts an
/// override so callers can tighten or relax them per run.
struct Tolerances {
  double hermiticity = 1e-9;   // relative, ‖h − h†‖_F / max(1, ‖h‖_F)
  double unitarity = 1e-8;     // ‖v†v − Id‖_F
  double singular_ratio = 1e-12;  // σ_min / σ_max below which input is singular
};

struct HermitianEig {
  RealVector eigenvalues;     // ascending
  ComplexMatrix eigenvectors; // unitary, columns match eigenvalues
};

/// Throws Errc::NonFinite if any entry is NaN or infinite.
void require_finite(const ComplexMatrix& m, std::string_view what);

ComplexMatrix identity(Eigen::Index n);

/// ‖m − m†‖_F.
double hermiticity_defect(const ComplexMatrix& m);
/// ‖v†v − Id‖_F.
double unitarity_defect(const ComplexMatrix& v);

HermitianEig herm_eig(const ComplexMatrix& h, const Tolerances& tol = {});

/// e^a by scaling and squaring (Padé). Skew-Hermitian input gives a unitary
/// result to working precision.
ComplexMatrix expm(const ComplexMatrix& a);

/// e^{i·s·a} for self-adjoint a, through the eigendecomposition of a.
ComplexMatrix expm_i_hermitian(const ComplexMatrix& a, double s);

/// Self-adjoint a with e^{2πia} = v and spectrum of a in [0, 1).
///
/// v is normal, so its complex Schur form is diagonal up to rounding; the
/// eigenphases are read off that diagonal and mapped into [0, 2π). Repeated
/// eigenvalues are handled by the Schur basis itself, which is an orthonormal
/// basis of every eigenspace.
ComplexMatrix selfadjoint_log_unitary(const ComplexMatrix& v, const Tolerances& tol = {});

/// Unitary factor W·V† of the polar decomposition m = (W Σ V†).
ComplexMatrix polar_unitary(const ComplexMatrix& m, const Tolerances& tol = {});

/// log det m with the imaginary part in (−π, π]. Computed from the LU pivots,
/// so |det m| may be far outside double range. Returns −∞ real part for
/// exactly singular input.
Complex log_det(const ComplexMatrix& m);

/// Reduce an angle to (−π, π].
double wrap_angle(double angle);
/// |arg e^{i(a − b)}|, the distance of two phases on the circle.
double circular_distance(double a, double b);

}  // namespace linalg
}  // namespace berrydet
