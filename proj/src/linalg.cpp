#include "berrydet/linalg.hpp"

#include <cmath>
#include <sstream>

#include <unsupported/Eigen/MatrixFunctions>

namespace berrydet {

std::string_view errc_name(Errc code) noexcept {
  switch (code) {
    case Errc::NotHermitian: return "NotHermitian";
    case Errc::ConvergenceFailure: return "ConvergenceFailure";
    case Errc::NotUnitary: return "NotUnitary";
    case Errc::SingularInput: return "SingularInput";
    case Errc::NonFinite: return "NonFinite";
    case Errc::GapNotAchievable: return "GapNotAchievable";
    case Errc::BadSpec: return "BadSpec";
    case Errc::GapViolation: return "GapViolation";
    case Errc::OdeToleranceFailure: return "OdeToleranceFailure";
    case Errc::NonUnitaryHolonomy: return "NonUnitaryHolonomy";
    case Errc::BlockLeakage: return "BlockLeakage";
    case Errc::NonRealPhase: return "NonRealPhase";
    case Errc::DegenerateProduct: return "DegenerateProduct";
    case Errc::OverflowRisk: return "OverflowRisk";
    case Errc::NonInvertibleOperator: return "NonInvertibleOperator";
    case Errc::BoundViolation: return "BoundViolation";
    case Errc::ConfigError: return "ConfigError";
    case Errc::IoError: return "IoError";
  }
  return "Unknown";
}

namespace linalg {

void require_finite(const ComplexMatrix& m, std::string_view what) {
  if (!m.allFinite()) {
    throw Error(Errc::NonFinite, std::string(what) + " has non-finite entries");
  }
}

ComplexMatrix identity(Eigen::Index n) { return ComplexMatrix::Identity(n, n); }

double hermiticity_defect(const ComplexMatrix& m) {
  return (m - m.adjoint()).norm();
}

double unitarity_defect(const ComplexMatrix& v) {
  return (v.adjoint() * v - identity(v.cols())).norm();
}

namespace {

void require_square(const ComplexMatrix& m, std::string_view what) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    std::ostringstream os;
    os << what << " must be square and non-empty, got " << m.rows() << "x" << m.cols();
    throw Error(Errc::BadSpec, os.str());
  }
}

}  // namespace

HermitianEig herm_eig(const ComplexMatrix& h, const Tolerances& tol) {
  require_square(h, "herm_eig input");
  require_finite(h, "herm_eig input");
  const double defect = hermiticity_defect(h);
  if (defect > tol.hermiticity * std::max(1.0, h.norm())) {
    std::ostringstream os;
    os << "‖h − h†‖_F = " << defect;
    throw Error(Errc::NotHermitian, os.str());
  }
  // Symmetrize so the solver sees an exactly Hermitian lower triangle.
  const ComplexMatrix sym = 0.5 * (h + h.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(sym);
  if (solver.info() != Eigen::Success) {
    throw Error(Errc::ConvergenceFailure, "Hermitian eigensolver did not converge");
  }
  return {solver.eigenvalues(), solver.eigenvectors()};
}

ComplexMatrix expm(const ComplexMatrix& a) {
  require_square(a, "expm input");
  require_finite(a, "expm input");
  return a.exp();
}

ComplexMatrix expm_i_hermitian(const ComplexMatrix& a, double s) {
  const HermitianEig eig = herm_eig(a);
  Eigen::VectorXcd phases(eig.eigenvalues.size());
  for (Eigen::Index j = 0; j < phases.size(); ++j) {
    phases(j) = std::polar(1.0, s * eig.eigenvalues(j));
  }
  return eig.eigenvectors * phases.asDiagonal() * eig.eigenvectors.adjoint();
}

ComplexMatrix selfadjoint_log_unitary(const ComplexMatrix& v, const Tolerances& tol) {
  require_square(v, "selfadjoint_log_unitary input");
  require_finite(v, "selfadjoint_log_unitary input");
  const double defect = unitarity_defect(v);
  if (defect > tol.unitarity) {
    std::ostringstream os;
    os << "‖v†v − Id‖_F = " << defect;
    throw Error(Errc::NotUnitary, os.str());
  }
  Eigen::ComplexSchur<ComplexMatrix> schur(v);
  if (schur.info() != Eigen::Success) {
    throw Error(Errc::ConvergenceFailure, "complex Schur decomposition did not converge");
  }
  const ComplexMatrix& q = schur.matrixU();
  const ComplexMatrix& tri = schur.matrixT();
  RealVector exponents(tri.rows());
  for (Eigen::Index j = 0; j < tri.rows(); ++j) {
    double phase = std::arg(tri(j, j));
    if (phase < 0.0) phase += kTwoPi;
    double x = phase / kTwoPi;
    // Phases within rounding of 2π belong to the 0 end of the branch.
    if (x >= 1.0 - 1e-14) x = 0.0;
    exponents(j) = x;
  }
  ComplexMatrix a = q * exponents.cast<Complex>().asDiagonal() * q.adjoint();
  return 0.5 * (a + a.adjoint());
}

ComplexMatrix polar_unitary(const ComplexMatrix& m, const Tolerances& tol) {
  require_square(m, "polar_unitary input");
  require_finite(m, "polar_unitary input");
  Eigen::JacobiSVD<ComplexMatrix> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const RealVector& sigma = svd.singularValues();
  if (sigma(sigma.size() - 1) <= tol.singular_ratio * sigma(0)) {
    std::ostringstream os;
    os << "singular values span [" << sigma(sigma.size() - 1) << ", " << sigma(0) << "]";
    throw Error(Errc::SingularInput, os.str());
  }
  return svd.matrixU() * svd.matrixV().adjoint();
}

Complex log_det(const ComplexMatrix& m) {
  require_square(m, "log_det input");
  Eigen::PartialPivLU<ComplexMatrix> lu(m);
  const ComplexMatrix& packed = lu.matrixLU();
  double log_abs = 0.0;
  double phase = 0.0;
  for (Eigen::Index j = 0; j < packed.rows(); ++j) {
    const Complex pivot = packed(j, j);
    const double magnitude = std::abs(pivot);
    if (magnitude == 0.0) {
      return {-std::numeric_limits<double>::infinity(), 0.0};
    }
    log_abs += std::log(magnitude);
    phase += std::arg(pivot);
  }
  if (lu.permutationP().determinant() < 0) phase += kPi;
  return {log_abs, wrap_angle(phase)};
}

double wrap_angle(double angle) {
  double r = std::remainder(angle, kTwoPi);
  if (r <= -kPi) r += kTwoPi;
  return r;
}

double circular_distance(double a, double b) {
  return std::abs(wrap_angle(a - b));
}

}  // namespace linalg
}  // namespace berrydet
