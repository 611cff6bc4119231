#include "berrydet/spectral.hpp"

#include <cmath>
#include <sstream>

namespace berrydet {

namespace {

SpectralSplit split_at(const linalg::HermitianEig& eig, std::size_t n_minus, double t) {
  const auto n = eig.eigenvalues.size();
  const auto k = static_cast<Eigen::Index>(n_minus);
  SpectralSplit out;
  out.t = t;
  out.n_minus = n_minus;
  out.n_plus = static_cast<std::size_t>(n) - n_minus;
  out.frame = eig.eigenvectors.leftCols(k);
  out.complement_frame = eig.eigenvectors.rightCols(n - k);
  out.projector = out.frame * out.frame.adjoint();
  out.eigenvalues = eig.eigenvalues;
  return out;
}

}  // namespace

SpectralSplit projector_below(const ComplexMatrix& h, double level, double t, double tie_tol) {
  const linalg::HermitianEig eig = linalg::herm_eig(h);
  const double scale = std::max(1.0, h.norm());
  std::size_t below = 0;
  for (Eigen::Index j = 0; j < eig.eigenvalues.size(); ++j) {
    const double e = eig.eigenvalues(j);
    if (std::abs(e - level) <= tie_tol * scale) {
      std::ostringstream os;
      os << "eigenvalue " << e << " meets level " << level << " at t = " << t;
      throw Error(Errc::GapViolation, os.str());
    }
    if (e < level) ++below;
  }
  return split_at(eig, below, t);
}

SpectralSplit projector_lowest(const ComplexMatrix& h, std::size_t count, double t, double tie_tol) {
  const linalg::HermitianEig eig = linalg::herm_eig(h);
  const auto n = static_cast<std::size_t>(eig.eigenvalues.size());
  if (count > n) throw Error(Errc::BadSpec, "projector_lowest count exceeds dimension");
  if (count > 0 && count < n) {
    const double gap = eig.eigenvalues(count) - eig.eigenvalues(count - 1);
    if (gap <= tie_tol * std::max(1.0, h.norm())) {
      std::ostringstream os;
      os << "lowest " << count << " eigenvalues not isolated (gap " << gap << ") at t = " << t;
      throw Error(Errc::GapViolation, os.str());
    }
  }
  return split_at(eig, count, t);
}

ProjectorField::ProjectorField(PeriodicHamiltonian family, LevelCurve level)
    : ProjectorField(std::move(family), std::move(level), 0) {}

ProjectorField::ProjectorField(PeriodicHamiltonian family, LevelCurve level, std::size_t lowest_count)
    : family_(std::move(family)), level_(std::move(level)), lowest_count_(lowest_count) {}

ProjectorField ProjectorField::lowest(PeriodicHamiltonian family, std::size_t count) {
  if (count == 0) throw Error(Errc::BadSpec, "lowest-band projector field needs count >= 1");
  return ProjectorField(std::move(family), LevelCurve{}, count);
}

SpectralSplit ProjectorField::split(double t) const {
  const ComplexMatrix h = family_(t);
  if (lowest_count_ > 0) return projector_lowest(h, lowest_count_, t);
  return projector_below(h, level_(t), t);
}

ComplexMatrix ProjectorField::derivative(double t, const DerivativeOptions& opts) const {
  if (opts.method == DerivativeMethod::FiniteDifference) {
    const ComplexMatrix forward = projector(t + opts.step);
    const ComplexMatrix backward = projector(t - opts.step);
    ComplexMatrix d = (forward - backward) / (2.0 * opts.step);
    return 0.5 * (d + d.adjoint());
  }
  // Ṗ = Σ_{i ∈ F⁻, j ∈ F⁺} (v_i v_i† Ḣ v_j v_j† + h.c.) / (E_i − E_j).
  const SpectralSplit s = split(t);
  const ComplexMatrix hdot = family_.derivative(t);
  const auto k = static_cast<Eigen::Index>(s.n_minus);
  const ComplexMatrix coupling = s.frame.adjoint() * hdot * s.complement_frame;
  ComplexMatrix weighted = coupling;
  for (Eigen::Index i = 0; i < weighted.rows(); ++i) {
    for (Eigen::Index j = 0; j < weighted.cols(); ++j) {
      weighted(i, j) /= s.eigenvalues(i) - s.eigenvalues(k + j);
    }
  }
  const ComplexMatrix half = s.frame * weighted * s.complement_frame.adjoint();
  return half + half.adjoint();
}

ComplexMatrix projector_derivative(const PeriodicHamiltonian& fam, const LevelCurve& level, double t,
                                   const DerivativeOptions& opts) {
  return ProjectorField(fam, level).derivative(t, opts);
}

}  // namespace berrydet
