#include "berrydet/hamiltonians.hpp"

#include <cmath>
#include <random>
#include <sstream>

namespace berrydet {

namespace {

ComplexMatrix pauli_z() {
  ComplexMatrix m = ComplexMatrix::Zero(2, 2);
  m(0, 0) = 1.0;
  m(1, 1) = -1.0;
  return m;
}

void validate_fourier(const FourierSeries& f) {
  const auto n = f.constant.rows();
  if (n == 0 || f.constant.cols() != n) {
    throw Error(Errc::BadSpec, "Fourier constant term must be a non-empty square matrix");
  }
  linalg::require_finite(f.constant, "Fourier constant term");
  if (linalg::hermiticity_defect(f.constant) > 1e-12 * std::max(1.0, f.constant.norm())) {
    throw Error(Errc::BadSpec, "Fourier constant term must be Hermitian");
  }
  for (std::size_t k = 0; k < f.harmonics.size(); ++k) {
    const auto& c = f.harmonics[k];
    if (c.rows() != n || c.cols() != n) {
      std::ostringstream os;
      os << "harmonic " << k + 1 << " has shape " << c.rows() << "x" << c.cols()
         << ", expected " << n << "x" << n;
      throw Error(Errc::BadSpec, os.str());
    }
    linalg::require_finite(c, "Fourier harmonic");
  }
}

ComplexMatrix random_unitary(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss;
  ComplexMatrix z(n, n);
  for (Eigen::Index i = 0; i < z.rows(); ++i)
    for (Eigen::Index j = 0; j < z.cols(); ++j) z(i, j) = Complex(gauss(rng), gauss(rng));
  Eigen::HouseholderQR<ComplexMatrix> qr(z);
  ComplexMatrix q = qr.householderQ();
  // Fix column phases against R's diagonal so the draw is Haar distributed.
  const ComplexMatrix& r = qr.matrixQR();
  for (Eigen::Index j = 0; j < q.cols(); ++j) {
    const Complex d = r(j, j);
    if (std::abs(d) > 0.0) q.col(j) *= d / std::abs(d);
  }
  return q;
}

PeriodicHamiltonian draw_random_gapped(const RandomGapped& spec) {
  if (spec.dim == 0 || spec.n_minus > spec.dim) {
    throw Error(Errc::BadSpec, "random_gapped requires 0 <= n_minus <= dim and dim > 0");
  }
  if (spec.target_gap <= 0.0) {
    throw Error(Errc::BadSpec, "random_gapped target_gap must be positive");
  }
  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> gauss;
  const auto n = static_cast<Eigen::Index>(spec.dim);

  for (std::size_t attempt = 0; attempt < spec.max_attempts; ++attempt) {
    RealVector energies(n);
    for (Eigen::Index j = 0; j < n; ++j) {
      const double e = 1.0 + unit(rng);
      energies(j) = (static_cast<std::size_t>(j) < spec.n_minus) ? -e : e;
    }
    const ComplexMatrix q = random_unitary(spec.dim, rng);
    ComplexMatrix c0 = q * energies.cast<Complex>().asDiagonal() * q.adjoint();
    c0 = 0.5 * (c0 + c0.adjoint());

    std::vector<ComplexMatrix> harmonics;
    for (std::size_t k = 1; k <= spec.harmonics; ++k) {
      const double scale = spec.amplitude * std::ldexp(1.0, -static_cast<int>(k)) /
                           std::sqrt(static_cast<double>(spec.dim));
      ComplexMatrix c(n, n);
      for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) c(i, j) = scale * Complex(gauss(rng), gauss(rng));
      harmonics.push_back(std::move(c));
    }

    PeriodicHamiltonian candidate(spec, std::move(c0), std::move(harmonics));
    try {
      if (gap_margin(candidate, LevelCurve{}, kDefaultGapGrid, spec.target_gap) > spec.target_gap) {
        const RealVector e0 = linalg::herm_eig(candidate(0.0)).eigenvalues;
        const auto below = static_cast<std::size_t>((e0.array() < 0.0).count());
        if (below == spec.n_minus) return candidate;
      }
    } catch (const Error& e) {
      if (e.code() != Errc::GapViolation) throw;
    }
  }
  std::ostringstream os;
  os << "no draw reached gap " << spec.target_gap << " after " << spec.max_attempts
     << " attempts (dim " << spec.dim << ", seed " << spec.seed << ")";
  throw Error(Errc::GapNotAchievable, os.str());
}

}  // namespace

PeriodicHamiltonian::PeriodicHamiltonian(FamilySpec spec, ComplexMatrix constant,
                                         std::vector<ComplexMatrix> harmonics)
    : spec_(std::move(spec)), constant_(std::move(constant)), harmonics_(std::move(harmonics)) {}

ComplexMatrix PeriodicHamiltonian::operator()(double t) const {
  // Reducing t first keeps H(t) and H(t + 2π) equal up to one rounding of t.
  const double tr = std::remainder(t, kTwoPi);
  ComplexMatrix h = constant_;
  for (std::size_t k = 0; k < harmonics_.size(); ++k) {
    const Complex phase = std::polar(1.0, static_cast<double>(k + 1) * tr);
    const ComplexMatrix term = phase * harmonics_[k];
    h += term + term.adjoint();
  }
  return h;
}

ComplexMatrix PeriodicHamiltonian::derivative(double t) const {
  const double tr = std::remainder(t, kTwoPi);
  ComplexMatrix d = ComplexMatrix::Zero(constant_.rows(), constant_.cols());
  for (std::size_t k = 0; k < harmonics_.size(); ++k) {
    const double freq = static_cast<double>(k + 1);
    const ComplexMatrix term = Complex(0.0, freq) * std::polar(1.0, freq * tr) * harmonics_[k];
    d += term + term.adjoint();
  }
  return d;
}

PeriodicHamiltonian PeriodicHamiltonian::shifted(double tau) const {
  std::vector<ComplexMatrix> shifted_harmonics;
  for (std::size_t k = 0; k < harmonics_.size(); ++k) {
    shifted_harmonics.push_back(std::polar(1.0, static_cast<double>(k + 1) * tau) * harmonics_[k]);
  }
  FourierSeries spec{constant_, shifted_harmonics};
  return PeriodicHamiltonian(spec, constant_, std::move(shifted_harmonics));
}

PeriodicHamiltonian PeriodicHamiltonian::reversed() const {
  std::vector<ComplexMatrix> flipped;
  for (const auto& c : harmonics_) flipped.push_back(c.adjoint());
  FourierSeries spec{constant_, flipped};
  return PeriodicHamiltonian(spec, constant_, std::move(flipped));
}

PeriodicHamiltonian build_family(const FamilySpec& spec) {
  struct Lower {
    PeriodicHamiltonian operator()(const SpinHalf& s) const {
      if (!std::isfinite(s.theta) || !std::isfinite(s.b0)) {
        throw Error(Errc::BadSpec, "spin_half parameters must be finite");
      }
      ComplexMatrix c0 = s.b0 * std::cos(s.theta) * pauli_z();
      // σx cos t + σy sin t = [[0, e^{−it}], [e^{it}, 0]].
      ComplexMatrix c1 = ComplexMatrix::Zero(2, 2);
      c1(1, 0) = s.b0 * std::sin(s.theta);
      return PeriodicHamiltonian(s, std::move(c0), {std::move(c1)});
    }
    PeriodicHamiltonian operator()(const DiagConst& d) const {
      if (d.energies.empty()) throw Error(Errc::BadSpec, "diag_const needs at least one energy");
      RealVector e = Eigen::Map<const RealVector>(d.energies.data(), d.energies.size());
      if (!e.allFinite()) throw Error(Errc::BadSpec, "diag_const energies must be finite");
      ComplexMatrix c0 = e.cast<Complex>().asDiagonal();
      return PeriodicHamiltonian(d, std::move(c0), {});
    }
    PeriodicHamiltonian operator()(const FourierSeries& f) const {
      validate_fourier(f);
      ComplexMatrix c0 = 0.5 * (f.constant + f.constant.adjoint());
      return PeriodicHamiltonian(f, std::move(c0), f.harmonics);
    }
    PeriodicHamiltonian operator()(const RandomGapped& r) const { return draw_random_gapped(r); }
  };
  return std::visit(Lower{}, spec);
}

double LevelCurve::operator()(double t) const {
  double value = constant;
  for (std::size_t k = 0; k < cos_coeffs.size(); ++k) value += cos_coeffs[k] * std::cos((k + 1.0) * t);
  for (std::size_t k = 0; k < sin_coeffs.size(); ++k) value += sin_coeffs[k] * std::sin((k + 1.0) * t);
  return value;
}

double gap_margin(const PeriodicHamiltonian& fam, const LevelCurve& level, std::size_t grid,
                  double tol) {
  if (grid < 16) throw Error(Errc::BadSpec, "gap_margin grid must have at least 16 points");
  double margin = std::numeric_limits<double>::infinity();
  double worst_t = 0.0;
  for (std::size_t j = 0; j < grid; ++j) {
    const double t = kTwoPi * static_cast<double>(j) / static_cast<double>(grid);
    const RealVector e = linalg::herm_eig(fam(t)).eigenvalues;
    const double dist = (e.array() - level(t)).abs().minCoeff();
    if (dist < margin) {
      margin = dist;
      worst_t = t;
    }
  }
  if (margin <= tol) {
    std::ostringstream os;
    os << "level curve within " << margin << " of the spectrum at t = " << worst_t;
    throw Error(Errc::GapViolation, os.str());
  }
  return margin;
}

}  // namespace berrydet
