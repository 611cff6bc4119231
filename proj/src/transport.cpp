#include "berrydet/transport.hpp"

#include <cmath>
#include <sstream>

#include "quadrature.hpp"

namespace berrydet {

namespace {

struct KatoSample {
  ComplexMatrix projector;
  ComplexMatrix generator;
};

KatoSample kato_sample(const ProjectorField& field, double t, const DerivativeOptions& opts) {
  ComplexMatrix p = field.projector(t);
  const ComplexMatrix pdot = field.derivative(t, opts);
  ComplexMatrix k = pdot * p - p * pdot;
  return {std::move(p), std::move(k)};
}

ComplexMatrix exp_factor(const linalg::HermitianEig& eig, double t) {
  Eigen::VectorXcd phases(eig.eigenvalues.size());
  for (Eigen::Index j = 0; j < phases.size(); ++j) phases(j) = std::polar(1.0, -t * eig.eigenvalues(j));
  return eig.eigenvectors * phases.asDiagonal() * eig.eigenvectors.adjoint();
}

}  // namespace

ComplexMatrix GaugePath::connection(std::size_t j) const {
  if (!has_periodic_gauge()) {
    throw Error(Errc::BadSpec, "connection requires the periodic gauge");
  }
  // 𝒰 = U·E with E = e^{−ita}, so 𝒰⁻¹𝒰̇ = 𝒰†[Ṗ,P]𝒰 − ia (a commutes with E).
  const ComplexMatrix kato_part = periodic[j].adjoint() * generator[j] * periodic[j];
  ComplexMatrix omega = kato_part - Complex(0.0, 1.0) * gauge_log;
  // Skew-Hermitian by construction; strip the rounding part.
  return 0.5 * (omega - omega.adjoint());
}

GaugePath kato_evolve(const ProjectorField& field, const KatoOptions& opts) {
  if (opts.steps < 2) throw Error(Errc::BadSpec, "kato_evolve needs at least 2 steps");
  const std::size_t steps = opts.steps;
  const double h = kTwoPi / static_cast<double>(steps);
  const auto n = static_cast<Eigen::Index>(field.dim());

  GaugePath path;
  path.grid.reserve(steps + 1);
  path.kato.reserve(steps + 1);
  path.generator.reserve(steps + 1);
  path.projector.reserve(steps + 1);

  KatoSample start = kato_sample(field, 0.0, opts.derivative);
  ComplexMatrix u = linalg::identity(n);
  path.grid.push_back(0.0);
  path.kato.push_back(u);
  path.projector.push_back(start.projector);
  path.generator.push_back(start.generator);

  for (std::size_t j = 0; j < steps; ++j) {
    const double t = kTwoPi * static_cast<double>(j) / static_cast<double>(steps);
    const double t_next = kTwoPi * static_cast<double>(j + 1) / static_cast<double>(steps);
    const ComplexMatrix& k0 = path.generator.back();
    const ComplexMatrix kmid = kato_sample(field, t + 0.5 * h, opts.derivative).generator;
    KatoSample end = kato_sample(field, t_next, opts.derivative);

    const ComplexMatrix d1 = k0 * u;
    const ComplexMatrix d2 = kmid * (u + 0.5 * h * d1);
    const ComplexMatrix d3 = kmid * (u + 0.5 * h * d2);
    const ComplexMatrix d4 = end.generator * (u + h * d3);
    const ComplexMatrix next = u + (h / 6.0) * (d1 + 2.0 * d2 + 2.0 * d3 + d4);

    const double defect = linalg::unitarity_defect(next);
    if (!(defect <= opts.step_defect_tol)) {
      std::ostringstream os;
      os << "RK4 step at t = " << t << " left the unitary group by " << defect
         << "; increase the step count";
      throw Error(Errc::OdeToleranceFailure, os.str());
    }
    u = linalg::polar_unitary(next);

    path.grid.push_back(t_next);
    path.kato.push_back(u);
    path.projector.push_back(std::move(end.projector));
    path.generator.push_back(std::move(end.generator));
  }
  return path;
}

GaugePath kato_evolve(const PeriodicHamiltonian& fam, const LevelCurve& level, const KatoOptions& opts) {
  return kato_evolve(ProjectorField(fam, level), opts);
}

double kato_unitarity_defect(const GaugePath& path) {
  double worst = 0.0;
  for (const auto& u : path.kato) worst = std::max(worst, linalg::unitarity_defect(u));
  return worst;
}

double kato_intertwining_residual(const GaugePath& path) {
  double worst = 0.0;
  const ComplexMatrix& p0 = path.projector.front();
  for (std::size_t j = 0; j < path.kato.size(); ++j) {
    const auto& u = path.kato[j];
    worst = std::max(worst, (u.adjoint() * path.projector[j] * u - p0).norm());
  }
  return worst;
}

double periodic_intertwining_residual(const GaugePath& path) {
  double worst = 0.0;
  const ComplexMatrix& p0 = path.projector.front();
  for (std::size_t j = 0; j < path.periodic.size(); ++j) {
    const auto& u = path.periodic[j];
    worst = std::max(worst, (u.adjoint() * path.projector[j] * u - p0).norm());
  }
  return worst;
}

double periodic_closure_defect(const GaugePath& path) {
  if (!path.has_periodic_gauge()) throw Error(Errc::BadSpec, "periodic gauge not built");
  const auto id = linalg::identity(path.periodic.front().rows());
  return std::max((path.periodic.front() - id).norm(), (path.periodic.back() - id).norm());
}

std::string_view berry_method_name(BerryMethod method) {
  switch (method) {
    case BerryMethod::Holonomy: return "holonomy";
    case BerryMethod::Trace: return "trace";
    case BerryMethod::Wilson: return "wilson";
    case BerryMethod::Exterior: return "exterior";
  }
  return "unknown";
}

BerryMethod parse_berry_method(std::string_view name) {
  for (auto m : {BerryMethod::Holonomy, BerryMethod::Trace, BerryMethod::Wilson, BerryMethod::Exterior}) {
    if (berry_method_name(m) == name) return m;
  }
  throw Error(Errc::BadSpec, "unknown Berry-phase method '" + std::string(name) + "'");
}

BerryPhase berry_phase_holonomy(const GaugePath& path, const SpectralSplit& split0) {
  if (split0.n_minus == 0) return {0.0, BerryMethod::Holonomy};
  const ComplexMatrix restricted = split0.frame.adjoint() * path.kato.back() * split0.frame;
  const Complex ld = linalg::log_det(restricted);
  const double modulus = std::exp(ld.real());
  if (!(std::abs(modulus - 1.0) <= 1e-4)) {
    std::ostringstream os;
    os << "|det(P_0 U(2π) P_0)| = " << modulus << " (expected 1)";
    throw Error(Errc::NonUnitaryHolonomy, os.str());
  }
  return {linalg::wrap_angle(ld.imag()), BerryMethod::Holonomy};
}

GaugePath build_periodic_gauge(GaugePath path, const SpectralSplit& split0, double leakage_tol) {
  if (path.kato.empty()) throw Error(Errc::BadSpec, "empty gauge path");
  const auto np = static_cast<Eigen::Index>(split0.n_plus);
  const auto nm = static_cast<Eigen::Index>(split0.n_minus);
  const Eigen::Index n = np + nm;

  ComplexMatrix w(n, n);
  w << split0.complement_frame, split0.frame;
  const ComplexMatrix block = w.adjoint() * path.kato.back() * w;

  double leakage = 0.0;
  if (np > 0 && nm > 0) {
    leakage = std::max(block.topRightCorner(np, nm).norm(), block.bottomLeftCorner(nm, np).norm());
  }
  if (leakage > leakage_tol) {
    std::ostringstream os;
    os << "U(2π) leaks " << leakage << " between F_0⁺ and F_0⁻";
    throw Error(Errc::BlockLeakage, os.str());
  }

  // The diagonal blocks are unitary up to the (tiny) leakage.
  const linalg::Tolerances loose{.unitarity = 1e-6};
  path.log_plus = np > 0 ? linalg::selfadjoint_log_unitary(
                               linalg::polar_unitary(block.topLeftCorner(np, np)), loose)
                         : ComplexMatrix(0, 0);
  path.log_minus = nm > 0 ? linalg::selfadjoint_log_unitary(
                                linalg::polar_unitary(block.bottomRightCorner(nm, nm)), loose)
                          : ComplexMatrix(0, 0);

  ComplexMatrix log_block = ComplexMatrix::Zero(n, n);
  if (np > 0) log_block.topLeftCorner(np, np) = path.log_plus;
  if (nm > 0) log_block.bottomRightCorner(nm, nm) = path.log_minus;
  path.gauge_log = w * log_block * w.adjoint();
  path.gauge_log = 0.5 * (path.gauge_log + path.gauge_log.adjoint());
  path.gauge_log_eig = linalg::herm_eig(path.gauge_log);
  path.block_frame = std::move(w);
  path.n_plus = split0.n_plus;
  path.n_minus = split0.n_minus;

  path.periodic.clear();
  path.periodic.reserve(path.kato.size());
  for (std::size_t j = 0; j < path.kato.size(); ++j) {
    path.periodic.push_back(path.kato[j] * exp_factor(path.gauge_log_eig, path.grid[j]));
  }
  return path;
}

BerryPhase berry_phase_trace(const GaugePath& path, const SpectralSplit& split0) {
  if (!path.has_periodic_gauge()) {
    throw Error(Errc::BadSpec, "berry_phase_trace requires the periodic gauge");
  }
  if (split0.n_minus == 0) return {0.0, BerryMethod::Trace};
  std::vector<Complex> integrand(path.grid.size());
  for (std::size_t j = 0; j < path.grid.size(); ++j) {
    integrand[j] = (split0.frame.adjoint() * path.connection(j) * split0.frame).trace();
  }
  const Complex integral = detail::integrate_uniform(integrand, path.step());
  const Complex gamma = Complex(0.0, 1.0) * integral;
  if (!(std::abs(gamma.imag()) <= 1e-6)) {
    std::ostringstream os;
    os << "trace formula produced imaginary part " << gamma.imag();
    throw Error(Errc::NonRealPhase, os.str());
  }
  return {linalg::wrap_angle(gamma.real()), BerryMethod::Trace};
}

BerryPhase wilson_loop_oracle(const ProjectorField& field, std::size_t points) {
  if (points < 64) throw Error(Errc::BadSpec, "wilson_loop_oracle needs at least 64 points");
  const SpectralSplit s0 = field.split(0.0);
  if (s0.n_minus == 0) return {0.0, BerryMethod::Wilson};
  ComplexMatrix carried = s0.frame;
  for (std::size_t j = 1; j < points; ++j) {
    const double t = kTwoPi * static_cast<double>(j) / static_cast<double>(points);
    const SpectralSplit s = field.split(t);
    if (s.n_minus != s0.n_minus) {
      std::ostringstream os;
      os << "rank of F⁻ changed from " << s0.n_minus << " to " << s.n_minus << " at t = " << t;
      throw Error(Errc::GapViolation, os.str());
    }
    carried = s.frame * (s.frame.adjoint() * carried);
  }
  const ComplexMatrix overlap = s0.frame.adjoint() * carried;
  const Complex ld = linalg::log_det(overlap);
  if (!(std::exp(ld.real()) >= 1e-8)) {
    throw Error(Errc::DegenerateProduct, "projector product collapsed; grid too coarse");
  }
  return {linalg::wrap_angle(ld.imag()), BerryMethod::Wilson};
}

BerryPhase wilson_loop_oracle(const PeriodicHamiltonian& fam, const LevelCurve& level,
                              std::size_t points) {
  return wilson_loop_oracle(ProjectorField(fam, level), points);
}

}  // namespace berrydet
