#include "berrydet/determinant.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <sstream>

namespace berrydet {

namespace {

constexpr Complex kI{0.0, 1.0};

// Coefficient of one RK4 step: A at the start, midpoint and end.
class StageCoefficients {
 public:
  StageCoefficients(const FirstOrderOperator& op, std::size_t steps) : op_(op) {
    if (op.sampled()) {
      const std::size_t n = op.sample_intervals();
      if (n < 2 || n % 2 != 0) {
        throw Error(Errc::BadSpec, "sampled coefficient needs an even number of grid intervals");
      }
      steps_ = n / 2;
    } else {
      if (steps == 0) throw Error(Errc::BadSpec, "monodromy needs at least one step");
      steps_ = steps;
    }
    h_ = kTwoPi / static_cast<double>(steps_);
  }

  std::size_t steps() const { return steps_; }
  double h() const { return h_; }
  double time(std::size_t j) const { return kTwoPi * static_cast<double>(j) / static_cast<double>(steps_); }

  ComplexMatrix start(std::size_t j) const {
    return op_.sampled() ? op_.sample(2 * j) : op_.coefficient(time(j));
  }
  ComplexMatrix mid(std::size_t j) const {
    return op_.sampled() ? op_.sample(2 * j + 1) : op_.coefficient(time(j) + 0.5 * h_);
  }

 private:
  const FirstOrderOperator& op_;
  std::size_t steps_ = 0;
  double h_ = 0.0;
};

enum class Side { Left, Right };

// One RK4 step of X' = G X (Left) or X' = X G (Right).
ComplexMatrix rk4_step(const ComplexMatrix& x, const ComplexMatrix& g0, const ComplexMatrix& gm,
                       const ComplexMatrix& g1, double h, Side side) {
  auto apply = [side](const ComplexMatrix& g, const ComplexMatrix& y) -> ComplexMatrix {
    return side == Side::Left ? ComplexMatrix(g * y) : ComplexMatrix(y * g);
  };
  const ComplexMatrix k1 = apply(g0, x);
  const ComplexMatrix k2 = apply(gm, x + 0.5 * h * k1);
  const ComplexMatrix k3 = apply(gm, x + 0.5 * h * k2);
  const ComplexMatrix k4 = apply(g1, x + h * k3);
  return x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

// Integrates X' = G X or X' = X G, X(0) = Id, for G = scale·A. `observe(j, t, X)`
// runs after every step. Returns ∫ Tr G dt (per-step Simpson on the stages).
template <class Observer>
Complex propagate(const FirstOrderOperator& op, std::size_t steps, Side side, Complex scale,
                  ComplexMatrix& x, Observer&& observe) {
  const StageCoefficients stages(op, steps);
  const double h = stages.h();
  x = linalg::identity(static_cast<Eigen::Index>(op.dim()));
  Complex trace_integral = 0.0;
  ComplexMatrix g0 = scale * stages.start(0);
  for (std::size_t j = 0; j < stages.steps(); ++j) {
    const ComplexMatrix gm = scale * stages.mid(j);
    ComplexMatrix g1 = scale * stages.start(j + 1);
    x = rk4_step(x, g0, gm, g1, h, side);
    trace_integral += (h / 6.0) * (g0.trace() + 4.0 * gm.trace() + g1.trace());
    observe(j + 1, stages.time(j + 1), x);
    g0 = std::move(g1);
  }
  return trace_integral;
}

struct PivotLogDet {
  Complex value;
  double pivot_ratio;  // min |pivot| / max |pivot|
};

PivotLogDet pivot_log_det(const ComplexMatrix& m) {
  Eigen::PartialPivLU<ComplexMatrix> lu(m);
  const ComplexMatrix& packed = lu.matrixLU();
  double log_abs = 0.0;
  double phase = 0.0;
  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  for (Eigen::Index j = 0; j < packed.rows(); ++j) {
    const double magnitude = std::abs(packed(j, j));
    lo = std::min(lo, magnitude);
    hi = std::max(hi, magnitude);
    if (magnitude == 0.0) return {{-std::numeric_limits<double>::infinity(), 0.0}, 0.0};
    log_abs += std::log(magnitude);
    phase += std::arg(packed(j, j));
  }
  if (lu.permutationP().determinant() < 0) phase += kPi;
  return {{log_abs, linalg::wrap_angle(phase)}, hi > 0.0 ? lo / hi : 0.0};
}

Complex checked_log_det(const ComplexMatrix& m, double singular_ratio, const std::string& what) {
  const PivotLogDet ld = pivot_log_det(m);
  if (!(ld.pivot_ratio >= singular_ratio) || !std::isfinite(ld.value.real())) {
    std::ostringstream os;
    os << what << " is numerically singular (pivot ratio " << ld.pivot_ratio << ")";
    throw Error(Errc::NonInvertibleOperator, os.str());
  }
  return ld.value;
}

// log det(Id − T_L ⋯ T_1) through the cyclic block matrix
//   [ Id            −T_L ]
//   [ −T_1  Id           ]
//   [       −T_2  Id     ] …
// whose determinant equals det(Id − T_L ⋯ T_1).
Complex cyclic_log_det(const std::vector<ComplexMatrix>& segments, double singular_ratio,
                       std::string_view what) {
  const std::size_t count = segments.size();
  const Eigen::Index n = segments.front().rows();
  ComplexMatrix system;
  if (count == 1) {
    system = linalg::identity(n) - segments.front();
  } else {
    const Eigen::Index total = n * static_cast<Eigen::Index>(count);
    system = linalg::identity(total);
    for (std::size_t i = 0; i < count; ++i) {
      const auto row = static_cast<Eigen::Index>((i + 1) % count) * n;
      const auto col = static_cast<Eigen::Index>(i) * n;
      system.block(row, col, n, n) -= segments[i];
    }
  }
  return checked_log_det(system, singular_ratio, std::string(what) + ": Id − T(2π)");
}

Complex reduce(Complex z) { return {z.real(), linalg::wrap_angle(z.imag())}; }

std::string describe(const OperatorLabel& label) {
  std::ostringstream os;
  switch (label.kind) {
    case OperatorKind::Generic: os << "operator"; break;
    case OperatorKind::Schrodinger: os << "D_m"; break;
    case OperatorKind::SchrodingerAdjoint: os << "D_m*"; break;
    case OperatorKind::HatPlus: os << "D̂_m⁺"; break;
    case OperatorKind::HatMinus: os << "D̂_m⁻"; break;
    case OperatorKind::Hat: os << "D̂_m"; break;
    case OperatorKind::Deformed: os << "D̃_{m,s} (s = " << label.s << ")"; break;
  }
  if (label.kind != OperatorKind::Generic) os << " at m = " << label.m;
  return os.str();
}

bool strictly_ascending(const std::vector<double>& values) {
  return std::adjacent_find(values.begin(), values.end(), std::greater_equal<>{}) == values.end();
}

void ignore_step(std::size_t, double, const ComplexMatrix&) {}

double spectral_radius(const ComplexMatrix& m) {
  if (m.rows() == 0) return 0.0;
  Eigen::ComplexEigenSolver<ComplexMatrix> solver(m, false);
  if (solver.info() != Eigen::Success) {
    throw Error(Errc::ConvergenceFailure, "eigenvalue solver failed in spectral radius");
  }
  return solver.eigenvalues().cwiseAbs().maxCoeff();
}

ComplexMatrix block_of(const ComplexMatrix& m, std::size_t n_plus, bool plus) {
  const auto np = static_cast<Eigen::Index>(n_plus);
  const Eigen::Index nm = m.rows() - np;
  return plus ? ComplexMatrix(m.topLeftCorner(np, np)) : ComplexMatrix(m.bottomRightCorner(nm, nm));
}

}  // namespace

FirstOrderOperator::FirstOrderOperator(std::size_t dim, Coefficient coefficient, OperatorLabel label)
    : dim_(dim), label_(label), coefficient_(std::move(coefficient)) {
  if (!coefficient_) throw Error(Errc::BadSpec, "operator needs a coefficient function");
}

FirstOrderOperator::FirstOrderOperator(std::vector<ComplexMatrix> samples, OperatorLabel label)
    : label_(label) {
  if (samples.size() < 3) throw Error(Errc::BadSpec, "sampled coefficient needs at least 3 samples");
  dim_ = static_cast<std::size_t>(samples.front().rows());
  for (const auto& s : samples) {
    if (s.rows() != static_cast<Eigen::Index>(dim_) || s.cols() != static_cast<Eigen::Index>(dim_)) {
      throw Error(Errc::BadSpec, "sampled coefficient has inconsistent shapes");
    }
  }
  samples_ = std::make_shared<const std::vector<ComplexMatrix>>(std::move(samples));
}

ComplexMatrix FirstOrderOperator::coefficient(double t) const {
  if (!samples_) return coefficient_(t);
  const double n = static_cast<double>(sample_intervals());
  const double pos = t / kTwoPi * n;
  const double nearest = std::round(pos);
  if (std::abs(pos - nearest) > 1e-9 || nearest < 0.0 || nearest > n) {
    throw Error(Errc::BadSpec, "sampled coefficient queried off its grid");
  }
  return (*samples_)[static_cast<std::size_t>(nearest)];
}

FirstOrderOperator schrodinger_operator(const PeriodicHamiltonian& fam, double m) {
  return FirstOrderOperator(
      fam.dim(), [fam, m](double t) -> ComplexMatrix { return Complex(0.0, -m) * fam(t); },
      {OperatorKind::Schrodinger, m, 0.0});
}

FirstOrderOperator adjoint_schrodinger_operator(const PeriodicHamiltonian& fam, double m) {
  return FirstOrderOperator(
      fam.dim(), [fam, m](double t) -> ComplexMatrix { return Complex(0.0, m) * fam(t); },
      {OperatorKind::SchrodingerAdjoint, m, 0.0});
}

const ComplexMatrix& Monodromy::T2pi() const {
  if (!period_map) {
    std::ostringstream os;
    os << "‖T(2π)‖ may reach e^" << log_norm_bound << "; use the segmented or blockwise route";
    throw Error(Errc::OverflowRisk, os.str());
  }
  return *period_map;
}

std::size_t monodromy_steps(double m, std::size_t min_steps, std::size_t steps_per_m) {
  const double wanted = std::ceil(std::abs(m) * static_cast<double>(steps_per_m));
  return std::max(min_steps, static_cast<std::size_t>(wanted));
}

Monodromy monodromy(const FirstOrderOperator& op, const MonodromyOptions& opts) {
  Monodromy mon;
  const auto n = static_cast<Eigen::Index>(op.dim());
  const StageCoefficients stages(op, opts.steps);
  const double h = stages.h();

  ComplexMatrix seg = linalg::identity(n);
  double growth = 0.0;
  ComplexMatrix g0 = -kI * stages.start(0);
  for (std::size_t j = 0; j < stages.steps(); ++j) {
    const ComplexMatrix gm = -kI * stages.mid(j);
    ComplexMatrix g1 = -kI * stages.start(j + 1);
    seg = rk4_step(seg, g0, gm, g1, h, Side::Left);
    mon.log_det_t += (h / 6.0) * (g0.trace() + 4.0 * gm.trace() + g1.trace());
    growth += h * gm.norm();
    if (growth > opts.segment_log_growth && j + 1 < stages.steps()) {
      mon.segments.push_back(std::move(seg));
      seg = linalg::identity(n);
      growth = 0.0;
    }
    g0 = std::move(g1);
  }
  mon.segments.push_back(std::move(seg));

  for (const auto& s : mon.segments) {
    if (!s.allFinite()) {
      throw Error(Errc::OverflowRisk, describe(op.label()) + ": segment map is not finite");
    }
    const double norm2 = Eigen::JacobiSVD<ComplexMatrix>(s).singularValues()(0);
    mon.log_norm_bound += std::log(std::max(norm2, std::numeric_limits<double>::min()));
  }
  mon.overflow_risk = mon.log_norm_bound > std::log(opts.overflow_norm);
  if (!mon.overflow_risk) {
    ComplexMatrix product = linalg::identity(n);
    for (const auto& s : mon.segments) product = s * product;
    mon.period_map = std::move(product);
  }
  return mon;
}

BfkLogDets det_pm_bfk(const Monodromy& mon, const FirstOrderOperator& op, double singular_ratio) {
  const Complex plus = cyclic_log_det(mon.segments, singular_ratio, describe(op.label()));
  const double n = static_cast<double>(op.dim());
  // i∫Tr A dt = −∫Tr(−iA) dt = −log det T(2π).
  const Complex minus = Complex(0.0, kPi * n) - mon.log_det_t + plus;
  return {reduce(plus), reduce(minus)};
}

GaugedFamily conjugate_by_gauge(const PeriodicHamiltonian& fam, const GaugePath& gauge,
                                double leakage_tol) {
  if (!gauge.has_periodic_gauge()) throw Error(Errc::BadSpec, "gauge path lacks the periodic gauge");
  GaugedFamily out;
  out.grid = gauge.grid;
  out.n_plus = gauge.n_plus;
  out.n_minus = gauge.n_minus;
  const auto np = static_cast<Eigen::Index>(gauge.n_plus);
  const auto nm = static_cast<Eigen::Index>(gauge.n_minus);
  const ComplexMatrix& w = gauge.block_frame;
  out.hamiltonian.reserve(gauge.grid.size());
  out.connection.reserve(gauge.grid.size());
  for (std::size_t j = 0; j < gauge.grid.size(); ++j) {
    const ComplexMatrix h = fam(gauge.grid[j]);
    out.h_scale = std::max(out.h_scale, h.norm());
    const ComplexMatrix frame = gauge.periodic[j] * w;
    ComplexMatrix ht = frame.adjoint() * h * frame;
    ht = 0.5 * (ht + ht.adjoint());
    if (np > 0 && nm > 0) {
      out.leakage = std::max(out.leakage, ht.topRightCorner(np, nm).norm());
    }
    out.hamiltonian.push_back(std::move(ht));
    out.connection.push_back(w.adjoint() * gauge.connection(j) * w);
  }
  if (out.leakage > leakage_tol * std::max(1.0, out.h_scale)) {
    std::ostringstream os;
    os << "𝒰⁻¹H𝒰 has off-diagonal blocks of size " << out.leakage;
    throw Error(Errc::BlockLeakage, os.str());
  }
  return out;
}

HatBlocks build_hat_blocks(const GaugedFamily& gauged, double m) {
  const auto np = static_cast<Eigen::Index>(gauged.n_plus);
  const auto nm = static_cast<Eigen::Index>(gauged.n_minus);
  std::vector<ComplexMatrix> plus, minus, coupling;
  plus.reserve(gauged.grid.size());
  minus.reserve(gauged.grid.size());
  coupling.reserve(gauged.grid.size());
  for (std::size_t j = 0; j < gauged.grid.size(); ++j) {
    const ComplexMatrix& ht = gauged.hamiltonian[j];
    const ComplexMatrix& omega = gauged.connection[j];
    plus.push_back(-kI * m * block_of(ht, gauged.n_plus, true) - kI * block_of(omega, gauged.n_plus, true));
    minus.push_back(-kI * m * block_of(ht, gauged.n_plus, false) - kI * block_of(omega, gauged.n_plus, false));
    ComplexMatrix r = ComplexMatrix::Zero(np + nm, np + nm);
    if (np > 0 && nm > 0) {
      r.topRightCorner(np, nm) = kI * omega.topRightCorner(np, nm);
      r.bottomLeftCorner(nm, np) = kI * omega.bottomLeftCorner(nm, np);
    }
    coupling.push_back(std::move(r));
  }
  HatBlocks blocks{m,
                   gauged.n_plus,
                   gauged.n_minus,
                   FirstOrderOperator(std::move(plus), {OperatorKind::HatPlus, m, 0.0}),
                   FirstOrderOperator(std::move(minus), {OperatorKind::HatMinus, m, 0.0}),
                   std::move(coupling)};
  return blocks;
}

HatBlocks build_hat_blocks(const PeriodicHamiltonian& fam, const GaugePath& gauge,
                           const SpectralSplit& split0, double m) {
  if (split0.n_minus != gauge.n_minus || split0.n_plus != gauge.n_plus) {
    throw Error(Errc::BadSpec, "split and gauge path disagree on dim F_0^±");
  }
  return build_hat_blocks(conjugate_by_gauge(fam, gauge), m);
}

FirstOrderOperator deformed_operator(const GaugedFamily& gauged, double m, double s) {
  const auto np = static_cast<Eigen::Index>(gauged.n_plus);
  const auto nm = static_cast<Eigen::Index>(gauged.n_minus);
  std::vector<ComplexMatrix> samples;
  samples.reserve(gauged.grid.size());
  for (std::size_t j = 0; j < gauged.grid.size(); ++j) {
    const ComplexMatrix& omega = gauged.connection[j];
    ComplexMatrix diagonal = omega;
    if (np > 0 && nm > 0) {
      diagonal.topRightCorner(np, nm).setZero();
      diagonal.bottomLeftCorner(nm, np).setZero();
    }
    const ComplexMatrix r = kI * (omega - diagonal);
    samples.push_back(-kI * m * gauged.hamiltonian[j] - kI * diagonal - s * r);
  }
  const OperatorKind kind = (s == 0.0) ? OperatorKind::Hat : OperatorKind::Deformed;
  return FirstOrderOperator(std::move(samples), {kind, m, s});
}

HatPhase det_phase_hat(const HatBlocks& blocks, double singular_ratio) {
  HatPhase out;
  out.m = blocks.m;
  Complex log_det = 0.0;

  if (blocks.n_plus > 0) {
    ComplexMatrix t_plus;
    propagate(blocks.plus, 0, Side::Left, -kI, t_plus, ignore_step);
    out.overflow = out.overflow || !t_plus.allFinite();
    log_det += checked_log_det(linalg::identity(t_plus.rows()) - t_plus, singular_ratio,
                               describe(blocks.plus.label()) + ": Id − T⁺(2π)");
  }
  if (blocks.n_minus > 0) {
    // Y = (T⁻)⁻¹ solves Y' = −Y·M⁻ = Y·(iA⁻) and decays; ∫Tr(iA⁻) = −log det T⁻.
    ComplexMatrix inverse_minus;
    const Complex trace = propagate(blocks.minus, 0, Side::Right, kI, inverse_minus, ignore_step);
    out.log_det_t_minus = -trace;
    out.overflow = out.overflow || !inverse_minus.allFinite() || !std::isfinite(trace.real()) ||
                   !std::isfinite(trace.imag());
    const double n_minus = static_cast<double>(blocks.n_minus);
    log_det += Complex(0.0, kPi * n_minus) + out.log_det_t_minus +
               checked_log_det(linalg::identity(inverse_minus.rows()) - inverse_minus, singular_ratio,
                               describe(blocks.minus.label()) + ": Id − (T⁻)⁻¹(2π)");
  }

  out.log_det_identity_minus_t = reduce(log_det);
  const double n = static_cast<double>(blocks.n_plus + blocks.n_minus);
  out.imlogdet_plus = linalg::wrap_angle(log_det.imag());
  // (−1)^N e^{m∫Tr H} contributes exactly Nπ to the phase.
  out.imlogdet_minus = linalg::wrap_angle(kPi * n + log_det.imag());
  return out;
}

std::size_t gauge_steps(double m_max, std::size_t min_steps, std::size_t steps_per_m) {
  const std::size_t steps = 2 * monodromy_steps(m_max, min_steps, steps_per_m);
  return (steps + 63) / 64 * 64;
}

GaugeContext prepare_gauge(const PeriodicHamiltonian& fam, std::size_t steps, const KatoOptions& kato) {
  gap_margin(fam, LevelCurve{});
  KatoOptions opts = kato;
  opts.steps = steps;
  const ProjectorField field(fam, LevelCurve{});
  SpectralSplit split0 = field.split(0.0);
  GaugePath path = build_periodic_gauge(kato_evolve(field, opts), split0);
  GaugedFamily gauged = conjugate_by_gauge(fam, path);
  return {std::move(split0), std::move(path), std::move(gauged)};
}

BerryPhase berry_phase(const PeriodicHamiltonian& fam, const GaugeContext& ctx, BerryMethod method,
                       std::size_t wilson_points, const KatoOptions& kato) {
  switch (method) {
    case BerryMethod::Holonomy: return berry_phase_holonomy(ctx.path, ctx.split0);
    case BerryMethod::Trace: return berry_phase_trace(ctx.path, ctx.split0);
    case BerryMethod::Wilson: return wilson_loop_oracle(fam, LevelCurve{}, wilson_points);
    case BerryMethod::Exterior: return berry_phase_exterior(fam, LevelCurve{}, kato);
  }
  throw Error(Errc::BadSpec, "unknown Berry-phase method");
}

DetPhaseReport make_phase_report(const HatPhase& phase, const BerryPhase& gamma, std::size_t n_plus,
                                 std::size_t n_minus) {
  DetPhaseReport row;
  row.m = phase.m;
  row.imlogdet_plus = phase.imlogdet_plus;
  row.imlogdet_minus = phase.imlogdet_minus;
  row.gamma = gamma;
  row.predicted_plus = linalg::wrap_angle(kPi * static_cast<double>(n_minus) + gamma.gamma);
  row.predicted_minus = linalg::wrap_angle(kPi * static_cast<double>(n_plus) + gamma.gamma);
  row.gap_plus = linalg::circular_distance(row.imlogdet_plus, row.predicted_plus);
  row.gap_minus = linalg::circular_distance(row.imlogdet_minus, row.predicted_minus);
  row.overflow = phase.overflow;
  return row;
}

TheoremReport theorem_verify(const PeriodicHamiltonian& fam, const GaugeContext& ctx,
                             const BerryPhase& gamma, const std::vector<double>& mlist,
                             const TheoremOptions& opts) {
  if (mlist.empty()) throw Error(Errc::BadSpec, "theorem_verify needs a non-empty m-list");
  if (!strictly_ascending(mlist) || mlist.front() <= 0.0) {
    throw Error(Errc::BadSpec, "m-list must be positive and strictly ascending");
  }
  (void)fam;
  TheoremReport report;
  report.n_plus = ctx.split0.n_plus;
  report.n_minus = ctx.split0.n_minus;

  auto evaluate = [&ctx, &gamma](double m) {
    const HatPhase phase = det_phase_hat(build_hat_blocks(ctx.gauged, m));
    return make_phase_report(phase, gamma, ctx.split0.n_plus, ctx.split0.n_minus);
  };
  if (opts.parallel && mlist.size() > 1) {
    std::vector<std::future<DetPhaseReport>> pending;
    for (double m : mlist) pending.push_back(std::async(std::launch::async, evaluate, m));
    for (auto& f : pending) report.rows.push_back(f.get());
  } else {
    for (double m : mlist) report.rows.push_back(evaluate(m));
  }

  for (std::size_t i = 1; i < report.rows.size(); ++i) {
    const auto& prev = report.rows[i - 1];
    const auto& cur = report.rows[i];
    const double slack = 1.0 + opts.monotone_slack;
    if (cur.gap_plus > slack * prev.gap_plus + opts.noise_floor) report.non_increasing_plus = false;
    if (cur.gap_minus > slack * prev.gap_minus + opts.noise_floor) report.non_increasing_minus = false;
  }
  return report;
}

TheoremReport theorem_verify(const PeriodicHamiltonian& fam, const std::vector<double>& mlist,
                             const TheoremOptions& opts) {
  if (mlist.empty()) throw Error(Errc::BadSpec, "theorem_verify needs a non-empty m-list");
  const double m_max = *std::max_element(mlist.begin(), mlist.end());
  const GaugeContext ctx =
      prepare_gauge(fam, gauge_steps(m_max, opts.min_steps, opts.steps_per_m), opts.kato);
  const BerryPhase gamma = berry_phase(fam, ctx, opts.gamma_source, opts.wilson_points, opts.kato);
  return theorem_verify(fam, ctx, gamma, mlist, opts);
}

SweepReport deformation_sweep(const PeriodicHamiltonian& fam, const GaugeContext& ctx, double m,
                              const std::vector<double>& slist, const SweepOptions& opts) {
  if (m > opts.max_m) {
    std::ostringstream os;
    os << "deformation sweep at m = " << m << " exceeds the full-monodromy cap m <= " << opts.max_m;
    throw Error(Errc::OverflowRisk, os.str());
  }
  for (double s : slist) {
    if (!(s >= 0.0 && s <= 1.0)) throw Error(Errc::BadSpec, "deformation parameter s must lie in [0, 1]");
  }
  auto phases = [&](const FirstOrderOperator& op) {
    return det_pm_bfk(monodromy(op, opts.monodromy), op);
  };

  SweepReport report;
  report.m = m;
  report.reference_plus = phases(deformed_operator(ctx.gauged, m, 0.0)).plus.imag();
  for (double s : slist) {
    const BfkLogDets d = phases(deformed_operator(ctx.gauged, m, s));
    report.rows.push_back({s, d.plus.imag(), d.minus.imag()});
    report.delta = std::max(report.delta, linalg::circular_distance(d.plus.imag(), report.reference_plus));
  }
  if (opts.include_direct) {
    MonodromyOptions direct = opts.monodromy;
    direct.steps = ctx.gauged.grid.size() > 1 ? (ctx.gauged.grid.size() - 1) / 2 : direct.steps;
    const FirstOrderOperator op = schrodinger_operator(fam, m);
    report.direct_plus = det_pm_bfk(monodromy(op, direct), op).plus.imag();
  }
  return report;
}

RadiusReport spectral_radius_check(const HatBlocks& blocks, double c, std::size_t points,
                                   double rel_slack) {
  if (points < 2) throw Error(Errc::BadSpec, "spectral_radius_check needs at least 2 points");
  RadiusReport report;
  report.m = blocks.m;
  report.c = c;

  const std::size_t steps = blocks.plus.sampled() ? blocks.plus.sample_intervals() / 2 : 0;
  std::vector<std::size_t> wanted;
  for (std::size_t i = 0; i < points; ++i) {
    wanted.push_back((i * steps + (points - 1) / 2) / (points - 1));
  }
  report.samples.resize(points);
  for (std::size_t i = 0; i < points; ++i) {
    const double t = kTwoPi * static_cast<double>(wanted[i]) / static_cast<double>(steps);
    report.samples[i].t = t;
    report.samples[i].bound_plus = std::exp(-c * blocks.m * t / 2.0);
    report.samples[i].bound_minus = std::exp(c * blocks.m * t / 2.0);
    report.samples[i].radius_plus = blocks.n_plus > 0 ? 1.0 : 0.0;
    report.samples[i].min_modulus_minus = 1.0;
  }

  auto record = [&](bool plus) {
    return [&, plus](std::size_t j, double, const ComplexMatrix& x) {
      for (std::size_t i = 0; i < points; ++i) {
        if (wanted[i] != j) continue;
        const double radius = spectral_radius(x);
        if (plus) {
          report.samples[i].radius_plus = radius;
        } else {
          report.samples[i].min_modulus_minus =
              radius > 0.0 ? 1.0 / radius : std::numeric_limits<double>::infinity();
        }
      }
    };
  };
  ComplexMatrix scratch;
  if (blocks.n_plus > 0) propagate(blocks.plus, 0, Side::Left, -kI, scratch, record(true));
  if (blocks.n_minus > 0) propagate(blocks.minus, 0, Side::Right, kI, scratch, record(false));

  for (const auto& s : report.samples) {
    const bool plus_ok = blocks.n_plus == 0 || s.radius_plus <= s.bound_plus * (1.0 + rel_slack);
    const bool minus_ok = blocks.n_minus == 0 || s.min_modulus_minus >= s.bound_minus * (1.0 - rel_slack);
    if (!plus_ok || !minus_ok) {
      std::ostringstream os;
      os << "spectral bound fails at t = " << s.t << ", m = " << blocks.m << " (radius T⁺ "
         << s.radius_plus << " vs " << s.bound_plus << ", min |spec T⁻| " << s.min_modulus_minus
         << " vs " << s.bound_minus << ")";
      throw Error(Errc::BoundViolation, os.str());
    }
  }
  return report;
}

ConjugateReport conjugate_identity_check(const PeriodicHamiltonian& fam, double m,
                                         const ConjugateOptions& opts) {
  if (m > opts.max_m) {
    std::ostringstream os;
    os << "conjugation check at m = " << m << " exceeds the full-monodromy cap m <= " << opts.max_m;
    throw Error(Errc::OverflowRisk, os.str());
  }
  gap_margin(fam, LevelCurve{});
  MonodromyOptions mono;
  mono.steps = monodromy_steps(m, opts.min_steps, opts.steps_per_m);
  const FirstOrderOperator op = schrodinger_operator(fam, m);
  const FirstOrderOperator adj = adjoint_schrodinger_operator(fam, m);
  const BfkLogDets d = det_pm_bfk(monodromy(op, mono), op);
  const BfkLogDets a = det_pm_bfk(monodromy(adj, mono), adj);

  ConjugateReport report;
  report.m = m;
  report.imlogdet_plus = d.plus.imag();
  report.imlogdet_minus = d.minus.imag();
  report.adjoint_imlogdet_plus = a.plus.imag();
  report.adjoint_imlogdet_minus = a.minus.imag();
  report.residual = linalg::circular_distance(d.plus.imag(), -a.minus.imag());
  report.passed = report.residual <= opts.tol;
  return report;
}

}  // namespace berrydet
