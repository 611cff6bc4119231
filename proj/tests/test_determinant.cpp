#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "berrydet/determinant.hpp"
#include "berrydet/error.hpp"
#include "test_support.hpp"

using namespace berrydet;
using berrydet::testing::Gen;

namespace {

const Complex I(0.0, 1.0);

PeriodicHamiltonian diag_pm() { return build_family(DiagConst{{1.0, -1.0}}); }
PeriodicHamiltonian spin() { return build_family(SpinHalf{kPi / 3, 1.0}); }

PeriodicHamiltonian random_six() {
  RandomGapped spec;
  spec.dim = 6;
  spec.n_minus = 3;
  spec.seed = 7;
  return build_family(spec);
}

// log |(1 − e^{−2πm})(1 − e^{2πm})|, the modulus of det₊ D_m for diag(1, −1).
double closed_form_log_modulus(double m) {
  const double decay = std::log1p(-std::exp(-kTwoPi * m));
  return 2.0 * decay + kTwoPi * m;
}

Errc code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an exception");
  return Errc::BadSpec;
}

}  // namespace

TEST_CASE("monodromy of the free operator") {
  const FirstOrderOperator op(3, [](double) -> ComplexMatrix { return ComplexMatrix::Zero(3, 3); });
  const Monodromy mon = monodromy(op);
  CHECK((mon.T2pi() - linalg::identity(3)).norm() < 1e-15);
  CHECK(std::abs(mon.log_det_t) == 0.0);
  CHECK(code_of([&] { det_pm_bfk(mon, op); }) == Errc::NonInvertibleOperator);
}

TEST_CASE("monodromy of a constant coefficient is an exponential") {
  Gen gen(61);
  for (int trial = 0; trial < 5; ++trial) {
    const ComplexMatrix a = gen.complex_matrix(3) * 0.3;
    const FirstOrderOperator op(3, [a](double) { return a; });
    const Monodromy mon = monodromy(op);
    const ComplexMatrix expected = linalg::expm(Complex(0.0, -kTwoPi) * a);
    CHECK((mon.T2pi() - expected).norm() <= 1e-9 * std::max(1.0, expected.norm()));
  }
}

TEST_CASE("log det T agrees with the determinant of the period map") {
  Gen gen(62);
  for (int trial = 0; trial < 5; ++trial) {
    FourierSeries f{gen.hermitian(3), {gen.complex_matrix(3) * 0.4}};
    const auto fam = build_family(f);
    const FirstOrderOperator op = schrodinger_operator(fam, gen.uniform(0.5, 2.0));
    const Monodromy mon = monodromy(op);
    Complex det = 1.0;
    for (const auto& segment : mon.segments) det *= segment.determinant();
    CHECK(std::abs(std::exp(mon.log_det_t) - det) <= 1e-8 * std::abs(det));
    if (mon.segments.size() == 1) CHECK(std::abs(mon.T2pi().determinant() - det) <= 1e-10 * std::abs(det));
  }
}

TEST_CASE("det_pm_bfk closed form for diag(1, -1)") {
  for (double m : {1.0, 2.0, 5.0}) {
    const FirstOrderOperator op = schrodinger_operator(diag_pm(), m);
    MonodromyOptions opts;
    opts.steps = monodromy_steps(m);
    const BfkLogDets d = det_pm_bfk(monodromy(op, opts), op);
    CHECK(linalg::circular_distance(d.plus.imag(), kPi) < 1e-9);
    CHECK(linalg::circular_distance(d.minus.imag(), kPi) < 1e-9);
    CHECK(d.plus.real() == doctest::Approx(closed_form_log_modulus(m)).epsilon(1e-9));
  }
}

TEST_CASE("det phases of D_m differ by N pi") {
  for (const auto& fam : {spin(), build_family(RandomGapped{}), random_six()}) {
    for (double m : {0.5, 1.5, 3.0}) {
      const FirstOrderOperator op = schrodinger_operator(fam, m);
      MonodromyOptions opts;
      opts.steps = monodromy_steps(m);
      const BfkLogDets d = det_pm_bfk(monodromy(op, opts), op);
      CHECK(linalg::circular_distance(d.plus.imag() - d.minus.imag(), kPi * static_cast<double>(fam.dim())) < 1e-9);
    }
  }
}

TEST_CASE("monodromy step sizing") {
  CHECK(monodromy_steps(1.0) == 2048);
  CHECK(monodromy_steps(20.0) == 5120);
  CHECK(gauge_steps(32.0) % 64 == 0);
  CHECK(gauge_steps(32.0) >= 2 * monodromy_steps(32.0));
}

TEST_CASE("hat blocks of a constant diagonal family") {
  const auto fam = build_family(DiagConst{{2.0, -1.0, -3.0}});
  const GaugeContext ctx = prepare_gauge(fam, 512);
  const HatBlocks blocks = build_hat_blocks(ctx.gauged, 1.5);
  CHECK(blocks.n_plus == 1);
  CHECK(blocks.n_minus == 2);
  for (std::size_t j = 0; j < ctx.gauged.grid.size(); j += 37) {
    CHECK(std::abs(blocks.plus.sample(j)(0, 0) - Complex(0.0, -3.0)) < 1e-12);
    const ComplexMatrix minus = blocks.minus.sample(j);
    const auto eig = linalg::herm_eig(0.5 * (I * minus + (I * minus).adjoint()));
    CHECK(eig.eigenvalues(0) == doctest::Approx(-4.5));
    CHECK(eig.eigenvalues(1) == doctest::Approx(-1.5));
    CHECK(blocks.coupling[j].norm() < 1e-12);
  }
}

TEST_CASE("hat blocks of SpinHalf carry the eigenvalues") {
  const auto fam = spin();
  const GaugeContext ctx = prepare_gauge(fam, 4096);
  CHECK(ctx.gauged.leakage < 1e-6);
  for (std::size_t j = 0; j < ctx.gauged.grid.size(); j += 101) {
    CHECK(std::abs(ctx.gauged.hamiltonian[j](0, 0) - 1.0) < 1e-8);
    CHECK(std::abs(ctx.gauged.hamiltonian[j](1, 1) + 1.0) < 1e-8);
  }
  const HatBlocks blocks = build_hat_blocks(ctx.gauged, 4.0);
  for (const auto& r : blocks.coupling) {
    CHECK(std::abs(r.trace()) == 0.0);
    CHECK(linalg::hermiticity_defect(r) < 1e-12);
  }
  const HatBlocks other = build_hat_blocks(fam, ctx.path, ctx.split0, 4.0);
  CHECK((other.plus.sample(17) - blocks.plus.sample(17)).norm() < 1e-14);
}

TEST_CASE("det_phase_hat is exact for diag(1, -1)") {
  const auto fam = diag_pm();
  const GaugeContext ctx = prepare_gauge(fam, gauge_steps(100.0));
  for (double m : {1.0, 2.0, 4.0, 8.0, 100.0}) {
    const HatPhase p = det_phase_hat(build_hat_blocks(ctx.gauged, m));
    CHECK_FALSE(p.overflow);
    CHECK(linalg::circular_distance(p.imlogdet_plus, kPi) < 1e-9);
    CHECK(linalg::circular_distance(p.imlogdet_minus, kPi) < 1e-9);
    CHECK(p.log_det_identity_minus_t.real() == doctest::Approx(closed_form_log_modulus(m)).epsilon(1e-9));
  }
}

TEST_CASE("det_phase_hat agrees with the full monodromy at small m") {
  for (const auto& fam : {spin(), build_family(RandomGapped{})}) {
    const GaugeContext ctx = prepare_gauge(fam, gauge_steps(2.0));
    const HatPhase p = det_phase_hat(build_hat_blocks(ctx.gauged, 2.0));
    const FirstOrderOperator full = deformed_operator(ctx.gauged, 2.0, 0.0);
    const BfkLogDets d = det_pm_bfk(monodromy(full), full);
    CHECK(linalg::circular_distance(p.imlogdet_plus, d.plus.imag()) <= 1e-6);
    CHECK(linalg::circular_distance(p.imlogdet_minus, d.minus.imag()) <= 1e-6);
  }
}

TEST_CASE("det_phase_hat stays finite for large m") {
  const auto fam = spin();
  const GaugeContext fine = prepare_gauge(fam, gauge_steps(200.0));
  const HatPhase p = det_phase_hat(build_hat_blocks(fine.gauged, 200.0));
  CHECK_FALSE(p.overflow);
  CHECK(std::isfinite(p.imlogdet_plus));
  CHECK(std::isfinite(p.imlogdet_minus));

  // A grid with m·h inside the RK4 stability interval is enough for 10^4.
  const GaugeContext grid = prepare_gauge(fam, 65536);
  const HatPhase q = det_phase_hat(build_hat_blocks(grid.gauged, 1e4));
  CHECK_FALSE(q.overflow);
  CHECK(std::isfinite(q.imlogdet_plus));
  CHECK(std::isfinite(q.log_det_identity_minus_t.real()));
}

TEST_CASE("theorem_verify on the exact case") {
  const TheoremReport r = theorem_verify(diag_pm(), {1.0, 2.0, 4.0});
  CHECK(r.n_plus == 1);
  CHECK(r.n_minus == 1);
  for (const auto& row : r.rows) {
    CHECK(std::abs(row.gamma.gamma) < 1e-12);
    CHECK(row.gap_plus < 1e-9);
    CHECK(row.gap_minus < 1e-9);
  }
  CHECK(r.non_increasing());
}

TEST_CASE("theorem_verify on SpinHalf") {
  TheoremOptions opts;
  opts.gamma_source = BerryMethod::Wilson;
  const TheoremReport r = theorem_verify(spin(), {4.0, 8.0, 16.0, 32.0}, opts);
  CHECK(r.non_increasing());
  // Δ already sits at the quadrature floor at m = 4, so only the weak form holds.
  CHECK(r.rows.back().gap_plus <= r.rows.front().gap_plus + opts.noise_floor);
  CHECK(r.rows.back().gap_plus <= 1e-2);
  CHECK(r.rows.back().gap_minus <= 1e-2);
  for (const auto& row : r.rows) {
    CHECK(row.predicted_plus == doctest::Approx(linalg::wrap_angle(kPi + row.gamma.gamma)));
    CHECK(row.predicted_minus == doctest::Approx(linalg::wrap_angle(kPi + row.gamma.gamma)));
  }

  const TheoremReport early = theorem_verify(spin(), {1.0, 2.0, 4.0});
  CHECK(early.rows[1].gap_plus < early.rows[0].gap_plus);
  CHECK(early.rows[2].gap_plus < early.rows[1].gap_plus);
}

TEST_CASE("theorem_verify on a random N = 6 family") {
  const TheoremReport r = theorem_verify(random_six(), {4.0, 8.0, 16.0});
  CHECK(r.n_minus == 3);
  CHECK(r.non_increasing());
  CHECK(r.rows.back().gap_plus <= 1e-2);
}

TEST_CASE("theorem gaps do not depend on the gamma source") {
  const auto fam = build_family(RandomGapped{});
  const GaugeContext ctx = prepare_gauge(fam, gauge_steps(8.0));
  std::vector<TheoremReport> reports;
  for (auto method : {BerryMethod::Holonomy, BerryMethod::Trace, BerryMethod::Wilson}) {
    reports.push_back(theorem_verify(fam, ctx, berry_phase(fam, ctx, method), {4.0, 8.0}));
  }
  for (std::size_t i = 0; i < 2; ++i) {
    for (const auto& r : reports) CHECK(std::abs(r.rows[i].gap_plus - reports[0].rows[i].gap_plus) <= 1e-4);
  }
}

TEST_CASE("theorem_verify validates its m-list") {
  CHECK(code_of([] { theorem_verify(spin(), {}); }) == Errc::BadSpec);
  const auto fam = spin();
  const GaugeContext ctx = prepare_gauge(fam, 1024);
  const BerryPhase gamma = berry_phase(fam, ctx, BerryMethod::Holonomy);
  CHECK(code_of([&] { theorem_verify(fam, ctx, gamma, {4.0, 2.0}); }) == Errc::BadSpec);
  CHECK(code_of([&] { theorem_verify(fam, ctx, gamma, {2.0, 2.0}); }) == Errc::BadSpec);
}

TEST_CASE("parallel and serial theorem runs agree bit for bit") {
  TheoremOptions serial;
  serial.parallel = false;
  const TheoremReport a = theorem_verify(spin(), {2.0, 4.0, 8.0});
  const TheoremReport b = theorem_verify(spin(), {2.0, 4.0, 8.0}, serial);
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    CHECK(a.rows[i].imlogdet_plus == b.rows[i].imlogdet_plus);
    CHECK(a.rows[i].imlogdet_minus == b.rows[i].imlogdet_minus);
  }
}

TEST_CASE("deformation sweep") {
  const auto fam = spin();
  const GaugeContext ctx = prepare_gauge(fam, gauge_steps(8.0));
  const SweepReport two = deformation_sweep(fam, ctx, 2.0, {0.0, 0.5, 1.0});
  const SweepReport eight = deformation_sweep(fam, ctx, 8.0, {0.0, 0.5, 1.0});
  CHECK(eight.delta < two.delta);

  const HatPhase hat = det_phase_hat(build_hat_blocks(ctx.gauged, 2.0));
  CHECK(linalg::circular_distance(two.rows.front().imlogdet_plus, hat.imlogdet_plus) <= 1e-6);
  REQUIRE(two.direct_plus.has_value());
  CHECK(linalg::circular_distance(*two.direct_plus, two.rows.back().imlogdet_plus) <= 1e-6);
  CHECK(linalg::circular_distance(*eight.direct_plus, eight.rows.back().imlogdet_plus) <= 1e-6);

  CHECK(code_of([&] { deformation_sweep(fam, ctx, 25.0, {0.0}); }) == Errc::OverflowRisk);
  CHECK(code_of([&] { deformation_sweep(fam, ctx, 2.0, {1.5}); }) == Errc::BadSpec);
}

TEST_CASE("deformation sweep without coupling is flat") {
  const auto fam = build_family(DiagConst{{1.0, -0.5, 2.0}});
  const GaugeContext ctx = prepare_gauge(fam, 1024);
  const SweepReport r = deformation_sweep(fam, ctx, 3.0, {0.0, 0.25, 0.5, 1.0});
  CHECK(r.delta < 1e-12);
}

TEST_CASE("spectral radius bounds") {
  const auto fam = diag_pm();
  const GaugeContext ctx = prepare_gauge(fam, 1024);
  const RadiusReport r = spectral_radius_check(build_hat_blocks(ctx.gauged, 2.0), 1.0, 3);
  REQUIRE(r.samples.size() == 3);
  CHECK(r.samples[0].t == 0.0);
  CHECK(r.samples[0].radius_plus == doctest::Approx(1.0));
  CHECK(r.samples[0].min_modulus_minus == doctest::Approx(1.0));
  CHECK(r.samples[0].bound_plus == 1.0);
  CHECK(r.samples[1].t == doctest::Approx(kPi));
  CHECK(r.samples[1].radius_plus == doctest::Approx(std::exp(-kTwoPi)).epsilon(1e-6));
  CHECK(r.samples[1].bound_plus == doctest::Approx(std::exp(-kPi)));
  CHECK(r.samples[1].min_modulus_minus == doctest::Approx(std::exp(kTwoPi)).epsilon(1e-6));

  CHECK(code_of([&] { spectral_radius_check(build_hat_blocks(ctx.gauged, 2.0), 3.0, 3); }) ==
        Errc::BoundViolation);

  const auto s = spin();
  const GaugeContext sctx = prepare_gauge(s, gauge_steps(8.0));
  const double c = gap_margin(s, LevelCurve{});
  CHECK(spectral_radius_check(build_hat_blocks(sctx.gauged, 8.0), c, 32).samples.size() == 32);
}

TEST_CASE("conjugation identity") {
  const ConjugateReport d = conjugate_identity_check(diag_pm(), 1.0);
  CHECK(linalg::circular_distance(d.imlogdet_plus, kPi) < 1e-9);
  CHECK(linalg::circular_distance(-d.adjoint_imlogdet_minus, kPi) < 1e-9);
  CHECK(d.passed);

  for (const auto& fam : {spin(), build_family(RandomGapped{})}) {
    const ConjugateReport r = conjugate_identity_check(fam, 4.0);
    CHECK(r.passed);
    CHECK(r.residual <= 1e-6);
  }
  CHECK(code_of([] { conjugate_identity_check(build_family(DiagConst{{0.0, 0.0}}), 1.0); }) ==
        Errc::GapViolation);
  CHECK(code_of([] { conjugate_identity_check(diag_pm(), 50.0); }) == Errc::OverflowRisk);
}
