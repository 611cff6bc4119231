#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "berrydet/error.hpp"
#include "berrydet/runner.hpp"
#include "test_support.hpp"

using namespace berrydet;
using berrydet::testing::Gen;

namespace {

Errc code_of(const std::function<void()>& fn, std::string* message = nullptr) {
  try {
    fn();
  } catch (const Error& e) {
    if (message) *message = e.what();
    return e.code();
  }
  FAIL("expected an exception");
  return Errc::BadSpec;
}

std::size_t count_lines(const std::string& text) {
  return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n'));
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

RunConfig random_config(Gen& gen) {
  RunConfig cfg;
  switch (gen.seed() % 4) {
    case 0: cfg.family = SpinHalf{gen.uniform(0.0, kPi), gen.uniform(0.5, 2.0)}; break;
    case 1: cfg.family = DiagConst{{gen.uniform(0.5, 2.0), -gen.uniform(0.5, 2.0)}}; break;
    case 2: {
      FourierSeries f{gen.hermitian(2), {gen.complex_matrix(2) * 0.1}};
      cfg.family = f;
      break;
    }
    default: {
      RandomGapped r;
      r.seed = gen.seed() % 1000;
      cfg.family = r;
    }
  }
  cfg.level = LevelCurve{gen.uniform(-0.1, 0.1), {gen.uniform(-0.05, 0.05)}, {}};
  cfg.steps = 2 * (64 + gen.seed() % 1000);
  cfg.mlist = {gen.uniform(0.5, 1.0), gen.uniform(2.0, 3.0)};
  cfg.slist = {0.0, gen.uniform(0.0, 1.0)};
  cfg.methods = {BerryMethod::Trace, BerryMethod::Holonomy};
  cfg.gamma_source = BerryMethod::Trace;
  cfg.wilson_points = 64 + gen.seed() % 5000;
  cfg.derivative.step = gen.uniform(1e-6, 1e-4);
  cfg.tolerances.final_gap = gen.uniform(0.0, 1.0);
  cfg.out = "out_" + std::to_string(gen.seed() % 100) + ".csv";
  return cfg;
}

}  // namespace

TEST_CASE("parse a minimal config with defaults") {
  const RunConfig cfg = parse_config(R"({"family": {"type": "diag_const", "energies": [1, -1]}})");
  REQUIRE(std::holds_alternative<DiagConst>(cfg.family));
  CHECK(std::get<DiagConst>(cfg.family).energies == std::vector<double>{1.0, -1.0});
  CHECK(cfg.mlist == std::vector<double>{4.0, 8.0, 16.0, 32.0});
  CHECK(cfg.methods.size() == 4);
  CHECK(cfg.steps == 0);
}

TEST_CASE("parse every family type and complex matrices") {
  const RunConfig f = parse_config(R"({
    "family": {"type": "fourier",
               "constant": [[[1, 0], [0, 0]], [[0, 0], [-1, 0]]],
               "harmonics": [[[[0, 0], [0.2, 0.1]], [[0, 0], [0, 0]]]]},
    "level": {"constant": 0.1, "cos": [0.05], "sin": []},
    "derivative": {"method": "analytic"}
  })");
  const auto& series = std::get<FourierSeries>(f.family);
  CHECK(series.constant(1, 1) == Complex(-1.0, 0.0));
  CHECK(series.harmonics.at(0)(0, 1) == Complex(0.2, 0.1));
  CHECK(f.level.constant == 0.1);
  CHECK(f.derivative.method == DerivativeMethod::Analytic);

  const RunConfig r = parse_config(R"({"family": {"type": "random_gapped", "dim": 6, "n_minus": 3, "seed": 9}})");
  CHECK(std::get<RandomGapped>(r.family).seed == 9);
  const RunConfig s = parse_config(R"({"family": {"type": "spin_half", "theta": 0.5}, "level": -0.25})");
  CHECK(std::get<SpinHalf>(s.family).theta == 0.5);
  CHECK(s.level.constant == -0.25);
}

TEST_CASE("config errors name the field or line") {
  std::string msg;
  CHECK(code_of([] { parse_config("{\n  \"family\": {\n  \"type\": \"spin_half\",,\n}"); }, &msg) == Errc::ConfigError);
  CHECK(msg.find("line 3") != std::string::npos);

  CHECK(code_of([] { parse_config(R"({"family": {"type": "spin_half", "theta": "x"}})"); }, &msg) ==
        Errc::ConfigError);
  CHECK(msg.find("family.theta") != std::string::npos);

  CHECK(code_of([] { parse_config(R"({"family": {"type": "spin_half"}, "m": []})"); }, &msg) == Errc::ConfigError);
  CHECK(msg.find("m:") != std::string::npos);
  CHECK(code_of([] { parse_config(R"({"family": {"type": "spin_half"}, "m": [4, 2]})"); }) == Errc::ConfigError);
  CHECK(code_of([] { parse_config(R"({"family": {"type": "spin_half"}, "m": [-1]})"); }) == Errc::ConfigError);
  CHECK(code_of([] { parse_config(R"({"family": {"type": "spin_half"}, "colour": 1})"); }, &msg) ==
        Errc::ConfigError);
  CHECK(msg.find("colour") != std::string::npos);
  CHECK(code_of([] { parse_config(R"({"family": {"type": "tetrahedron"}})"); }) == Errc::ConfigError);
  CHECK(code_of([] { parse_config(R"({"family": {"type": "spin_half"}, "methods": ["guess"]})"); }) ==
        Errc::ConfigError);
  CHECK(code_of([] { parse_config(R"({"family": {"type": "spin_half"}, "steps": 33})"); }) == Errc::ConfigError);
  CHECK(code_of([] {
          parse_config(R"({"family": {"type": "fourier", "constant": [[[0, 1], [0, 0]], [[0, 0], [0, 0]]]}})");
        }) == Errc::ConfigError);
  CHECK(code_of([] { load_config("/nonexistent/config.json"); }) == Errc::IoError);
}

TEST_CASE("config round-trips through its normalized form") {
  Gen gen(71);
  for (int trial = 0; trial < 40; ++trial) {
    const RunConfig cfg = random_config(gen);
    const std::string once = serialize_config(cfg);
    const RunConfig parsed = parse_config(once);
    CHECK(serialize_config(parsed) == once);
    CHECK(config_hash(parsed) == config_hash(cfg));
  }
  const std::string text = read_file(std::string(BERRYDET_SOURCE_DIR) + "/configs/demo.json");
  const RunConfig demo = parse_config(text);
  CHECK(serialize_config(parse_config(serialize_config(demo))) == serialize_config(demo));
  CHECK(serialize_config(demo) == serialize_config(demo_config()));
}

TEST_CASE("config hash distinguishes configs") {
  RunConfig a = demo_config();
  RunConfig b = a;
  b.mlist.back() = 64.0;
  CHECK(config_hash(a) != config_hash(b));
  CHECK(hash_hex(config_hash(a)).size() == 16);
}

TEST_CASE("level curves shift the family") {
  RunConfig cfg;
  cfg.family = DiagConst{{1.0, 0.2}};
  cfg.level = LevelCurve{0.5, {0.1}, {0.2}};
  const auto fam = level_adjusted_family(cfg);
  for (double t : {0.0, 1.0, 2.5}) {
    const double lambda = cfg.level(t);
    CHECK(std::abs(fam(t)(0, 0) - (1.0 - lambda)) < 1e-14);
    CHECK(std::abs(fam(t)(1, 1) - (0.2 - lambda)) < 1e-14);
  }
}

TEST_CASE("demo run gives four rows with agreeing phases") {
  const RunReport report = run_config(demo_config(), Command::Demo);
  CHECK(report.rows.size() == 4);
  CHECK(report.phases.size() == 4);
  CHECK(report.passed());
  for (const ReportRow& row : report.rows) CHECK(row.config_hash == report.config_hash);
  for (std::size_t i = 1; i < report.rows.size(); ++i) CHECK(report.rows[i].phase.m > report.rows[i - 1].phase.m);

  const std::string csv = render_csv(report);
  CHECK(count_lines(csv) == 5);
  CHECK(csv.rfind("m,gamma,imlogdet_plus,imlogdet_minus,predicted_plus,predicted_minus,gap_plus,gap_minus\n", 0) ==
        0);
  CHECK(render_csv(run_config(demo_config(), Command::Demo)) == csv);
  CHECK(render_summary(report).find("[pass]") != std::string::npos);
}

TEST_CASE("emit_csv writes identical bytes and reports unwritable paths") {
  RunConfig cfg = demo_config();
  cfg.mlist = {2.0, 4.0};
  const RunReport report = run_config(cfg, Command::Verify);
  const std::string a = "runner_test_a.csv";
  const std::string b = "runner_test_b.csv";
  emit_csv(report, a);
  emit_csv(run_config(cfg, Command::Verify), b);
  CHECK(read_file(a) == read_file(b));
  CHECK(count_lines(read_file(a)) == 3);
  std::remove(a.c_str());
  std::remove(b.c_str());
  CHECK(code_of([&] { emit_csv(report, "/nonexistent/dir/out.csv"); }) == Errc::IoError);
}

TEST_CASE("gap violations surface with the offending t") {
  RunConfig cfg;
  cfg.family = DiagConst{{1.0, 0.5}};
  cfg.level.constant = 0.5;
  std::string msg;
  CHECK(code_of([&] { run_config(cfg, Command::Berry); }, &msg) == Errc::GapViolation);
  CHECK(msg.find("t = ") != std::string::npos);
  CHECK(msg.find("diag_const") != std::string::npos);
}

TEST_CASE("berry, det and sweep commands") {
  RunConfig cfg = demo_config();
  const RunReport berry = run_config(cfg, Command::Berry);
  CHECK(berry.rows.empty());
  CHECK(berry.phases.size() == 4);
  CHECK(berry.passed());
  CHECK(count_lines(render_csv(berry)) == 5);

  CHECK(code_of([&] { run_config(cfg, Command::Det); }) == Errc::ConfigError);
  cfg.mlist = {6.0};
  const RunReport det = run_config(cfg, Command::Det);
  CHECK(det.rows.size() == 1);
  CHECK(det.passed());

  cfg.mlist = {2.0, 8.0};
  cfg.methods = {BerryMethod::Holonomy};
  const RunReport sweep = run_config(cfg, Command::Sweep);
  CHECK(sweep.sweeps.size() == 2);
  CHECK(sweep.passed());
  CHECK(count_lines(render_csv(sweep)) == 1 + 2 * cfg.slist.size());

  cfg.mlist = {2.0, 40.0};
  CHECK(code_of([&] { run_config(cfg, Command::Sweep); }) == Errc::OverflowRisk);
}

TEST_CASE("failed checks are reported, not thrown") {
  RunConfig cfg = demo_config();
  cfg.mlist = {1.0, 2.0};
  cfg.tolerances.final_gap = 1e-12;
  const RunReport report = run_config(cfg, Command::Verify);
  CHECK_FALSE(report.passed());
}

TEST_CASE("command names round-trip") {
  for (Command c : {Command::Berry, Command::Det, Command::Verify, Command::Sweep, Command::Demo}) {
    CHECK(parse_command(command_name(c)) == c);
  }
  CHECK(code_of([] { parse_command("plot"); }) == Errc::ConfigError);
}
