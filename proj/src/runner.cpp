#include "berrydet/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <sstream>

#include <json.hpp>

namespace berrydet {
namespace {

using nlohmann::json;

[[noreturn]] void config_error(const std::string& field, const std::string& what) {
  throw Error(Errc::ConfigError, field + ": " + what);
}

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

void require_object(const json& j, const std::string& path) {
  if (!j.is_object()) config_error(path.empty() ? "<root>" : path, "expected an object");
}

void check_keys(const json& j, const std::string& path, std::initializer_list<const char*> allowed) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    const bool known = std::any_of(allowed.begin(), allowed.end(),
                                   [&](const char* k) { return it.key() == k; });
    if (!known) config_error(join(path, it.key()), "unknown key");
  }
}

double as_number(const json& j, const std::string& field) {
  if (!j.is_number()) config_error(field, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) config_error(field, "must be finite");
  return v;
}

std::size_t as_count(const json& j, const std::string& field) {
  if (!j.is_number_integer() || j.get<long long>() < 0) {
    config_error(field, "expected a non-negative integer");
  }
  return j.get<std::size_t>();
}

std::string as_string(const json& j, const std::string& field) {
  if (!j.is_string()) config_error(field, "expected a string");
  return j.get<std::string>();
}

std::vector<double> as_numbers(const json& j, const std::string& field) {
  if (!j.is_array()) config_error(field, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    out.push_back(as_number(j[i], field + "[" + std::to_string(i) + "]"));
  }
  return out;
}

template <class T, class F>
void optional_field(const json& j, const std::string& path, const char* key, T& target, F convert) {
  if (j.contains(key)) target = convert(j.at(key), join(path, key));
}

Complex as_complex(const json& j, const std::string& field) {
  if (j.is_number()) return {as_number(j, field), 0.0};
  if (!j.is_array() || j.size() != 2) config_error(field, "expected [re, im]");
  return {as_number(j[0], field + "[0]"), as_number(j[1], field + "[1]")};
}

ComplexMatrix as_matrix(const json& j, const std::string& field) {
  if (!j.is_array() || j.empty()) config_error(field, "expected a non-empty array of rows");
  const std::size_t rows = j.size();
  ComplexMatrix out(rows, rows);
  for (std::size_t r = 0; r < rows; ++r) {
    const std::string row_field = field + "[" + std::to_string(r) + "]";
    if (!j[r].is_array() || j[r].size() != rows) config_error(row_field, "matrix must be square");
    for (std::size_t c = 0; c < rows; ++c) {
      out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          as_complex(j[r][c], row_field + "[" + std::to_string(c) + "]");
    }
  }
  return out;
}

json matrix_json(const ComplexMatrix& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back({m(r, c).real(), m(r, c).imag()});
    rows.push_back(row);
  }
  return rows;
}

FamilySpec parse_family(const json& j, const std::string& path) {
  require_object(j, path);
  if (!j.contains("type")) config_error(join(path, "type"), "missing");
  const std::string type = as_string(j.at("type"), join(path, "type"));
  if (type == "spin_half") {
    check_keys(j, path, {"type", "theta", "b0"});
    SpinHalf s;
    optional_field(j, path, "theta", s.theta, as_number);
    optional_field(j, path, "b0", s.b0, as_number);
    return s;
  }
  if (type == "diag_const") {
    check_keys(j, path, {"type", "energies"});
    DiagConst d;
    if (!j.contains("energies")) config_error(join(path, "energies"), "missing");
    d.energies = as_numbers(j.at("energies"), join(path, "energies"));
    return d;
  }
  if (type == "fourier") {
    check_keys(j, path, {"type", "constant", "harmonics"});
    FourierSeries f;
    if (!j.contains("constant")) config_error(join(path, "constant"), "missing");
    f.constant = as_matrix(j.at("constant"), join(path, "constant"));
    if (j.contains("harmonics")) {
      const json& h = j.at("harmonics");
      const std::string field = join(path, "harmonics");
      if (!h.is_array()) config_error(field, "expected an array of matrices");
      for (std::size_t k = 0; k < h.size(); ++k) {
        f.harmonics.push_back(as_matrix(h[k], field + "[" + std::to_string(k) + "]"));
      }
    }
    return f;
  }
  if (type == "random_gapped") {
    check_keys(j, path, {"type", "dim", "harmonics", "seed", "target_gap", "n_minus", "amplitude",
                         "max_attempts"});
    RandomGapped r;
    optional_field(j, path, "dim", r.dim, as_count);
    optional_field(j, path, "harmonics", r.harmonics, as_count);
    optional_field(j, path, "seed", r.seed, as_count);
    optional_field(j, path, "target_gap", r.target_gap, as_number);
    optional_field(j, path, "n_minus", r.n_minus, as_count);
    optional_field(j, path, "amplitude", r.amplitude, as_number);
    optional_field(j, path, "max_attempts", r.max_attempts, as_count);
    return r;
  }
  config_error(join(path, "type"), "unknown family type '" + type + "'");
}

json family_json(const FamilySpec& spec) {
  return std::visit(
      [](const auto& s) -> json {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, SpinHalf>) {
          return {{"type", "spin_half"}, {"theta", s.theta}, {"b0", s.b0}};
        } else if constexpr (std::is_same_v<T, DiagConst>) {
          return {{"type", "diag_const"}, {"energies", s.energies}};
        } else if constexpr (std::is_same_v<T, FourierSeries>) {
          json h = json::array();
          for (const auto& c : s.harmonics) h.push_back(matrix_json(c));
          return {{"type", "fourier"}, {"constant", matrix_json(s.constant)}, {"harmonics", h}};
        } else {
          return {{"type", "random_gapped"}, {"dim", s.dim},
                  {"harmonics", s.harmonics}, {"seed", s.seed},
                  {"target_gap", s.target_gap}, {"n_minus", s.n_minus},
                  {"amplitude", s.amplitude}, {"max_attempts", s.max_attempts}};
        }
      },
      spec);
}

std::string_view family_type(const FamilySpec& spec) {
  static constexpr std::string_view names[] = {"spin_half", "diag_const", "fourier", "random_gapped"};
  return names[spec.index()];
}

LevelCurve parse_level(const json& j, const std::string& path) {
  LevelCurve level;
  if (j.is_number()) {
    level.constant = as_number(j, path);
    return level;
  }
  require_object(j, path);
  check_keys(j, path, {"constant", "cos", "sin"});
  optional_field(j, path, "constant", level.constant, as_number);
  optional_field(j, path, "cos", level.cos_coeffs, as_numbers);
  optional_field(j, path, "sin", level.sin_coeffs, as_numbers);
  return level;
}

DerivativeOptions parse_derivative(const json& j, const std::string& path) {
  require_object(j, path);
  check_keys(j, path, {"method", "step"});
  DerivativeOptions d;
  if (j.contains("method")) {
    const std::string m = as_string(j.at("method"), join(path, "method"));
    if (m == "finite_difference") {
      d.method = DerivativeMethod::FiniteDifference;
    } else if (m == "analytic") {
      d.method = DerivativeMethod::Analytic;
    } else {
      config_error(join(path, "method"), "expected 'finite_difference' or 'analytic'");
    }
  }
  optional_field(j, path, "step", d.step, as_number);
  if (!(d.step > 0.0)) config_error(join(path, "step"), "must be positive");
  return d;
}

RunTolerances parse_tolerances(const json& j, const std::string& path) {
  require_object(j, path);
  check_keys(j, path, {"method_agreement", "final_gap", "monotone_slack", "noise_floor", "direct_match"});
  RunTolerances t;
  optional_field(j, path, "method_agreement", t.method_agreement, as_number);
  optional_field(j, path, "final_gap", t.final_gap, as_number);
  optional_field(j, path, "monotone_slack", t.monotone_slack, as_number);
  optional_field(j, path, "noise_floor", t.noise_floor, as_number);
  optional_field(j, path, "direct_match", t.direct_match, as_number);
  for (double v : {t.method_agreement, t.final_gap, t.monotone_slack, t.noise_floor, t.direct_match}) {
    if (v < 0.0) config_error(path, "tolerances must be non-negative");
  }
  return t;
}

BerryMethod as_method(const json& j, const std::string& field) {
  const std::string name = as_string(j, field);
  try {
    return parse_berry_method(name);
  } catch (const Error&) {
    config_error(field, "unknown method '" + name + "'");
  }
}

void validate(const RunConfig& cfg) {
  if (cfg.mlist.empty()) config_error("m", "m-list must not be empty");
  if (cfg.mlist.front() <= 0.0) config_error("m", "m values must be positive");
  for (std::size_t i = 1; i < cfg.mlist.size(); ++i) {
    if (!(cfg.mlist[i] > cfg.mlist[i - 1])) config_error("m", "m values must be strictly ascending");
  }
  for (double s : cfg.slist) {
    if (!(s >= 0.0 && s <= 1.0)) config_error("s", "s values must lie in [0, 1]");
  }
  if (cfg.steps != 0 && (cfg.steps < 64 || cfg.steps % 2 != 0)) {
    config_error("steps", "must be 0 (automatic) or an even number >= 64");
  }
  if (cfg.wilson_points < 64) config_error("wilson_points", "must be at least 64");
  if (cfg.methods.empty()) config_error("methods", "at least one method is required");
  try {
    build_family(cfg.family);
  } catch (const Error& e) {
    if (e.code() == Errc::BadSpec) config_error("family", e.what());
    throw;
  }
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

template <class F>
auto timed(RunReport& report, const std::string& stage, const std::string& context, F&& fn) {
  const auto start = std::chrono::steady_clock::now();
  try {
    if constexpr (std::is_void_v<decltype(fn())>) {
      fn();
      report.timings.push_back({stage, seconds_since(start)});
    } else {
      auto result = fn();
      report.timings.push_back({stage, seconds_since(start)});
      return result;
    }
  } catch (const Error& e) {
    if (e.code() == Errc::ConfigError) throw;
    // Re-raise with the run context in front of the original detail.
    const std::string what = e.what();
    const std::string name(errc_name(e.code()));
    const std::string detail = what.rfind(name + ": ", 0) == 0 ? what.substr(name.size() + 2) : what;
    throw Error(e.code(), context + ", " + stage + ": " + detail);
  }
}

std::string format_g(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string format_m(double m) { return format_g(m); }

void add_check(RunReport& report, std::string name, bool passed, std::string detail) {
  report.checks.push_back({std::move(name), passed, std::move(detail)});
}

void check_method_agreement(RunReport& report, double tol) {
  if (report.phases.size() < 2) return;
  double worst = 0.0;
  for (std::size_t a = 0; a < report.phases.size(); ++a) {
    for (std::size_t b = a + 1; b < report.phases.size(); ++b) {
      worst = std::max(worst, linalg::circular_distance(report.phases[a].gamma, report.phases[b].gamma));
    }
  }
  add_check(report, "berry methods agree", worst <= tol,
            "max pairwise distance " + format_g(worst) + " (tol " + format_g(tol) + ")");
}

std::size_t resolve_steps(const RunConfig& cfg, double m_max) {
  return cfg.steps != 0 ? cfg.steps : gauge_steps(m_max);
}

}  // namespace

std::string_view command_name(Command command) {
  switch (command) {
    case Command::Berry: return "berry";
    case Command::Det: return "det";
    case Command::Verify: return "verify";
    case Command::Sweep: return "sweep";
    case Command::Demo: return "demo";
  }
  return "unknown";
}

Command parse_command(std::string_view name) {
  for (Command c : {Command::Berry, Command::Det, Command::Verify, Command::Sweep, Command::Demo}) {
    if (command_name(c) == name) return c;
  }
  throw Error(Errc::ConfigError, "unknown command '" + std::string(name) + "'");
}

RunConfig parse_config(std::string_view text) {
  json root;
  try {
    root = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    // nlohmann reports "... at line L, column C: ..." for syntax errors.
    throw Error(Errc::ConfigError, std::string("syntax error, ") + e.what());
  }
  require_object(root, "");
  check_keys(root, "", {"family", "level", "steps", "m", "s", "methods", "gamma_source", "wilson_points",
                        "derivative", "tolerances", "max_full_monodromy_m", "out"});

  RunConfig cfg;
  if (!root.contains("family")) config_error("family", "missing");
  cfg.family = parse_family(root.at("family"), "family");
  optional_field(root, "", "level", cfg.level, parse_level);
  optional_field(root, "", "steps", cfg.steps, as_count);
  optional_field(root, "", "m", cfg.mlist, as_numbers);
  optional_field(root, "", "s", cfg.slist, as_numbers);
  if (root.contains("methods")) {
    const json& m = root.at("methods");
    if (!m.is_array()) config_error("methods", "expected an array of method names");
    cfg.methods.clear();
    for (std::size_t i = 0; i < m.size(); ++i) {
      const BerryMethod method = as_method(m[i], "methods[" + std::to_string(i) + "]");
      if (std::find(cfg.methods.begin(), cfg.methods.end(), method) == cfg.methods.end()) {
        cfg.methods.push_back(method);
      }
    }
  }
  optional_field(root, "", "gamma_source", cfg.gamma_source, as_method);
  optional_field(root, "", "wilson_points", cfg.wilson_points, as_count);
  optional_field(root, "", "derivative", cfg.derivative, parse_derivative);
  optional_field(root, "", "tolerances", cfg.tolerances, parse_tolerances);
  optional_field(root, "", "max_full_monodromy_m", cfg.max_full_monodromy_m, as_number);
  optional_field(root, "", "out", cfg.out, as_string);
  validate(cfg);
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::IoError, "cannot read config '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

std::string serialize_config(const RunConfig& cfg) {
  json methods = json::array();
  for (BerryMethod m : cfg.methods) methods.push_back(std::string(berry_method_name(m)));
  const json root = {
      {"family", family_json(cfg.family)},
      {"level", {{"constant", cfg.level.constant}, {"cos", cfg.level.cos_coeffs}, {"sin", cfg.level.sin_coeffs}}},
      {"steps", cfg.steps},
      {"m", cfg.mlist},
      {"s", cfg.slist},
      {"methods", methods},
      {"gamma_source", std::string(berry_method_name(cfg.gamma_source))},
      {"wilson_points", cfg.wilson_points},
      {"derivative",
       {{"method", cfg.derivative.method == DerivativeMethod::Analytic ? "analytic" : "finite_difference"},
        {"step", cfg.derivative.step}}},
      {"tolerances",
       {{"method_agreement", cfg.tolerances.method_agreement},
        {"final_gap", cfg.tolerances.final_gap},
        {"monotone_slack", cfg.tolerances.monotone_slack},
        {"noise_floor", cfg.tolerances.noise_floor},
        {"direct_match", cfg.tolerances.direct_match}}},
      {"max_full_monodromy_m", cfg.max_full_monodromy_m},
      {"out", cfg.out},
  };
  return root.dump(2) + "\n";
}

std::uint64_t config_hash(const RunConfig& cfg) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : serialize_config(cfg)) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hash_hex(std::uint64_t hash) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash));
  return buf;
}

PeriodicHamiltonian level_adjusted_family(const RunConfig& cfg) {
  PeriodicHamiltonian fam = build_family(cfg.family);
  const LevelCurve& level = cfg.level;
  const bool flat = level.constant == 0.0 &&
                    std::all_of(level.cos_coeffs.begin(), level.cos_coeffs.end(), [](double v) { return v == 0.0; }) &&
                    std::all_of(level.sin_coeffs.begin(), level.sin_coeffs.end(), [](double v) { return v == 0.0; });
  if (flat) return fam;

  // a cos kt + b sin kt = c e^{ikt} + c̄ e^{−ikt} with c = (a − ib)/2.
  const auto n = static_cast<Eigen::Index>(fam.dim());
  FourierSeries shifted{fam.constant_term() - level.constant * linalg::identity(n), fam.harmonics()};
  const std::size_t order = std::max({shifted.harmonics.size(), level.cos_coeffs.size(), level.sin_coeffs.size()});
  shifted.harmonics.resize(order, ComplexMatrix::Zero(n, n));
  for (std::size_t k = 0; k < order; ++k) {
    const double a = k < level.cos_coeffs.size() ? level.cos_coeffs[k] : 0.0;
    const double b = k < level.sin_coeffs.size() ? level.sin_coeffs[k] : 0.0;
    shifted.harmonics[k] -= Complex(a / 2.0, -b / 2.0) * linalg::identity(n);
  }
  return build_family(shifted);
}

bool RunReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

RunConfig demo_config() {
  RunConfig cfg;
  cfg.out = "demo.csv";
  return cfg;
}

RunReport run_config(const RunConfig& cfg, Command command) {
  validate(cfg);
  RunReport report;
  report.command = command;
  report.config_hash = config_hash(cfg);
  const std::string context = "family " + std::string(family_type(cfg.family));

  const PeriodicHamiltonian fam = timed(report, "family", context, [&] { return level_adjusted_family(cfg); });
  timed(report, "gap", context, [&] { return gap_margin(fam, LevelCurve{}); });

  KatoOptions kato;
  kato.derivative = cfg.derivative;

  if (command == Command::Det && cfg.mlist.size() != 1) {
    config_error("m", "det expects exactly one m value (use --m)");
  }
  const double m_max = command == Command::Berry ? 0.0 : cfg.mlist.back();
  kato.steps = resolve_steps(cfg, m_max);
  const GaugeContext ctx = timed(report, "gauge", context, [&] { return prepare_gauge(fam, kato.steps, kato); });
  report.n_plus = ctx.split0.n_plus;
  report.n_minus = ctx.split0.n_minus;

  const auto phase_for = [&](BerryMethod method) {
    return timed(report, "berry " + std::string(berry_method_name(method)), context,
                 [&] { return berry_phase(fam, ctx, method, cfg.wilson_points, kato); });
  };

  if (command == Command::Berry || command == Command::Verify || command == Command::Demo) {
    for (BerryMethod method : cfg.methods) report.phases.push_back(phase_for(method));
    check_method_agreement(report, cfg.tolerances.method_agreement);
  }
  if (command == Command::Berry) return report;

  BerryPhase gamma;
  const auto listed = std::find_if(report.phases.begin(), report.phases.end(),
                                   [&](const BerryPhase& p) { return p.method == cfg.gamma_source; });
  gamma = listed != report.phases.end() ? *listed : phase_for(cfg.gamma_source);

  if (command == Command::Det) {
    const double m = cfg.mlist.front();
    const DetPhaseReport row = timed(report, "det m=" + format_m(m), context, [&] {
      return make_phase_report(det_phase_hat(build_hat_blocks(ctx.gauged, m)), gamma, ctx.split0.n_plus,
                               ctx.split0.n_minus);
    });
    report.rows.push_back({report.config_hash, row});
    const bool finite = !row.overflow && std::isfinite(row.imlogdet_plus) && std::isfinite(row.imlogdet_minus);
    add_check(report, "determinant finite", finite, finite ? "no overflow" : "overflow or non-finite phase");
    return report;
  }

  if (command == Command::Sweep) {
    SweepOptions sopts;
    sopts.max_m = cfg.max_full_monodromy_m;
    for (double m : cfg.mlist) {
      report.sweeps.push_back(timed(report, "sweep m=" + format_m(m), context,
                                    [&] { return deformation_sweep(fam, ctx, m, cfg.slist, sopts); }));
    }
    double worst_direct = 0.0;
    bool have_direct = false;
    for (const SweepReport& s : report.sweeps) {
      const auto at_one = std::find_if(s.rows.begin(), s.rows.end(), [](const SweepRow& r) { return r.s == 1.0; });
      if (s.direct_plus && at_one != s.rows.end()) {
        have_direct = true;
        worst_direct = std::max(worst_direct, linalg::circular_distance(*s.direct_plus, at_one->imlogdet_plus));
      }
    }
    if (have_direct) {
      add_check(report, "s = 1 matches the family operator", worst_direct <= cfg.tolerances.direct_match,
                "max distance " + format_g(worst_direct));
    }
    if (report.sweeps.size() >= 2) {
      const double first = report.sweeps.front().delta;
      const double last = report.sweeps.back().delta;
      add_check(report, "deformation shrinks with m", last < first || last <= cfg.tolerances.noise_floor,
                "delta " + format_g(first) + " -> " + format_g(last));
    }
    return report;
  }

  TheoremOptions topts;
  topts.kato = kato;
  topts.gamma_source = cfg.gamma_source;
  topts.wilson_points = cfg.wilson_points;
  topts.monotone_slack = cfg.tolerances.monotone_slack;
  topts.noise_floor = cfg.tolerances.noise_floor;
  const TheoremReport theorem =
      timed(report, "determinants", context, [&] { return theorem_verify(fam, ctx, gamma, cfg.mlist, topts); });
  for (const DetPhaseReport& row : theorem.rows) report.rows.push_back({report.config_hash, row});

  add_check(report, "gaps non-increasing in m", theorem.non_increasing(),
            std::string("plus ") + (theorem.non_increasing_plus ? "yes" : "no") + ", minus " +
                (theorem.non_increasing_minus ? "yes" : "no"));
  const DetPhaseReport& last = theorem.rows.back();
  const double final_gap = std::max(last.gap_plus, last.gap_minus);
  add_check(report, "gap at largest m within tolerance", final_gap <= cfg.tolerances.final_gap,
            "m = " + format_m(last.m) + ", gap " + format_g(final_gap) + " (tol " +
                format_g(cfg.tolerances.final_gap) + ")");
  const bool finite = std::none_of(theorem.rows.begin(), theorem.rows.end(),
                                   [](const DetPhaseReport& r) { return r.overflow; });
  add_check(report, "determinants finite", finite, finite ? "no overflow" : "overflow flagged");
  return report;
}

std::string render_csv(const RunReport& report) {
  std::ostringstream os;
  if (report.command == Command::Berry) {
    os << "method,gamma\n";
    for (const BerryPhase& p : report.phases) os << berry_method_name(p.method) << ',' << format_g(p.gamma) << '\n';
    return os.str();
  }
  if (report.command == Command::Sweep) {
    os << "m,s,imlogdet_plus,imlogdet_minus,delta,direct_plus\n";
    for (const SweepReport& s : report.sweeps) {
      for (const SweepRow& r : s.rows) {
        os << format_g(s.m) << ',' << format_g(r.s) << ',' << format_g(r.imlogdet_plus) << ','
           << format_g(r.imlogdet_minus) << ',' << format_g(s.delta) << ','
           << (s.direct_plus ? format_g(*s.direct_plus) : std::string()) << '\n';
      }
    }
    return os.str();
  }
  os << "m,gamma,imlogdet_plus,imlogdet_minus,predicted_plus,predicted_minus,gap_plus,gap_minus\n";
  for (const ReportRow& row : report.rows) {
    const DetPhaseReport& r = row.phase;
    os << format_g(r.m) << ',' << format_g(r.gamma.gamma) << ',' << format_g(r.imlogdet_plus) << ','
       << format_g(r.imlogdet_minus) << ',' << format_g(r.predicted_plus) << ',' << format_g(r.predicted_minus)
       << ',' << format_g(r.gap_plus) << ',' << format_g(r.gap_minus) << '\n';
  }
  return os.str();
}

void emit_csv(const RunReport& report, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::IoError, "cannot open '" + path + "' for writing");
  out << render_csv(report);
  out.flush();
  if (!out) throw Error(Errc::IoError, "write to '" + path + "' failed");
}

std::string render_summary(const RunReport& report) {
  std::ostringstream os;
  os << command_name(report.command) << "  config " << hash_hex(report.config_hash) << "  N+ = " << report.n_plus
     << ", N- = " << report.n_minus << '\n';
  for (const BerryPhase& p : report.phases) {
    os << "  gamma[" << berry_method_name(p.method) << "] = " << format_g(p.gamma) << '\n';
  }
  for (const ReportRow& row : report.rows) {
    const DetPhaseReport& r = row.phase;
    os << "  m = " << format_g(r.m) << ": Im log det+ = " << format_g(r.imlogdet_plus)
       << " (predicted " << format_g(r.predicted_plus) << ", gap " << format_g(r.gap_plus)
       << "), Im log det- = " << format_g(r.imlogdet_minus) << " (predicted " << format_g(r.predicted_minus)
       << ", gap " << format_g(r.gap_minus) << ")\n";
  }
  for (const SweepReport& s : report.sweeps) {
    os << "  m = " << format_g(s.m) << ": delta = " << format_g(s.delta);
    if (s.direct_plus) os << ", direct Im log det+ = " << format_g(*s.direct_plus);
    os << '\n';
  }
  for (const CheckResult& c : report.checks) {
    os << "  [" << (c.passed ? "pass" : "FAIL") << "] " << c.name << ": " << c.detail << '\n';
  }
  for (const Timing& t : report.timings) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", t.seconds);
    os << "  time " << t.stage << ": " << buf << " s\n";
  }
  return os.str();
}

}  // namespace berrydet
