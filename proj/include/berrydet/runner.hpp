#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "berrydet/determinant.hpp"

namespace berrydet {

enum class Command { Berry, Det, Verify, Sweep, Demo };

std::string_view command_name(Command command);
Command parse_command(std::string_view name);

struct RunTolerances {
  double method_agreement = 1e-4;  // pairwise |γ_a − γ_b| mod 2π
  double final_gap = 1e-2;         // Δ±(largest m)
  double monotone_slack = 0.10;
  double noise_floor = 1e-8;
  double direct_match = 1e-6;      // sweep: s = 1 against D_m itself
};

struct RunConfig {
  FamilySpec family = SpinHalf{kPi / 3.0, 1.0};
  LevelCurve level;
  std::size_t steps = 0;  // gauge grid; 0 picks gauge_steps(max m)
  std::vector<double> mlist{4.0, 8.0, 16.0, 32.0};
  std::vector<double> slist{0.0, 0.5, 1.0};
  std::vector<BerryMethod> methods{BerryMethod::Holonomy, BerryMethod::Trace, BerryMethod::Wilson,
                                   BerryMethod::Exterior};
  BerryMethod gamma_source = BerryMethod::Wilson;
  std::size_t wilson_points = 8192;
  DerivativeOptions derivative;
  RunTolerances tolerances;
  double max_full_monodromy_m = 20.0;
  std::string out;  // CSV path; empty writes nothing
};

/// Parses the JSON config text. Unknown keys, wrong types and invalid values
/// raise ConfigError naming the field (or the line for syntax errors).
RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::string& path);
/// Normalized JSON form; parse_config(serialize_config(c)) reproduces c.
std::string serialize_config(const RunConfig& cfg);
/// FNV-1a over the normalized form.
std::uint64_t config_hash(const RunConfig& cfg);
std::string hash_hex(std::uint64_t hash);

/// Builds the family as seen from the level curve, H(t) − λ(t)·Id.
PeriodicHamiltonian level_adjusted_family(const RunConfig& cfg);

struct ReportRow {
  std::uint64_t config_hash = 0;
  DetPhaseReport phase;
};

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct Timing {
  std::string stage;
  double seconds = 0.0;
};

struct RunReport {
  Command command = Command::Demo;
  std::uint64_t config_hash = 0;
  std::size_t n_plus = 0;
  std::size_t n_minus = 0;
  std::vector<ReportRow> rows;  // ascending m
  std::vector<BerryPhase> phases;
  std::vector<SweepReport> sweeps;
  std::vector<CheckResult> checks;
  std::vector<Timing> timings;

  bool passed() const;
};

/// Built-in spin-½ showcase, identical to configs/demo.json.
RunConfig demo_config();

RunReport run_config(const RunConfig& cfg, Command command);

/// Header plus one row per m, %.12g. Berry-only reports list the phases per
/// method and sweep reports one row per (m, s). Throws IoError.
void emit_csv(const RunReport& report, const std::string& path);
std::string render_csv(const RunReport& report);
std::string render_summary(const RunReport& report);

}  // namespace berrydet
