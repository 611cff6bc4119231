#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace berrydet {

/// Failure categories raised across the library. Each maps to one contract
/// violation or numerical breakdown; callers switch on the code, the message
/// carries context (family, m, t, offending magnitude).
enum class Errc {
  NotHermitian,
  ConvergenceFailure,
  NotUnitary,
  SingularInput,
  NonFinite,
  GapNotAchievable,
  BadSpec,
  GapViolation,
  OdeToleranceFailure,
  NonUnitaryHolonomy,
  BlockLeakage,
  NonRealPhase,
  DegenerateProduct,
  OverflowRisk,
  NonInvertibleOperator,
  BoundViolation,
  ConfigError,
  IoError,
};

std::string_view errc_name(Errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace berrydet
