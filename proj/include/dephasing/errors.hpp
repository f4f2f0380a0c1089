#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace dephasing {

enum class ErrorKind {
  InvalidState,
  InvalidDensityMatrix,
  InvalidParams,
  ZeroCoherence,
  NoPurityReserve,
  OverdampedRegime,
  PlaneViolation,
  OutOfHorizon,
  InvalidStep,
  Infeasible,
  NoRecoveryAtThisField,
  NoLimitSolution,
  InvalidConfig,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Every failure raised by the library carries a machine-readable kind;
/// the CLI maps kinds onto exit codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& detail)
      : std::runtime_error(std::string(to_string(kind)) + ": " + detail), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace dephasing
