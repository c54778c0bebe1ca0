#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace seeopt {

enum class Errc {
  NotPositiveDefinite,
  NonHermitianInput,
  DecompositionFailed,
  DimensionMismatch,
  Unbounded,
  QosInfeasibleAtT,
  DegenerateScale,
  NonPositiveDistance,
  NonPositiveInput,
  NegativePower,
  ZfUndefined,
  QosInfeasible,
  SolverFailure,
  AlphaNonPositive,
  RateRegionEmpty,
  NonConvergence,
  EtaOutOfRange,
  InvalidArgument,
  IoError,
};

std::string_view errc_name(Errc code) noexcept;

// Every failure surfaced by the library carries one of the codes above so that
// callers (CLI, Python binding) can map them without string matching.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace seeopt
