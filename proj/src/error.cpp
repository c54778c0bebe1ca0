#include "seeopt/error.hpp"

namespace seeopt {

std::string_view errc_name(Errc code) noexcept {
  switch (code) {
    case Errc::NotPositiveDefinite: return "NotPositiveDefinite";
    case Errc::NonHermitianInput: return "NonHermitianInput";
    case Errc::DecompositionFailed: return "DecompositionFailed";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::Unbounded: return "Unbounded";
    case Errc::QosInfeasibleAtT: return "QosInfeasibleAtT";
    case Errc::DegenerateScale: return "DegenerateScale";
    case Errc::NonPositiveDistance: return "NonPositiveDistance";
    case Errc::NonPositiveInput: return "NonPositiveInput";
    case Errc::NegativePower: return "NegativePower";
    case Errc::ZfUndefined: return "ZfUndefined";
    case Errc::QosInfeasible: return "QosInfeasible";
    case Errc::SolverFailure: return "SolverFailure";
    case Errc::AlphaNonPositive: return "AlphaNonPositive";
    case Errc::RateRegionEmpty: return "RateRegionEmpty";
    case Errc::NonConvergence: return "NonConvergence";
    case Errc::EtaOutOfRange: return "EtaOutOfRange";
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace seeopt
