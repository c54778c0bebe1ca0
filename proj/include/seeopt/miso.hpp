#pragma once

// Multi-antenna beamformer designs maximising secrecy energy efficiency:
//
//  * solve_with_qos     SDP per transmit power t with a secrecy-rate floor
//  * solve_zf           zero-forcing at the eavesdropper plus the same floor
//  * solve_without_qos  closed form per t via the largest generalised eigenpair
//
// Each design reduces to a one-dimensional search over t = ||w||^2 in
// (0, P_max]: a logarithmic coarse grid followed by golden-section refinement
// around the best grid point.

#include <string>
#include <vector>

#include "seeopt/channel.hpp"
#include "seeopt/sdp.hpp"

namespace seeopt::miso {

enum class Method { QosSdp, ZeroForcing, NoQosClosedForm };

const char* to_string(Method m) noexcept;

struct TGridSpec {
  int coarse_points = 64;
  /// Lower end of the search is max(lower_fraction * P_max, minimum QoS power).
  double lower_fraction = 1e-4;
  /// Golden-section refinement stops at (hi - lo) <= refine_rel_width * hi.
  double refine_rel_width = 1e-4;
  bool refine = true;
};

struct TEvaluation {
  double t = 0.0;
  double zeta = 0.0;
  std::string status;  // "ok" or the error raised at this t
};

struct BeamformerSolution {
  ComplexVec w;
  double transmit_power_w = 0.0;
  double zeta_bits_per_joule = 0.0;
  double eta_bps_hz = 0.0;
  Method method = Method::NoQosClosedForm;
  bool feasible = false;
  int sdp_iterations = 0;  // summed over every SDP solved during the search
  std::vector<TEvaluation> evaluations;
};

struct TradeoffPoint {
  double power_w = 0.0;
  double zeta = 0.0;
  double eta = 0.0;
  ComplexVec w;
};

struct TradeoffCurve {
  std::vector<TradeoffPoint> points;
};

struct QosFeasibility {
  bool feasible = false;
  double min_power_w = 0.0;
};

/// A(t) = (s_r / t) I + h_tr^* h_tr^T.
ComplexMat build_a_matrix(const ChannelPair& ch, const NoisePowers& noise, double t);
/// B(t) = (s_e / t) I + h_te^* h_te^T.
ComplexMat build_b_matrix(const ChannelPair& ch, const NoisePowers& noise, double t);
/// C = h_tr^* h_tr^T / s_r - 2^eta0 h_te^* h_te^T / s_e.
ComplexMat build_c_matrix(const ChannelPair& ch, const NoisePowers& noise, double eta0);

/// Feasible iff lambda_max(C) > 0 and P_max lambda_max(C) >= 2^eta0 - 1.
QosFeasibility qos_feasibility(const ChannelPair& ch, const NoisePowers& noise, const SystemConfig& config);

BeamformerSolution solve_with_qos(const ChannelPair& ch, const NoisePowers& noise,
                                  const SystemConfig& config, const TGridSpec& grid = {});

/// Throws ZfUndefined for a single antenna.
BeamformerSolution solve_zf(const ChannelPair& ch, const NoisePowers& noise, const SystemConfig& config,
                            const TGridSpec& grid = {});

BeamformerSolution solve_without_qos(const ChannelPair& ch, const NoisePowers& noise,
                                     const SystemConfig& config, const TGridSpec& grid = {});

/// Optimal (zeta, eta) pair at each transmit power of the strictly increasing
/// grid, all inside (0, P_max].
TradeoffCurve tradeoff_curve_miso(const ChannelPair& ch, const NoisePowers& noise,
                                  const SystemConfig& config, const std::vector<double>& power_grid);

/// n points spaced logarithmically over [lo, hi].
std::vector<double> log_grid(double lo, double hi, int n);

}  // namespace seeopt::miso
