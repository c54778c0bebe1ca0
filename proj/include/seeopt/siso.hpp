#pragma once

// Single-antenna secrecy energy efficiency: power control with Dinkelbach's
// parametric method, a dense-grid reference, and the zeta(eta) trade-off.
//
// Notation follows the single-antenna model: a = |h_tr|^2, b = |h_te|^2, the
// rate numerator is f(P) = log2((s_e / s_r) (s_r + P a) / (s_e + P b)) and the
// denominator is g(P) = P_c + P. The Dinkelbach parameter q = f / g is kept
// without the bandwidth factor; user-facing zeta values multiply it back in.

#include <cmath>
#include <numbers>
#include <optional>
#include <vector>

#include "seeopt/channel.hpp"

namespace seeopt::siso {

struct SisoParams {
  double a = 0.0;
  double b = 0.0;
  double sigma2_r = 0.0;
  double sigma2_e = 0.0;
  double p_c = 0.0;
  double p_max = 0.0;
  double p_min = 0.0;
  double eta0 = 0.0;
  double bandwidth = 0.0;
  double beta = std::numbers::ln2;

  double snr_r() const { return a / sigma2_r; }  // per watt
  double snr_e() const { return b / sigma2_e; }
  /// a/s_r - (b/s_e) 2^eta0
  double alpha() const { return snr_r() - snr_e() * std::exp2(eta0); }
};

struct DinkelbachStep {
  double q = 0.0;
  double p = 0.0;        // power at which q was evaluated
  double f_value = 0.0;  // F(q) = max_P f(P) - q g(P)
};

struct DinkelbachResult {
  double p_star_w = 0.0;
  double zeta_star = 0.0;
  double eta_star = 0.0;
  int iterations = 0;
  std::vector<DinkelbachStep> trace;
};

struct InnerSolution {
  double p_star = 0.0;
  double f_value = 0.0;
};

/// Coefficients of dF/dP * (s_r + P a)(s_e + P b) * beta = c2 P^2 + c1 P + c0.
struct StationarityPoly {
  double c2 = 0.0;  // -a b q beta
  double c1 = 0.0;  // -q beta (a s_e + b s_r)
  double c0 = 0.0;  // a s_e - b s_r - q beta s_r s_e
};

struct OptimalEta {
  double eta_star = 0.0;
  double zeta_star = 0.0;
  bool max_at_boundary = false;
};

/// Throws DimensionMismatch unless N = 1, RateRegionEmpty when
/// a/s_r <= b/s_e, AlphaNonPositive when a QoS floor is set and unreachable at
/// any power, and QosInfeasible when P_min > P_max.
SisoParams make_params(const ChannelPair& ch, const NoisePowers& noise, const SystemConfig& config);

double numerator(double p, const SisoParams& params);
double denominator(double p, const SisoParams& params);
/// f(P) - q g(P)
double parametric_objective(double q, double p, const SisoParams& params);
/// Analytic dF/dP at P.
double parametric_derivative(double q, double p, const SisoParams& params);

StationarityPoly stationarity_poly(double q, const SisoParams& params);

/// Positive root of the stationarity polynomial when it exists, evaluated in a
/// cancellation-free form; nullopt when F is monotone on P >= 0.
std::optional<double> stationary_power(double q, const SisoParams& params);

/// Maximiser of F(q) over [P_min, P_max]: the interior stationary point when it
/// lies in the interval, otherwise the better endpoint (P_min on ties).
InnerSolution dinkelbach_inner(double q, const SisoParams& params);

/// Stops once F(q_n) < delta * min(1, f(P_n)). Throws InvalidArgument when p0
/// lies outside [P_min, P_max] or delta <= 0 and NonConvergence after 100
/// iterations.
DinkelbachResult dinkelbach(const SisoParams& params, double delta = 1e-3, std::optional<double> p0 = std::nullopt);

struct GridOptimum {
  double p_star = 0.0;
  double zeta_star = 0.0;
};

/// Exhaustive evaluation of B f / g on n uniformly spaced powers over [P_min, P_max].
GridOptimum grid_oracle(const SisoParams& params, long n_points);

/// Upper end of the admissible rate range, log2(s_e a / (s_r b)); infinite for b = 0.
double eta_limit(const SisoParams& params);

/// Power that achieves secrecy rate eta.
double power_of_eta(double eta, const SisoParams& params);

/// zeta as a function of the secrecy rate. Throws EtaOutOfRange outside [0, eta_limit).
double zeta_of_eta(double eta, const SisoParams& params, double bandwidth);

/// Maximiser of zeta_of_eta over the whole rate range; clamps to eta(P_max)
/// and raises max_at_boundary when the unconstrained optimum needs P > P_max.
OptimalEta optimal_eta(const SisoParams& params, double bandwidth);

}  // namespace seeopt::siso
