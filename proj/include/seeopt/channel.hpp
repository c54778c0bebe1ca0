#pragma once

// Link budget, channel draws and the secrecy metrics of the wiretap model.
//
// All rates are in bits/s/Hz with base-2 logarithms and are clamped at zero.
// Powers are in watts.

#include <cstdint>
#include <optional>

#include "seeopt/linalg.hpp"

namespace seeopt {

inline constexpr double kBoltzmann = 1.380649e-23;  // J/K

struct SystemConfig {
  double bandwidth_hz = 20e6;
  double circuit_power_w = 5.0;
  double max_power_w = 50.0;
  std::optional<double> qos_floor_bps_hz;
  double temp_r_kelvin = 298.0;
  double temp_e_kelvin = 298.0;
  double distance_km = 2.0;
  /// Eavesdropper distance; defaults to distance_km when unset.
  std::optional<double> distance_e_km;
  int n_antennas = 1;

  double eve_distance_km() const { return distance_e_km.value_or(distance_km); }
  double qos_floor() const { return qos_floor_bps_hz.value_or(0.0); }
};

/// Throws InvalidArgument when a field violates its documented range.
void validate(const SystemConfig& config);

struct NoisePowers {
  double sigma2_r_w = 0.0;
  double sigma2_e_w = 0.0;

  /// sigma2_e / sigma2_r, the constant in front of the beamforming ratio.
  double ratio() const { return sigma2_e_w / sigma2_r_w; }
};

struct ChannelPair {
  ComplexVec h_tr;
  ComplexVec h_te;

  Eigen::Index dim() const { return h_tr.size(); }
};

/// 128.1 + 37.6 log10(d) dB. Throws NonPositiveDistance for d <= 0.
double path_loss_db(double d_km);

/// Linear power gain 10^(-PL/10).
double path_gain(double d_km);

/// K T B. Throws NonPositiveInput unless both arguments are positive.
double noise_power_w(double temp_k, double bandwidth_hz);

NoisePowers noise_powers(const SystemConfig& config);

/// Draws h_tr and h_te with i.i.d. CN(0, g) entries, g the path gain of the
/// respective link. Entries are drawn antenna by antenna (h_tr[k] then h_te[k]),
/// so the first n entries coincide for any antenna count >= n under one seed.
ChannelPair generate_channel(const SystemConfig& config, std::uint64_t seed);

/// [log2((1 + a) / (1 + b))]^+ with a = |h_tr^T w|^2 / s_r, b = |h_te^T w|^2 / s_e.
double secrecy_rate_miso(const ComplexVec& w, const ChannelPair& ch, const NoisePowers& noise);

/// Single-antenna secrecy rate at transmit power p_w. Throws NegativePower for
/// p_w < 0 and DimensionMismatch unless the channel is scalar.
double secrecy_rate_siso(double p_w, const ChannelPair& ch, const NoisePowers& noise);

/// B * eta / (consumed_power + P_c), in bits per joule.
double secrecy_ee(double eta_bps_hz, double consumed_power_w, const SystemConfig& config);

/// Channels normalised by the noise standard deviation (g = h / sigma). All
/// beamforming problems are solved in these units, where the noise ratio in
/// front of the Rayleigh quotient cancels.
struct NormalizedChannel {
  ComplexVec g_r;
  ComplexVec g_e;
};

NormalizedChannel normalize(const ChannelPair& ch, const NoisePowers& noise);

}  // namespace seeopt
