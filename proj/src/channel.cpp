#include "seeopt/channel.hpp"

#include <cmath>
#include <string>

#include "seeopt/rng.hpp"

namespace seeopt {

void validate(const SystemConfig& c) {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw Error(Errc::InvalidArgument, std::string(name) + " must be positive and finite");
    }
  };
  positive(c.bandwidth_hz, "bandwidth");
  positive(c.circuit_power_w, "circuit power");
  positive(c.max_power_w, "max power");
  positive(c.temp_r_kelvin, "receiver temperature");
  positive(c.temp_e_kelvin, "eavesdropper temperature");
  positive(c.distance_km, "distance");
  if (c.distance_e_km) positive(*c.distance_e_km, "eavesdropper distance");
  if (c.n_antennas < 1) throw Error(Errc::InvalidArgument, "antenna count must be at least 1");
  if (c.qos_floor_bps_hz && (!(*c.qos_floor_bps_hz >= 0.0) || !std::isfinite(*c.qos_floor_bps_hz))) {
    throw Error(Errc::InvalidArgument, "QoS floor must be non-negative");
  }
}

double path_loss_db(double d_km) {
  if (!(d_km > 0.0)) throw Error(Errc::NonPositiveDistance, "distance must be positive");
  return 128.1 + 37.6 * std::log10(d_km);
}

double path_gain(double d_km) { return std::pow(10.0, -path_loss_db(d_km) / 10.0); }

double noise_power_w(double temp_k, double bandwidth_hz) {
  if (!(temp_k > 0.0) || !(bandwidth_hz > 0.0)) {
    throw Error(Errc::NonPositiveInput, "temperature and bandwidth must be positive");
  }
  return kBoltzmann * temp_k * bandwidth_hz;
}

NoisePowers noise_powers(const SystemConfig& config) {
  return {noise_power_w(config.temp_r_kelvin, config.bandwidth_hz),
          noise_power_w(config.temp_e_kelvin, config.bandwidth_hz)};
}

ChannelPair generate_channel(const SystemConfig& config, std::uint64_t seed) {
  validate(config);
  const double amp_r = std::sqrt(path_gain(config.distance_km));
  const double amp_e = std::sqrt(path_gain(config.eve_distance_km()));
  CounterRng rng(seed);
  ChannelPair ch{ComplexVec(config.n_antennas), ComplexVec(config.n_antennas)};
  for (int k = 0; k < config.n_antennas; ++k) {
    ch.h_tr(k) = amp_r * rng.complex_normal();
    ch.h_te(k) = amp_e * rng.complex_normal();
  }
  return ch;
}

namespace {

double clamped_log_ratio(double a, double b) { return std::max(0.0, std::log2((1.0 + a) / (1.0 + b))); }

}  // namespace

double secrecy_rate_miso(const ComplexVec& w, const ChannelPair& ch, const NoisePowers& noise) {
  if (w.size() != ch.h_tr.size() || w.size() != ch.h_te.size()) {
    throw Error(Errc::DimensionMismatch, "beamformer and channel lengths differ");
  }
  const double a = std::norm(ch.h_tr.cwiseProduct(w).sum()) / noise.sigma2_r_w;
  const double b = std::norm(ch.h_te.cwiseProduct(w).sum()) / noise.sigma2_e_w;
  return clamped_log_ratio(a, b);
}

double secrecy_rate_siso(double p_w, const ChannelPair& ch, const NoisePowers& noise) {
  if (p_w < 0.0) throw Error(Errc::NegativePower, "transmit power must be non-negative");
  if (ch.h_tr.size() != 1 || ch.h_te.size() != 1) {
    throw Error(Errc::DimensionMismatch, "SISO rate needs scalar channels");
  }
  const double a = p_w * std::norm(ch.h_tr(0)) / noise.sigma2_r_w;
  const double b = p_w * std::norm(ch.h_te(0)) / noise.sigma2_e_w;
  return clamped_log_ratio(a, b);
}

double secrecy_ee(double eta_bps_hz, double consumed_power_w, const SystemConfig& config) {
  return config.bandwidth_hz * eta_bps_hz / (consumed_power_w + config.circuit_power_w);
}

NormalizedChannel normalize(const ChannelPair& ch, const NoisePowers& noise) {
  return {ch.h_tr / std::sqrt(noise.sigma2_r_w), ch.h_te / std::sqrt(noise.sigma2_e_w)};
}

}  // namespace seeopt
