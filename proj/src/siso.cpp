#include "seeopt/siso.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "seeopt/error.hpp"

namespace seeopt::siso {

namespace {

constexpr int kMaxDinkelbachIterations = 100;
constexpr double kTieTol = 1e-12;

double two_pow_minus_one(double eta) { return std::expm1(eta * std::numbers::ln2); }

}  // namespace

SisoParams make_params(const ChannelPair& ch, const NoisePowers& noise, const SystemConfig& config) {
  if (ch.h_tr.size() != 1 || ch.h_te.size() != 1) {
    throw Error(Errc::DimensionMismatch, "SISO power control needs scalar channels");
  }
  SisoParams p;
  p.a = std::norm(ch.h_tr(0));
  p.b = std::norm(ch.h_te(0));
  p.sigma2_r = noise.sigma2_r_w;
  p.sigma2_e = noise.sigma2_e_w;
  p.p_c = config.circuit_power_w;
  p.p_max = config.max_power_w;
  p.eta0 = config.qos_floor();
  p.bandwidth = config.bandwidth_hz;
  if (p.snr_r() <= p.snr_e()) {
    throw Error(Errc::RateRegionEmpty, "eavesdropper channel is at least as strong as the receiver's");
  }
  if (p.eta0 > 0.0) {
    const double alpha = p.alpha();
    if (alpha <= 0.0) throw Error(Errc::AlphaNonPositive, "QoS floor is unreachable at any power");
    p.p_min = two_pow_minus_one(p.eta0) / alpha;
  }
  if (p.p_min > p.p_max) {
    throw Error(Errc::QosInfeasible, "minimum power for the QoS floor exceeds P_max");
  }
  return p;
}

double numerator(double p, const SisoParams& s) {
  return (std::log1p(p * s.snr_r()) - std::log1p(p * s.snr_e())) / s.beta;
}

double denominator(double p, const SisoParams& s) { return s.p_c + p; }

double parametric_objective(double q, double p, const SisoParams& s) {
  return numerator(p, s) - q * denominator(p, s);
}

double parametric_derivative(double q, double p, const SisoParams& s) {
  const double ar = s.snr_r();
  const double ae = s.snr_e();
  return (ar / (1.0 + p * ar) - ae / (1.0 + p * ae)) / s.beta - q;
}

StationarityPoly stationarity_poly(double q, const SisoParams& s) {
  return {-s.a * s.b * q * s.beta, -q * s.beta * (s.a * s.sigma2_e + s.b * s.sigma2_r),
          s.a * s.sigma2_e - s.b * s.sigma2_r - q * s.beta * s.sigma2_r * s.sigma2_e};
}

std::optional<double> stationary_power(double q, const SisoParams& s) {
  // Same polynomial divided by s_r s_e; the positive root is written as
  // 2 c0 / (c1 + sqrt(c1^2 + 4 c2 c0)) so no difference of close values occurs.
  const double ar = s.snr_r();
  const double ae = s.snr_e();
  const double c2 = q * s.beta * ar * ae;
  const double c1 = q * s.beta * (ar + ae);
  const double c0 = ar - ae - q * s.beta;
  if (c0 < 0.0) return std::nullopt;
  const double den = c1 + std::sqrt(c1 * c1 + 4.0 * c2 * c0);
  if (!(den > 0.0)) return std::nullopt;
  return 2.0 * c0 / den;
}

InnerSolution dinkelbach_inner(double q, const SisoParams& s) {
  if (auto root = stationary_power(q, s); root && *root >= s.p_min && *root <= s.p_max) {
    return {*root, parametric_objective(q, *root, s)};
  }
  const double f_lo = parametric_objective(q, s.p_min, s);
  const double f_hi = parametric_objective(q, s.p_max, s);
  if (f_hi - f_lo > kTieTol * std::max(1.0, std::abs(f_lo))) return {s.p_max, f_hi};
  return {s.p_min, f_lo};
}

DinkelbachResult dinkelbach(const SisoParams& s, double delta, std::optional<double> p0) {
  if (!(delta > 0.0)) throw Error(Errc::InvalidArgument, "Dinkelbach tolerance must be positive");
  double p = p0.value_or(s.eta0 > 0.0 ? s.p_min : 0.5 * s.p_max);
  if (!(p >= s.p_min && p <= s.p_max)) {
    throw Error(Errc::InvalidArgument, "initial power outside [P_min, P_max]");
  }
  DinkelbachResult res;
  for (int n = 0; n < kMaxDinkelbachIterations; ++n) {
    const double f = numerator(p, s);
    const double q = f / denominator(p, s);
    const InnerSolution inner = dinkelbach_inner(q, s);
    res.trace.push_back({q, p, inner.f_value});
    p = inner.p_star;
    // Weak links have f itself below delta, so the test is relative to f there.
    if (inner.f_value < delta * std::min(1.0, f)) {
      res.iterations = n + 1;
      res.p_star_w = p;
      // The ratio at the final maximiser is at least as good as q_n and is
      // what the returned power actually achieves.
      res.zeta_star = s.bandwidth * numerator(p, s) / denominator(p, s);
      res.eta_star = std::max(0.0, numerator(p, s));
      return res;
    }
  }
  throw Error(Errc::NonConvergence,
              "Dinkelbach did not reach F(q) < " + std::to_string(delta) + " in 100 iterations");
}

GridOptimum grid_oracle(const SisoParams& s, long n_points) {
  if (n_points < 2) throw Error(Errc::InvalidArgument, "grid needs at least two points");
  GridOptimum best{s.p_min, -std::numeric_limits<double>::infinity()};
  const double step = (s.p_max - s.p_min) / static_cast<double>(n_points - 1);
  for (long i = 0; i < n_points; ++i) {
    const double p = i + 1 == n_points ? s.p_max : s.p_min + step * static_cast<double>(i);
    const double z = s.bandwidth * numerator(p, s) / denominator(p, s);
    if (z > best.zeta_star) best = {p, z};
  }
  return best;
}

double eta_limit(const SisoParams& s) {
  if (s.b == 0.0) return std::numeric_limits<double>::infinity();
  return std::log2(s.snr_r() / s.snr_e());
}

double power_of_eta(double eta, const SisoParams& s) {
  return two_pow_minus_one(eta) / (s.snr_r() - s.snr_e() * std::exp2(eta));
}

double zeta_of_eta(double eta, const SisoParams& s, double bandwidth) {
  const double d = s.snr_r() - s.snr_e() * std::exp2(eta);
  if (!(eta >= 0.0) || !(d > 0.0) || !std::isfinite(eta)) {
    throw Error(Errc::EtaOutOfRange, "eta outside [0, log2(s_e a / (s_r b)))");
  }
  return bandwidth * eta * d / (two_pow_minus_one(eta) + s.p_c * d);
}

OptimalEta optimal_eta(const SisoParams& s, double bandwidth) {
  if (!(eta_limit(s) > 0.0)) return {};
  auto z = [&](double eta) { return zeta_of_eta(eta, s, bandwidth); };
  auto eta_at = [&](double p) { return numerator(p, s) * s.beta / std::numbers::ln2; };

  // Walk outward in power until zeta drops; the peak then lies in [lo, hi].
  double lo = 0.0;
  double mid = eta_at(s.p_max);
  double hi = mid;
  double z_mid = z(mid);
  for (double p = 4.0 * s.p_max; p < 1e300; p *= 4.0) {
    const double e = eta_at(p);
    if (!(e > mid) || !(e < eta_limit(s))) {
      hi = mid;
      break;
    }
    const double ze = z(e);
    hi = e;
    if (ze < z_mid) break;
    lo = mid;
    mid = e;
    z_mid = ze;
  }

  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - inv_phi * (hi - lo);
  double x2 = lo + inv_phi * (hi - lo);
  double f1 = z(x1);
  double f2 = z(x2);
  while (hi - lo > 1e-8 * hi) {
    if (f1 >= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - inv_phi * (hi - lo);
      f1 = z(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + inv_phi * (hi - lo);
      f2 = z(x2);
    }
  }
  OptimalEta out;
  out.eta_star = f1 >= f2 ? x1 : x2;
  if (power_of_eta(out.eta_star, s) > s.p_max) {
    out.eta_star = eta_at(s.p_max);
    out.max_at_boundary = true;
  }
  out.zeta_star = z(out.eta_star);
  return out;
}

}  // namespace seeopt::siso
