#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "helpers.hpp"
#include "seeopt/miso.hpp"
#include "seeopt/siso.hpp"

using namespace seeopt;
using testutil::rel_err;

namespace {

const NoisePowers kNoise{oracle::kNoise298, oracle::kNoise298};

template <typename F>
Errc code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return Errc::InvalidArgument;
}

ChannelPair seeded(int n, std::uint64_t seed) { return generate_channel(testutil::default_config(n), seed); }

// zeta of an arbitrary beamformer, from the channel-model evaluators only.
double zeta_of(const ComplexVec& w, const ChannelPair& ch, const NoisePowers& noise, const SystemConfig& c) {
  return secrecy_ee(secrecy_rate_miso(w, ch, noise), w.squaredNorm(), c);
}

void check_solution_invariants(const miso::BeamformerSolution& s, const ChannelPair& ch, const NoisePowers& noise,
                               const SystemConfig& c) {
  REQUIRE(s.feasible);
  CHECK(rel_err(s.w.squaredNorm(), s.transmit_power_w) <= 1e-8);
  CHECK(s.transmit_power_w <= c.max_power_w + 1e-9);
  if (c.qos_floor_bps_hz) CHECK(s.eta_bps_hz >= c.qos_floor() - 1e-9);
  CHECK(rel_err(s.eta_bps_hz, secrecy_rate_miso(s.w, ch, noise)) <= 1e-9);
  CHECK(rel_err(s.zeta_bits_per_joule, zeta_of(s.w, ch, noise, c)) <= 1e-9);
}

}  // namespace

TEST_CASE("C matrix examples") {
  const ChannelPair fx = testutil::fixture3();
  ChannelPair no_eve{fx.h_tr, ComplexVec::Zero(3)};
  const ComplexMat c0 = miso::build_c_matrix(no_eve, kNoise, 0.0);
  CHECK((c0 - fx.h_tr.conjugate() * fx.h_tr.transpose() / kNoise.sigma2_r_w).norm() <= 1e-15 * c0.norm());

  ChannelPair same{fx.h_tr, fx.h_tr};
  CHECK(miso::build_c_matrix(same, kNoise, 0.0).cwiseAbs().maxCoeff() == 0.0);

  const ComplexMat c1 = miso::build_c_matrix(fx, kNoise, 1.0);
  const double scale = c1.cwiseAbs().maxCoeff();
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      const cplx want(oracle::kCEta1[i][j][0], oracle::kCEta1[i][j][1]);
      CHECK(std::abs(c1(i, j) - want) <= 1e-12 * scale);
    }
  }
  CHECK((c1 - c1.adjoint()).norm() == 0.0);
}

TEST_CASE("QoS feasibility pre-screen") {
  const ChannelPair fx = testutil::fixture3();
  const auto f0 = miso::qos_feasibility(fx, kNoise, testutil::default_config(3, 0.0));
  CHECK(f0.feasible);
  CHECK(f0.min_power_w == 0.0);

  const auto f1 = miso::qos_feasibility(fx, kNoise, testutil::default_config(3, 1.0));
  CHECK(f1.feasible);
  CHECK(rel_err(f1.min_power_w, oracle::kQosMinPowerEta1) <= 1e-9);

  // Bisection on max_{|w|^2 = p} w^H C w >= 1 with the reference top eigenvalue.
  const double lmax = 1.0 / oracle::kQosMinPowerEta1;
  double lo = 0.0, hi = 50.0;
  for (int k = 0; k < 200; ++k) {
    const double mid = 0.5 * (lo + hi);
    (mid * lmax >= 1.0 ? hi : lo) = mid;
  }
  CHECK(rel_err(f1.min_power_w, hi) <= 1e-6);

  ChannelPair dead{ComplexVec::Zero(3), fx.h_te};
  CHECK_FALSE(miso::qos_feasibility(dead, kNoise, testutil::default_config(3, 0.5)).feasible);
  SystemConfig tight = testutil::default_config(3, 1.0);
  tight.max_power_w = 0.9 * oracle::kQosMinPowerEta1;
  CHECK_FALSE(miso::qos_feasibility(fx, kNoise, tight).feasible);
}

TEST_CASE("closed form without QoS matches the reference optimum") {
  const ChannelPair fx = testutil::fixture3();
  const SystemConfig c = testutil::default_config(3);
  const auto s = miso::solve_without_qos(fx, kNoise, c);
  check_solution_invariants(s, fx, kNoise, c);
  CHECK(rel_err(s.zeta_bits_per_joule, oracle::kNoQosZetaStar) <= 1e-7);
  CHECK(rel_err(s.transmit_power_w, oracle::kNoQosTStar) <= 1e-3);
  CHECK(rel_err(s.eta_bps_hz, oracle::kNoQosEtaStar) <= 1e-4);

  // Per-t value at t = 10 against the reference generalised eigenvalue.
  const auto curve = miso::tradeoff_curve_miso(fx, kNoise, c, {10.0});
  CHECK(rel_err(curve.points[0].eta, std::log2(oracle::kGenEigT10)) <= 1e-10);
}

TEST_CASE("no eavesdropper channel gives the matched filter") {
  ChannelPair ch = seeded(4, 7);
  ch.h_te.setZero();
  const SystemConfig c = testutil::default_config(4);
  const auto s = miso::solve_without_qos(ch, noise_powers(c), c);
  const double align = std::abs(ch.h_tr.conjugate().normalized().dot(s.w.normalized()));
  CHECK(align == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("QoS design at eta0 = 0 equals the closed form") {
  for (int n : {2, 3, 4}) {
    for (std::uint64_t seed = 0; seed < 4; ++seed) {
      const SystemConfig c = testutil::default_config(n, 0.0);
      const ChannelPair ch = seeded(n, seed);
      const NoisePowers noise = noise_powers(c);
      const auto q = miso::solve_with_qos(ch, noise, c);
      const auto nq = miso::solve_without_qos(ch, noise, c);
      check_solution_invariants(q, ch, noise, c);
      CHECK(rel_err(q.zeta_bits_per_joule, nq.zeta_bits_per_joule) <= 1e-5);
    }
  }
}

TEST_CASE("QoS design satisfies its floor and dominates random feasible beamformers") {
  // Seeded N = 2 channels, eta0 = 3 where feasible.
  CounterRng rng(41);
  int instances = 0;
  for (std::uint64_t seed = 0; instances < 3 && seed < 500; ++seed) {
    const SystemConfig c = testutil::default_config(2, 3.0);
    const NoisePowers noise = noise_powers(c);
    const ChannelPair ch = seeded(2, seed);
    if (!miso::qos_feasibility(ch, noise, c).feasible) continue;
    ++instances;
    const auto s = miso::solve_with_qos(ch, noise, c);
    check_solution_invariants(s, ch, noise, c);
    int feasible = 0;
    for (int k = 0; k < 100000; ++k) {
      ComplexVec w = testutil::random_vector(rng, 2);
      const double t = c.max_power_w * rng.uniform();
      w *= std::sqrt(t) / w.norm();
      if (secrecy_rate_miso(w, ch, noise) < 3.0) continue;
      ++feasible;
      CHECK(zeta_of(w, ch, noise, c) <= s.zeta_bits_per_joule * (1.0 + 1e-6));
    }
    CHECK(feasible > 0);
  }
  CHECK(instances == 3);
}

TEST_CASE("zero forcing with two antennas uses the projected matched filter") {
  int checked = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const SystemConfig c = testutil::default_config(2, 0.5);
    const NoisePowers noise = noise_powers(c);
    const ChannelPair ch = seeded(2, seed);
    miso::BeamformerSolution s;
    try {
      s = miso::solve_zf(ch, noise, c);
    } catch (const Error& e) {
      CHECK(e.code() == Errc::QosInfeasible);
      continue;
    }
    if (!s.feasible) continue;
    check_solution_invariants(s, ch, noise, c);
    CHECK(std::abs(ch.h_te.cwiseProduct(s.w).sum()) <= 1e-7 * ch.h_te.norm() * s.w.norm());

    const ComplexVec u = ch.h_te.conjugate().normalized();
    ComplexVec proj = ch.h_tr.conjugate();
    proj -= u * u.dot(proj);
    const double cosang = std::min(1.0, std::abs(proj.normalized().dot(s.w.normalized())));
    CHECK(std::acos(cosang) <= 1e-6);

    // zeta with the eavesdropper term exactly zero.
    const double a = std::norm(ch.h_tr.cwiseProduct(s.w).sum()) / noise.sigma2_r_w;
    CHECK(rel_err(s.eta_bps_hz, std::log2(1.0 + a)) <= 1e-9);
    ++checked;
  }
  CHECK(checked >= 3);
}

TEST_CASE("zero forcing with orthogonal channels equals the matched filter") {
  ChannelPair ch = seeded(3, 3);
  // Make h_te^T h_tr^* = 0.
  const ComplexVec r = ch.h_tr.conjugate().normalized();
  ComplexVec e = ch.h_te.conjugate();
  e -= r * r.dot(e);
  ch.h_te = e.conjugate();
  REQUIRE(std::abs(ch.h_te.cwiseProduct(ch.h_tr.conjugate()).sum()) <= 1e-12 * ch.h_te.norm() * ch.h_tr.norm());

  const SystemConfig c = testutil::default_config(3, 0.0);
  const NoisePowers noise = noise_powers(c);
  const auto zf = miso::solve_zf(ch, noise, c);
  const auto nq = miso::solve_without_qos(ch, noise, c);
  CHECK(rel_err(zf.zeta_bits_per_joule, nq.zeta_bits_per_joule) <= 1e-9);
  CHECK(std::abs(r.dot(zf.w.normalized())) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("dominance chain ZF <= QoS <= no QoS") {
  for (int n : {2, 3, 4}) {
    for (double eta0 : {0.0, 1.0, 2.0}) {
      for (std::uint64_t seed = 0; seed < 3; ++seed) {
        const SystemConfig c = testutil::default_config(n, eta0);
        const NoisePowers noise = noise_powers(c);
        const ChannelPair ch = seeded(n, seed);
        const auto q = miso::solve_with_qos(ch, noise, c);
        if (!q.feasible) continue;
        const auto nq = miso::solve_without_qos(ch, noise, c);
        CHECK(q.zeta_bits_per_joule <= nq.zeta_bits_per_joule * (1.0 + 1e-5));
        try {
          const auto zf = miso::solve_zf(ch, noise, c);
          if (zf.feasible) CHECK(zf.zeta_bits_per_joule <= q.zeta_bits_per_joule * (1.0 + 1e-5));
        } catch (const Error& e) {
          CHECK(e.code() == Errc::QosInfeasible);
        }
      }
    }
  }
}

TEST_CASE("optimal zeta is non-increasing in the QoS floor") {
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    const ChannelPair ch = seeded(4, seed);
    double prev = std::numeric_limits<double>::infinity();
    for (double eta0 = 0.0; eta0 <= 6.0; eta0 += 0.5) {
      const SystemConfig c = testutil::default_config(4, eta0);
      const auto s = miso::solve_with_qos(ch, noise_powers(c), c);
      if (!s.feasible) break;
      CHECK(s.zeta_bits_per_joule <= prev * (1.0 + 1e-6));
      prev = s.zeta_bits_per_joule;
    }
  }
}

TEST_CASE("single antenna reduces to the SISO problem") {
  int checked = 0;
  for (std::uint64_t seed = 0; checked < 6 && seed < 100; ++seed) {
    const SystemConfig c = testutil::default_config(1, 0.0);
    const NoisePowers noise = noise_powers(c);
    const ChannelPair ch = seeded(1, seed);
    siso::SisoParams p;
    try {
      p = siso::make_params(ch, noise, c);
    } catch (const Error&) {
      continue;
    }
    ++checked;
    const auto d = siso::dinkelbach(p);
    const auto q = miso::solve_with_qos(ch, noise, c);
    const auto nq = miso::solve_without_qos(ch, noise, c);
    CHECK(rel_err(q.zeta_bits_per_joule, d.zeta_star) <= 1e-5);
    CHECK(rel_err(nq.zeta_bits_per_joule, d.zeta_star) <= 1e-5);
    for (const auto& ev : nq.evaluations) {
      CHECK(rel_err(ev.zeta, secrecy_ee(secrecy_rate_siso(ev.t, ch, noise), ev.t, c)) <= 1e-10);
    }
  }
  CHECK(checked == 6);
  CHECK(code_of([] { miso::solve_zf(testutil::fixture1(), kNoise, testutil::default_config(1, 0.0)); }) ==
        Errc::ZfUndefined);
}

TEST_CASE("closed form at N = 4 is a local maximum and beats random beamformers") {
  const SystemConfig c = testutil::default_config(4);
  const NoisePowers noise = noise_powers(c);
  const ChannelPair ch = seeded(4, 11);
  const auto s = miso::solve_without_qos(ch, noise, c);
  for (const auto& ev : s.evaluations) CHECK(ev.zeta <= s.zeta_bits_per_joule);

  CounterRng rng(42);
  for (int k = 0; k < 5; ++k) {
    const double t = c.max_power_w * rng.uniform();
    const auto pt = miso::tradeoff_curve_miso(ch, noise, c, {t}).points[0];
    for (int j = 0; j < 100000; ++j) {
      ComplexVec w = testutil::random_vector(rng, 4);
      w *= std::sqrt(t) / w.norm();
      CHECK(zeta_of(w, ch, noise, c) <= pt.zeta * (1.0 + 1e-9));
    }
  }
}

TEST_CASE("trade-off curve invariants") {
  const std::vector<double> grid = miso::log_grid(0.01, 50.0, 50);
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const int n = 2 + static_cast<int>(seed % 3);
    const SystemConfig c = testutil::default_config(n);
    const NoisePowers noise = noise_powers(c);
    const ChannelPair ch = seeded(n, seed);
    const auto curve = miso::tradeoff_curve_miso(ch, noise, c, grid);
    REQUIRE(curve.points.size() == grid.size());
    for (std::size_t i = 0; i < curve.points.size(); ++i) {
      const auto& pt = curve.points[i];
      CHECK(rel_err(pt.w.squaredNorm(), pt.power_w) <= 1e-12);
      CHECK(rel_err(pt.eta, secrecy_rate_miso(pt.w, ch, noise)) <= 1e-9);
      CHECK(rel_err(pt.zeta, secrecy_ee(pt.eta, pt.power_w, c)) <= 1e-12);
      if (i > 0) {
        CHECK(pt.power_w > curve.points[i - 1].power_w);
        CHECK(pt.eta >= curve.points[i - 1].eta * (1.0 - 1e-12));
      }
    }
  }
  const SystemConfig c = testutil::default_config(2);
  CHECK(code_of([&] { miso::tradeoff_curve_miso(seeded(2, 0), noise_powers(c), c, {1.0, 1.0}); }) ==
        Errc::InvalidArgument);
  CHECK(code_of([&] { miso::tradeoff_curve_miso(seeded(2, 0), noise_powers(c), c, {60.0}); }) ==
        Errc::InvalidArgument);
}

TEST_CASE("the same beamformer maximises zeta and eta at fixed power") {
  CounterRng rng(43);
  const SystemConfig c = testutil::default_config(3);
  const NoisePowers noise = noise_powers(c);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const ChannelPair ch = seeded(3, seed);
    const double p = 20.0;
    const auto pt = miso::tradeoff_curve_miso(ch, noise, c, {p}).points[0];
    for (int j = 0; j < 20000; ++j) {
      ComplexVec w = testutil::random_vector(rng, 3);
      w *= std::sqrt(p) / w.norm();
      const double eta = secrecy_rate_miso(w, ch, noise);
      CHECK(eta <= pt.eta + 1e-9 * std::max(1.0, pt.eta));
      CHECK(secrecy_ee(eta, p, c) <= pt.zeta * (1.0 + 1e-9));
    }
  }
}

TEST_CASE("common phase rotation leaves the optimum unchanged") {
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    const SystemConfig c = testutil::default_config(3, 1.0);
    const NoisePowers noise = noise_powers(c);
    const ChannelPair ch = seeded(3, seed);
    const cplx ph = std::polar(1.0, 0.7);
    const ChannelPair rot{ch.h_tr * ph, ch.h_te * ph};
    const auto a = miso::solve_without_qos(ch, noise, c);
    const auto b = miso::solve_without_qos(rot, noise, c);
    CHECK(rel_err(b.zeta_bits_per_joule, a.zeta_bits_per_joule) <= 1e-10);
    CHECK(rel_err(b.eta_bps_hz, a.eta_bps_hz) <= 1e-10);
    const auto qa = miso::solve_with_qos(ch, noise, c);
    const auto qb = miso::solve_with_qos(rot, noise, c);
    if (qa.feasible) {
      CHECK(rel_err(qb.zeta_bits_per_joule, qa.zeta_bits_per_joule) <= 1e-10);
      CHECK(rel_err(qb.eta_bps_hz, qa.eta_bps_hz) <= 1e-10);
    }
  }
}

TEST_CASE("doubling the t grid density barely moves the optimum") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const SystemConfig c = testutil::default_config(3, 1.0);
    const NoisePowers noise = noise_powers(c);
    const ChannelPair ch = seeded(3, seed);
    miso::TGridSpec fine;
    fine.coarse_points = 128;
    const auto a = miso::solve_without_qos(ch, noise, c);
    const auto b = miso::solve_without_qos(ch, noise, c, fine);
    CHECK(std::abs(a.zeta_bits_per_joule - b.zeta_bits_per_joule) <= 1e-3 * b.zeta_bits_per_joule);
    const auto qa = miso::solve_with_qos(ch, noise, c);
    if (!qa.feasible) continue;
    const auto qb = miso::solve_with_qos(ch, noise, c, fine);
    CHECK(std::abs(qa.zeta_bits_per_joule - qb.zeta_bits_per_joule) <= 1e-3 * qb.zeta_bits_per_joule);
  }
}

TEST_CASE("argument errors") {
  const ChannelPair fx = testutil::fixture3();
  CHECK(code_of([&] { miso::solve_with_qos(fx, kNoise, testutil::default_config(3)); }) == Errc::InvalidArgument);
  CHECK(code_of([&] { miso::solve_zf(fx, kNoise, testutil::default_config(3)); }) == Errc::InvalidArgument);
  ChannelPair bad{fx.h_tr, ComplexVec::Zero(2)};
  CHECK(code_of([&] { miso::solve_without_qos(bad, kNoise, testutil::default_config(3)); }) == Errc::DimensionMismatch);
  CHECK(code_of([&] { miso::log_grid(0.0, 1.0, 3); }) == Errc::InvalidArgument);
}
