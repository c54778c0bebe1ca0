#include "seeopt/miso.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <sstream>

namespace seeopt::miso {

const char* to_string(Method m) noexcept {
  switch (m) {
    case Method::QosSdp: return "QosSdp";
    case Method::ZeroForcing: return "ZeroForcing";
    case Method::NoQosClosedForm: return "NoQosClosedForm";
  }
  return "?";
}

ComplexMat build_a_matrix(const ChannelPair& ch, const NoisePowers& noise, double t) {
  const Eigen::Index n = ch.dim();
  return (noise.sigma2_r_w / t) * ComplexMat::Identity(n, n) + ch.h_tr.conjugate() * ch.h_tr.transpose();
}

ComplexMat build_b_matrix(const ChannelPair& ch, const NoisePowers& noise, double t) {
  const Eigen::Index n = ch.dim();
  return (noise.sigma2_e_w / t) * ComplexMat::Identity(n, n) + ch.h_te.conjugate() * ch.h_te.transpose();
}

ComplexMat build_c_matrix(const ChannelPair& ch, const NoisePowers& noise, double eta0) {
  if (ch.h_tr.size() != ch.h_te.size()) throw Error(Errc::DimensionMismatch, "channel lengths differ");
  return ch.h_tr.conjugate() * ch.h_tr.transpose() / noise.sigma2_r_w -
         std::exp2(eta0) * ch.h_te.conjugate() * ch.h_te.transpose() / noise.sigma2_e_w;
}

std::vector<double> log_grid(double lo, double hi, int n) {
  if (!(lo > 0.0) || !(hi >= lo) || n < 1) throw Error(Errc::InvalidArgument, "invalid log grid");
  std::vector<double> g(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    g[static_cast<std::size_t>(k)] = n == 1 ? hi : lo * std::pow(hi / lo, static_cast<double>(k) / (n - 1));
  }
  g.back() = hi;
  return g;
}

QosFeasibility qos_feasibility(const ChannelPair& ch, const NoisePowers& noise, const SystemConfig& config) {
  const double rhs = std::exp2(config.qos_floor()) - 1.0;
  const double lmax = linalg::hermitian_eig(build_c_matrix(ch, noise, config.qos_floor())).front().value;
  QosFeasibility f;
  f.feasible = lmax > 0.0 && config.max_power_w * lmax >= rhs;
  f.min_power_w = f.feasible ? rhs / lmax : std::numeric_limits<double>::infinity();
  return f;
}

namespace {

struct Candidate {
  double zeta = 0.0;
  double eta = 0.0;
  ComplexVec w;
};

// Returns nullopt when the problem has no admissible point at t.
using Evaluator = std::function<std::optional<Candidate>(double t, int& sdp_iterations)>;

struct SearchOutcome {
  std::optional<Candidate> best;
  double t = 0.0;
  int sdp_iterations = 0;
  std::vector<TEvaluation> evaluations;
};

SearchOutcome search_t(double lo, double hi, const TGridSpec& spec, const Evaluator& eval) {
  if (spec.coarse_points < 1) throw Error(Errc::InvalidArgument, "t grid needs at least one point");
  SearchOutcome out;
  const double neg_inf = -std::numeric_limits<double>::infinity();

  auto evaluate = [&](double t) -> double {
    TEvaluation rec{t, 0.0, "ok"};
    std::optional<Candidate> c;
    try {
      c = eval(t, out.sdp_iterations);
    } catch (const Error& e) {
      if (e.code() == Errc::QosInfeasibleAtT || e.code() == Errc::DegenerateScale) {
        rec.status = std::string(errc_name(e.code()));
        out.evaluations.push_back(rec);
        return neg_inf;
      }
      std::ostringstream os;
      os << "at t=" << t << ": " << e.what();
      throw Error(Errc::SolverFailure, os.str());
    }
    if (!c) {
      rec.status = "infeasible";
      out.evaluations.push_back(rec);
      return neg_inf;
    }
    rec.zeta = c->zeta;
    out.evaluations.push_back(rec);
    // Strictly greater keeps the smaller t on ties (grid is visited in increasing t).
    if (!out.best || c->zeta > out.best->zeta || (c->zeta == out.best->zeta && t < out.t)) {
      out.best = std::move(c);
      out.t = t;
    }
    return rec.zeta;
  };

  // Coarse grid on (lo, hi]: lo * (hi/lo)^(k/K), k = 1..K.
  const int k_pts = spec.coarse_points;
  std::vector<double> grid(static_cast<std::size_t>(k_pts + 1));
  for (int k = 0; k <= k_pts; ++k) {
    grid[static_cast<std::size_t>(k)] = lo * std::pow(hi / lo, static_cast<double>(k) / k_pts);
  }
  grid.back() = hi;
  std::size_t best_k = 0;
  double best_val = neg_inf;
  for (std::size_t k = 1; k < grid.size(); ++k) {
    const double v = evaluate(grid[k]);
    if (v > best_val) {
      best_val = v;
      best_k = k;
    }
  }
  if (!out.best || !spec.refine || best_k == 0) return out;

  double a = grid[best_k - 1];
  double b = best_k + 1 < grid.size() ? grid[best_k + 1] : grid[best_k];
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = evaluate(c);
  double fd = evaluate(d);
  while (b - a > spec.refine_rel_width * b) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = evaluate(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = evaluate(d);
    }
  }
  // An optimum on the lower boundary (typically the QoS minimum power) is only
  // approached to within the refinement width; probe geometrically closer to lo.
  if (a == grid[0] && out.best) {
    for (int j = 1; j <= 6; ++j) {
      const double before = out.best->zeta;
      try {
        evaluate(lo + (out.t - lo) * 0.1);
      } catch (const Error&) {
        break;  // the edge of the feasible set can be numerically hard; keep what we have
      }
      if (!(out.best->zeta > before)) break;
    }
  }
  return out;
}

BeamformerSolution finish(Method method, SearchOutcome&& s) {
  BeamformerSolution sol;
  sol.method = method;
  sol.sdp_iterations = s.sdp_iterations;
  sol.evaluations = std::move(s.evaluations);
  if (!s.best) return sol;
  sol.w = std::move(s.best->w);
  sol.transmit_power_w = s.t;
  sol.zeta_bits_per_joule = s.best->zeta;
  sol.eta_bps_hz = s.best->eta;
  sol.feasible = true;
  return sol;
}

ComplexMat outer(const ComplexVec& g) { return g.conjugate() * g.transpose(); }

// I/t + g^* g^T: A(t) or B(t) divided by the matching noise power.
ComplexMat normalized_quadratic(const ComplexVec& g, double t) {
  return ComplexMat::Identity(g.size(), g.size()) / t + outer(g);
}

void require_qos(const SystemConfig& config) {
  if (!config.qos_floor_bps_hz) throw Error(Errc::InvalidArgument, "a QoS floor eta0 is required");
}

void require_dims(const ChannelPair& ch) {
  if (ch.h_tr.size() == 0 || ch.h_tr.size() != ch.h_te.size()) {
    throw Error(Errc::DimensionMismatch, "channel vectors must be non-empty and of equal length");
  }
}

}  // namespace

BeamformerSolution solve_with_qos(const ChannelPair& ch, const NoisePowers& noise, const SystemConfig& config,
                                  const TGridSpec& grid) {
  validate(config);
  require_qos(config);
  require_dims(ch);
  const QosFeasibility feas = qos_feasibility(ch, noise, config);
  if (!feas.feasible) {
    BeamformerSolution sol;
    sol.method = Method::QosSdp;
    return sol;
  }
  const NormalizedChannel g = normalize(ch, noise);
  const double eta0 = config.qos_floor();
  const double rhs = std::exp2(eta0) - 1.0;
  const ComplexMat c = build_c_matrix(ch, noise, eta0);

  const Evaluator eval = [&](double t, int& iters) -> std::optional<Candidate> {
    const auto cc = sdp::solve_charnes_cooper(normalized_quadratic(g.g_r, t), normalized_quadratic(g.g_e, t),
                                              c, t, rhs);
    iters += cc.sdp.iterations;
    Candidate cand;
    cand.w = cc.w;
    cand.eta = secrecy_rate_miso(cand.w, ch, noise);
    cand.zeta = secrecy_ee(cand.eta, t, config);
    if (eta0 > 0.0 && cand.eta <= 0.0) return std::nullopt;
    return cand;
  };
  const double lo = std::max(grid.lower_fraction * config.max_power_w, feas.min_power_w);
  auto sol = finish(Method::QosSdp, search_t(lo, config.max_power_w, grid, eval));
  if (!sol.feasible) throw Error(Errc::QosInfeasible, "no t in the search range admits the QoS floor");
  return sol;
}

BeamformerSolution solve_zf(const ChannelPair& ch, const NoisePowers& noise, const SystemConfig& config,
                            const TGridSpec& grid) {
  validate(config);
  require_qos(config);
  require_dims(ch);
  const Eigen::Index n = ch.dim();
  if (n < 2) throw Error(Errc::ZfUndefined, "zero-forcing needs at least two transmit antennas");

  const NormalizedChannel g = normalize(ch, noise);
  const double eta0 = config.qos_floor();
  const double rhs = std::exp2(eta0) - 1.0;

  // Orthonormal basis U of {w : h_te^T w = 0}; W = U Z U^H spans exactly the
  // PSD matrices with tr(W D) = 0, D = h_te^* h_te^T.
  ComplexMat u;
  if (g.g_e.squaredNorm() == 0.0) {
    u = ComplexMat::Identity(n, n);
  } else {
    Eigen::HouseholderQR<ComplexMat> qr(ComplexMat(g.g_e.conjugate()));
    const ComplexMat q = qr.householderQ() * ComplexMat::Identity(n, n);
    u = q.rightCols(n - 1);
  }
  const Eigen::Index m = u.cols();
  const ComplexMat c_red = linalg::hermitian_part(u.adjoint() * build_c_matrix(ch, noise, eta0) * u);
  const double gain = (u.adjoint() * g.g_r.conjugate()).squaredNorm();  // ||P_perp g_r||^2
  BeamformerSolution infeasible;
  infeasible.method = Method::ZeroForcing;
  if (!(gain > 0.0) || config.max_power_w * gain < rhs) return infeasible;
  const double min_power = rhs / gain;

  const Evaluator eval = [&](double t, int& iters) -> std::optional<Candidate> {
    const ComplexMat a_red = linalg::hermitian_part(u.adjoint() * normalized_quadratic(g.g_r, t) * u);
    sdp::SdpProblem p;
    p.dim = static_cast<int>(m);
    p.objective = a_red;
    p.eq_constraints.push_back({ComplexMat::Identity(m, m), t});
    p.ineq_constraints.push_back({c_red, rhs});
    const auto s = sdp::solve(p);
    iters += s.iterations;
    if (s.status == sdp::SdpStatus::Infeasible) {
      throw Error(Errc::QosInfeasibleAtT, "zero-forcing QoS SDP infeasible");
    }
    if (s.status != sdp::SdpStatus::Optimal) {
      throw Error(Errc::SolverFailure, std::string("zero-forcing SDP: ") + sdp::to_string(s.status));
    }
    const TraceConstraint cs[] = {
        {ComplexMat::Identity(m, m), s.x.trace().real()},
        {c_red, linalg::trace_product(s.x, c_red)},
        {a_red, linalg::trace_product(s.x, a_red)},
    };
    const auto r1 = linalg::rank_one_decompose(s.x, cs);
    Candidate cand;
    cand.w = u * r1.w;
    cand.w *= std::sqrt(t / cand.w.squaredNorm());
    linalg::normalize_phase(cand.w);
    // The eavesdropper term is zero by construction.
    cand.eta = std::max(0.0, std::log2(1.0 + std::norm(g.g_r.cwiseProduct(cand.w).sum())));
    cand.zeta = secrecy_ee(cand.eta, t, config);
    return cand;
  };
  const double lo = std::max(grid.lower_fraction * config.max_power_w, min_power);
  auto sol = finish(Method::ZeroForcing, search_t(lo, config.max_power_w, grid, eval));
  if (!sol.feasible) throw Error(Errc::QosInfeasible, "no t in the search range admits the QoS floor");
  return sol;
}

BeamformerSolution solve_without_qos(const ChannelPair& ch, const NoisePowers& noise,
                                     const SystemConfig& config, const TGridSpec& grid) {
  validate(config);
  require_dims(ch);
  const NormalizedChannel g = normalize(ch, noise);
  const Evaluator eval = [&](double t, int&) -> std::optional<Candidate> {
    const EigPair top = linalg::max_generalized_eig(normalized_quadratic(g.g_r, t), normalized_quadratic(g.g_e, t));
    Candidate cand;
    cand.w = top.vector * std::sqrt(t);
    cand.eta = secrecy_rate_miso(cand.w, ch, noise);
    cand.zeta = secrecy_ee(cand.eta, t, config);
    return cand;
  };
  return finish(Method::NoQosClosedForm,
                search_t(grid.lower_fraction * config.max_power_w, config.max_power_w, grid, eval));
}

TradeoffCurve tradeoff_curve_miso(const ChannelPair& ch, const NoisePowers& noise, const SystemConfig& config,
                                  const std::vector<double>& power_grid) {
  validate(config);
  require_dims(ch);
  const NormalizedChannel g = normalize(ch, noise);
  TradeoffCurve curve;
  double prev = 0.0;
  for (double p : power_grid) {
    if (!(p > prev) || p > config.max_power_w) {
      throw Error(Errc::InvalidArgument, "power grid must be strictly increasing inside (0, P_max]");
    }
    prev = p;
    const EigPair top = linalg::max_generalized_eig(normalized_quadratic(g.g_r, p), normalized_quadratic(g.g_e, p));
    TradeoffPoint pt;
    pt.power_w = p;
    pt.w = top.vector * std::sqrt(p);
    pt.eta = secrecy_rate_miso(pt.w, ch, noise);
    pt.zeta = secrecy_ee(pt.eta, p, config);
    curve.points.push_back(std::move(pt));
  }
  return curve;
}

}  // namespace seeopt::miso
