#include "seeopt/sdp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <sstream>

namespace seeopt::sdp {

const char* to_string(SdpStatus s) noexcept {
  switch (s) {
    case SdpStatus::Optimal: return "Optimal";
    case SdpStatus::Infeasible: return "Infeasible";
    case SdpStatus::NumericalTrouble: return "NumericalTrouble";
  }
  return "?";
}

namespace {

using Blocks = std::vector<ComplexMat>;

double dot(const Blocks& a, const Blocks& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += linalg::trace_product(a[k], b[k]);
  return s;
}

double norm(const Blocks& a) { return std::sqrt(std::max(0.0, dot(a, a))); }

Blocks zeros_like(const Blocks& a) {
  Blocks z;
  z.reserve(a.size());
  for (const auto& m : a) z.push_back(ComplexMat::Zero(m.rows(), m.cols()));
  return z;
}

void axpy(double alpha, const Blocks& x, Blocks& y) {
  for (std::size_t k = 0; k < x.size(); ++k) y[k] += alpha * x[k];
}

// Problem in minimisation standard form: min <c, X> s.t. A(X) = b, X >= 0.
struct Standard {
  std::vector<int> sizes;
  std::size_t user_blocks = 0;
  Blocks c;
  std::vector<Blocks> a;
  Eigen::VectorXd b;
  Eigen::VectorXd row_norms;  // norms divided out of each constraint row
  double obj_scale = 1.0;
  std::size_t n_eq = 0;
};

Blocks split_blocks(const ComplexMat& m, const std::vector<int>& sizes) {
  Blocks out;
  out.reserve(sizes.size());
  Eigen::Index off = 0;
  for (int n : sizes) {
    out.push_back(linalg::hermitian_part(m.block(off, off, n, n)));
    off += n;
  }
  return out;
}

Standard standardize(const SdpProblem& p) {
  if (p.dim <= 0) throw Error(Errc::DimensionMismatch, "SDP dimension must be positive");
  std::vector<int> sizes = p.blocks.empty() ? std::vector<int>{p.dim} : p.blocks;
  if (std::any_of(sizes.begin(), sizes.end(), [](int n) { return n <= 0; }) ||
      std::accumulate(sizes.begin(), sizes.end(), 0) != p.dim) {
    throw Error(Errc::DimensionMismatch, "block sizes must be positive and sum to dim");
  }
  auto check = [&](const ComplexMat& m, const char* what) {
    if (m.rows() != p.dim || m.cols() != p.dim) {
      throw Error(Errc::DimensionMismatch, std::string(what) + " has wrong dimension");
    }
    linalg::require_hermitian(m, what);
  };
  check(p.objective, "objective");
  for (const auto& c : p.eq_constraints) check(c.matrix, "equality constraint");
  for (const auto& c : p.ineq_constraints) check(c.matrix, "inequality constraint");

  Standard s;
  s.user_blocks = sizes.size();
  const std::size_t n_ineq = p.ineq_constraints.size();
  s.sizes = sizes;
  for (std::size_t j = 0; j < n_ineq; ++j) s.sizes.push_back(1);

  auto extend = [&](Blocks blk) {
    for (std::size_t j = 0; j < n_ineq; ++j) blk.push_back(ComplexMat::Zero(1, 1));
    return blk;
  };

  s.c = extend(split_blocks(-p.objective, sizes));
  const double cn = norm(s.c);
  if (cn > 0.0) {
    s.obj_scale = cn;
    for (auto& m : s.c) m /= cn;
  }

  std::vector<double> rhs;
  std::vector<double> norms;
  auto add_row = [&](Blocks blk, double value) {
    const double rn = norm(blk);
    if (rn == 0.0) {
      if (value != 0.0) throw Error(Errc::DimensionMismatch, "zero constraint with nonzero rhs");
      return;
    }
    for (auto& m : blk) m /= rn;
    s.a.push_back(std::move(blk));
    rhs.push_back(value / rn);
    norms.push_back(rn);
  };
  for (const auto& c : p.eq_constraints) add_row(extend(split_blocks(c.matrix, sizes)), c.value);
  s.n_eq = s.a.size();
  for (std::size_t j = 0; j < n_ineq; ++j) {
    Blocks blk = extend(split_blocks(p.ineq_constraints[j].matrix, sizes));
    blk[sizes.size() + j](0, 0) = -1.0;
    add_row(std::move(blk), p.ineq_constraints[j].value);
  }
  s.b = Eigen::Map<const Eigen::VectorXd>(rhs.data(), static_cast<Eigen::Index>(rhs.size()));
  s.row_norms = Eigen::Map<const Eigen::VectorXd>(norms.data(), static_cast<Eigen::Index>(norms.size()));
  return s;
}

bool positive_definite_on_user_blocks(const Standard& s, const Eigen::VectorXd& y) {
  for (std::size_t k = 0; k < s.user_blocks; ++k) {
    ComplexMat m = ComplexMat::Zero(s.sizes[k], s.sizes[k]);
    for (std::size_t i = 0; i < s.n_eq; ++i) {
      if (y(static_cast<Eigen::Index>(i)) != 0.0) m += y(static_cast<Eigen::Index>(i)) * s.a[i][k];
    }
    Eigen::LLT<ComplexMat> llt(m);
    if (llt.info() != Eigen::Success) return false;
    // LLT accepts tiny pivots; insist on a margin relative to the block scale.
    const double dmin = llt.matrixL().toDenseMatrix().diagonal().real().minCoeff();
    if (!(dmin * dmin > 1e-14 * std::max(1.0, m.cwiseAbs().maxCoeff()))) return false;
  }
  return true;
}

// Searches for y with sum_i y_i F_i > 0 over single constraints and pairs
// with log-spaced ratios; such a y bounds tr(X) on the equality-feasible set.
bool trace_bounded(const Standard& s) {
  const auto m = static_cast<Eigen::Index>(s.n_eq);
  Eigen::VectorXd y = Eigen::VectorXd::Zero(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (double sign : {1.0, -1.0}) {
      y.setZero();
      y(i) = sign;
      if (positive_definite_on_user_blocks(s, y)) return true;
    }
  }
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) {
      if (i == j) continue;
      for (double si : {1.0, -1.0}) {
        for (double sj : {1.0, -1.0}) {
          for (int e = -8; e <= 0; ++e) {
            y.setZero();
            y(i) = si;
            y(j) = sj * std::pow(10.0, e);
            if (positive_definite_on_user_blocks(s, y)) return true;
          }
        }
      }
    }
  }
  return false;
}

Eigen::VectorXd apply_a(const Standard& s, const Blocks& x) {
  Eigen::VectorXd r(static_cast<Eigen::Index>(s.a.size()));
  for (std::size_t i = 0; i < s.a.size(); ++i) r(static_cast<Eigen::Index>(i)) = dot(s.a[i], x);
  return r;
}

Blocks apply_at(const Standard& s, const Eigen::VectorXd& y) {
  Blocks out = zeros_like(s.c);
  for (std::size_t i = 0; i < s.a.size(); ++i) axpy(y(static_cast<Eigen::Index>(i)), s.a[i], out);
  return out;
}

// Nesterov-Todd scaling of one block: G with W = G G^H, W Z W = X and
// G^-1 X G^-H = G^H Z G = diag(lambda).
struct NtBlock {
  ComplexMat g;
  ComplexMat g_inv;
  RealVec lambda;
};

bool nt_scaling(const ComplexMat& x, const ComplexMat& z, NtBlock& out) {
  if (x.rows() == 1) {
    const double xv = x(0, 0).real();
    const double zv = z(0, 0).real();
    if (!(xv > 0.0 && zv > 0.0)) return false;
    const double g = std::pow(xv / zv, 0.25);
    out.g = ComplexMat::Constant(1, 1, g);
    out.g_inv = ComplexMat::Constant(1, 1, 1.0 / g);
    out.lambda = RealVec::Constant(1, std::sqrt(xv * zv));
    return true;
  }
  Eigen::LLT<ComplexMat> lx(x);
  Eigen::LLT<ComplexMat> lz(z);
  if (lx.info() != Eigen::Success || lz.info() != Eigen::Success) return false;
  const ComplexMat l_x = lx.matrixL();
  const ComplexMat l_z = lz.matrixL();
  Eigen::JacobiSVD<ComplexMat> svd(l_z.adjoint() * l_x, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const RealVec sv = svd.singularValues();
  if (!(sv.minCoeff() > 0.0)) return false;
  const RealVec isqrt = sv.cwiseSqrt().cwiseInverse();
  out.g = l_x * svd.matrixV() * isqrt.asDiagonal();
  const ComplexMat lx_inv =
      l_x.triangularView<Eigen::Lower>().solve(ComplexMat::Identity(x.rows(), x.cols()));
  out.g_inv = sv.cwiseSqrt().asDiagonal() * svd.matrixV().adjoint() * lx_inv;
  out.lambda = sv;
  return true;
}

// Largest alpha in (0, inf] with diag(lambda) + alpha * d >= 0.
double max_step(const RealVec& lambda, const ComplexMat& d) {
  if (lambda.size() == 1) {
    const double dv = d(0, 0).real();
    return dv >= 0.0 ? std::numeric_limits<double>::infinity() : -lambda(0) / dv;
  }
  const RealVec isq = lambda.cwiseSqrt().cwiseInverse();
  ComplexMat m = isq.asDiagonal() * d * isq.asDiagonal();
  m = linalg::hermitian_part(m);
  const double lmin = Eigen::SelfAdjointEigenSolver<ComplexMat>(m, Eigen::EigenvaluesOnly).eigenvalues().minCoeff();
  return lmin >= 0.0 ? std::numeric_limits<double>::infinity() : -1.0 / lmin;
}

struct Direction {
  Blocks dx, dz;
  Eigen::VectorXd dy;
  double dtau = 0.0, dkappa = 0.0;
};

SdpSolution solve_interior(const SdpProblem& problem, const SdpOptions& opt) {
  const Standard s = standardize(problem);
  if (opt.check_bounded && !trace_bounded(s)) {
    throw Error(Errc::Unbounded, "no combination of equality constraints bounds trace(X)");
  }

  const std::size_t nb = s.sizes.size();
  const auto m = static_cast<Eigen::Index>(s.a.size());
  const double nu = std::accumulate(s.sizes.begin(), s.sizes.end(), 0.0);
  const double norm_c = norm(s.c);

  Blocks x, z;
  for (int n : s.sizes) {
    x.push_back(ComplexMat::Identity(n, n));
    z.push_back(ComplexMat::Identity(n, n));
  }
  Eigen::VectorXd y = Eigen::VectorXd::Zero(m);
  double tau = 1.0, kappa = 1.0;

  SdpSolution sol;
  auto finish = [&](SdpStatus status, std::string diag) {
    ComplexMat full = ComplexMat::Zero(problem.dim, problem.dim);
    Eigen::Index off = 0;
    for (std::size_t k = 0; k < s.user_blocks; ++k) {
      full.block(off, off, s.sizes[k], s.sizes[k]) = x[k] / tau;
      off += s.sizes[k];
    }
    sol.x = linalg::hermitian_part(full);
    sol.objective_value = linalg::trace_product(sol.x, problem.objective);
    sol.status = status;
    sol.diagnostic = std::move(diag);
    return sol;
  };

  int small_steps = 0;
  for (int iter = 0; iter <= opt.max_iterations; ++iter) {
    sol.iterations = iter;
    const Eigen::VectorXd ax = apply_a(s, x);
    const Blocks aty = apply_at(s, y);
    const Eigen::VectorXd rp = ax - s.b * tau;
    Blocks rd = aty;
    axpy(1.0, z, rd);
    Blocks aty_z = rd;
    axpy(-tau, s.c, rd);
    const double cx = dot(s.c, x);
    const double by = s.b.dot(y);
    const double rg = cx - by + kappa;
    const double mu = (dot(x, z) + tau * kappa) / (nu + 1.0);

    Blocks dres_blk = aty_z;
    for (auto& blk : dres_blk) blk /= tau;
    axpy(-1.0, s.c, dres_blk);
    // Worst constraint violation in the caller's units, relative to max(1, |rhs|).
    sol.primal_residual = m == 0 ? 0.0 : ((ax / tau - s.b).cwiseProduct(s.row_norms).cwiseAbs().array() /
                           s.b.cwiseProduct(s.row_norms).cwiseAbs().cwiseMax(1.0).array())
                              .maxCoeff();
    sol.dual_residual = norm(dres_blk) / (1.0 + norm_c);
    const double pobj = -s.obj_scale * cx / tau;
    const double dobj = -s.obj_scale * by / tau;
    sol.dual_value = dobj;
    sol.duality_gap = std::abs(pobj - dobj);
    if (sol.primal_residual <= opt.feasibility_tol && sol.dual_residual <= opt.feasibility_tol &&
        sol.duality_gap <= opt.gap_tol * (1.0 + std::abs(pobj))) {
      return finish(SdpStatus::Optimal, "");
    }
    if (by > 0.0 && tau < kappa && norm(aty_z) <= opt.feasibility_tol * by) {
      std::ostringstream os;
      os << "dual improving ray found: b'y=" << by << " |A'y+Z|=" << norm(aty_z);
      return finish(SdpStatus::Infeasible, os.str());
    }
    if (cx < 0.0 && tau < kappa && ax.norm() <= opt.feasibility_tol * (-cx)) {
      throw Error(Errc::Unbounded, "primal improving ray found");
    }
    if (iter == opt.max_iterations) break;

    std::vector<NtBlock> nt(nb);
    for (std::size_t k = 0; k < nb; ++k) {
      if (!nt_scaling(x[k], z[k], nt[k])) return finish(SdpStatus::NumericalTrouble, "iterate left the cone");
    }
    auto scale_w = [&](const Blocks& v) {
      Blocks out(nb);
      for (std::size_t k = 0; k < nb; ++k) {
        const ComplexMat& g = nt[k].g;
        out[k] = linalg::hermitian_part(g * (g.adjoint() * v[k] * g) * g.adjoint());
      }
      return out;
    };

    std::vector<Blocks> wa;
    wa.reserve(s.a.size());
    for (const auto& ai : s.a) wa.push_back(scale_w(ai));
    const Blocks wc = scale_w(s.c);
    const Blocks wrd = scale_w(rd);

    Eigen::MatrixXd kmat(m + 1, m + 1);
    for (Eigen::Index i = 0; i < m; ++i) {
      for (Eigen::Index j = i; j < m; ++j) {
        const double v = dot(s.a[static_cast<std::size_t>(i)], wa[static_cast<std::size_t>(j)]);
        kmat(i, j) = v;
        kmat(j, i) = v;
      }
    }
    const Eigen::VectorXd u = apply_a(s, wc);
    const double cwc = dot(s.c, wc);
    kmat.topRightCorner(m, 1) = -(u + s.b);
    kmat.bottomLeftCorner(1, m) = (u - s.b).transpose();
    kmat(m, m) = -(cwc + kappa / tau);
    const Eigen::PartialPivLU<Eigen::MatrixXd> lu(kmat);

    // Solves the Newton system for residual weight eta, complementarity target
    // sigma*mu and an optional second-order term from a predictor direction.
    auto direction = [&](double sigma, const Direction* pred) {
      const double eta = 1.0 - sigma;
      Blocks rc(nb);
      for (std::size_t k = 0; k < nb; ++k) {
        const RealVec& lam = nt[k].lambda;
        const Eigen::Index n = lam.size();
        ComplexMat target = -ComplexMat(lam.cwiseAbs2().asDiagonal());
        target.diagonal().array() += sigma * mu;
        if (pred != nullptr) {
          const ComplexMat dxs = nt[k].g_inv * pred->dx[k] * nt[k].g_inv.adjoint();
          const ComplexMat dzs = nt[k].g.adjoint() * pred->dz[k] * nt[k].g;
          target -= 0.5 * (dxs * dzs + dzs * dxs);
        }
        for (Eigen::Index i = 0; i < n; ++i) {
          for (Eigen::Index j = 0; j < n; ++j) target(i, j) *= 2.0 / (lam(i) + lam(j));
        }
        rc[k] = linalg::hermitian_part(nt[k].g * target * nt[k].g.adjoint());
      }
      double comp_target = sigma * mu - tau * kappa;
      if (pred != nullptr) comp_target -= pred->dtau * pred->dkappa;

      Blocks t = rc;
      axpy(eta, wrd, t);
      Eigen::VectorXd rhs(m + 1);
      rhs.head(m) = -eta * rp - apply_a(s, t);
      rhs(m) = -eta * rg - dot(s.c, t) - comp_target / tau;
      const Eigen::VectorXd sol_vec = lu.solve(rhs);

      Direction d;
      d.dy = sol_vec.head(m);
      d.dtau = sol_vec(m);
      d.dx = t;
      for (Eigen::Index j = 0; j < m; ++j) axpy(d.dy(j), wa[static_cast<std::size_t>(j)], d.dx);
      axpy(-d.dtau, wc, d.dx);
      d.dz = apply_at(s, d.dy);
      for (auto& blk : d.dz) blk = -blk;
      axpy(-eta, rd, d.dz);
      axpy(d.dtau, s.c, d.dz);
      d.dkappa = (comp_target - kappa * d.dtau) / tau;
      return d;
    };

    auto step_length = [&](const Direction& d) {
      double alpha = std::numeric_limits<double>::infinity();
      for (std::size_t k = 0; k < nb; ++k) {
        const ComplexMat dxs = nt[k].g_inv * d.dx[k] * nt[k].g_inv.adjoint();
        const ComplexMat dzs = nt[k].g.adjoint() * d.dz[k] * nt[k].g;
        alpha = std::min({alpha, max_step(nt[k].lambda, dxs), max_step(nt[k].lambda, dzs)});
      }
      if (d.dtau < 0.0) alpha = std::min(alpha, -tau / d.dtau);
      if (d.dkappa < 0.0) alpha = std::min(alpha, -kappa / d.dkappa);
      return alpha;
    };

    const Direction pred = direction(0.0, nullptr);
    const double alpha_aff = std::min(1.0, step_length(pred));
    const double sigma = std::clamp(std::pow(1.0 - alpha_aff, 3.0), 1e-8, 1.0);
    const Direction corr = direction(sigma, &pred);
    const double alpha = std::min(1.0, 0.98 * step_length(corr));
    if (!std::isfinite(alpha) || !corr.dy.allFinite()) {
      return finish(SdpStatus::NumericalTrouble, "non-finite Newton direction");
    }
    small_steps = alpha < 1e-8 ? small_steps + 1 : 0;
    if (small_steps >= 5) return finish(SdpStatus::NumericalTrouble, "step length stalled");

    axpy(alpha, corr.dx, x);
    axpy(alpha, corr.dz, z);
    for (std::size_t k = 0; k < nb; ++k) {
      x[k] = linalg::hermitian_part(x[k]);
      z[k] = linalg::hermitian_part(z[k]);
    }
    y += alpha * corr.dy;
    tau += alpha * corr.dtau;
    kappa += alpha * corr.dkappa;
  }
  return finish(SdpStatus::NumericalTrouble, "iteration limit reached");
}

ComplexMat compress(const ComplexMat& m, const std::vector<int>& sizes, const std::vector<ComplexMat>& basis) {
  int dim = 0;
  for (const auto& u : basis) dim += static_cast<int>(u.cols());
  ComplexMat out = ComplexMat::Zero(dim, dim);
  Eigen::Index off = 0, roff = 0;
  for (std::size_t k = 0; k < sizes.size(); ++k) {
    const auto r = basis[k].cols();
    if (r > 0) {
      out.block(roff, roff, r, r) =
          linalg::hermitian_part(basis[k].adjoint() * m.block(off, off, sizes[k], sizes[k]) * basis[k]);
    }
    off += sizes[k];
    roff += r;
  }
  return out;
}

// A zero-valued equality tr(X F) = 0 whose blocks are all PSD (or all NSD)
// forces X F = 0, so X lies on the face {U Z U^H : Z >= 0} with U spanning the
// null space of F. Such constraints leave the feasible set without interior,
// which stalls interior-point methods; restricting to the face removes them.
// Returns false when no constraint of that kind exists.
bool reduce_to_face(const SdpProblem& p, const std::vector<int>& sizes, std::vector<ComplexMat>& basis) {
  constexpr double kNullTol = 1e-10;
  basis.clear();
  for (int n : sizes) basis.push_back(ComplexMat::Identity(n, n));
  bool reduced = false;
  for (bool changed = true; changed;) {
    changed = false;
    for (const auto& c : p.eq_constraints) {
      if (c.value != 0.0) continue;
      std::vector<Eigen::SelfAdjointEigenSolver<ComplexMat>> eig(sizes.size());
      double scale = 0.0, lo = 0.0, hi = 0.0;
      Eigen::Index off = 0;
      for (std::size_t k = 0; k < sizes.size(); ++k) {
        if (basis[k].cols() > 0) {
          eig[k].compute(linalg::hermitian_part(basis[k].adjoint() * c.matrix.block(off, off, sizes[k], sizes[k]) *
                                                basis[k]));
          const RealVec& ev = eig[k].eigenvalues();
          lo = std::min(lo, ev.minCoeff());
          hi = std::max(hi, ev.maxCoeff());
        }
        off += sizes[k];
      }
      // Measured against the uncompressed matrix so a constraint already
      // satisfied on the current face is not reduced again.
      scale = c.matrix.cwiseAbs().maxCoeff();
      if (std::max(-lo, hi) <= kNullTol * scale || (lo < -kNullTol * scale && hi > kNullTol * scale)) continue;
      for (std::size_t k = 0; k < sizes.size(); ++k) {
        if (basis[k].cols() == 0) continue;
        const RealVec& ev = eig[k].eigenvalues();
        std::vector<Eigen::Index> keep;
        for (Eigen::Index i = 0; i < ev.size(); ++i) {
          if (std::abs(ev(i)) <= kNullTol * scale) keep.push_back(i);
        }
        ComplexMat nb(basis[k].rows(), static_cast<Eigen::Index>(keep.size()));
        for (std::size_t j = 0; j < keep.size(); ++j) {
          nb.col(static_cast<Eigen::Index>(j)) = basis[k] * eig[k].eigenvectors().col(keep[j]);
        }
        basis[k] = std::move(nb);
      }
      changed = reduced = true;
    }
  }
  return reduced;
}


// When the equality constraints pin X to a single point the interior-point
// iteration has nothing to optimise: every dual slack tends to zero and the
// scaled Newton system loses all precision. Such problems are solved directly.
std::optional<SdpSolution> solve_determined(const SdpProblem& p) {
  const std::vector<int> sizes = p.blocks.empty() ? std::vector<int>{p.dim} : p.blocks;
  // Real basis of the block-diagonal Hermitian matrices.
  std::vector<ComplexMat> basis;
  int off = 0;
  for (int n : sizes) {
    for (int i = 0; i < n; ++i) {
      for (int j = i; j < n; ++j) {
        ComplexMat e = ComplexMat::Zero(p.dim, p.dim);
        e(off + i, off + j) = 1.0;
        e(off + j, off + i) = 1.0;
        basis.push_back(e);
        if (j > i) {
          e(off + i, off + j) = cplx(0.0, 1.0);
          e(off + j, off + i) = cplx(0.0, -1.0);
          basis.push_back(std::move(e));
        }
      }
    }
    off += n;
  }
  const auto m = static_cast<Eigen::Index>(p.eq_constraints.size());
  const auto d = static_cast<Eigen::Index>(basis.size());
  if (m < d) return std::nullopt;

  Eigen::MatrixXd a(m, d);
  Eigen::VectorXd b(m), scale(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const auto& c = p.eq_constraints[static_cast<std::size_t>(i)];
    for (Eigen::Index j = 0; j < d; ++j) a(i, j) = linalg::trace_product(basis[static_cast<std::size_t>(j)], c.matrix);
    scale(i) = std::max(a.row(i).cwiseAbs().maxCoeff(), 1e-300);
    a.row(i) /= scale(i);
    b(i) = c.value / scale(i);
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
  qr.setThreshold(1e-10);
  if (qr.rank() < d) return std::nullopt;

  const Eigen::VectorXd coef = qr.solve(b);
  SdpSolution sol;
  sol.x = ComplexMat::Zero(p.dim, p.dim);
  for (Eigen::Index j = 0; j < d; ++j) sol.x += coef(j) * basis[static_cast<std::size_t>(j)];
  sol.x = linalg::hermitian_part(sol.x);
  sol.objective_value = linalg::trace_product(sol.x, p.objective);
  sol.dual_value = sol.objective_value;

  double resid = 0.0;
  for (const auto& c : p.eq_constraints) {
    resid = std::max(resid, std::abs(linalg::trace_product(sol.x, c.matrix) - c.value) / std::max(1.0, std::abs(c.value)));
  }
  sol.primal_residual = resid;
  sol.status = SdpStatus::Optimal;
  if (resid > 1e-8) {
    sol.status = SdpStatus::Infeasible;
    sol.diagnostic = "equality constraints are inconsistent";
    return sol;
  }
  off = 0;
  for (int n : sizes) {
    const RealVec ev = Eigen::SelfAdjointEigenSolver<ComplexMat>(sol.x.block(off, off, n, n)).eigenvalues();
    if (ev.minCoeff() < -1e-10 * std::max(1.0, ev.cwiseAbs().maxCoeff())) {
      sol.status = SdpStatus::Infeasible;
      sol.diagnostic = "the unique equality-feasible X is not PSD";
      return sol;
    }
    off += n;
  }
  for (const auto& c : p.ineq_constraints) {
    if (linalg::trace_product(sol.x, c.matrix) < c.value - 1e-8 * std::max(1.0, std::abs(c.value))) {
      sol.status = SdpStatus::Infeasible;
      sol.diagnostic = "the unique equality-feasible X violates an inequality";
      return sol;
    }
  }
  return sol;
}

SdpSolution solve_pinned_or_interior(const SdpProblem& p, const SdpOptions& opt) {
  if (auto direct = solve_determined(p)) return *direct;
  return solve_interior(p, opt);
}

}  // namespace

SdpSolution solve(const SdpProblem& problem, const SdpOptions& opt) {
  standardize(problem);  // validates dimensions and symmetry
  const std::vector<int> sizes = problem.blocks.empty() ? std::vector<int>{problem.dim} : problem.blocks;
  std::vector<ComplexMat> basis;
  if (!reduce_to_face(problem, sizes, basis)) return solve_pinned_or_interior(problem, opt);

  SdpProblem r;
  for (const auto& u : basis) {
    if (u.cols() > 0) r.blocks.push_back(static_cast<int>(u.cols()));
  }
  r.dim = std::accumulate(r.blocks.begin(), r.blocks.end(), 0);
  SdpSolution sol;
  if (r.dim == 0) {
    // Only X = 0 remains.
    sol.x = ComplexMat::Zero(problem.dim, problem.dim);
    const bool ok = std::all_of(problem.eq_constraints.begin(), problem.eq_constraints.end(),
                                [](const TraceConstraint& c) { return c.value == 0.0; }) &&
                    std::all_of(problem.ineq_constraints.begin(), problem.ineq_constraints.end(),
                                [](const TraceConstraint& c) { return c.value <= 0.0; });
    sol.status = ok ? SdpStatus::Optimal : SdpStatus::Infeasible;
    if (!ok) sol.diagnostic = "zero-valued constraints force X = 0, which violates the others";
    return sol;
  }
  r.objective = compress(problem.objective, sizes, basis);
  for (const auto& c : problem.eq_constraints) {
    ComplexMat m = compress(c.matrix, sizes, basis);
    // Rows that defined the face are now zero up to rounding; normalising them would amplify noise.
    if (c.value == 0.0 && m.cwiseAbs().maxCoeff() <= 1e-10 * c.matrix.cwiseAbs().maxCoeff()) continue;
    r.eq_constraints.push_back({std::move(m), c.value});
  }
  for (const auto& c : problem.ineq_constraints) {
    r.ineq_constraints.push_back({compress(c.matrix, sizes, basis), c.value});
  }
  sol = solve_pinned_or_interior(r, opt);

  ComplexMat full = ComplexMat::Zero(problem.dim, problem.dim);
  Eigen::Index off = 0, roff = 0;
  for (std::size_t k = 0; k < sizes.size(); ++k) {
    const auto rk = basis[k].cols();
    if (rk > 0) {
      full.block(off, off, sizes[k], sizes[k]) = basis[k] * sol.x.block(roff, roff, rk, rk) * basis[k].adjoint();
    }
    off += sizes[k];
    roff += rk;
  }
  sol.x = linalg::hermitian_part(full);
  sol.objective_value = linalg::trace_product(sol.x, problem.objective);
  return sol;
}

CharnesCooperResult solve_charnes_cooper(const ComplexMat& a, const ComplexMat& b,
                                         const ComplexMat& c, double t, double qos_rhs,
                                         double noise_ratio) {
  if (!(t > 0.0)) throw Error(Errc::InvalidArgument, "t must be positive");
  const Eigen::Index n = a.rows();
  if (b.rows() != n || c.rows() != n || a.cols() != n || b.cols() != n || c.cols() != n) {
    throw Error(Errc::DimensionMismatch, "A, B, C must share one square dimension");
  }
  // Rescale the data to unit average eigenvalue so the SDP is well conditioned
  // whatever the absolute channel gains are.
  const double sa = std::max(a.trace().real() / static_cast<double>(n), 1e-300);
  const double sb = std::max(b.trace().real() / static_cast<double>(n), 1e-300);
  const double cscale = std::max(c.cwiseAbs().maxCoeff(), std::abs(qos_rhs));
  const double sc = cscale > 0.0 ? cscale : 1.0;

  const int dim = static_cast<int>(n) + 1;
  auto embed = [&](const ComplexMat& top, double corner) {
    ComplexMat m = ComplexMat::Zero(dim, dim);
    m.topLeftCorner(n, n) = top;
    m(n, n) = corner;
    return m;
  };

  SdpProblem p;
  p.dim = dim;
  p.blocks = {static_cast<int>(n), 1};
  p.objective = embed(a / sa, 0.0);
  // V~ = sb * V, s~ = sb * s keeps tr(V~ B/sb) = 1.
  p.eq_constraints.push_back({embed(ComplexMat::Identity(n, n), -t), 0.0});
  p.eq_constraints.push_back({embed(b / sb, 0.0), 1.0});
  p.ineq_constraints.push_back({embed(c / sc, -qos_rhs / sc), 0.0});

  // tr(V~ B~) = 1 with B~ positive definite bounds V~, and tr(V~) = s~ t then
  // bounds s~; the Cholesky factorisation certifies B~ > 0.
  linalg::cholesky(b / sb);
  SdpOptions opt;
  opt.check_bounded = false;

  CharnesCooperResult out;
  out.sdp = solve(p, opt);
  if (out.sdp.status == SdpStatus::Infeasible) {
    std::ostringstream os;
    os << "QoS SDP infeasible at t=" << t << " (" << out.sdp.diagnostic << ")";
    throw Error(Errc::QosInfeasibleAtT, os.str());
  }
  if (out.sdp.status != SdpStatus::Optimal) {
    std::ostringstream os;
    os << "SDP at t=" << t << " ended with " << to_string(out.sdp.status) << ": " << out.sdp.diagnostic;
    throw Error(Errc::SolverFailure, os.str());
  }
  const ComplexMat v_tilde = out.sdp.x.topLeftCorner(n, n);
  const double s_tilde = out.sdp.x(n, n).real();
  if (!(s_tilde > 1e-12)) {
    throw Error(Errc::DegenerateScale, "Charnes-Cooper scale s vanished at the optimum");
  }
  out.scale = s_tilde / sb;
  out.sdp_objective = noise_ratio * out.sdp.objective_value * sa / sb;
  const ComplexMat w_mat = linalg::hermitian_part(v_tilde / s_tilde);

  // tr(W) = t, tr(W B~) = 1/s~ and tr(W C~) are preserved by the extraction; the
  // objective is constant on the optimal face so it is preserved as well.
  const TraceConstraint cs[] = {
      {ComplexMat::Identity(n, n), linalg::trace_product(w_mat, ComplexMat::Identity(n, n))},
      {b / sb, linalg::trace_product(w_mat, b / sb)},
      {c / sc, linalg::trace_product(w_mat, c / sc)},
  };
  out.extraction = linalg::rank_one_decompose(w_mat, cs);
  out.w = out.extraction.w;
  out.w *= std::sqrt(t / out.w.squaredNorm());

  const double wa = (out.w.adjoint() * a * out.w)(0, 0).real();
  const double wb = (out.w.adjoint() * b * out.w)(0, 0).real();
  out.objective = noise_ratio * wa / wb;
  const double wc = (out.w.adjoint() * c * out.w)(0, 0).real();
  out.feasible = wc >= qos_rhs - 1e-8 * std::max(1.0, std::abs(qos_rhs));
  return out;
}

}  // namespace seeopt::sdp
