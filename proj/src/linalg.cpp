#include "seeopt/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "seeopt/rng.hpp"

namespace seeopt::linalg {

bool is_hermitian(const ComplexMat& m, double rel_tol) {
  if (m.rows() != m.cols()) return false;
  if (!m.allFinite()) return false;
  const double scale = m.cwiseAbs().maxCoeff();
  if (scale == 0.0) return true;
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    for (Eigen::Index i = j; i < m.rows(); ++i) {
      if (std::abs(m(i, j) - std::conj(m(j, i))) > rel_tol * scale) return false;
    }
  }
  return true;
}

void require_hermitian(const ComplexMat& m, const char* what) {
  if (m.rows() == 0 || !is_hermitian(m)) {
    throw Error(Errc::NonHermitianInput, std::string(what) + " is not a non-empty Hermitian matrix");
  }
}

ComplexMat hermitian_part(const ComplexMat& m) { return 0.5 * (m + m.adjoint()); }

double trace_product(const ComplexMat& a, const ComplexMat& b) {
  // Re tr(AB) = sum_ij Re(A_ij * B_ji) = sum_ij Re(A_ij * conj(B_ij)) for Hermitian B.
  return (a.array() * b.conjugate().array()).real().sum();
}

ComplexMat cholesky(const ComplexMat& b) {
  if (b.rows() == 0 || !is_hermitian(b)) {
    throw Error(Errc::NotPositiveDefinite, "cholesky input is not Hermitian");
  }
  const Eigen::Index n = b.rows();
  ComplexMat l = ComplexMat::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    double pivot = b(j, j).real();
    for (Eigen::Index k = 0; k < j; ++k) pivot -= std::norm(l(j, k));
    if (!(pivot > 0.0)) {
      std::ostringstream os;
      os << "non-positive pivot " << pivot << " at column " << j;
      throw Error(Errc::NotPositiveDefinite, os.str());
    }
    const double d = std::sqrt(pivot);
    l(j, j) = d;
    for (Eigen::Index i = j + 1; i < n; ++i) {
      cplx s = b(i, j);
      for (Eigen::Index k = 0; k < j; ++k) s -= l(i, k) * std::conj(l(j, k));
      l(i, j) = s / d;
    }
  }
  return l;
}

std::vector<EigPair> hermitian_eig(const ComplexMat& m) {
  require_hermitian(m, "hermitian_eig input");
  Eigen::SelfAdjointEigenSolver<ComplexMat> es(hermitian_part(m));
  if (es.info() != Eigen::Success) {
    throw Error(Errc::NonHermitianInput, "eigensolver did not converge");
  }
  const Eigen::Index n = m.rows();
  std::vector<EigPair> out;
  out.reserve(static_cast<std::size_t>(n));
  for (Eigen::Index k = n - 1; k >= 0; --k) {
    out.push_back({es.eigenvalues()(k), es.eigenvectors().col(k)});
  }
  return out;
}

EigPair max_generalized_eig(const ComplexMat& a, const ComplexMat& b) {
  require_hermitian(a, "generalized eigenproblem matrix A");
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw Error(Errc::DimensionMismatch, "A and B must have equal dimensions");
  }
  const ComplexMat c = cholesky(b);
  const auto tri = c.triangularView<Eigen::Lower>();
  // D = C^-1 A C^-H
  ComplexMat tmp = tri.solve(a);
  ComplexMat d = tri.solve(tmp.adjoint()).adjoint();
  d = hermitian_part(d);
  Eigen::SelfAdjointEigenSolver<ComplexMat> es(d);
  const Eigen::Index top = d.rows() - 1;
  const ComplexVec v = es.eigenvectors().col(top);
  ComplexVec w = c.adjoint().triangularView<Eigen::Upper>().solve(v);
  w.normalize();
  normalize_phase(w);
  return {es.eigenvalues()(top), w};
}

int numerical_rank(const ComplexMat& psd) {
  const auto pairs = hermitian_eig(psd);
  const double top = pairs.front().value;
  if (top <= 0.0) return 0;
  return static_cast<int>(std::count_if(pairs.begin(), pairs.end(),
                                        [&](const EigPair& p) { return p.value > kRankTol * top; }));
}

void normalize_phase(ComplexVec& v) {
  if (v.size() == 0) return;
  Eigen::Index idx = 0;
  v.cwiseAbs().maxCoeff(&idx);
  const double mag = std::abs(v(idx));
  if (mag == 0.0) return;
  v *= std::conj(v(idx)) / mag;
  v(idx) = cplx(std::abs(v(idx)), 0.0);
}

namespace {

double constraint_residual(const ComplexVec& w, const TraceConstraint& c) {
  const double achieved = (w.adjoint() * c.matrix * w)(0, 0).real();
  return std::abs(achieved - c.value) / std::max(1.0, std::abs(c.value));
}

std::vector<double> residuals_of(const ComplexVec& w, std::span<const TraceConstraint> cs) {
  std::vector<double> r;
  r.reserve(cs.size());
  for (const auto& c : cs) r.push_back(constraint_residual(w, c));
  return r;
}

double worst(const std::vector<double>& r) {
  return r.empty() ? 0.0 : *std::max_element(r.begin(), r.end());
}

// Columns sqrt(lambda_i) v_i for the numerically nonzero part of a PSD matrix.
ComplexMat psd_factor(const ComplexMat& w) {
  Eigen::SelfAdjointEigenSolver<ComplexMat> es(hermitian_part(w));
  const RealVec& lam = es.eigenvalues();
  const double top = lam.maxCoeff();
  std::vector<Eigen::Index> keep;
  for (Eigen::Index k = lam.size() - 1; k >= 0; --k) {
    if (top > 0.0 && lam(k) > kRankTol * top) keep.push_back(k);
  }
  ComplexMat p(w.rows(), static_cast<Eigen::Index>(keep.size()));
  for (std::size_t j = 0; j < keep.size(); ++j) {
    p.col(static_cast<Eigen::Index>(j)) = std::sqrt(lam(keep[j])) * es.eigenvectors().col(keep[j]);
  }
  return p;
}

// Real coordinates of the map Delta -> (Re tr(P^H F_i P Delta))_i over the
// r^2-dimensional space of r x r Hermitian matrices.
Eigen::MatrixXd constraint_map(const ComplexMat& p, std::span<const TraceConstraint> cs) {
  const Eigen::Index r = p.cols();
  Eigen::MatrixXd m(static_cast<Eigen::Index>(cs.size()), r * r);
  for (std::size_t i = 0; i < cs.size(); ++i) {
    const ComplexMat g = p.adjoint() * cs[i].matrix * p;
    Eigen::Index col = 0;
    const auto row = static_cast<Eigen::Index>(i);
    for (Eigen::Index k = 0; k < r; ++k) m(row, col++) = g(k, k).real();
    for (Eigen::Index k = 0; k < r; ++k) {
      for (Eigen::Index l = k + 1; l < r; ++l) {
        m(row, col++) = 2.0 * g(k, l).real();
        m(row, col++) = 2.0 * g(k, l).imag();
      }
    }
  }
  return m;
}

ComplexMat hermitian_from_coords(const Eigen::VectorXd& x, Eigen::Index r) {
  ComplexMat d = ComplexMat::Zero(r, r);
  Eigen::Index col = 0;
  for (Eigen::Index k = 0; k < r; ++k) d(k, k) = x(col++);
  for (Eigen::Index k = 0; k < r; ++k) {
    for (Eigen::Index l = k + 1; l < r; ++l) {
      const double re = x(col++);
      const double im = x(col++);
      // Delta_kl = re + i*im pairs with the 2 Re G_kl, 2 Im G_kl row entries.
      d(k, l) = cplx(re, im);
      d(l, k) = cplx(re, -im);
    }
  }
  return d;
}

// One rank-reduction step: returns false when the constraint map has trivial
// null space (reduction stalls).
bool reduce_once(ComplexMat& p, std::span<const TraceConstraint> cs) {
  const Eigen::Index r = p.cols();
  Eigen::VectorXd delta_coords;
  if (cs.empty()) {
    delta_coords = Eigen::VectorXd::Zero(r * r);
    delta_coords(0) = 1.0;
  } else {
    const Eigen::MatrixXd m = constraint_map(p, cs);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    const double smax = sv.size() ? sv(0) : 0.0;
    Eigen::Index rank = 0;
    for (Eigen::Index k = 0; k < sv.size(); ++k) {
      if (sv(k) > 1e-12 * std::max(smax, 1e-300)) ++rank;
    }
    if (rank >= r * r) return false;
    delta_coords = svd.matrixV().col(r * r - 1);
  }
  ComplexMat delta = hermitian_from_coords(delta_coords, r);
  Eigen::SelfAdjointEigenSolver<ComplexMat> es(delta);
  double lmax = es.eigenvalues().maxCoeff();
  if (lmax <= 0.0) {
    delta = -delta;
    lmax = -es.eigenvalues().minCoeff();
  }
  if (lmax <= 0.0) return false;
  const ComplexMat kept = ComplexMat::Identity(r, r) - delta / lmax;
  // kept is PSD with at least one zero eigenvalue; refactor P * kept * P^H.
  Eigen::SelfAdjointEigenSolver<ComplexMat> ks(hermitian_part(kept));
  const RealVec& lam = ks.eigenvalues();
  const double top = lam.maxCoeff();
  std::vector<Eigen::Index> keep;
  for (Eigen::Index k = r - 1; k >= 0; --k) {
    if (lam(k) > 1e-10 * top) keep.push_back(k);
  }
  if (static_cast<Eigen::Index>(keep.size()) >= r) return false;
  ComplexMat next(p.rows(), static_cast<Eigen::Index>(keep.size()));
  for (std::size_t j = 0; j < keep.size(); ++j) {
    next.col(static_cast<Eigen::Index>(j)) = p * (std::sqrt(lam(keep[j])) * ks.eigenvectors().col(keep[j]));
  }
  p = std::move(next);
  return true;
}

}  // namespace

RankOneResult rank_one_decompose(const ComplexMat& w, std::span<const TraceConstraint> constraints,
                                 double tol) {
  require_hermitian(w, "rank_one_decompose input");
  for (const auto& c : constraints) {
    require_hermitian(c.matrix, "rank_one_decompose constraint");
    if (c.matrix.rows() != w.rows()) {
      throw Error(Errc::DimensionMismatch, "constraint matrix dimension differs from W");
    }
  }

  RankOneResult res;
  ComplexMat p = psd_factor(w);
  res.initial_rank = static_cast<int>(p.cols());
  if (p.cols() == 0) {
    throw Error(Errc::DecompositionFailed, "input matrix has numerical rank zero");
  }

  while (p.cols() > 1 && reduce_once(p, constraints)) ++res.reduction_steps;

  if (p.cols() == 1) {
    res.w = p.col(0);
    normalize_phase(res.w);
    res.residuals = residuals_of(res.w, constraints);
    if (worst(res.residuals) <= tol) return res;
  }

  // Randomized fallback: w = P g, rescaled so that the first constraint holds.
  CounterRng rng(0x72616E6B6F6E65ULL);
  const Eigen::Index r = p.cols();
  ComplexVec best;
  double best_worst = std::numeric_limits<double>::infinity();
  for (int draw = 0; draw < 1000; ++draw) {
    ComplexVec g(r);
    for (Eigen::Index k = 0; k < r; ++k) g(k) = rng.complex_normal();
    ComplexVec cand = p * g;
    if (!constraints.empty()) {
      const double achieved = (cand.adjoint() * constraints[0].matrix * cand)(0, 0).real();
      if (achieved <= 0.0 || constraints[0].value <= 0.0) continue;
      cand *= std::sqrt(constraints[0].value / achieved);
    }
    const double wr = worst(residuals_of(cand, constraints));
    if (wr < best_worst) {
      best_worst = wr;
      best = std::move(cand);
    }
  }
  res.used_randomization = true;
  if (best.size() == 0 || best_worst > tol) {
    std::ostringstream os;
    os << "rank reduction stalled at rank " << p.cols() << " and randomization reached residual "
       << best_worst;
    throw Error(Errc::DecompositionFailed, os.str());
  }
  res.w = std::move(best);
  normalize_phase(res.w);
  res.residuals = residuals_of(res.w, constraints);
  return res;
}

}  // namespace seeopt::linalg
