#pragma once

// Dense complex-Hermitian primitives shared by the beamforming and SDP code.
//
// Storage is Eigen's dynamic complex types. Every routine validates its input
// (Hermitian symmetry, definiteness) and throws seeopt::Error on violation.

#include <complex>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "seeopt/error.hpp"

namespace seeopt {

using cplx = std::complex<double>;
using ComplexVec = Eigen::VectorXcd;
using ComplexMat = Eigen::MatrixXcd;
using RealVec = Eigen::VectorXd;

struct EigPair {
  double value = 0.0;
  ComplexVec vector;
};

/// A Hermitian trace constraint trace(W * matrix) == value.
struct TraceConstraint {
  ComplexMat matrix;
  double value = 0.0;
};

namespace linalg {

inline constexpr double kHermitianTol = 1e-12;
/// Eigenvalue i counts toward numerical rank iff lambda_i > kRankTol * lambda_max.
inline constexpr double kRankTol = 1e-8;

bool is_hermitian(const ComplexMat& m, double rel_tol = kHermitianTol);

/// Throws NonHermitianInput unless m is square and Hermitian to rel_tol.
void require_hermitian(const ComplexMat& m, const char* what);

/// (M + M^H) / 2.
ComplexMat hermitian_part(const ComplexMat& m);

/// Re trace(A * B) for Hermitian A, B without forming the product.
double trace_product(const ComplexMat& a, const ComplexMat& b);

/// Lower-triangular C with positive real diagonal such that C C^H = B.
ComplexMat cholesky(const ComplexMat& b);

/// Full spectrum sorted by descending eigenvalue, orthonormal eigenvectors.
std::vector<EigPair> hermitian_eig(const ComplexMat& m);

/// Largest eigenpair of the pencil (A, B): the maximiser of the Rayleigh
/// quotient (w^H A w) / (w^H B w). Computed through the Cholesky factor B = C C^H
/// as lambda_max(C^-1 A C^-H) with w = C^-H v. The returned vector is unit norm.
EigPair max_generalized_eig(const ComplexMat& a, const ComplexMat& b);

/// Number of eigenvalues above kRankTol * lambda_max.
int numerical_rank(const ComplexMat& psd);

/// Rotates v so that its largest-magnitude entry is real and positive.
void normalize_phase(ComplexVec& v);

/// Outcome of a rank-one extraction, kept for diagnostics.
struct RankOneResult {
  ComplexVec w;
  int initial_rank = 0;
  int reduction_steps = 0;
  bool used_randomization = false;
  std::vector<double> residuals;  // |trace(w w^H F_i) - v_i| per constraint
};

/// Finds w with trace(w w^H F_i) = v_i for all supplied constraints, starting
/// from a PSD W satisfying them. Rank reduction is exact whenever r^2 > m; a
/// randomized fallback handles the rest and is verified before being returned.
/// Throws DecompositionFailed if no candidate meets the constraints.
RankOneResult rank_one_decompose(const ComplexMat& w, std::span<const TraceConstraint> constraints,
                                 double tol = 1e-6);

}  // namespace linalg
}  // namespace seeopt
