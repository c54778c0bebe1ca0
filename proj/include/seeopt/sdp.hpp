#pragma once

// Small dense complex-Hermitian semidefinite programs in trace form:
//
//   maximize   tr(X A_obj)
//   subject to tr(X F_i) == b_i   (equality constraints)
//              tr(X G_j) >= c_j   (inequality constraints)
//              X block-diagonal and PSD
//
// solved with a primal-dual path-following method on the homogeneous
// self-dual embedding, using Nesterov-Todd scaling on every Hermitian block.
// Infeasibility is reported as a status, not thrown, because it is an expected
// outcome while sweeping a parameter.

#include <string>
#include <vector>

#include "seeopt/linalg.hpp"

namespace seeopt::sdp {

struct SdpProblem {
  int dim = 0;
  /// Diagonal block sizes summing to dim; empty means a single dim x dim block.
  /// Off-block entries of the data matrices are ignored.
  std::vector<int> blocks;
  ComplexMat objective;
  std::vector<TraceConstraint> eq_constraints;
  std::vector<TraceConstraint> ineq_constraints;
};

enum class SdpStatus { Optimal, Infeasible, NumericalTrouble };

const char* to_string(SdpStatus s) noexcept;

struct SdpSolution {
  ComplexMat x;
  double objective_value = 0.0;
  double dual_value = 0.0;
  SdpStatus status = SdpStatus::NumericalTrouble;
  double duality_gap = 0.0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  int iterations = 0;
  std::string diagnostic;
};

struct SdpOptions {
  double feasibility_tol = 1e-8;
  double gap_tol = 1e-8;
  int max_iterations = 200;
  /// Verify that the equality constraints bound tr(X) before iterating.
  bool check_bounded = true;
};

/// Throws DimensionMismatch for inconsistent data and Unbounded when no
/// combination of the equality constraints bounds tr(X), or when the iterates
/// produce a certificate that the objective is unbounded above.
SdpSolution solve(const SdpProblem& problem, const SdpOptions& options = {});

struct CharnesCooperResult {
  ComplexVec w;          // rank-one beamformer, ||w||^2 == t
  double objective = 0;  // noise_ratio * (w^H A w) / (w^H B w) at the extracted w
  double sdp_objective = 0;  // noise_ratio * tr(V A) at the SDP optimum
  bool feasible = false; // w^H C w >= qos_rhs within tolerance
  double scale = 0;      // the Charnes-Cooper scalar s
  SdpSolution sdp;
  linalg::RankOneResult extraction;
};

/// Fixed-t inner problem of the QoS-constrained beamformer:
///
///   max tr(V A)  s.t.  tr(V) = s t,  tr(V C) >= s qos_rhs,  tr(V B) = 1,  V >= 0,  s >= 0
///
/// with s carried as a 1x1 block of the PSD variable. The beamformer is
/// recovered from W = V / s by rank-one extraction and scaled to ||w||^2 = t.
/// Throws QosInfeasibleAtT when the SDP is infeasible, DegenerateScale when
/// s <= 1e-12 at the optimum and SolverFailure on numerical trouble.
CharnesCooperResult solve_charnes_cooper(const ComplexMat& a, const ComplexMat& b,
                                         const ComplexMat& c, double t, double qos_rhs,
                                         double noise_ratio = 1.0);

}  // namespace seeopt::sdp
