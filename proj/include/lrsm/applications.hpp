#pragma once

// Estimators built on the identity-model solver: multitask regression by
// whitening, Winsorized covariance, and factor loadings.

#include "lrsm/matops.hpp"
#include "lrsm/solver.hpp"

namespace lrsm::apps {

struct MultitaskProblem {
  DenseMatrix X;  // n x p design
  DenseMatrix Y;  // n x q responses
};

struct MultitaskDiagnostics {
  double sigma_max = 0.0;
  double sigma_min = 0.0;
  // ||X^T||_{2,inf}: largest column norm of X.
  double design_row_bound = 0.0;
};

struct MultitaskFit {
  FactoredLowRank low_rank;
  SparseEntrySet sparse;
  SolverReport report;
  MultitaskDiagnostics diagnostics;
};

/// Solves on the least-squares coefficients (X^T X)^{-1} X^T Y.
MultitaskFit multitask_fit(const MultitaskProblem& problem, const SolverConfig& config);

struct CovarianceEstimate {
  DenseMatrix sigma_hat;
  double tau1 = 0.0;
  double tau2 = 0.0;
};

/// Truncated second moments minus truncated means; tau <= 0 selects sqrt(n).
CovarianceEstimate winsorized_covariance(const DenseMatrix& data, double tau1 = 0.0, double tau2 = 0.0);

/// Plain (1/n) X^T X - xbar xbar^T.
DenseMatrix sample_covariance(const DenseMatrix& data);

struct StructuredCovariance {
  CovarianceEstimate pilot;
  FactoredLowRank low_rank;
  SparseEntrySet sparse;
  SolverReport report;
};

StructuredCovariance structured_covariance(const DenseMatrix& data, const SolverConfig& config,
                                           double tau1 = 0.0, double tau2 = 0.0);

/// B^ = [sqrt(l_1) v_1, ..., sqrt(l_r) v_r] from the symmetrized low-rank part.
DenseMatrix estimate_loadings(const FactoredLowRank& sigma_l, Index rank);

/// Diagonal sign matrix H (as a vector of +-1) minimizing sum_j ||b_j - H b^_j||^2.
Vector align_signs(const DenseMatrix& b, const DenseMatrix& b_hat);

double alignment_objective(const DenseMatrix& b, const DenseMatrix& b_hat, const Vector& signs);

}  // namespace lrsm::apps
