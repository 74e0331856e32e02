#pragma once

// Incoherence-constrained least squares for Y = L + S + W by block
// alternating minimization over (S, Sigma, U, V).

#include "lrsm/matops.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace lrsm {

enum class Method {
  // Frame updates by matrix sign only.
  Method1,
  // Frame updates followed by projection onto the row-norm ball.
  Method2,
};

struct SolverConfig {
  Index rank_bound = 1;
  Index sparsity_bound = 0;
  // Incoherence parameter mu_bar; the row-norm radius is sqrt(mu_bar r / p).
  double incoherence_bound = 5.0;
  Method method = Method::Method1;
  int max_iters = 500;
  // Relative Frobenius change of S between iterations.
  double stall_tol = 1e-10;
  std::uint64_t seed = 0;

  // Throws ArgumentError when the bounds do not fit a rows x cols problem.
  void validate(Index rows, Index cols) const;
};

SolverConfig parse_solver_config(const std::string& json_text);
std::string to_json(const SolverConfig& config);

struct SolverState {
  DenseMatrix U;
  Vector sigma;
  DenseMatrix V;
  SparseEntrySet S;
  int iter = 0;

  FactoredLowRank low_rank() const { return {U, sigma, V}; }
};

enum class Termination { Stalled, MaxIters };

struct SolverReport {
  std::vector<double> objective_trace;
  Termination termination = Termination::MaxIters;
  int iters_run = 0;
  IncoherenceReading incoherence_U;
  IncoherenceReading incoherence_V;
  // Count of frame updates where the sign argument was zero and the previous
  // frame was retained.
  int degenerate_frame_updates = 0;
};

std::string to_json(const SolverReport& report);

struct SolveResult {
  FactoredLowRank low_rank;
  SparseEntrySet sparse;
  SolverReport report;
};

/// 1/2 ||Y - U Sigma V^T - S||_F^2
double objective(const DenseMatrix& y, const FactoredLowRank& l, const SparseEntrySet& s);

/// 1/2 ||Y - L||_F^2 - 1/2 ||Y - L||_{s,F}^2, i.e. the objective with S profiled out.
double profiled_objective(const DenseMatrix& y, const FactoredLowRank& l, Index sparsity);

/// Exact minimizer over s-sparse S.
SparseEntrySet update_S(const DenseMatrix& y, const SolverState& state, Index sparsity);

/// diag(U^T (Y - S) V); the exact Sigma block minimizer for orthonormal frames.
Vector update_Sigma(const DenseMatrix& y, const SolverState& state);

struct FrameUpdate {
  DenseMatrix U;
  DenseMatrix V;
  bool degenerate_U = false;
  bool degenerate_V = false;
};

/// U <- sign((Y - S) V Sigma), then V <- sign((Y - S)^T U Sigma); Method2 adds
/// the row-norm projection. Negative sigma signs are folded into V first, so
/// the returned V may differ from state.V in column signs.
FrameUpdate update_frames(const DenseMatrix& y, const SolverState& state, const SolverConfig& config);

/// Row-norm radius sqrt(mu_bar * r / dim) implied by an incoherence bound.
double incoherence_radius(double mu_bar, Index rank, Index dim);

// Called with the state at the end of every iteration.
using SolveObserver = std::function<void(const SolverState&)>;

SolveResult solve(const DenseMatrix& y, const SolverConfig& config, const SolveObserver& observer = {});

struct Certificate {
  bool applicable = false;
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = false;
  double objective_hat = 0.0;
  double objective_star = 0.0;
};

/// Deterministic error bound for the identity observation model (kappa = 1):
/// ||L^ - L*||_F^2 + ||S^ - S*||_F^2 <= 128 (r ||W||^2 + s ||W||_max^2).
Certificate certificate_check(const DenseMatrix& y, const FactoredLowRank& l_hat,
                              const SparseEntrySet& s_hat, const FactoredLowRank& l_star,
                              const SparseEntrySet& s_star, const SolverConfig& config);

}  // namespace lrsm
