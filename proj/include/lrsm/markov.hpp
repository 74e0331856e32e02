#pragma once

// Finite-state Markov chains: simulation, frequency matrices, structured
// transition estimation and mixing diagnostics.

#include "lrsm/matops.hpp"
#include "lrsm/solver.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace lrsm::markov {

/// Row-stochastic p x p matrix.
class TransitionMatrix {
public:
  // Validates entries in [0, 1] and unit row sums (1e-10).
  explicit TransitionMatrix(DenseMatrix p);

  const DenseMatrix& matrix() const { return p_; }
  Index states() const { return p_.rows(); }

private:
  DenseMatrix p_;
};

/// Nonnegative p x p matrix with unit total mass.
class FrequencyMatrix {
public:
  explicit FrequencyMatrix(DenseMatrix f);

  const DenseMatrix& matrix() const { return f_; }
  Index states() const { return f_.rows(); }

private:
  DenseMatrix f_;
};

struct Trajectory {
  std::vector<std::int64_t> states;

  // Number of transitions n (length - 1).
  std::size_t transitions() const { return states.empty() ? 0 : states.size() - 1; }
};

struct StationaryInit {};
struct FixedInit {
  Index state = 0;
};
using InitialDistribution = std::variant<StationaryInit, FixedInit, Vector>;

Trajectory simulate_chain(const TransitionMatrix& p, std::size_t n, const InitialDistribution& init,
                          std::uint64_t seed);

/// Pair-visit frequencies over all n transitions of X_0..X_n, divided by n.
FrequencyMatrix empirical_frequency(const Trajectory& traj, Index p);

struct ErgodicityReport {
  bool irreducible = false;
  Index period = 0;

  bool ergodic() const { return irreducible && period == 1; }
};

/// Support-graph test: strong connectivity and the gcd of cycle lengths.
ErgodicityReport ergodicity(const DenseMatrix& p);

/// Unique pi with pi P = pi, pi 1 = 1. Throws StructureError if P is not ergodic.
Vector stationary_distribution(const TransitionMatrix& p);

/// Smallest k >= 1 with max_i 1/2 ||e_i^T P^k - pi||_1 <= eps.
std::size_t mixing_time(const TransitionMatrix& p, double eps, std::size_t cap = 1000000);

struct PairChain {
  std::vector<std::pair<Index, Index>> states;
  TransitionMatrix q;
  Vector stationary;
};

/// Chain on consecutive pairs (X_i, X_{i+1}) restricted to the support of P.
PairChain pair_chain(const TransitionMatrix& p);

/// Rowwise normalization; rows with zero mass become uniform.
TransitionMatrix frequency_to_transition(const FrequencyMatrix& f);

/// Clamp to [0, 1], project onto the selected constraint set, normalize rows.
std::pair<FrequencyMatrix, TransitionMatrix> finalize_estimate(const DenseMatrix& raw,
                                                               ProjectionMode mode);

struct TransitionEstimate {
  FrequencyMatrix frequency;
  TransitionMatrix transition;
  SolveResult solve;
};

TransitionEstimate estimate_transition(const Trajectory& traj, Index p, const SolverConfig& config,
                                       ProjectionMode mode = ProjectionMode::Global);

/// Same pipeline with the solver replaced by a rank-r truncated SVD.
std::pair<FrequencyMatrix, TransitionMatrix> spectral_baseline(const FrequencyMatrix& empirical,
                                                               Index rank,
                                                               ProjectionMode mode = ProjectionMode::Global);

Vector conditional_mean(const TransitionMatrix& p, const Vector& v);

}  // namespace lrsm::markov
