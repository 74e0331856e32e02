#pragma once

// Seeded generators for the synthetic experiments: M = A D B + S ground
// truths, low-rank-plus-sparse transition kernels and two noise families.

#include "lrsm/markov.hpp"
#include "lrsm/matops.hpp"

#include <cstdint>
#include <string>

namespace lrsm::synth {

enum class NoiseKind { None, Gaussian, EmpiricalProb };

NoiseKind parse_noise_kind(const std::string& name);
std::string to_string(NoiseKind kind);

struct InstanceSpec {
  Index p = 100;
  Index r = 3;
  Index s = 100;
  double t = 1.0;
  double sigma_noise = 0.0;
  NoiseKind noise_kind = NoiseKind::None;
  Index n_noise = 1000;
  std::uint64_t seed = 0;

  void validate() const;
};

InstanceSpec parse_instance_spec(const std::string& json_text);

struct LowRankSparse {
  FactoredLowRank low_rank;  // thin SVD of A D B
  SparseEntrySet sparse;
  DenseMatrix low_rank_dense;  // A D B
  DenseMatrix m;               // A D B + S
};

LowRankSparse gen_lowrank_sparse(const InstanceSpec& spec);

struct TransitionInstance {
  markov::TransitionMatrix p_star;
  markov::FrequencyMatrix f_star;
  Vector pi_star;
  FactoredLowRank l_star;
  SparseEntrySet s_star;
  int attempts = 1;
};

/// P0 = |t A D B + S|, P = Diag(P0 1)^{-1} P0, F = diag(pi) P. The split of F
/// is exact: row scaling keeps A D B at rank r and S on its support.
/// Degenerate draws (zero rows, non-ergodic) are redrawn up to 100 times.
TransitionInstance gen_transition(const InstanceSpec& spec);

DenseMatrix noise_gaussian(Index p, Index q, double sigma, std::uint64_t seed);

/// Each row: (1/n) sum_i e_{X_i} - 1/p with X_i uniform on {0..p-1}.
DenseMatrix noise_empirical_prob(Index p, Index n, std::uint64_t seed);

/// Noise matrix selected by spec.noise_kind (zero for None).
DenseMatrix noise_for(const InstanceSpec& spec, std::uint64_t seed);

}  // namespace lrsm::synth
