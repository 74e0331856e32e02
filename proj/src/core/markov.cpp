#include "lrsm/markov.hpp"

#include "lrsm/error.hpp"
#include "lrsm/rng.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>

namespace lrsm::markov {

namespace {

constexpr double kStochasticTol = 1e-10;

void require_square(const DenseMatrix& m, const char* what) {
  if (m.rows() == 0 || m.rows() != m.cols())
    throw ArgumentError(std::string(what) + ": matrix must be square and nonempty");
  require_finite(m, what);
}

std::vector<double> cumulative_row(const DenseMatrix& p, Index i) {
  std::vector<double> cum(static_cast<std::size_t>(p.cols()));
  double acc = 0.0;
  for (Index j = 0; j < p.cols(); ++j) {
    acc += p(i, j);
    cum[static_cast<std::size_t>(j)] = acc;
  }
  return cum;
}

// Draws an index from cumulative weights (total may differ from 1 by rounding).
Index draw(const std::vector<double>& cum, double u) {
  const double total = cum.back();
  const double target = u * total;
  auto it = std::upper_bound(cum.begin(), cum.end(), target);
  if (it == cum.end()) {
    // Rounding at the top end: take the last state with positive weight.
    Index j = static_cast<Index>(cum.size()) - 1;
    while (j > 0 && cum[static_cast<std::size_t>(j)] == cum[static_cast<std::size_t>(j - 1)]) --j;
    return j;
  }
  return static_cast<Index>(it - cum.begin());
}

std::vector<std::vector<Index>> support_graph(const DenseMatrix& p, bool reverse) {
  std::vector<std::vector<Index>> adj(static_cast<std::size_t>(p.rows()));
  for (Index i = 0; i < p.rows(); ++i)
    for (Index j = 0; j < p.cols(); ++j)
      if (p(i, j) > 0.0) adj[static_cast<std::size_t>(reverse ? j : i)].push_back(reverse ? i : j);
  return adj;
}

std::vector<Index> bfs_levels(const std::vector<std::vector<Index>>& adj) {
  std::vector<Index> level(adj.size(), -1);
  std::deque<Index> queue{0};
  level[0] = 0;
  while (!queue.empty()) {
    const Index u = queue.front();
    queue.pop_front();
    for (Index v : adj[static_cast<std::size_t>(u)]) {
      if (level[static_cast<std::size_t>(v)] < 0) {
        level[static_cast<std::size_t>(v)] = level[static_cast<std::size_t>(u)] + 1;
        queue.push_back(v);
      }
    }
  }
  return level;
}

}  // namespace

TransitionMatrix::TransitionMatrix(DenseMatrix p) : p_(std::move(p)) {
  require_square(p_, "transition matrix");
  if ((p_.array() < 0.0).any() || (p_.array() > 1.0).any())
    throw ArgumentError("transition matrix: entries must lie in [0, 1]");
  for (Index i = 0; i < p_.rows(); ++i)
    if (std::abs(p_.row(i).sum() - 1.0) > kStochasticTol)
      throw ArgumentError("transition matrix: row " + std::to_string(i) + " does not sum to 1");
}

FrequencyMatrix::FrequencyMatrix(DenseMatrix f) : f_(std::move(f)) {
  require_square(f_, "frequency matrix");
  if ((f_.array() < 0.0).any()) throw ArgumentError("frequency matrix: entries must be nonnegative");
  if (std::abs(f_.sum() - 1.0) > kStochasticTol)
    throw ArgumentError("frequency matrix: total mass must be 1");
}

ErgodicityReport ergodicity(const DenseMatrix& p) {
  require_square(p, "ergodicity");
  ErgodicityReport out;
  const auto forward = support_graph(p, false);
  const auto backward = support_graph(p, true);
  const auto level = bfs_levels(forward);
  const auto back_level = bfs_levels(backward);
  out.irreducible = std::all_of(level.begin(), level.end(), [](Index l) { return l >= 0; }) &&
                    std::all_of(back_level.begin(), back_level.end(), [](Index l) { return l >= 0; });
  if (!out.irreducible) return out;
  Index g = 0;
  for (std::size_t u = 0; u < forward.size(); ++u)
    for (Index v : forward[u])
      g = std::gcd(g, std::abs(level[u] + 1 - level[static_cast<std::size_t>(v)]));
  out.period = g;
  return out;
}

Vector stationary_distribution(const TransitionMatrix& tm) {
  const DenseMatrix& p = tm.matrix();
  const ErgodicityReport erg = ergodicity(p);
  if (!erg.irreducible) throw StructureError("stationary distribution: chain is reducible");
  if (erg.period != 1)
    throw StructureError("stationary distribution: chain is periodic (period " +
                         std::to_string(erg.period) + ")");
  const Index n = p.rows();
  DenseMatrix a(n + 1, n);
  a.topRows(n) = p.transpose() - DenseMatrix::Identity(n, n);
  a.row(n).setOnes();
  Vector b = Vector::Zero(n + 1);
  b(n) = 1.0;
  Vector pi = a.colPivHouseholderQr().solve(b);
  pi = pi.cwiseMax(0.0);
  pi /= pi.sum();
  const double residual = (pi.transpose() * p - pi.transpose()).cwiseAbs().sum();
  if (!(residual <= 1e-10))
    throw NumericError("stationary distribution: residual " + std::to_string(residual) + " too large");
  return pi;
}

std::size_t mixing_time(const TransitionMatrix& tm, double eps, std::size_t cap) {
  if (!(eps > 0.0 && eps < 1.0)) throw ArgumentError("mixing_time: eps must lie in (0, 1)");
  const Vector pi = stationary_distribution(tm);
  const DenseMatrix& p = tm.matrix();
  DenseMatrix power = p;
  for (std::size_t k = 1; k <= cap; ++k) {
    const double distance =
        0.5 * (power.rowwise() - pi.transpose()).cwiseAbs().rowwise().sum().maxCoeff();
    // Slack for rounding in pi and the powers, so exact ties count as mixed.
    if (distance <= eps + 1e-12) return k;
    power = power * p;
  }
  throw NumericError("mixing_time: exceeded cap of " + std::to_string(cap) + " steps", cap);
}

Trajectory simulate_chain(const TransitionMatrix& tm, std::size_t n, const InitialDistribution& init,
                          std::uint64_t seed) {
  if (n < 1) throw ArgumentError("simulate_chain: n must be at least 1");
  const DenseMatrix& p = tm.matrix();
  const Index states = p.rows();
  Rng rng(seed);

  std::vector<double> start;
  if (std::holds_alternative<StationaryInit>(init)) {
    Vector pi;
    try {
      pi = stationary_distribution(tm);
    } catch (const StructureError& e) {
      throw NumericError(std::string("simulate_chain: no unique stationary vector: ") + e.what());
    }
    start.assign(pi.data(), pi.data() + pi.size());
  } else if (const auto* fixed = std::get_if<FixedInit>(&init)) {
    if (fixed->state < 0 || fixed->state >= states) throw ArgumentError("simulate_chain: bad initial state");
    start.assign(static_cast<std::size_t>(states), 0.0);
    start[static_cast<std::size_t>(fixed->state)] = 1.0;
  } else {
    const Vector& dist = std::get<Vector>(init);
    if (dist.size() != states || (dist.array() < 0.0).any() || std::abs(dist.sum() - 1.0) > 1e-10)
      throw ArgumentError("simulate_chain: custom initial distribution is not a probability vector");
    start.assign(dist.data(), dist.data() + dist.size());
  }
  std::partial_sum(start.begin(), start.end(), start.begin());

  std::vector<std::vector<double>> cum(static_cast<std::size_t>(states));
  for (Index i = 0; i < states; ++i) cum[static_cast<std::size_t>(i)] = cumulative_row(p, i);

  Trajectory traj;
  traj.states.resize(n + 1);
  Index x = draw(start, rng.uniform());
  traj.states[0] = x;
  for (std::size_t k = 1; k <= n; ++k) {
    x = draw(cum[static_cast<std::size_t>(x)], rng.uniform());
    traj.states[k] = x;
  }
  return traj;
}

FrequencyMatrix empirical_frequency(const Trajectory& traj, Index p) {
  if (traj.states.size() < 2) throw ArgumentError("empirical_frequency: need at least one transition");
  if (p <= 0) throw ArgumentError("empirical_frequency: p must be positive");
  DenseMatrix counts = DenseMatrix::Zero(p, p);
  for (std::size_t k = 0; k + 1 < traj.states.size(); ++k) {
    const auto a = traj.states[k];
    const auto b = traj.states[k + 1];
    if (a < 0 || b < 0 || a >= p || b >= p)
      throw ArgumentError("empirical_frequency: state out of range for p = " + std::to_string(p));
    counts(a, b) += 1.0;
  }
  counts /= static_cast<double>(traj.transitions());
  return FrequencyMatrix(std::move(counts));
}

PairChain pair_chain(const TransitionMatrix& tm) {
  const DenseMatrix& p = tm.matrix();
  const Vector pi = stationary_distribution(tm);
  std::vector<std::pair<Index, Index>> states;
  for (Index i = 0; i < p.rows(); ++i)
    for (Index j = 0; j < p.cols(); ++j)
      if (p(i, j) > 0.0) states.emplace_back(i, j);
  const Index m = static_cast<Index>(states.size());
  DenseMatrix q = DenseMatrix::Zero(m, m);
  Vector mu(m);
  for (Index a = 0; a < m; ++a) {
    const auto [i, j] = states[static_cast<std::size_t>(a)];
    mu(a) = pi(i) * p(i, j);
    for (Index b = 0; b < m; ++b) {
      const auto [k, l] = states[static_cast<std::size_t>(b)];
      if (j == k) q(a, b) = p(k, l);
    }
  }
  return PairChain{std::move(states), TransitionMatrix(std::move(q)), std::move(mu)};
}

TransitionMatrix frequency_to_transition(const FrequencyMatrix& fm) {
  const DenseMatrix& f = fm.matrix();
  const Index p = f.rows();
  DenseMatrix out(p, p);
  for (Index i = 0; i < p; ++i) {
    const double mass = f.row(i).sum();
    if (mass > 0.0) {
      out.row(i) = f.row(i) / mass;
      // Clean up rounding so rows satisfy the stochastic invariant tightly.
      out.row(i) /= out.row(i).sum();
    } else {
      out.row(i).setConstant(1.0 / static_cast<double>(p));
    }
  }
  return TransitionMatrix(out.cwiseMin(1.0));
}

std::pair<FrequencyMatrix, TransitionMatrix> finalize_estimate(const DenseMatrix& raw, ProjectionMode mode) {
  require_square(raw, "finalize_estimate");
  const DenseMatrix clamped = raw.cwiseMax(0.0).cwiseMin(1.0);
  DenseMatrix projected = project_simplex(clamped, mode);
  if (mode == ProjectionMode::Rowwise) {
    // Unit row sums give total mass p; rescale so the result is a frequency
    // matrix. The implied transition matrix is unaffected.
    projected /= static_cast<double>(projected.rows());
  }
  // Absorb the last rounding in the total.
  projected /= projected.sum();
  FrequencyMatrix f(std::move(projected));
  TransitionMatrix t = frequency_to_transition(f);
  return {std::move(f), std::move(t)};
}

TransitionEstimate estimate_transition(const Trajectory& traj, Index p, const SolverConfig& config,
                                       ProjectionMode mode) {
  const FrequencyMatrix empirical = empirical_frequency(traj, p);
  SolveResult fit = solve(empirical.matrix(), config);
  DenseMatrix raw = fit.low_rank.dense();
  fit.sparse.add_to(raw);
  auto [f, t] = finalize_estimate(raw, mode);
  return TransitionEstimate{std::move(f), std::move(t), std::move(fit)};
}

std::pair<FrequencyMatrix, TransitionMatrix> spectral_baseline(const FrequencyMatrix& empirical, Index rank,
                                                               ProjectionMode mode) {
  if (rank < 1 || rank > empirical.states()) throw ArgumentError("spectral_baseline: rank out of range");
  return finalize_estimate(thin_svd(empirical.matrix(), rank).dense(), mode);
}

Vector conditional_mean(const TransitionMatrix& p, const Vector& v) {
  if (v.size() != p.states()) throw ArgumentError("conditional_mean: vector length mismatch");
  return p.matrix() * v;
}

}  // namespace lrsm::markov
