#include "lrsm/error.hpp"
#include "lrsm/solver.hpp"
#include "lrsm/synth.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace lrsm;

namespace {

SolverState state_from(const FactoredLowRank& l, SparseEntrySet s) {
  SolverState st;
  st.U = l.U;
  st.sigma = l.sigma;
  st.V = l.V;
  st.S = std::move(s);
  return st;
}

DenseMatrix noisy_instance(Index p, Index q, Index r, Index s, std::uint64_t seed, double noise) {
  std::mt19937_64 gen(seed);
  DenseMatrix y = oracle::random_matrix(p, r, gen, 0.0, 1.0) * oracle::random_matrix(r, q, gen, 0.0, 1.0);
  std::uniform_int_distribution<Index> row(0, p - 1), col(0, q - 1);
  for (Index k = 0; k < s; ++k) y(row(gen), col(gen)) += 1.0;
  return y + noise * oracle::random_matrix(p, q, gen);
}

double max_gram_deviation(const DenseMatrix& f) {
  return (f.transpose() * f - DenseMatrix::Identity(f.cols(), f.cols())).cwiseAbs().maxCoeff();
}

// Largest principal-angle sine between the column spaces of two frames,
// read off the component of b orthogonal to a.
double subspace_gap(const DenseMatrix& a, const DenseMatrix& b) {
  const DenseMatrix off = b - a * (a.transpose() * b);
  return oracle::jacobi_singular_values(off).maxCoeff();
}

}  // namespace

TEST(Objective, ExactDecompositionIsZero) {
  std::mt19937_64 gen(1);
  const FactoredLowRank l{oracle::random_frame(6, 2, gen), Eigen::Vector2d(3, 1), oracle::random_frame(5, 2, gen)};
  const SparseEntrySet s(6, 5, {{1, 1, 2.0}, {4, 0, -1.0}});
  DenseMatrix y = l.dense();
  s.add_to(y);
  EXPECT_NEAR(objective(y, l, s), 0.0, 1e-25);
}

TEST(Objective, SingleSpikeAgainstZero) {
  const SparseEntrySet s(3, 3, {{0, 0, 2.0}});
  EXPECT_DOUBLE_EQ(objective(DenseMatrix::Zero(3, 3), FactoredLowRank::zero(3, 3, 1), s), 2.0);
}

TEST(Objective, MatchesNaiveLoop) {
  std::mt19937_64 gen(2);
  const DenseMatrix y = oracle::random_matrix(4, 7, gen);
  const FactoredLowRank l{oracle::random_frame(4, 2, gen), Eigen::Vector2d(0.5, -0.2), oracle::random_frame(7, 2, gen)};
  const SparseEntrySet s(4, 7, {{3, 6, 0.7}});
  const DenseMatrix ld = oracle::naive_product(oracle::naive_product(l.U, l.sigma.asDiagonal().toDenseMatrix()),
                                               l.V.transpose());
  EXPECT_NEAR(objective(y, l, s), oracle::naive_objective(y, ld, s.dense()), 1e-13);
}

TEST(Objective, ShapeMismatchIsArgumentError) {
  EXPECT_THROW(objective(DenseMatrix::Zero(3, 3), FactoredLowRank::zero(3, 2, 1), SparseEntrySet(3, 3)),
               ArgumentError);
  EXPECT_THROW(objective(DenseMatrix::Zero(3, 3), FactoredLowRank::zero(3, 3, 1), SparseEntrySet(3, 2)),
               ArgumentError);
}

TEST(ProfiledObjective, Endpoints) {
  std::mt19937_64 gen(3);
  const DenseMatrix y = oracle::random_matrix(3, 4, gen);
  const FactoredLowRank l = FactoredLowRank::zero(3, 4, 1);
  EXPECT_EQ(profiled_objective(y, l, 12), 0.0);
  EXPECT_NEAR(profiled_objective(y, l, 0), 0.5 * y.squaredNorm(), 1e-14);
}

TEST(ProfiledObjective, EqualsMinimumOverSupportsOn3x3) {
  std::mt19937_64 gen(4);
  for (int trial = 0; trial < 100; ++trial) {
    const DenseMatrix y = oracle::random_matrix(3, 3, gen);
    const FactoredLowRank l{oracle::random_frame(3, 1, gen), Vector::Constant(1, 0.7), oracle::random_frame(3, 1, gen)};
    const DenseMatrix r = y - l.dense();
    const auto best = oracle::best_support_mass(r);
    for (Index s = 0; s <= 9; ++s) {
      const double brute = 0.5 * (r.squaredNorm() - best[static_cast<std::size_t>(s)]);
      EXPECT_NEAR(profiled_objective(y, l, s), std::max(0.0, brute), 1e-12);
    }
  }
}

TEST(UpdateS, Endpoints) {
  const FactoredLowRank l = FactoredLowRank::zero(3, 3, 1);
  EXPECT_TRUE(update_S(DenseMatrix::Zero(3, 3), state_from(l, SparseEntrySet(3, 3)), 4).empty());
  EXPECT_TRUE(update_S(DenseMatrix::Ones(3, 3), state_from(l, SparseEntrySet(3, 3)), 0).empty());
}

TEST(UpdateS, BeatsRandomSparseAlternatives) {
  std::mt19937_64 gen(5);
  for (int trial = 0; trial < 20; ++trial) {
    const DenseMatrix y = oracle::random_matrix(5, 4, gen, -2.0, 2.0);
    const FactoredLowRank l{oracle::random_frame(5, 2, gen), Eigen::Vector2d(1.0, 0.3), oracle::random_frame(4, 2, gen)};
    const Index s = 3;
    const SparseEntrySet best = update_S(y, state_from(l, SparseEntrySet(5, 4)), s);
    EXPECT_LE(static_cast<Index>(best.size()), s);
    const double f = objective(y, l, best);
    std::uniform_int_distribution<Index> coord(0, 19);
    std::uniform_real_distribution<double> val(-2.0, 2.0);
    for (int alt = 0; alt < 500; ++alt) {
      std::vector<SparseEntry> entries;
      std::vector<bool> used(20, false);
      for (Index k = 0; k < s; ++k) {
        const Index c = coord(gen);
        if (used[static_cast<std::size_t>(c)]) continue;
        used[static_cast<std::size_t>(c)] = true;
        entries.push_back({c / 4, c % 4, val(gen)});
      }
      EXPECT_LE(f, objective(y, l, SparseEntrySet(5, 4, entries)) + 1e-12);
    }
  }
}

TEST(UpdateSigma, RecoversExactDiagonal) {
  std::mt19937_64 gen(6);
  const FactoredLowRank l{oracle::random_frame(8, 3, gen), Eigen::Vector3d(2.0, -1.0, 0.5), oracle::random_frame(6, 3, gen)};
  const SparseEntrySet s(8, 6, {{0, 0, 1.5}});
  DenseMatrix y = l.dense();
  s.add_to(y);
  EXPECT_LE((update_Sigma(y, state_from(l, s)) - l.sigma).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LE(update_Sigma(s.dense(), state_from(l, s)).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(UpdateFrames, ExactFactorizationRecoversColumnSpaces) {
  std::mt19937_64 gen(7);
  const FactoredLowRank truth{oracle::random_frame(20, 3, gen), Eigen::Vector3d(3.0, 2.0, 1.0),
                              oracle::random_frame(15, 3, gen)};
  const SparseEntrySet s(20, 15, {{2, 3, 4.0}});
  DenseMatrix y = truth.dense();
  s.add_to(y);
  // Start from a perturbed frame pair that still overlaps the truth.
  SolverState st = state_from(truth, s);
  st.U = matrix_sign(truth.U + 0.1 * oracle::random_matrix(20, 3, gen)).value;
  st.V = matrix_sign(truth.V + 0.1 * oracle::random_matrix(15, 3, gen)).value;
  SolverConfig cfg;
  cfg.rank_bound = 3;
  cfg.sparsity_bound = 1;
  for (int k = 0; k < 200; ++k) {
    st.sigma = update_Sigma(y, st);
    FrameUpdate f = update_frames(y, st, cfg);
    st.sigma = st.sigma.cwiseAbs();
    st.U = f.U;
    st.V = f.V;
  }
  EXPECT_LE(subspace_gap(st.U, truth.U), 1e-8);
  EXPECT_LE(subspace_gap(st.V, truth.V), 1e-8);
}

TEST(UpdateFrames, ZeroResidualKeepsFramesAndFlags) {
  std::mt19937_64 gen(8);
  const FactoredLowRank l{oracle::random_frame(5, 2, gen), Eigen::Vector2d(1, 1), oracle::random_frame(5, 2, gen)};
  const SparseEntrySet s(5, 5, {{1, 1, 1.0}});
  const FrameUpdate f = update_frames(s.dense(), state_from(l, s), SolverConfig{2, 1});
  EXPECT_TRUE(f.degenerate_U);
  EXPECT_TRUE(f.degenerate_V);
  EXPECT_TRUE(f.U.isApprox(l.U, 0.0));
  EXPECT_TRUE(f.V.isApprox(l.V, 0.0));
}

TEST(BlockUpdates, EachStepIsNonincreasing) {
  for (Method method : {Method::Method1, Method::Method2}) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const DenseMatrix y = noisy_instance(12, 9, 2, 6, 100 + seed, 0.05);
      SolverConfig cfg;
      cfg.rank_bound = 2;
      cfg.sparsity_bound = 6;
      cfg.method = method;
      std::mt19937_64 gen(seed);
      SolverState st;
      st.U = flat_frame(12, 2);
      st.V = flat_frame(9, 2);
      st.sigma = Eigen::Vector2d(0.3, -0.4);
      st.S = SparseEntrySet(12, 9);
      double f = objective(y, st.low_rank(), st.S);
      for (int k = 0; k < 15; ++k) {
        st.S = update_S(y, st, cfg.sparsity_bound);
        const double after_s = objective(y, st.low_rank(), st.S);
        EXPECT_LE(after_s, f + 1e-9);
        st.sigma = update_Sigma(y, st);
        const double after_sigma = objective(y, st.low_rank(), st.S);
        EXPECT_LE(after_sigma, after_s + 1e-9);
        FrameUpdate fr = update_frames(y, st, cfg);
        st.sigma = st.sigma.cwiseAbs();
        st.U = fr.U;
        st.V = fr.V;
        f = objective(y, st.low_rank(), st.S);
        EXPECT_LE(f, after_sigma + 1e-9);
        EXPECT_LE(max_gram_deviation(st.U), 1e-8);
        EXPECT_LE(max_gram_deviation(st.V), 1e-8);
      }
    }
  }
}

TEST(Solve, ZeroInputGivesZeroOutput) {
  SolverConfig cfg;
  cfg.rank_bound = 2;
  cfg.sparsity_bound = 3;
  const SolveResult res = solve(DenseMatrix::Zero(6, 6), cfg);
  EXPECT_EQ(res.low_rank.dense().cwiseAbs().maxCoeff(), 0.0);
  EXPECT_TRUE(res.sparse.empty());
}

TEST(Solve, ObjectiveTraceNonincreasingOn50Instances) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    synth::InstanceSpec spec;
    spec.p = 30;
    spec.r = 2;
    spec.s = 30;
    spec.seed = seed;
    const auto inst = synth::gen_lowrank_sparse(spec);
    const DenseMatrix y = inst.m + synth::noise_gaussian(30, 30, 1e-2, seed + 1000);
    SolverConfig cfg;
    cfg.rank_bound = 2;
    cfg.sparsity_bound = 30;
    cfg.method = seed % 2 ? Method::Method2 : Method::Method1;
    cfg.max_iters = 100;
    const SolveResult res = solve(y, cfg, [&](const SolverState& st) {
      ASSERT_LE(static_cast<Index>(st.S.size()), cfg.sparsity_bound);
      ASSERT_LE(max_gram_deviation(st.U), 1e-8);
      ASSERT_LE(max_gram_deviation(st.V), 1e-8);
    });
    const auto& trace = res.report.objective_trace;
    ASSERT_FALSE(trace.empty());
    for (std::size_t k = 1; k < trace.size(); ++k) EXPECT_LE(trace[k], trace[k - 1] + 1e-9) << "seed " << seed;
  }
}

TEST(Solve, ExitSigmaSortedNonnegativeAndFeasible) {
  const DenseMatrix y = noisy_instance(25, 25, 3, 20, 9, 0.01);
  SolverConfig cfg;
  cfg.rank_bound = 3;
  cfg.sparsity_bound = 20;
  cfg.method = Method::Method2;
  cfg.incoherence_bound = 4.0;
  const SolveResult res = solve(y, cfg);
  for (Index k = 0; k < 3; ++k) EXPECT_GE(res.low_rank.sigma(k), 0.0);
  for (Index k = 0; k + 1 < 3; ++k) EXPECT_GE(res.low_rank.sigma(k), res.low_rank.sigma(k + 1));
  EXPECT_LE(res.report.incoherence_U.mu, 4.0 + 1e-6);
  EXPECT_LE(res.report.incoherence_V.mu, 4.0 + 1e-6);
  EXPECT_LE(static_cast<Index>(res.sparse.size()), 20);
}

TEST(Solve, RectangularInputs) {
  for (auto [p, q] : {std::pair<Index, Index>{20, 35}, {35, 20}}) {
    const DenseMatrix y = noisy_instance(p, q, 2, 10, 10, 0.0);
    SolverConfig cfg;
    cfg.rank_bound = 2;
    cfg.sparsity_bound = 10;
    const SolveResult res = solve(y, cfg);
    EXPECT_EQ(res.low_rank.rows(), p);
    EXPECT_EQ(res.low_rank.cols(), q);
    const auto& trace = res.report.objective_trace;
    for (std::size_t k = 1; k < trace.size(); ++k) EXPECT_LE(trace[k], trace[k - 1] + 1e-9);
    EXPECT_LE(max_gram_deviation(res.low_rank.U), 1e-8);
    EXPECT_LE(max_gram_deviation(res.low_rank.V), 1e-8);
  }
}

TEST(Solve, DeterministicGivenConfig) {
  const DenseMatrix y = noisy_instance(15, 15, 2, 5, 11, 0.02);
  SolverConfig cfg;
  cfg.rank_bound = 2;
  cfg.sparsity_bound = 5;
  const SolveResult a = solve(y, cfg), b = solve(y, cfg);
  EXPECT_EQ(a.report.objective_trace, b.report.objective_trace);
  EXPECT_EQ(a.sparse.entries(), b.sparse.entries());
}

TEST(Solve, NonFiniteInputRejected) {
  DenseMatrix y = DenseMatrix::Zero(3, 3);
  y(0, 0) = std::numeric_limits<double>::infinity();
  EXPECT_THROW(solve(y, SolverConfig{}), ArgumentError);
}

TEST(SolverConfig, ValidateBounds) {
  SolverConfig cfg;
  cfg.rank_bound = 4;
  EXPECT_THROW(cfg.validate(3, 5), ArgumentError);
  cfg.rank_bound = 1;
  cfg.sparsity_bound = 16;
  EXPECT_THROW(cfg.validate(3, 5), ArgumentError);
  cfg.sparsity_bound = 15;
  EXPECT_NO_THROW(cfg.validate(3, 5));
}

TEST(SolverConfig, JsonRoundTripAndUnknownFields) {
  const SolverConfig cfg = parse_solver_config(
      R"({"rank_bound": 3, "sparsity_bound": 7, "incoherence_bound": 2.5, "method": "Method2", "max_iters": 40, "seed": 9})");
  EXPECT_EQ(cfg.rank_bound, 3);
  EXPECT_EQ(cfg.sparsity_bound, 7);
  EXPECT_EQ(cfg.method, Method::Method2);
  EXPECT_EQ(cfg.max_iters, 40);
  EXPECT_EQ(cfg.seed, 9u);
  EXPECT_DOUBLE_EQ(cfg.stall_tol, 1e-10);
  const SolverConfig back = parse_solver_config(to_json(cfg));
  EXPECT_EQ(back.incoherence_bound, 2.5);
  EXPECT_EQ(back.method, Method::Method2);
  EXPECT_THROW(parse_solver_config(R"({"rank_bound": 1, "sparsity_bound": 0, "rank": 2})"), ArgumentError);
  EXPECT_THROW(parse_solver_config(R"({"rank_bound": 1})"), ArgumentError);
  EXPECT_THROW(parse_solver_config("not json"), ArgumentError);
  EXPECT_THROW(parse_solver_config(R"({"rank_bound": 1, "sparsity_bound": 0, "method": "Method3"})"), ArgumentError);
}

TEST(Certificate, NoiselessTruthHoldsWithZeroBound) {
  std::mt19937_64 gen(12);
  const FactoredLowRank l{flat_frame(10, 1), Vector::Constant(1, 2.0), flat_frame(10, 1)};
  const SparseEntrySet s(10, 10, {{1, 2, 1.0}});
  DenseMatrix y = l.dense();
  s.add_to(y);
  SolverConfig cfg{1, 1};
  const Certificate c = certificate_check(y, l, s, l, s, cfg);
  EXPECT_TRUE(c.applicable);
  EXPECT_EQ(c.lhs, 0.0);
  EXPECT_NEAR(c.rhs, 0.0, 1e-20);
  EXPECT_TRUE(c.holds);
}

TEST(Certificate, WorseObjectiveIsNotApplicable) {
  const FactoredLowRank l{flat_frame(8, 1), Vector::Constant(1, 1.0), flat_frame(8, 1)};
  const SparseEntrySet s(8, 8);
  const DenseMatrix y = l.dense();
  const FactoredLowRank off{flat_frame(8, 1), Vector::Constant(1, 0.5), flat_frame(8, 1)};
  const Certificate c = certificate_check(y, off, s, l, s, SolverConfig{1, 0});
  EXPECT_FALSE(c.applicable);
  EXPECT_GT(c.objective_hat, c.objective_star);
}

TEST(Certificate, InfeasibleEstimateIsNotApplicable) {
  DenseMatrix u = DenseMatrix::Zero(8, 1);
  u(0, 0) = 1.0;
  const FactoredLowRank spiky{u, Vector::Constant(1, 1.0), u};
  const SparseEntrySet s(8, 8);
  SolverConfig cfg{1, 0};
  cfg.incoherence_bound = 2.0;
  const Certificate c = certificate_check(spiky.dense(), spiky, s, FactoredLowRank{flat_frame(8, 1), Vector::Constant(1, 0.1), flat_frame(8, 1)}, s, cfg);
  EXPECT_FALSE(c.applicable);
}
