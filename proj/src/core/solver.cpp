#include "lrsm/solver.hpp"

#include "lrsm/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

namespace lrsm {

using nlohmann::json;

void SolverConfig::validate(Index rows, Index cols) const {
  if (rank_bound < 1 || rank_bound > std::min(rows, cols))
    throw ArgumentError("solver config: rank_bound must lie in [1, min(p, q)]");
  if (sparsity_bound < 0 || sparsity_bound > rows * cols)
    throw ArgumentError("solver config: sparsity_bound must lie in [0, p*q]");
  if (!(incoherence_bound > 0.0) || !std::isfinite(incoherence_bound))
    throw ArgumentError("solver config: incoherence_bound must be positive");
  // Radius sqrt(mu r / p) is reachable by an orthonormal frame iff mu >= 1.
  if (method == Method::Method2 && incoherence_bound < 1.0)
    throw ArgumentError("solver config: Method2 needs incoherence_bound >= 1");
  if (max_iters < 1) throw ArgumentError("solver config: max_iters must be positive");
  if (!(stall_tol > 0.0)) throw ArgumentError("solver config: stall_tol must be positive");
}

SolverConfig parse_solver_config(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ArgumentError(std::string("solver config: invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ArgumentError("solver config: expected a JSON object");
  static const std::set<std::string> known = {"rank_bound", "sparsity_bound", "incoherence_bound",
                                              "method",     "max_iters",      "stall_tol",
                                              "seed"};
  for (auto it = doc.begin(); it != doc.end(); ++it)
    if (!known.count(it.key())) throw ArgumentError("solver config: unknown field '" + it.key() + "'");
  if (!doc.contains("rank_bound") || !doc.contains("sparsity_bound"))
    throw ArgumentError("solver config: rank_bound and sparsity_bound are required");

  SolverConfig cfg;
  try {
    cfg.rank_bound = doc.at("rank_bound").get<Index>();
    cfg.sparsity_bound = doc.at("sparsity_bound").get<Index>();
    if (doc.contains("incoherence_bound")) cfg.incoherence_bound = doc["incoherence_bound"].get<double>();
    if (doc.contains("max_iters")) cfg.max_iters = doc["max_iters"].get<int>();
    if (doc.contains("stall_tol")) cfg.stall_tol = doc["stall_tol"].get<double>();
    if (doc.contains("seed")) cfg.seed = doc["seed"].get<std::uint64_t>();
    if (doc.contains("method")) {
      const json& m = doc["method"];
      std::string tag = m.is_number_integer() ? std::to_string(m.get<int>()) : m.get<std::string>();
      if (tag == "Method1" || tag == "1" || tag == "method1")
        cfg.method = Method::Method1;
      else if (tag == "Method2" || tag == "2" || tag == "method2")
        cfg.method = Method::Method2;
      else
        throw ArgumentError("solver config: method must be Method1 or Method2");
    }
  } catch (const json::exception& e) {
    throw ArgumentError(std::string("solver config: ") + e.what());
  }
  return cfg;
}

std::string to_json(const SolverConfig& config) {
  json doc = {{"rank_bound", config.rank_bound},
              {"sparsity_bound", config.sparsity_bound},
              {"incoherence_bound", config.incoherence_bound},
              {"method", config.method == Method::Method1 ? "Method1" : "Method2"},
              {"max_iters", config.max_iters},
              {"stall_tol", config.stall_tol},
              {"seed", config.seed}};
  return doc.dump();
}

std::string to_json(const SolverReport& report) {
  auto reading = [](const IncoherenceReading& r) {
    return json{{"mu", r.mu}, {"max_row_norm", r.max_row_norm}};
  };
  json doc = {{"objective_trace", report.objective_trace},
              {"termination", report.termination == Termination::Stalled ? "stalled" : "max_iters"},
              {"iters_run", report.iters_run},
              {"final_incoherence", {{"U", reading(report.incoherence_U)}, {"V", reading(report.incoherence_V)}}},
              {"degenerate_frame_updates", report.degenerate_frame_updates}};
  return doc.dump();
}

namespace {

void check_shapes(const DenseMatrix& y, const FactoredLowRank& l) {
  if (l.rows() != y.rows() || l.cols() != y.cols() || l.U.cols() != l.rank() || l.V.cols() != l.rank())
    throw ArgumentError("objective: low-rank factor shape does not match observation");
}

DenseMatrix residual_without_s(const DenseMatrix& y, const SolverState& state) {
  return y - state.U * state.sigma.asDiagonal() * state.V.transpose();
}

DenseMatrix y_minus_s(const DenseMatrix& y, const SparseEntrySet& s) {
  DenseMatrix r = y;
  s.add_to(r, -1.0);
  return r;
}

// Polar update of one frame. Returns the previous frame when the argument is
// identically zero.
DenseMatrix frame_step(const DenseMatrix& target, const DenseMatrix& previous, bool& degenerate) {
  degenerate = target.size() == 0 || target.cwiseAbs().maxCoeff() == 0.0;
  if (degenerate) return previous;
  return matrix_sign(target).value;
}

double sparse_change(const SparseEntrySet& a, const SparseEntrySet& b) {
  // Both are sorted row-major; merge.
  const auto& ea = a.entries();
  const auto& eb = b.entries();
  std::size_t i = 0, j = 0;
  double acc = 0.0;
  auto key = [&](const SparseEntry& e) { return e.row * a.cols() + e.col; };
  while (i < ea.size() || j < eb.size()) {
    if (j == eb.size() || (i < ea.size() && key(ea[i]) < key(eb[j]))) {
      acc += ea[i].value * ea[i].value;
      ++i;
    } else if (i == ea.size() || key(eb[j]) < key(ea[i])) {
      acc += eb[j].value * eb[j].value;
      ++j;
    } else {
      const double d = ea[i].value - eb[j].value;
      acc += d * d;
      ++i;
      ++j;
    }
  }
  return std::sqrt(acc);
}

}  // namespace

double objective(const DenseMatrix& y, const FactoredLowRank& l, const SparseEntrySet& s) {
  check_shapes(y, l);
  if (s.rows() != y.rows() || s.cols() != y.cols())
    throw ArgumentError("objective: sparse part shape does not match observation");
  DenseMatrix r = y - l.dense();
  s.add_to(r, -1.0);
  return 0.5 * r.squaredNorm();
}

double profiled_objective(const DenseMatrix& y, const FactoredLowRank& l, Index sparsity) {
  check_shapes(y, l);
  const DenseMatrix r = y - l.dense();
  const double total = r.squaredNorm();
  if (sparsity >= r.size()) return 0.0;
  return std::max(0.0, 0.5 * total - 0.5 * top_squared_sum(r, sparsity));
}

SparseEntrySet update_S(const DenseMatrix& y, const SolverState& state, Index sparsity) {
  return hard_threshold(residual_without_s(y, state), sparsity);
}

Vector update_Sigma(const DenseMatrix& y, const SolverState& state) {
  const DenseMatrix r = y_minus_s(y, state.S);
  return (state.U.transpose() * r * state.V).diagonal();
}

double incoherence_radius(double mu_bar, Index rank, Index dim) {
  return std::sqrt(mu_bar * static_cast<double>(rank) / static_cast<double>(dim));
}

FrameUpdate update_frames(const DenseMatrix& y, const SolverState& state, const SolverConfig& config) {
  const DenseMatrix r = y_minus_s(y, state.S);
  Vector sigma = state.sigma;
  DenseMatrix v = state.V;
  for (Index i = 0; i < sigma.size(); ++i) {
    if (sigma(i) < 0.0) {
      sigma(i) = -sigma(i);
      v.col(i) = -v.col(i);
    }
  }

  FrameUpdate out;
  const DenseMatrix gu = r * v * sigma.asDiagonal();
  out.U = frame_step(gu, state.U, out.degenerate_U);
  if (config.method == Method::Method2 && !out.degenerate_U) {
    DenseMatrix projected = project_rows_incoherent(out.U, incoherence_radius(config.incoherence_bound,
                                                                              out.U.cols(), out.U.rows()));
    // The projection is a heuristic for the constrained polar problem; keep
    // the previous (feasible) frame if it scores better.
    out.U = (gu.cwiseProduct(projected).sum() >= gu.cwiseProduct(state.U).sum()) ? projected : state.U;
  }

  const DenseMatrix gv = r.transpose() * out.U * sigma.asDiagonal();
  out.V = frame_step(gv, v, out.degenerate_V);
  if (config.method == Method::Method2 && !out.degenerate_V) {
    DenseMatrix projected = project_rows_incoherent(out.V, incoherence_radius(config.incoherence_bound,
                                                                              out.V.cols(), out.V.rows()));
    out.V = (gv.cwiseProduct(projected).sum() >= gv.cwiseProduct(v).sum()) ? projected : v;
  }
  return out;
}

SolveResult solve(const DenseMatrix& y, const SolverConfig& config, const SolveObserver& observer) {
  require_finite(y, "solve");
  config.validate(y.rows(), y.cols());
  const Index p = y.rows();
  const Index q = y.cols();
  const Index r = config.rank_bound;

  // Frames start at the top-r singular frames of Y (the all-zero start is a
  // fixed point of the Sigma and frame updates).
  SolverState state;
  {
    FactoredLowRank init = thin_svd(y, r);
    state.U = init.U;
    state.V = init.V;
  }
  if (config.method == Method::Method2) {
    state.U = project_rows_incoherent(state.U, incoherence_radius(config.incoherence_bound, r, p));
    state.V = project_rows_incoherent(state.V, incoherence_radius(config.incoherence_bound, r, q));
  }
  state.S = SparseEntrySet(p, q);
  state.sigma = update_Sigma(y, state);

  SolveResult result;
  SolverReport& report = result.report;
  for (int k = 1; k <= config.max_iters; ++k) {
    const SparseEntrySet previous_s = state.S;
    const DenseMatrix previous_l = state.low_rank().dense();

    state.S = update_S(y, state, config.sparsity_bound);
    state.sigma = update_Sigma(y, state);
    FrameUpdate frames = update_frames(y, state, config);
    // update_frames folded negative sigma into V.
    state.sigma = state.sigma.cwiseAbs();
    state.U = std::move(frames.U);
    state.V = std::move(frames.V);
    state.iter = k;
    report.degenerate_frame_updates += int(frames.degenerate_U) + int(frames.degenerate_V);

    report.objective_trace.push_back(objective(y, state.low_rank(), state.S));
    report.iters_run = k;
    if (observer) observer(state);

    const double s_norm = std::sqrt(state.S.squared_norm());
    bool stalled;
    if (s_norm == 0.0 && previous_s.empty()) {
      // Sparse part identically zero; fall back to the change in L.
      const DenseMatrix l = state.low_rank().dense();
      const double l_norm = l.norm();
      const double l_change = (l - previous_l).norm();
      stalled = l_change <= config.stall_tol * std::max(l_norm, 1e-300) || l_norm == 0.0;
    } else {
      stalled = sparse_change(state.S, previous_s) <= config.stall_tol * s_norm;
    }
    if (stalled) {
      report.termination = Termination::Stalled;
      break;
    }
  }

  // Nonnegative, nonincreasing sigma with matched column permutations.
  std::vector<Index> order(static_cast<std::size_t>(r));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Index a, Index b) { return state.sigma(a) > state.sigma(b); });
  FactoredLowRank& l = result.low_rank;
  l.U.resize(p, r);
  l.V.resize(q, r);
  l.sigma.resize(r);
  for (Index c = 0; c < r; ++c) {
    const Index src = order[static_cast<std::size_t>(c)];
    l.U.col(c) = state.U.col(src);
    l.V.col(c) = state.V.col(src);
    l.sigma(c) = state.sigma(src);
  }
  result.sparse = std::move(state.S);
  report.incoherence_U = incoherence(l.U);
  report.incoherence_V = incoherence(l.V);
  return result;
}

Certificate certificate_check(const DenseMatrix& y, const FactoredLowRank& l_hat,
                              const SparseEntrySet& s_hat, const FactoredLowRank& l_star,
                              const SparseEntrySet& s_star, const SolverConfig& config) {
  Certificate cert;
  cert.objective_hat = objective(y, l_hat, s_hat);
  cert.objective_star = objective(y, l_star, s_star);

  const double mu_tol = 1e-9;
  auto feasible = [&](const FactoredLowRank& l, const SparseEntrySet& s) {
    if (l.rank() > config.rank_bound) return false;
    if (static_cast<Index>(s.size()) > config.sparsity_bound) return false;
    if (l.rank() == 0) return true;
    return incoherence(l.U).mu <= config.incoherence_bound + mu_tol &&
           incoherence(l.V).mu <= config.incoherence_bound + mu_tol;
  };
  cert.applicable = cert.objective_hat <= cert.objective_star && feasible(l_hat, s_hat) &&
                    feasible(l_star, s_star);

  DenseMatrix w = y - l_star.dense();
  s_star.add_to(w, -1.0);
  const double w_spec = spectral_norm(w);
  const double w_max = w.size() ? w.cwiseAbs().maxCoeff() : 0.0;
  cert.rhs = 128.0 * (static_cast<double>(config.rank_bound) * w_spec * w_spec +
                      static_cast<double>(config.sparsity_bound) * w_max * w_max);
  const DenseMatrix dl = l_hat.dense() - l_star.dense();
  DenseMatrix ds = s_hat.dense();
  s_star.add_to(ds, -1.0);
  cert.lhs = dl.squaredNorm() + ds.squaredNorm();
  cert.holds = cert.lhs <= cert.rhs;
  return cert;
}

}  // namespace lrsm
