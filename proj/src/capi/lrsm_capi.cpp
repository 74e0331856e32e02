#include "lrsm/lrsm.h"

#include "lrsm/applications.hpp"
#include "lrsm/error.hpp"
#include "lrsm/harness.hpp"
#include "lrsm/io.hpp"
#include "lrsm/markov.hpp"
#include "lrsm/solver.hpp"

#include <json.hpp>

#include <cstring>
#include <fstream>
#include <new>
#include <string>

struct lrsm_matrix {
  lrsm::DenseMatrix m;
};
struct lrsm_sparse {
  lrsm::SparseEntrySet s;
};
struct lrsm_lowrank {
  lrsm::FactoredLowRank l;
};
struct lrsm_report {
  std::string json;
};
struct lrsm_trajectory {
  lrsm::markov::Trajectory t;
};

namespace {

using nlohmann::ordered_json;

thread_local std::string g_last_error;

template <class F>
lrsm_status guarded(F&& body) {
  try {
    body();
    g_last_error.clear();
    return LRSM_OK;
  } catch (const lrsm::ArgumentError& e) {
    g_last_error = e.what();
    return LRSM_ERR_ARGUMENT;
  } catch (const lrsm::NumericError& e) {
    g_last_error = e.what();
    return LRSM_ERR_NUMERIC;
  } catch (const lrsm::StructureError& e) {
    g_last_error = e.what();
    return LRSM_ERR_STRUCTURE;
  } catch (const lrsm::IoError& e) {
    g_last_error = e.what();
    return LRSM_ERR_IO;
  } catch (const nlohmann::json::exception& e) {
    g_last_error = e.what();
    return LRSM_ERR_ARGUMENT;
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return LRSM_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return LRSM_ERR_INTERNAL;
  }
}

void require(bool ok, const char* what) {
  if (!ok) throw lrsm::ArgumentError(what);
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

lrsm::SolverConfig config_from(const char* config_json) {
  require(config_json != nullptr, "config_json is NULL");
  return lrsm::parse_solver_config(config_json);
}

// Solver report extended with caller-specific fields.
std::string report_json(const lrsm::SolverReport& report, const ordered_json& extra) {
  ordered_json doc = ordered_json::parse(lrsm::to_json(report));
  for (auto it = extra.begin(); it != extra.end(); ++it) doc[it.key()] = it.value();
  return doc.dump();
}

template <class Handle, class Value>
void emit(Handle** slot, Value&& value) {
  if (slot) *slot = new Handle{std::forward<Value>(value)};
}

}  // namespace

extern "C" {

const char* lrsm_last_error(void) { return g_last_error.c_str(); }

const char* lrsm_status_name(lrsm_status status) {
  switch (status) {
    case LRSM_OK: return "ok";
    case LRSM_ERR_ARGUMENT: return "argument error";
    case LRSM_ERR_NUMERIC: return "numeric error";
    case LRSM_ERR_STRUCTURE: return "structure error";
    case LRSM_ERR_IO: return "io error";
    case LRSM_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* lrsm_version(void) { return "0.1.0"; }

void lrsm_string_free(char* s) { std::free(s); }

lrsm_status lrsm_matrix_create(size_t rows, size_t cols, const double* data, lrsm_matrix** out) {
  return guarded([&] {
    require(out != nullptr, "output handle is NULL");
    require(rows > 0 && cols > 0, "matrix dimensions must be positive");
    lrsm::DenseMatrix m(static_cast<lrsm::Index>(rows), static_cast<lrsm::Index>(cols));
    if (data) {
      for (size_t i = 0; i < rows; ++i)
        for (size_t j = 0; j < cols; ++j) m(static_cast<lrsm::Index>(i), static_cast<lrsm::Index>(j)) = data[i * cols + j];
    } else {
      m.setZero();
    }
    *out = new lrsm_matrix{std::move(m)};
  });
}

lrsm_status lrsm_matrix_load_csv(const char* path, lrsm_matrix** out) {
  return guarded([&] {
    require(path && out, "NULL argument");
    *out = new lrsm_matrix{lrsm::io::load_dense(path)};
  });
}

lrsm_status lrsm_matrix_save_csv(const lrsm_matrix* m, const char* path) {
  return guarded([&] {
    require(m && path, "NULL argument");
    lrsm::io::save_dense(path, m->m);
  });
}

size_t lrsm_matrix_rows(const lrsm_matrix* m) { return m ? static_cast<size_t>(m->m.rows()) : 0; }
size_t lrsm_matrix_cols(const lrsm_matrix* m) { return m ? static_cast<size_t>(m->m.cols()) : 0; }

lrsm_status lrsm_matrix_copy_data(const lrsm_matrix* m, double* buffer, size_t capacity) {
  return guarded([&] {
    require(m && buffer, "NULL argument");
    const size_t rows = static_cast<size_t>(m->m.rows());
    const size_t cols = static_cast<size_t>(m->m.cols());
    require(capacity >= rows * cols, "buffer too small");
    for (size_t i = 0; i < rows; ++i)
      for (size_t j = 0; j < cols; ++j)
        buffer[i * cols + j] = m->m(static_cast<lrsm::Index>(i), static_cast<lrsm::Index>(j));
  });
}

void lrsm_matrix_free(lrsm_matrix* m) { delete m; }

size_t lrsm_sparse_nnz(const lrsm_sparse* s) { return s ? s->s.size() : 0; }

lrsm_status lrsm_sparse_entry(const lrsm_sparse* s, size_t k, size_t* row, size_t* col, double* value) {
  return guarded([&] {
    require(s != nullptr, "NULL argument");
    require(k < s->s.size(), "entry index out of range");
    const auto& e = s->s.entries()[k];
    if (row) *row = static_cast<size_t>(e.row);
    if (col) *col = static_cast<size_t>(e.col);
    if (value) *value = e.value;
  });
}

lrsm_status lrsm_sparse_save_csv(const lrsm_sparse* s, const char* path) {
  return guarded([&] {
    require(s && path, "NULL argument");
    lrsm::io::save_sparse(path, s->s);
  });
}

void lrsm_sparse_free(lrsm_sparse* s) { delete s; }

size_t lrsm_lowrank_rank(const lrsm_lowrank* l) { return l ? static_cast<size_t>(l->l.rank()) : 0; }

lrsm_status lrsm_lowrank_sigma(const lrsm_lowrank* l, double* buffer, size_t capacity) {
  return guarded([&] {
    require(l && buffer, "NULL argument");
    const size_t r = static_cast<size_t>(l->l.rank());
    require(capacity >= r, "buffer too small");
    for (size_t k = 0; k < r; ++k) buffer[k] = l->l.sigma(static_cast<lrsm::Index>(k));
  });
}

lrsm_status lrsm_lowrank_to_dense(const lrsm_lowrank* l, lrsm_matrix** out) {
  return guarded([&] {
    require(l && out, "NULL argument");
    *out = new lrsm_matrix{l->l.dense()};
  });
}

void lrsm_lowrank_free(lrsm_lowrank* l) { delete l; }

lrsm_status lrsm_report_to_json(const lrsm_report* r, char** out_json) {
  return guarded([&] {
    require(r && out_json, "NULL argument");
    *out_json = dup_string(r->json);
  });
}

void lrsm_report_free(lrsm_report* r) { delete r; }

lrsm_status lrsm_solve(const lrsm_matrix* y, const char* config_json, lrsm_lowrank** low_rank,
                       lrsm_sparse** sparse, lrsm_report** report) {
  return guarded([&] {
    require(y != nullptr, "input matrix is NULL");
    const lrsm::SolverConfig cfg = config_from(config_json);
    lrsm::SolveResult fit = lrsm::solve(y->m, cfg);
    lrsm::DenseMatrix est = fit.low_rank.dense();
    fit.sparse.add_to(est);
    ordered_json extra;
    extra["residual_fro"] = (est - y->m).norm();
    extra["rank"] = fit.low_rank.rank();
    extra["sparse_nnz"] = fit.sparse.size();
    extra["objective"] = lrsm::objective(y->m, fit.low_rank, fit.sparse);
    std::string json = report_json(fit.report, extra);
    emit(report, std::move(json));
    emit(low_rank, std::move(fit.low_rank));
    emit(sparse, std::move(fit.sparse));
  });
}

lrsm_status lrsm_markov_simulate(const lrsm_matrix* transition, size_t n, int64_t init_state, uint64_t seed,
                                 lrsm_trajectory** out) {
  return guarded([&] {
    require(transition && out, "NULL argument");
    const lrsm::markov::TransitionMatrix p(transition->m);
    lrsm::markov::InitialDistribution init = lrsm::markov::StationaryInit{};
    if (init_state >= 0) init = lrsm::markov::FixedInit{static_cast<lrsm::Index>(init_state)};
    *out = new lrsm_trajectory{lrsm::markov::simulate_chain(p, n, init, seed)};
  });
}

lrsm_status lrsm_trajectory_create(const int64_t* states, size_t length, lrsm_trajectory** out) {
  return guarded([&] {
    require(states && out, "NULL argument");
    lrsm::markov::Trajectory t;
    t.states.assign(states, states + length);
    *out = new lrsm_trajectory{std::move(t)};
  });
}

lrsm_status lrsm_trajectory_load(const char* path, lrsm_trajectory** out) {
  return guarded([&] {
    require(path && out, "NULL argument");
    std::ifstream in(path);
    if (!in) throw lrsm::IoError(std::string("cannot open '") + path + "'");
    lrsm::markov::Trajectory t;
    t.states = lrsm::io::read_states(in);
    *out = new lrsm_trajectory{std::move(t)};
  });
}

lrsm_status lrsm_trajectory_save(const lrsm_trajectory* t, const char* path) {
  return guarded([&] {
    require(t && path, "NULL argument");
    std::ofstream os(path);
    if (!os) throw lrsm::IoError(std::string("cannot open '") + path + "' for writing");
    lrsm::io::write_states(os, t->t.states);
    if (!os) throw lrsm::IoError(std::string("failed writing '") + path + "'");
  });
}

size_t lrsm_trajectory_length(const lrsm_trajectory* t) { return t ? t->t.states.size() : 0; }

lrsm_status lrsm_trajectory_states(const lrsm_trajectory* t, int64_t* buffer, size_t capacity) {
  return guarded([&] {
    require(t && buffer, "NULL argument");
    require(capacity >= t->t.states.size(), "buffer too small");
    std::copy(t->t.states.begin(), t->t.states.end(), buffer);
  });
}

void lrsm_trajectory_free(lrsm_trajectory* t) { delete t; }

lrsm_status lrsm_markov_estimate(const lrsm_trajectory* t, size_t states, const char* config_json,
                                 lrsm_projection mode, lrsm_matrix** frequency, lrsm_matrix** transition,
                                 lrsm_report** report) {
  return guarded([&] {
    require(t != nullptr, "trajectory is NULL");
    require(mode == LRSM_PROJECT_GLOBAL || mode == LRSM_PROJECT_ROWWISE, "unknown projection mode");
    const lrsm::SolverConfig cfg = config_from(config_json);
    auto est = lrsm::markov::estimate_transition(
        t->t, static_cast<lrsm::Index>(states), cfg,
        mode == LRSM_PROJECT_ROWWISE ? lrsm::ProjectionMode::Rowwise : lrsm::ProjectionMode::Global);
    ordered_json extra;
    extra["projection_mode"] = mode == LRSM_PROJECT_ROWWISE ? "rowwise" : "global";
    extra["transitions"] = t->t.transitions();
    emit(report, report_json(est.solve.report, extra));
    emit(frequency, est.frequency.matrix());
    emit(transition, est.transition.matrix());
  });
}

lrsm_status lrsm_markov_stationary(const lrsm_matrix* transition, lrsm_matrix** out) {
  return guarded([&] {
    require(transition && out, "NULL argument");
    const lrsm::Vector pi = lrsm::markov::stationary_distribution(lrsm::markov::TransitionMatrix(transition->m));
    *out = new lrsm_matrix{lrsm::DenseMatrix(pi.transpose())};
  });
}

lrsm_status lrsm_markov_mixing_time(const lrsm_matrix* transition, double eps, size_t* out) {
  return guarded([&] {
    require(transition && out, "NULL argument");
    *out = lrsm::markov::mixing_time(lrsm::markov::TransitionMatrix(transition->m), eps);
  });
}

lrsm_status lrsm_experiment_run(const char* name, const char* spec_json, const char* out_path, unsigned jobs,
                                size_t* rows) {
  return guarded([&] {
    lrsm::harness::ExperimentSpec spec =
        lrsm::harness::parse_experiment_spec(spec_json ? spec_json : "{}", name ? name : "");
    if (out_path) spec.output_path = out_path;
    const auto result = lrsm::harness::run(spec, jobs);
    if (rows) *rows = result.size();
  });
}

lrsm_status lrsm_check_run(const char* which, const char* spec_json, const char* out_path, unsigned jobs,
                           char** summary_json) {
  return guarded([&] {
    require(which != nullptr, "check name is NULL");
    const std::string kind = which;
    std::string name;
    if (kind == "lemma" || kind == "lemma_check") name = "lemma_check";
    else if (kind == "certificate") name = "certificate";
    else throw lrsm::ArgumentError("unknown check '" + kind + "' (expected lemma or certificate)");
    lrsm::harness::ExperimentSpec spec = lrsm::harness::parse_experiment_spec(spec_json ? spec_json : "{}", name);
    if (out_path) spec.output_path = out_path;
    const auto result = lrsm::harness::run(spec, jobs);
    const std::string summary = lrsm::harness::summarize(spec.experiment, result);
    if (summary_json) *summary_json = dup_string(summary);
  });
}

lrsm_status lrsm_covariance(const lrsm_matrix* data, const char* config_json, double tau1, double tau2,
                            lrsm_matrix** pilot, lrsm_lowrank** low_rank, lrsm_sparse** sparse,
                            lrsm_report** report) {
  return guarded([&] {
    require(data != nullptr, "data matrix is NULL");
    const lrsm::SolverConfig cfg = config_from(config_json);
    lrsm::apps::StructuredCovariance est = lrsm::apps::structured_covariance(data->m, cfg, tau1, tau2);
    ordered_json extra;
    extra["tau1"] = est.pilot.tau1;
    extra["tau2"] = est.pilot.tau2;
    emit(report, report_json(est.report, extra));
    emit(pilot, std::move(est.pilot.sigma_hat));
    emit(low_rank, std::move(est.low_rank));
    emit(sparse, std::move(est.sparse));
  });
}

lrsm_status lrsm_multitask(const lrsm_matrix* x, const lrsm_matrix* y, const char* config_json,
                           lrsm_lowrank** low_rank, lrsm_sparse** sparse, lrsm_report** report) {
  return guarded([&] {
    require(x && y, "NULL design or response matrix");
    const lrsm::SolverConfig cfg = config_from(config_json);
    lrsm::apps::MultitaskFit fit = lrsm::apps::multitask_fit({x->m, y->m}, cfg);
    ordered_json extra;
    extra["design_sigma_max"] = fit.diagnostics.sigma_max;
    extra["design_sigma_min"] = fit.diagnostics.sigma_min;
    extra["design_row_bound"] = fit.diagnostics.design_row_bound;
    emit(report, report_json(fit.report, extra));
    emit(low_rank, std::move(fit.low_rank));
    emit(sparse, std::move(fit.sparse));
  });
}

}  // extern "C"
