#pragma once

// Seeded experiment sweeps over a parameter grid. Every trial becomes one
// MetricsRow; rows are emitted grid-major, trial-minor as CSV.

#include "lrsm/matops.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace lrsm::harness {

enum class ExperimentKind { Exp1, Exp2, Exp3, Exp4, LemmaCheck, Certificate };

ExperimentKind parse_experiment_kind(const std::string& name);
std::string to_string(ExperimentKind kind);

struct ExperimentSpec {
  ExperimentKind experiment = ExperimentKind::Exp2;
  std::vector<Index> p;
  std::vector<Index> n;
  std::vector<double> t;
  std::vector<std::string> method;
  // exp1 and certificate only: none, gaussian, empirical_prob.
  std::vector<std::string> noise;
  int trials = 5;
  std::uint64_t seed = 0;
  std::string output_path;
  ProjectionMode projection_mode = ProjectionMode::Global;

  Index r = 3;
  // Sparsity level of the ground truth; 0 selects s = p.
  Index s = 0;
  double sigma = 1e-3;
  double mu_bar = 5.0;
  int max_iters = 500;
  // When false wall_ms is written as 0 so repeated runs are byte-identical.
  bool record_timing = true;

  // Throws ArgumentError on empty grids, bad trial counts or unknown labels.
  void validate() const;
  std::size_t grid_size() const;
};

/// Desk-scale defaults, or the full-size grids when paper_scale is set.
ExperimentSpec default_spec(ExperimentKind kind, bool paper_scale = false);

/// Parses a JSON config. Missing fields take default_spec values; when
/// `name` is nonempty it selects the experiment and must agree with any
/// "experiment" field in the document.
ExperimentSpec parse_experiment_spec(const std::string& json_text, const std::string& name = "");

struct MetricsRow {
  std::string experiment;
  int trial = 0;
  std::uint64_t seed = 0;
  Index p = 0;
  Index n = 0;
  double t = 0.0;
  std::string method;
  double fro_F = 0.0;
  double l1_P_over_p = 0.0;
  double mu_hat = 0.0;
  int iters = 0;
  std::int64_t wall_ms = 0;
  std::string error;
  // Compact JSON object.
  std::string extra_json = "{}";
};

inline constexpr const char* kCsvHeader =
    "experiment,trial,seed,p,n,t,method,fro_F,l1_P_over_p,mu_hat,iters,wall_ms,error,extra_json";

/// Runs the sweep with at most `jobs` concurrent trials (0 = hardware
/// concurrency). Writes spec.output_path when nonempty; an unwritable path
/// fails with IoError before any trial runs. Trial failures become rows with
/// a nonempty error field.
std::vector<MetricsRow> run(const ExperimentSpec& spec, unsigned jobs = 1);

/// Trial seed: base seed xor a stable hash of the grid point (method
/// excluded, so methods compared at one grid point share instances).
std::uint64_t trial_seed(const ExperimentSpec& spec, Index p, Index n, double t, std::size_t noise_index,
                         int trial);

void write_csv(std::ostream& os, const std::vector<MetricsRow>& rows);
std::string to_csv(const std::vector<MetricsRow>& rows);

/// Aggregate verdicts for lemma_check and certificate sweeps as a JSON object.
std::string summarize(ExperimentKind kind, const std::vector<MetricsRow>& rows);

/// Least-squares slope of log(y) against log(x).
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);
double median(std::vector<double> values);

}  // namespace lrsm::harness
