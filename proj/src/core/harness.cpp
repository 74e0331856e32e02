#include "lrsm/harness.hpp"

#include "lrsm/error.hpp"
#include "lrsm/io.hpp"
#include "lrsm/markov.hpp"
#include "lrsm/rng.hpp"
#include "lrsm/solver.hpp"
#include "lrsm/synth.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <bit>
#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <thread>

namespace lrsm::harness {

using nlohmann::json;
using nlohmann::ordered_json;

ExperimentKind parse_experiment_kind(const std::string& name) {
  if (name == "exp1") return ExperimentKind::Exp1;
  if (name == "exp2") return ExperimentKind::Exp2;
  if (name == "exp3") return ExperimentKind::Exp3;
  if (name == "exp4") return ExperimentKind::Exp4;
  if (name == "lemma_check") return ExperimentKind::LemmaCheck;
  if (name == "certificate") return ExperimentKind::Certificate;
  throw ArgumentError("unknown experiment '" + name + "'");
}

std::string to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::Exp1: return "exp1";
    case ExperimentKind::Exp2: return "exp2";
    case ExperimentKind::Exp3: return "exp3";
    case ExperimentKind::Exp4: return "exp4";
    case ExperimentKind::LemmaCheck: return "lemma_check";
    case ExperimentKind::Certificate: return "certificate";
  }
  return "exp2";
}

namespace {

bool uses_noise_axis(ExperimentKind kind) {
  return kind == ExperimentKind::Exp1 || kind == ExperimentKind::Certificate;
}

bool is_markov(ExperimentKind kind) {
  return kind == ExperimentKind::Exp2 || kind == ExperimentKind::Exp3 || kind == ExperimentKind::Exp4;
}

// Canonical method label, or empty if the label does not apply to `kind`.
std::string canonical_method(ExperimentKind kind, const std::string& label) {
  std::string m = label;
  if (m == "1" || m == "method1") m = "Method1";
  if (m == "2" || m == "method2") m = "Method2";
  if (kind == ExperimentKind::LemmaCheck) return (m == "random" || m == "adversarial") ? m : "";
  if (m == "Method1" || m == "Method2") return m;
  if (is_markov(kind) && (m == "am" || m == "spectral")) return m;
  return "";
}

std::vector<Index> full_n_grid() {
  std::vector<Index> n;
  for (Index k = 0; k <= 20; ++k) n.push_back(10000 + 5000 * k);
  return n;
}

}  // namespace

ExperimentSpec default_spec(ExperimentKind kind, bool paper_scale) {
  ExperimentSpec spec;
  spec.experiment = kind;
  switch (kind) {
    case ExperimentKind::Exp1:
      spec.p = {paper_scale ? Index{1000} : Index{100}};
      spec.n = {1000};
      spec.t = {0.0};
      spec.method = {"Method1"};
      spec.noise = {"none", "gaussian", "empirical_prob"};
      spec.trials = 5;
      break;
    case ExperimentKind::Exp2:
      spec.p = {paper_scale ? Index{200} : Index{50}};
      spec.n = paper_scale ? full_n_grid() : std::vector<Index>{10000, 20000, 40000, 80000, 160000};
      spec.t = paper_scale ? std::vector<double>{1.0, 10.0} : std::vector<double>{1.0};
      spec.method = {"Method1"};
      spec.trials = paper_scale ? 20 : 5;
      break;
    case ExperimentKind::Exp3:
      spec.p = paper_scale ? std::vector<Index>{30, 35, 40, 45, 50, 100, 200, 500}
                           : std::vector<Index>{30, 50, 70, 100};
      spec.n = {100000};
      spec.t = {1.0};
      spec.method = {"Method1", "Method2"};
      spec.trials = paper_scale ? 20 : 5;
      break;
    case ExperimentKind::Exp4:
      spec.p = {paper_scale ? Index{200} : Index{50}};
      spec.n = paper_scale ? full_n_grid() : std::vector<Index>{50000};
      spec.t = {1.0, 10.0};
      spec.method = {"am", "spectral"};
      spec.trials = paper_scale ? 20 : 5;
      break;
    case ExperimentKind::LemmaCheck:
      spec.p = paper_scale ? std::vector<Index>{10, 50, 100, 400, 1000} : std::vector<Index>{10, 50, 100, 400};
      spec.n = {0};
      spec.t = {0.0};
      spec.method = {"random", "adversarial"};
      spec.trials = paper_scale ? 200 : 20;
      break;
    case ExperimentKind::Certificate:
      spec.p = {paper_scale ? Index{1000} : Index{100}};
      spec.n = {1000};
      spec.t = {0.0};
      spec.method = {"Method1"};
      spec.noise = {"gaussian", "empirical_prob"};
      spec.trials = 50;
      break;
  }
  if (!uses_noise_axis(kind)) spec.noise = {};
  return spec;
}

void ExperimentSpec::validate() const {
  if (p.empty() || n.empty() || t.empty() || method.empty())
    throw ArgumentError("experiment spec: grid lists must be nonempty");
  if (uses_noise_axis(experiment) && noise.empty())
    throw ArgumentError("experiment spec: noise list must be nonempty for " + to_string(experiment));
  if (trials < 1) throw ArgumentError("experiment spec: trials must be at least 1");
  if (r < 1) throw ArgumentError("experiment spec: r must be positive");
  if (s < 0) throw ArgumentError("experiment spec: s must be nonnegative");
  if (!(sigma >= 0.0)) throw ArgumentError("experiment spec: sigma must be nonnegative");
  if (!(mu_bar > 0.0)) throw ArgumentError("experiment spec: mu_bar must be positive");
  if (max_iters < 1) throw ArgumentError("experiment spec: max_iters must be positive");
  const Index min_p = experiment == ExperimentKind::LemmaCheck ? 3 : r;
  for (Index v : p)
    if (v < std::max<Index>(min_p, 1)) throw ArgumentError("experiment spec: p = " + std::to_string(v) + " too small");
  for (Index v : n) {
    if (v < 0) throw ArgumentError("experiment spec: n must be nonnegative");
    if ((is_markov(experiment) || uses_noise_axis(experiment)) && v < 1)
      throw ArgumentError("experiment spec: n must be positive for " + to_string(experiment));
  }
  for (double v : t)
    if (!(v >= 0.0) || !std::isfinite(v)) throw ArgumentError("experiment spec: t must be finite and nonnegative");
  for (const auto& m : method)
    if (canonical_method(experiment, m).empty())
      throw ArgumentError("experiment spec: method '" + m + "' does not apply to " + to_string(experiment));
  for (const auto& k : noise) synth::parse_noise_kind(k);
}

std::size_t ExperimentSpec::grid_size() const {
  const std::size_t noise_count = uses_noise_axis(experiment) ? noise.size() : 1;
  return p.size() * n.size() * t.size() * noise_count * method.size();
}

ExperimentSpec parse_experiment_spec(const std::string& json_text, const std::string& name) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ArgumentError(std::string("experiment spec: invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ArgumentError("experiment spec: top level must be an object");
  static const std::set<std::string> known = {"experiment", "grid",   "trials",    "seed",
                                              "output_path", "projection_mode", "r", "s",
                                              "sigma",      "mu_bar", "max_iters", "record_timing",
                                              "paper_scale"};
  for (auto it = doc.begin(); it != doc.end(); ++it)
    if (!known.count(it.key())) throw ArgumentError("experiment spec: unknown field '" + it.key() + "'");

  try {
    std::string kind_name = name;
    if (doc.contains("experiment")) {
      const auto declared = doc["experiment"].get<std::string>();
      if (!kind_name.empty() && declared != kind_name)
        throw ArgumentError("experiment spec: config declares '" + declared + "' but '" + kind_name +
                            "' was requested");
      kind_name = declared;
    }
    if (kind_name.empty()) throw ArgumentError("experiment spec: no experiment named");
    const bool paper_scale = doc.value("paper_scale", false);
    ExperimentSpec spec = default_spec(parse_experiment_kind(kind_name), paper_scale);

    if (doc.contains("grid")) {
      const json& grid = doc["grid"];
      if (!grid.is_object()) throw ArgumentError("experiment spec: grid must be an object");
      static const std::set<std::string> axes = {"p", "n", "t", "method", "noise"};
      for (auto it = grid.begin(); it != grid.end(); ++it)
        if (!axes.count(it.key())) throw ArgumentError("experiment spec: unknown grid axis '" + it.key() + "'");
      if (grid.contains("p")) spec.p = grid["p"].get<std::vector<Index>>();
      if (grid.contains("n")) {
        spec.n.clear();
        // Accept 1e5-style numbers as long as they are integral.
        for (const auto& v : grid["n"]) {
          const double d = v.get<double>();
          if (d != std::floor(d)) throw ArgumentError("experiment spec: n values must be integers");
          spec.n.push_back(static_cast<Index>(d));
        }
      }
      if (grid.contains("t")) spec.t = grid["t"].get<std::vector<double>>();
      if (grid.contains("method")) {
        spec.method.clear();
        for (const auto& v : grid["method"])
          spec.method.push_back(v.is_number_integer() ? std::to_string(v.get<int>()) : v.get<std::string>());
      }
      if (grid.contains("noise")) spec.noise = grid["noise"].get<std::vector<std::string>>();
    }
    if (doc.contains("trials")) spec.trials = doc["trials"].get<int>();
    if (doc.contains("seed")) spec.seed = doc["seed"].get<std::uint64_t>();
    if (doc.contains("output_path")) spec.output_path = doc["output_path"].get<std::string>();
    if (doc.contains("projection_mode")) {
      const auto mode = doc["projection_mode"].get<std::string>();
      if (mode == "global") spec.projection_mode = ProjectionMode::Global;
      else if (mode == "rowwise") spec.projection_mode = ProjectionMode::Rowwise;
      else throw ArgumentError("experiment spec: projection_mode must be global or rowwise");
    }
    if (doc.contains("r")) spec.r = doc["r"].get<Index>();
    if (doc.contains("s")) spec.s = doc["s"].get<Index>();
    if (doc.contains("sigma")) spec.sigma = doc["sigma"].get<double>();
    if (doc.contains("mu_bar")) spec.mu_bar = doc["mu_bar"].get<double>();
    if (doc.contains("max_iters")) spec.max_iters = doc["max_iters"].get<int>();
    if (doc.contains("record_timing")) spec.record_timing = doc["record_timing"].get<bool>();
    for (auto& m : spec.method) {
      const std::string c = canonical_method(spec.experiment, m);
      if (!c.empty()) m = c;
    }
    spec.validate();
    return spec;
  } catch (const json::exception& e) {
    throw ArgumentError(std::string("experiment spec: ") + e.what());
  }
}

std::uint64_t trial_seed(const ExperimentSpec& spec, Index p, Index n, double t, std::size_t noise_index,
                         int trial) {
  return spec.seed ^ stable_hash({static_cast<std::uint64_t>(spec.experiment), static_cast<std::uint64_t>(p),
                                  static_cast<std::uint64_t>(n), std::bit_cast<std::uint64_t>(t),
                                  static_cast<std::uint64_t>(noise_index), static_cast<std::uint64_t>(trial)});
}

namespace {

struct Task {
  Index p = 0;
  Index n = 0;
  double t = 0.0;
  std::string noise;
  std::size_t noise_index = 0;
  std::string method;
  int trial = 0;
  std::uint64_t seed = 0;
};

std::vector<Task> enumerate(const ExperimentSpec& spec) {
  std::vector<Task> tasks;
  const std::vector<std::string> noise = uses_noise_axis(spec.experiment) ? spec.noise : std::vector<std::string>{""};
  for (Index p : spec.p)
    for (Index n : spec.n)
      for (double t : spec.t)
        for (std::size_t k = 0; k < noise.size(); ++k)
          for (const auto& m : spec.method)
            for (int trial = 0; trial < spec.trials; ++trial)
              tasks.push_back(Task{p, n, t, noise[k], k, canonical_method(spec.experiment, m), trial,
                                   trial_seed(spec, p, n, t, k, trial)});
  return tasks;
}

Index sparsity_for(const ExperimentSpec& spec, Index p) { return spec.s > 0 ? std::min(spec.s, p * p) : p; }

SolverConfig solver_config(const ExperimentSpec& spec, Index p, const std::string& method) {
  SolverConfig cfg;
  cfg.rank_bound = spec.r;
  cfg.sparsity_bound = sparsity_for(spec, p);
  cfg.incoherence_bound = spec.mu_bar;
  cfg.method = method == "Method2" ? Method::Method2 : Method::Method1;
  cfg.max_iters = spec.max_iters;
  return cfg;
}

double frame_mu(const SolverReport& report) { return std::max(report.incoherence_U.mu, report.incoherence_V.mu); }

const char* termination_name(Termination t) { return t == Termination::Stalled ? "stalled" : "max_iters"; }

void run_exp1(const ExperimentSpec& spec, const Task& task, MetricsRow& row, ordered_json& extra) {
  synth::InstanceSpec inst;
  inst.p = task.p;
  inst.r = spec.r;
  inst.s = sparsity_for(spec, task.p);
  inst.sigma_noise = spec.sigma;
  inst.noise_kind = synth::parse_noise_kind(task.noise);
  inst.n_noise = task.n;
  inst.seed = task.seed;
  const synth::LowRankSparse truth = synth::gen_lowrank_sparse(inst);
  const DenseMatrix y = truth.m + synth::noise_for(inst, stable_hash({task.seed, 1}));

  std::vector<double> error_trace;
  const SolveResult fit = solve(y, solver_config(spec, task.p, task.method), [&](const SolverState& state) {
    DenseMatrix est = state.low_rank().dense();
    state.S.add_to(est);
    error_trace.push_back((est - truth.m).norm());
  });
  DenseMatrix est = fit.low_rank.dense();
  fit.sparse.add_to(est);
  row.fro_F = (est - truth.m).norm();
  row.mu_hat = frame_mu(fit.report);
  row.iters = fit.report.iters_run;
  extra["noise"] = task.noise;
  extra["termination"] = termination_name(fit.report.termination);
  extra["error_trace"] = error_trace;
  extra["objective_trace"] = fit.report.objective_trace;
}

void run_markov(const ExperimentSpec& spec, const Task& task, MetricsRow& row, ordered_json& extra) {
  synth::InstanceSpec inst;
  inst.p = task.p;
  inst.r = spec.r;
  inst.s = sparsity_for(spec, task.p);
  inst.t = task.t;
  inst.seed = task.seed;
  const synth::TransitionInstance truth = synth::gen_transition(inst);
  const markov::Trajectory traj = markov::simulate_chain(truth.p_star, static_cast<std::size_t>(task.n),
                                                         markov::StationaryInit{}, stable_hash({task.seed, 2}));
  const markov::FrequencyMatrix empirical = markov::empirical_frequency(traj, task.p);
  const DenseMatrix& f_star = truth.f_star.matrix();

  DenseMatrix f_hat;
  DenseMatrix p_hat;
  if (task.method == "spectral") {
    auto [f, tm] = markov::spectral_baseline(empirical, spec.r, spec.projection_mode);
    f_hat = f.matrix();
    p_hat = tm.matrix();
    const FactoredLowRank svd = thin_svd(empirical.matrix(), spec.r);
    row.mu_hat = std::max(incoherence(svd.U).mu, incoherence(svd.V).mu);
  } else {
    const SolverConfig cfg = solver_config(spec, task.p, task.method);
    markov::TransitionEstimate est = markov::estimate_transition(traj, task.p, cfg, spec.projection_mode);
    f_hat = est.frequency.matrix();
    p_hat = est.transition.matrix();
    row.mu_hat = frame_mu(est.solve.report);
    row.iters = est.solve.report.iters_run;
    extra["termination"] = termination_name(est.solve.report.termination);
  }
  row.fro_F = (f_hat - f_star).norm();
  row.l1_P_over_p = (p_hat - truth.p_star.matrix()).cwiseAbs().sum() / static_cast<double>(task.p);
  extra["fro_F_empirical"] = (empirical.matrix() - f_star).norm();
  extra["generation_attempts"] = truth.attempts;
}

void run_lemma(const ExperimentSpec& spec, const Task& task, MetricsRow& row, ordered_json& extra) {
  Rng rng(task.seed);
  if (task.method == "adversarial") {
    const double eps = 0.05 + 0.9 * rng.uniform();
    const auto [first, second] = adversarial_pair(task.p, eps);
    const SeparationReading reading = separation_ratio(first, second);
    const double bound = 1.0 / (2.0 * static_cast<double>(task.p));
    row.mu_hat = std::max({incoherence(first.U).mu, incoherence(first.V).mu, incoherence(second.U).mu,
                           incoherence(second.V).mu});
    extra["eps"] = eps;
    extra["ratio"] = reading.ratio;
    extra["scaled"] = reading.scaled;
    extra["lower_bound"] = bound;
    extra["relative_slack"] = (reading.ratio - bound) / bound;
    return;
  }
  const Index p = task.p;
  const Index r = std::min(spec.r, p);
  auto gaussian_frame = [&]() {
    DenseMatrix g(p, r);
    for (Index i = 0; i < p; ++i)
      for (Index k = 0; k < r; ++k) g(i, k) = rng.normal();
    Eigen::HouseholderQR<DenseMatrix> qr(g);
    return DenseMatrix(qr.householderQ() * DenseMatrix::Identity(p, r));
  };
  auto draw = [&]() {
    FactoredLowRank l;
    l.U = gaussian_frame();
    l.V = gaussian_frame();
    l.sigma.resize(r);
    for (Index k = 0; k < r; ++k) l.sigma(k) = 0.5 + rng.uniform();
    std::sort(l.sigma.begin(), l.sigma.end(), std::greater<>());
    return l;
  };
  const FactoredLowRank first = draw();
  const FactoredLowRank second = draw();
  const SeparationReading reading = separation_ratio(first, second);
  row.mu_hat = std::max({incoherence(first.U).mu, incoherence(first.V).mu, incoherence(second.U).mu,
                         incoherence(second.V).mu});
  extra["ratio"] = reading.ratio;
  extra["scaled"] = reading.scaled;
}

void run_certificate(const ExperimentSpec& spec, const Task& task, MetricsRow& row, ordered_json& extra) {
  synth::InstanceSpec inst;
  inst.p = task.p;
  inst.r = spec.r;
  inst.s = sparsity_for(spec, task.p);
  inst.sigma_noise = spec.sigma;
  inst.noise_kind = synth::parse_noise_kind(task.noise);
  inst.n_noise = task.n;
  inst.seed = task.seed;
  const synth::LowRankSparse truth = synth::gen_lowrank_sparse(inst);
  const DenseMatrix y = truth.m + synth::noise_for(inst, stable_hash({task.seed, 1}));
  const SolverConfig cfg = solver_config(spec, task.p, task.method);
  const SolveResult fit = solve(y, cfg);
  const Certificate cert = certificate_check(y, fit.low_rank, fit.sparse, truth.low_rank, truth.sparse, cfg);
  DenseMatrix est = fit.low_rank.dense();
  fit.sparse.add_to(est);
  row.fro_F = (est - truth.m).norm();
  row.mu_hat = frame_mu(fit.report);
  row.iters = fit.report.iters_run;
  extra["noise"] = task.noise;
  extra["applicable"] = cert.applicable;
  extra["holds"] = cert.holds;
  extra["lhs"] = cert.lhs;
  extra["rhs"] = cert.rhs;
  extra["objective_hat"] = cert.objective_hat;
  extra["objective_star"] = cert.objective_star;
}

MetricsRow run_task(const ExperimentSpec& spec, const Task& task) {
  MetricsRow row;
  row.experiment = to_string(spec.experiment);
  row.trial = task.trial;
  row.seed = task.seed;
  row.p = task.p;
  row.n = task.n;
  row.t = task.t;
  row.method = task.method;
  const auto start = std::chrono::steady_clock::now();
  ordered_json extra = ordered_json::object();
  try {
    switch (spec.experiment) {
      case ExperimentKind::Exp1: run_exp1(spec, task, row, extra); break;
      case ExperimentKind::Exp2:
      case ExperimentKind::Exp3:
      case ExperimentKind::Exp4: run_markov(spec, task, row, extra); break;
      case ExperimentKind::LemmaCheck: run_lemma(spec, task, row, extra); break;
      case ExperimentKind::Certificate: run_certificate(spec, task, row, extra); break;
    }
    row.extra_json = extra.dump();
  } catch (const std::exception& e) {
    MetricsRow failed;
    failed.experiment = row.experiment;
    failed.trial = row.trial;
    failed.seed = row.seed;
    failed.p = row.p;
    failed.n = row.n;
    failed.t = row.t;
    failed.method = row.method;
    failed.error = e.what();
    if (!task.noise.empty()) failed.extra_json = ordered_json{{"noise", task.noise}}.dump();
    row = std::move(failed);
  }
  if (spec.record_timing)
    row.wall_ms = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start).count();
  return row;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace

std::vector<MetricsRow> run(const ExperimentSpec& spec, unsigned jobs) {
  spec.validate();
  std::ofstream out;
  if (!spec.output_path.empty()) {
    out.open(spec.output_path, std::ios::out | std::ios::trunc | std::ios::binary);
    if (!out) throw IoError("cannot open '" + spec.output_path + "' for writing");
  }

  const std::vector<Task> tasks = enumerate(spec);
  std::vector<MetricsRow> rows(tasks.size());
  if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
  jobs = static_cast<unsigned>(std::min<std::size_t>(jobs, std::max<std::size_t>(tasks.size(), 1)));

  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t i = next.fetch_add(1); i < tasks.size(); i = next.fetch_add(1))
      rows[i] = run_task(spec, tasks[i]);
  };
  if (jobs <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(jobs);
    for (unsigned j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  if (out.is_open()) {
    write_csv(out, rows);
    out.flush();
    if (!out) throw IoError("failed writing '" + spec.output_path + "'");
  }
  return rows;
}

void write_csv(std::ostream& os, const std::vector<MetricsRow>& rows) {
  os << kCsvHeader << '\n';
  for (const auto& r : rows) {
    os << r.experiment << ',' << r.trial << ',' << r.seed << ',' << r.p << ',' << r.n << ','
       << io::format_double(r.t) << ',' << r.method << ',' << io::format_double(r.fro_F) << ','
       << io::format_double(r.l1_P_over_p) << ',' << io::format_double(r.mu_hat) << ',' << r.iters << ','
       << r.wall_ms << ',' << csv_field(r.error) << ',' << csv_field(r.extra_json) << '\n';
  }
}

std::string to_csv(const std::vector<MetricsRow>& rows) {
  std::ostringstream os;
  write_csv(os, rows);
  return os.str();
}

std::string summarize(ExperimentKind kind, const std::vector<MetricsRow>& rows) {
  ordered_json out;
  out["experiment"] = to_string(kind);
  out["rows"] = rows.size();
  std::size_t errors = 0;
  for (const auto& r : rows) errors += !r.error.empty();
  out["error_rows"] = errors;
  if (kind == ExperimentKind::Certificate) {
    std::size_t applicable = 0, holds = 0;
    for (const auto& r : rows) {
      if (!r.error.empty()) continue;
      const json extra = json::parse(r.extra_json);
      if (extra.value("applicable", false)) {
        ++applicable;
        holds += extra.value("holds", false);
      }
    }
    out["applicable"] = applicable;
    out["holds"] = holds;
    out["violations"] = applicable - holds;
  } else if (kind == ExperimentKind::LemmaCheck) {
    std::map<Index, double> max_scaled;
    std::map<Index, double> min_slack;
    for (const auto& r : rows) {
      if (!r.error.empty()) continue;
      const json extra = json::parse(r.extra_json);
      if (r.method == "random") {
        auto [it, fresh] = max_scaled.emplace(r.p, extra["scaled"].get<double>());
        if (!fresh) it->second = std::max(it->second, extra["scaled"].get<double>());
      } else {
        auto [it, fresh] = min_slack.emplace(r.p, extra["relative_slack"].get<double>());
        if (!fresh) it->second = std::min(it->second, extra["relative_slack"].get<double>());
      }
    }
    ordered_json scaled = ordered_json::object(), slack = ordered_json::object();
    for (auto [p, v] : max_scaled) scaled[std::to_string(p)] = v;
    for (auto [p, v] : min_slack) slack[std::to_string(p)] = v;
    out["max_scaled_ratio"] = scaled;
    out["min_adversarial_relative_slack"] = slack;
  } else {
    throw ArgumentError("summarize: only lemma_check and certificate sweeps have summaries");
  }
  return out.dump();
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw ArgumentError("loglog_slope: need at least two points");
  const double k = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw ArgumentError("loglog_slope: values must be positive");
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= k;
  my /= k;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  if (sxx == 0.0) throw ArgumentError("loglog_slope: x values are all equal");
  return sxy / sxx;
}

double median(std::vector<double> values) {
  if (values.empty()) throw ArgumentError("median: empty input");
  std::sort(values.begin(), values.end());
  const std::size_t m = values.size() / 2;
  return values.size() % 2 ? values[m] : 0.5 * (values[m - 1] + values[m]);
}

}  // namespace lrsm::harness
