// lrsm: command-line front end over the C API.
//
// Exit codes: 0 success, 2 argument or I/O errors, 3 numeric or structural
// failures, 1 anything else.

#include "lrsm/lrsm.h"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Failure {
  int code;
  std::string message;
};

int exit_code(lrsm_status status) {
  switch (status) {
    case LRSM_OK: return 0;
    case LRSM_ERR_ARGUMENT:
    case LRSM_ERR_IO: return 2;
    case LRSM_ERR_NUMERIC:
    case LRSM_ERR_STRUCTURE: return 3;
    default: return 1;
  }
}

void check(lrsm_status status) {
  if (status != LRSM_OK)
    throw Failure{exit_code(status), std::string(lrsm_status_name(status)) + ": " + lrsm_last_error()};
}

[[noreturn]] void usage_error(const std::string& message) { throw Failure{2, message}; }

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) usage_error("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json parse_json_file(const std::string& path) {
  try {
    return json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    usage_error("invalid JSON in '" + path + "': " + e.what());
  }
}

template <class T, void (*Free)(T*)>
struct Owned {
  T* ptr = nullptr;
  Owned() = default;
  Owned(const Owned&) = delete;
  Owned& operator=(const Owned&) = delete;
  ~Owned() { Free(ptr); }
  T** out() { return &ptr; }
};
using Matrix = Owned<lrsm_matrix, lrsm_matrix_free>;
using Sparse = Owned<lrsm_sparse, lrsm_sparse_free>;
using LowRank = Owned<lrsm_lowrank, lrsm_lowrank_free>;
using Report = Owned<lrsm_report, lrsm_report_free>;
using Trajectory = Owned<lrsm_trajectory, lrsm_trajectory_free>;

std::string report_text(const lrsm_report* report) {
  char* text = nullptr;
  check(lrsm_report_to_json(report, &text));
  std::string out = text;
  lrsm_string_free(text);
  return out;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) usage_error("cannot write '" + path.string() + "'");
  os << text << '\n';
}

void prepare_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) usage_error("cannot create output directory '" + dir + "'");
}

// Solver options shared by solve, markov estimate, covariance and multitask.
struct SolverFlags {
  std::string config_path;
  std::optional<long long> rank;
  std::optional<long long> sparsity;
  std::optional<double> mu_bar;
  std::optional<int> method;
  std::optional<int> max_iters;
  std::optional<unsigned long long> seed;

  void add_to(CLI::App* app) {
    app->add_option("--config", config_path, "Solver config JSON file");
    app->add_option("--rank", rank, "Rank bound");
    app->add_option("--sparsity", sparsity, "Sparsity bound");
    app->add_option("--mu-bar", mu_bar, "Incoherence bound");
    app->add_option("--method", method, "Frame update variant")->check(CLI::IsMember({1, 2}));
    app->add_option("--max-iters", max_iters, "Iteration cap");
    app->add_option("--seed", seed, "Solver seed");
  }

  std::string json_text() const {
    json cfg = config_path.empty() ? json::object() : parse_json_file(config_path);
    if (!cfg.is_object()) usage_error("solver config must be a JSON object");
    if (rank) cfg["rank_bound"] = *rank;
    if (sparsity) cfg["sparsity_bound"] = *sparsity;
    if (mu_bar) cfg["incoherence_bound"] = *mu_bar;
    if (method) cfg["method"] = *method == 2 ? "Method2" : "Method1";
    if (max_iters) cfg["max_iters"] = *max_iters;
    if (seed) cfg["seed"] = *seed;
    return cfg.dump();
  }
};

unsigned default_jobs() {
  if (const char* env = std::getenv("LRSM_JOBS")) {
    char* end = nullptr;
    const unsigned long v = std::strtoul(env, &end, 10);
    if (end != env && *end == '\0') return static_cast<unsigned>(v);
  }
  return 0;
}

lrsm_projection projection_from(const std::string& name) {
  return name == "rowwise" ? LRSM_PROJECT_ROWWISE : LRSM_PROJECT_GLOBAL;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Low-rank plus sparse matrix estimation"};
  app.require_subcommand(1);

  // solve
  SolverFlags solve_flags;
  std::string solve_input, solve_out;
  auto* solve_cmd = app.add_subcommand("solve", "Decompose a CSV matrix into low-rank plus sparse parts");
  solve_cmd->add_option("input", solve_input, "Matrix CSV")->required();
  solve_cmd->add_option("--out", solve_out, "Output directory (L.csv, S.csv, report.json)");
  solve_flags.add_to(solve_cmd);

  // markov
  auto* markov_cmd = app.add_subcommand("markov", "Markov chain tools");
  markov_cmd->require_subcommand(1);
  std::string sim_transition, sim_out, sim_init = "stationary";
  std::size_t sim_n = 0;
  unsigned long long sim_seed = 0;
  auto* sim_cmd = markov_cmd->add_subcommand("simulate", "Sample a trajectory");
  sim_cmd->add_option("transition", sim_transition, "Transition matrix CSV")->required();
  sim_cmd->add_option("--n", sim_n, "Number of transitions")->required();
  sim_cmd->add_option("--init", sim_init, "'stationary' or a state index");
  sim_cmd->add_option("--seed", sim_seed, "Sampling seed");
  sim_cmd->add_option("--out", sim_out, "Trajectory file (one state per line)");

  SolverFlags est_flags;
  std::string est_traj, est_out, est_projection = "global";
  long long est_states = 0;
  auto* est_cmd = markov_cmd->add_subcommand("estimate", "Estimate F and P from a trajectory");
  est_cmd->add_option("trajectory", est_traj, "Trajectory file")->required();
  est_cmd->add_option("--states", est_states, "Number of states p")->required();
  est_cmd->add_option("--projection", est_projection, "Simplex projection")
      ->check(CLI::IsMember({"global", "rowwise"}));
  est_cmd->add_option("--out", est_out, "Output directory (F.csv, P.csv, report.json)");
  est_flags.add_to(est_cmd);

  // experiment
  std::string exp_name, exp_config, exp_out, exp_projection;
  std::optional<unsigned long long> exp_seed;
  std::optional<int> exp_method;
  unsigned exp_jobs = default_jobs();
  bool exp_paper = false;
  auto* exp_cmd = app.add_subcommand("experiment", "Run a seeded experiment sweep");
  exp_cmd->add_option("name", exp_name, "exp1, exp2, exp3, exp4, lemma_check or certificate")->required();
  exp_cmd->add_option("--config", exp_config, "Experiment JSON");
  exp_cmd->add_option("--out", exp_out, "CSV output path");
  exp_cmd->add_option("--seed", exp_seed, "Base seed");
  exp_cmd->add_option("--method", exp_method, "Restrict the method grid")->check(CLI::IsMember({1, 2}));
  exp_cmd->add_option("--projection", exp_projection, "Simplex projection")
      ->check(CLI::IsMember({"global", "rowwise"}));
  exp_cmd->add_option("--jobs", exp_jobs, "Concurrent trials (0 = all cores)");
  exp_cmd->add_flag("--paper-scale", exp_paper, "Use the full-size grids");

  // check
  std::string check_name, check_config, check_out;
  std::optional<unsigned long long> check_seed;
  unsigned check_jobs = default_jobs();
  auto* check_cmd = app.add_subcommand("check", "Numeric verification panels");
  check_cmd->add_option("which", check_name, "lemma or certificate")
      ->required()
      ->check(CLI::IsMember({"lemma", "certificate"}));
  check_cmd->add_option("--config", check_config, "Experiment JSON overrides");
  check_cmd->add_option("--out", check_out, "CSV output path");
  check_cmd->add_option("--seed", check_seed, "Base seed");
  check_cmd->add_option("--jobs", check_jobs, "Concurrent trials (0 = all cores)");

  // covariance
  SolverFlags cov_flags;
  std::string cov_data, cov_out;
  double cov_tau1 = 0.0, cov_tau2 = 0.0;
  auto* cov_cmd = app.add_subcommand("covariance", "Winsorized covariance with low-rank plus sparse structure");
  cov_cmd->add_option("data", cov_data, "Observations CSV (rows = samples)")->required();
  cov_cmd->add_option("--tau1", cov_tau1, "Second-moment truncation (default sqrt(n))");
  cov_cmd->add_option("--tau2", cov_tau2, "Mean truncation (default sqrt(n))");
  cov_cmd->add_option("--out", cov_out, "Output directory");
  cov_flags.add_to(cov_cmd);

  // multitask
  SolverFlags mt_flags;
  std::string mt_x, mt_y, mt_out;
  auto* mt_cmd = app.add_subcommand("multitask", "Multitask regression with structured coefficients");
  mt_cmd->add_option("--x", mt_x, "Design CSV")->required();
  mt_cmd->add_option("--y", mt_y, "Response CSV")->required();
  mt_cmd->add_option("--out", mt_out, "Output directory");
  mt_flags.add_to(mt_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    auto write_components = [](const std::string& dir, lrsm_lowrank* l, lrsm_sparse* s, const std::string& report) {
      if (dir.empty()) {
        std::cout << report << '\n';
        return;
      }
      prepare_dir(dir);
      Matrix dense;
      check(lrsm_lowrank_to_dense(l, dense.out()));
      check(lrsm_matrix_save_csv(dense.ptr, (fs::path(dir) / "L.csv").c_str()));
      check(lrsm_sparse_save_csv(s, (fs::path(dir) / "S.csv").c_str()));
      write_text(fs::path(dir) / "report.json", report);
      std::cout << report << '\n';
    };

    if (*solve_cmd) {
      const std::string cfg = solve_flags.json_text();
      Matrix y;
      check(lrsm_matrix_load_csv(solve_input.c_str(), y.out()));
      LowRank l;
      Sparse s;
      Report r;
      check(lrsm_solve(y.ptr, cfg.c_str(), l.out(), s.out(), r.out()));
      write_components(solve_out, l.ptr, s.ptr, report_text(r.ptr));
    } else if (*sim_cmd) {
      Matrix p;
      check(lrsm_matrix_load_csv(sim_transition.c_str(), p.out()));
      std::int64_t init = -1;
      if (sim_init != "stationary") {
        try {
          std::size_t used = 0;
          init = std::stoll(sim_init, &used);
          if (used != sim_init.size() || init < 0) throw std::invalid_argument(sim_init);
        } catch (const std::exception&) {
          usage_error("--init must be 'stationary' or a nonnegative state index");
        }
      }
      Trajectory traj;
      check(lrsm_markov_simulate(p.ptr, sim_n, init, sim_seed, traj.out()));
      if (sim_out.empty()) {
        std::vector<std::int64_t> states(lrsm_trajectory_length(traj.ptr));
        check(lrsm_trajectory_states(traj.ptr, states.data(), states.size()));
        for (auto v : states) std::cout << v << '\n';
      } else {
        check(lrsm_trajectory_save(traj.ptr, sim_out.c_str()));
      }
    } else if (*est_cmd) {
      const std::string cfg = est_flags.json_text();
      Trajectory traj;
      check(lrsm_trajectory_load(est_traj.c_str(), traj.out()));
      if (est_states < 1) usage_error("--states must be positive");
      Matrix f, p;
      Report r;
      check(lrsm_markov_estimate(traj.ptr, static_cast<std::size_t>(est_states), cfg.c_str(),
                                 projection_from(est_projection), f.out(), p.out(), r.out()));
      const std::string report = report_text(r.ptr);
      if (!est_out.empty()) {
        prepare_dir(est_out);
        check(lrsm_matrix_save_csv(f.ptr, (fs::path(est_out) / "F.csv").c_str()));
        check(lrsm_matrix_save_csv(p.ptr, (fs::path(est_out) / "P.csv").c_str()));
        write_text(fs::path(est_out) / "report.json", report);
      }
      std::cout << report << '\n';
    } else if (*exp_cmd) {
      json spec = exp_config.empty() ? json::object() : parse_json_file(exp_config);
      if (!spec.is_object()) usage_error("experiment config must be a JSON object");
      if (exp_seed) spec["seed"] = *exp_seed;
      if (!exp_projection.empty()) spec["projection_mode"] = exp_projection;
      if (exp_paper) spec["paper_scale"] = true;
      if (exp_method) spec["grid"]["method"] = json::array({*exp_method == 2 ? "Method2" : "Method1"});
      if (exp_out.empty() && !spec.contains("output_path")) usage_error("no output path: pass --out or set output_path");
      std::size_t rows = 0;
      check(lrsm_experiment_run(exp_name.c_str(), spec.dump().c_str(), exp_out.empty() ? nullptr : exp_out.c_str(),
                                exp_jobs, &rows));
      std::cout << "wrote " << rows << " rows to "
                << (exp_out.empty() ? spec["output_path"].get<std::string>() : exp_out) << '\n';
    } else if (*check_cmd) {
      json spec = check_config.empty() ? json::object() : parse_json_file(check_config);
      if (!spec.is_object()) usage_error("check config must be a JSON object");
      if (check_seed) spec["seed"] = *check_seed;
      char* summary = nullptr;
      check(lrsm_check_run(check_name.c_str(), spec.dump().c_str(), check_out.empty() ? nullptr : check_out.c_str(),
                           check_jobs, &summary));
      std::cout << summary << '\n';
      lrsm_string_free(summary);
    } else if (*cov_cmd) {
      const std::string cfg = cov_flags.json_text();
      Matrix data;
      check(lrsm_matrix_load_csv(cov_data.c_str(), data.out()));
      Matrix pilot;
      LowRank l;
      Sparse s;
      Report r;
      check(lrsm_covariance(data.ptr, cfg.c_str(), cov_tau1, cov_tau2, pilot.out(), l.out(), s.out(), r.out()));
      if (!cov_out.empty()) {
        prepare_dir(cov_out);
        check(lrsm_matrix_save_csv(pilot.ptr, (fs::path(cov_out) / "pilot.csv").c_str()));
      }
      write_components(cov_out, l.ptr, s.ptr, report_text(r.ptr));
    } else if (*mt_cmd) {
      const std::string cfg = mt_flags.json_text();
      Matrix x, y;
      check(lrsm_matrix_load_csv(mt_x.c_str(), x.out()));
      check(lrsm_matrix_load_csv(mt_y.c_str(), y.out()));
      LowRank l;
      Sparse s;
      Report r;
      check(lrsm_multitask(x.ptr, y.ptr, cfg.c_str(), l.out(), s.out(), r.out()));
      write_components(mt_out, l.ptr, s.ptr, report_text(r.ptr));
    }
  } catch (const Failure& f) {
    std::cerr << "lrsm: " << f.message << '\n';
    return f.code;
  } catch (const json::exception& e) {
    std::cerr << "lrsm: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
