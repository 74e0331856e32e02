#include "lrsm/lrsm.h"

#include <gtest/gtest.h>

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

namespace {

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

lrsm_matrix* make(size_t rows, size_t cols, const std::vector<double>& data) {
  lrsm_matrix* m = nullptr;
  EXPECT_EQ(lrsm_matrix_create(rows, cols, data.data(), &m), LRSM_OK);
  return m;
}

std::vector<double> contents(const lrsm_matrix* m) {
  std::vector<double> out(lrsm_matrix_rows(m) * lrsm_matrix_cols(m));
  EXPECT_EQ(lrsm_matrix_copy_data(m, out.data(), out.size()), LRSM_OK);
  return out;
}

nlohmann::json report_json(const lrsm_report* r) {
  char* text = nullptr;
  EXPECT_EQ(lrsm_report_to_json(r, &text), LRSM_OK);
  nlohmann::json doc = nlohmann::json::parse(text);
  lrsm_string_free(text);
  return doc;
}

}  // namespace

TEST(CApi, VersionAndStatusNames) {
  EXPECT_STREQ(lrsm_version(), "0.1.0");
  EXPECT_STREQ(lrsm_status_name(LRSM_OK), "ok");
  EXPECT_STRNE(lrsm_status_name(LRSM_ERR_NUMERIC), lrsm_status_name(LRSM_ERR_ARGUMENT));
}

TEST(CApi, MatrixRoundTripThroughCsv) {
  lrsm_matrix* m = make(2, 3, {1, 2, 3, 4, 5, 6.5});
  EXPECT_EQ(lrsm_matrix_rows(m), 2u);
  EXPECT_EQ(lrsm_matrix_cols(m), 3u);
  const std::string path = temp_path("lrsm_capi_matrix.csv");
  ASSERT_EQ(lrsm_matrix_save_csv(m, path.c_str()), LRSM_OK);
  lrsm_matrix* back = nullptr;
  ASSERT_EQ(lrsm_matrix_load_csv(path.c_str(), &back), LRSM_OK);
  EXPECT_EQ(contents(back), contents(m));
  std::vector<double> small(2);
  EXPECT_EQ(lrsm_matrix_copy_data(m, small.data(), small.size()), LRSM_ERR_ARGUMENT);
  lrsm_matrix_free(m);
  lrsm_matrix_free(back);
  std::filesystem::remove(path);
}

TEST(CApi, ErrorsMapToStatusCodes) {
  lrsm_matrix* m = nullptr;
  EXPECT_EQ(lrsm_matrix_load_csv("/nonexistent/file.csv", &m), LRSM_ERR_IO);
  EXPECT_NE(std::string(lrsm_last_error()).find("nonexistent"), std::string::npos);
  EXPECT_EQ(m, nullptr);
  EXPECT_EQ(lrsm_matrix_create(0, 2, nullptr, &m), LRSM_ERR_ARGUMENT);

  lrsm_matrix* y = make(2, 2, {1, 0, 0, 1});
  EXPECT_EQ(lrsm_solve(y, R"({"rank_bound": 1})", nullptr, nullptr, nullptr), LRSM_ERR_ARGUMENT);
  EXPECT_EQ(lrsm_solve(y, "{not json", nullptr, nullptr, nullptr), LRSM_ERR_ARGUMENT);
  EXPECT_EQ(lrsm_solve(nullptr, R"({"rank_bound": 1, "sparsity_bound": 0})", nullptr, nullptr, nullptr),
            LRSM_ERR_ARGUMENT);
  lrsm_matrix_free(y);

  lrsm_matrix* identity = make(2, 2, {1, 0, 0, 1});
  lrsm_matrix* pi = nullptr;
  EXPECT_EQ(lrsm_markov_stationary(identity, &pi), LRSM_ERR_STRUCTURE);
  lrsm_trajectory* traj = nullptr;
  EXPECT_EQ(lrsm_markov_simulate(identity, 10, -1, 0, &traj), LRSM_ERR_NUMERIC);
  lrsm_matrix_free(identity);
}

TEST(CApi, SolveRecoversNoiselessRankOne) {
  // 6 x 6 rank-one matrix plus a single spike.
  const size_t p = 6;
  std::vector<double> data(p * p);
  for (size_t i = 0; i < p; ++i)
    for (size_t j = 0; j < p; ++j) data[i * p + j] = 2.0 * (1.0 + 0.1 * double(i)) * (1.0 - 0.05 * double(j));
  data[1 * p + 4] += 1.0;
  lrsm_matrix* y = make(p, p, data);
  lrsm_lowrank* l = nullptr;
  lrsm_sparse* s = nullptr;
  lrsm_report* r = nullptr;
  ASSERT_EQ(lrsm_solve(y, R"({"rank_bound": 1, "sparsity_bound": 1})", &l, &s, &r), LRSM_OK) << lrsm_last_error();
  EXPECT_EQ(lrsm_lowrank_rank(l), 1u);
  ASSERT_EQ(lrsm_sparse_nnz(s), 1u);
  size_t row = 0, col = 0;
  double value = 0.0;
  ASSERT_EQ(lrsm_sparse_entry(s, 0, &row, &col, &value), LRSM_OK);
  EXPECT_EQ(row, 1u);
  EXPECT_EQ(col, 4u);
  EXPECT_NEAR(value, 1.0, 1e-8);
  EXPECT_EQ(lrsm_sparse_entry(s, 1, &row, &col, &value), LRSM_ERR_ARGUMENT);

  const nlohmann::json rep = report_json(r);
  EXPECT_LE(rep["residual_fro"].get<double>(), 1e-8);
  EXPECT_TRUE(rep["objective_trace"].is_array());

  lrsm_matrix* dense = nullptr;
  ASSERT_EQ(lrsm_lowrank_to_dense(l, &dense), LRSM_OK);
  const auto ld = contents(dense);
  EXPECT_NEAR(ld[0], data[0], 1e-8);
  lrsm_matrix_free(dense);
  lrsm_lowrank_free(l);
  lrsm_sparse_free(s);
  lrsm_report_free(r);
  lrsm_matrix_free(y);
}

TEST(CApi, MarkovSimulateEstimateAndMixing) {
  lrsm_matrix* p = make(3, 3, {0.5, 0.3, 0.2, 0.2, 0.6, 0.2, 0.3, 0.3, 0.4});
  lrsm_trajectory* traj = nullptr;
  ASSERT_EQ(lrsm_markov_simulate(p, 5000, -1, 7, &traj), LRSM_OK) << lrsm_last_error();
  EXPECT_EQ(lrsm_trajectory_length(traj), 5001u);

  const std::string path = temp_path("lrsm_capi_traj.txt");
  ASSERT_EQ(lrsm_trajectory_save(traj, path.c_str()), LRSM_OK);
  lrsm_trajectory* loaded = nullptr;
  ASSERT_EQ(lrsm_trajectory_load(path.c_str(), &loaded), LRSM_OK);
  std::vector<int64_t> a(5001), b(5001);
  lrsm_trajectory_states(traj, a.data(), a.size());
  lrsm_trajectory_states(loaded, b.data(), b.size());
  EXPECT_EQ(a, b);
  std::filesystem::remove(path);

  lrsm_matrix* f = nullptr;
  lrsm_matrix* t = nullptr;
  lrsm_report* r = nullptr;
  ASSERT_EQ(lrsm_markov_estimate(traj, 3, R"({"rank_bound": 1, "sparsity_bound": 3})", LRSM_PROJECT_ROWWISE, &f,
                                 &t, &r),
            LRSM_OK)
      << lrsm_last_error();
  const auto tv = contents(t);
  for (size_t i = 0; i < 3; ++i) EXPECT_NEAR(tv[3 * i] + tv[3 * i + 1] + tv[3 * i + 2], 1.0, 1e-10);
  EXPECT_EQ(report_json(r)["projection_mode"], "rowwise");

  size_t tau = 0;
  ASSERT_EQ(lrsm_markov_mixing_time(p, 0.25, &tau), LRSM_OK);
  EXPECT_GE(tau, 1u);
  lrsm_matrix* pi = nullptr;
  ASSERT_EQ(lrsm_markov_stationary(p, &pi), LRSM_OK);
  EXPECT_EQ(lrsm_matrix_rows(pi) * lrsm_matrix_cols(pi), 3u);

  lrsm_matrix_free(pi);
  lrsm_matrix_free(f);
  lrsm_matrix_free(t);
  lrsm_report_free(r);
  lrsm_trajectory_free(loaded);
  lrsm_trajectory_free(traj);
  lrsm_matrix_free(p);
}

TEST(CApi, ExperimentAndChecks) {
  const std::string path = temp_path("lrsm_capi_exp.csv");
  size_t rows = 0;
  ASSERT_EQ(lrsm_experiment_run("exp4", R"({"grid": {"p": [10], "n": [500], "t": [1]}, "trials": 2, "r": 2})",
                                path.c_str(), 1, &rows),
            LRSM_OK)
      << lrsm_last_error();
  EXPECT_EQ(rows, 4u);
  EXPECT_TRUE(std::filesystem::exists(path));
  std::filesystem::remove(path);
  EXPECT_EQ(lrsm_experiment_run("exp9", "{}", nullptr, 1, &rows), LRSM_ERR_ARGUMENT);

  char* summary = nullptr;
  ASSERT_EQ(lrsm_check_run("lemma", R"({"grid": {"p": [10, 20]}, "trials": 3})", nullptr, 1, &summary), LRSM_OK);
  const auto doc = nlohmann::json::parse(summary);
  EXPECT_EQ(doc["rows"].get<int>(), 12);
  lrsm_string_free(summary);
  EXPECT_EQ(lrsm_check_run("bogus", nullptr, nullptr, 1, &summary), LRSM_ERR_ARGUMENT);
}

TEST(CApi, CovarianceAndMultitask) {
  std::vector<double> data;
  for (int k = 0; k < 200; ++k)
    for (int i = 0; i < 4; ++i) data.push_back(std::sin(0.37 * k * (i + 1)) + 0.1 * i);
  lrsm_matrix* x = make(200, 4, data);
  lrsm_matrix* pilot = nullptr;
  lrsm_lowrank* l = nullptr;
  lrsm_report* r = nullptr;
  ASSERT_EQ(lrsm_covariance(x, R"({"rank_bound": 2, "sparsity_bound": 2})", 0.0, 0.0, &pilot, &l, nullptr, &r),
            LRSM_OK)
      << lrsm_last_error();
  EXPECT_NEAR(report_json(r)["tau1"].get<double>(), std::sqrt(200.0), 1e-12);
  const auto pv = contents(pilot);
  EXPECT_NEAR(pv[1], pv[4], 1e-12);
  lrsm_matrix_free(pilot);
  lrsm_lowrank_free(l);
  lrsm_report_free(r);

  std::vector<double> eye(16, 0.0);
  for (int i = 0; i < 4; ++i) eye[5 * i] = 1.0;
  lrsm_matrix* design = make(4, 4, eye);
  lrsm_matrix* resp = make(4, 4, std::vector<double>(data.begin(), data.begin() + 16));
  ASSERT_EQ(lrsm_multitask(design, resp, R"({"rank_bound": 1, "sparsity_bound": 1})", &l, nullptr, &r), LRSM_OK)
      << lrsm_last_error();
  EXPECT_NEAR(report_json(r)["design_sigma_min"].get<double>(), 1.0, 1e-12);
  lrsm_lowrank_free(l);
  lrsm_report_free(r);
  lrsm_matrix_free(design);
  lrsm_matrix_free(resp);
  lrsm_matrix_free(x);
}

TEST(CApi, FreeFunctionsAcceptNull) {
  lrsm_matrix_free(nullptr);
  lrsm_sparse_free(nullptr);
  lrsm_lowrank_free(nullptr);
  lrsm_report_free(nullptr);
  lrsm_trajectory_free(nullptr);
  lrsm_string_free(nullptr);
}
