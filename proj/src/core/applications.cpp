#include "lrsm/applications.hpp"

#include "lrsm/error.hpp"

#include <algorithm>
#include <cmath>

namespace lrsm::apps {

namespace {

double clipped(double x, double tau) {
  const double mag = std::min(std::abs(x), tau);
  return x > 0.0 ? mag : (x < 0.0 ? -mag : 0.0);
}

}  // namespace

MultitaskFit multitask_fit(const MultitaskProblem& problem, const SolverConfig& config) {
  const DenseMatrix& x = problem.X;
  const DenseMatrix& y = problem.Y;
  require_finite(x, "multitask_fit");
  require_finite(y, "multitask_fit");
  if (x.rows() != y.rows()) throw ArgumentError("multitask_fit: X and Y need the same number of rows");
  if (x.rows() < x.cols()) throw ArgumentError("multitask_fit: need n >= p");

  MultitaskFit out;
  const Vector s = singular_values(x);
  out.diagnostics.sigma_max = s(0);
  out.diagnostics.sigma_min = s(s.size() - 1);
  out.diagnostics.design_row_bound = x.colwise().norm().maxCoeff();
  if (!(out.diagnostics.sigma_min > 1e-10 * out.diagnostics.sigma_max))
    throw ArgumentError("multitask_fit: design matrix is rank deficient, whitening does not apply");

  const DenseMatrix theta = x.householderQr().solve(y);
  SolveResult fit = solve(theta, config);
  out.low_rank = std::move(fit.low_rank);
  out.sparse = std::move(fit.sparse);
  out.report = std::move(fit.report);
  return out;
}

CovarianceEstimate winsorized_covariance(const DenseMatrix& data, double tau1, double tau2) {
  require_finite(data, "winsorized_covariance");
  const Index n = data.rows();
  const Index p = data.cols();
  if (n < 2) throw ArgumentError("winsorized_covariance: need at least two observations");
  CovarianceEstimate out;
  const double default_tau = std::sqrt(static_cast<double>(n));
  out.tau1 = tau1 > 0.0 ? tau1 : default_tau;
  out.tau2 = tau2 > 0.0 ? tau2 : default_tau;

  Vector mean(p);
  for (Index i = 0; i < p; ++i) {
    double acc = 0.0;
    for (Index k = 0; k < n; ++k) acc += clipped(data(k, i), out.tau2);
    mean(i) = acc / static_cast<double>(n);
  }
  DenseMatrix second(p, p);
  for (Index i = 0; i < p; ++i) {
    for (Index j = i; j < p; ++j) {
      double acc = 0.0;
      for (Index k = 0; k < n; ++k) acc += clipped(data(k, i) * data(k, j), out.tau1);
      second(i, j) = second(j, i) = acc / static_cast<double>(n);
    }
  }
  out.sigma_hat = second - mean * mean.transpose();
  // Exact symmetry (the outer product is symmetric up to rounding).
  out.sigma_hat = 0.5 * (out.sigma_hat + out.sigma_hat.transpose()).eval();
  return out;
}

DenseMatrix sample_covariance(const DenseMatrix& data) {
  const double n = static_cast<double>(data.rows());
  const Vector mean = data.colwise().mean().transpose();
  return data.transpose() * data / n - mean * mean.transpose();
}

StructuredCovariance structured_covariance(const DenseMatrix& data, const SolverConfig& config,
                                           double tau1, double tau2) {
  StructuredCovariance out;
  out.pilot = winsorized_covariance(data, tau1, tau2);
  SolveResult fit = solve(out.pilot.sigma_hat, config);
  out.low_rank = std::move(fit.low_rank);
  out.sparse = std::move(fit.sparse);
  out.report = std::move(fit.report);
  return out;
}

DenseMatrix estimate_loadings(const FactoredLowRank& sigma_l, Index rank) {
  if (sigma_l.rows() != sigma_l.cols()) throw ArgumentError("estimate_loadings: matrix must be square");
  if (rank < 1 || rank > sigma_l.rows()) throw ArgumentError("estimate_loadings: rank out of range");
  const DenseMatrix m = sigma_l.dense();
  const DenseMatrix sym = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<DenseMatrix> eig(sym);
  if (eig.info() != Eigen::Success) throw NumericError("estimate_loadings: eigensolver failed");
  // Eigenvalues come back ascending.
  const Vector& values = eig.eigenvalues();
  const Index p = sym.rows();
  const double lead = values(p - 1);
  if (lead < 0.0) throw NumericError("estimate_loadings: leading eigenvalue is negative");
  DenseMatrix b(p, rank);
  for (Index l = 0; l < rank; ++l) {
    double lambda = values(p - 1 - l);
    if (lambda < -1e-12 * std::max(1.0, lead))
      throw NumericError("estimate_loadings: eigenvalue " + std::to_string(l) + " is negative");
    lambda = std::max(lambda, 0.0);
    b.col(l) = std::sqrt(lambda) * eig.eigenvectors().col(p - 1 - l);
  }
  return b;
}

Vector align_signs(const DenseMatrix& b, const DenseMatrix& b_hat) {
  if (b.rows() != b_hat.rows() || b.cols() != b_hat.cols())
    throw ArgumentError("align_signs: shapes differ");
  Vector h(b.cols());
  for (Index l = 0; l < b.cols(); ++l) h(l) = b.col(l).dot(b_hat.col(l)) < 0.0 ? -1.0 : 1.0;
  return h;
}

double alignment_objective(const DenseMatrix& b, const DenseMatrix& b_hat, const Vector& signs) {
  return (b - b_hat * signs.asDiagonal()).squaredNorm();
}

}  // namespace lrsm::apps
