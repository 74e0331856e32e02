#include "lrsm/matops.hpp"

#include "lrsm/error.hpp"
#include "lrsm/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

namespace lrsm {

namespace {

constexpr double kRankTol = 1e-12;
constexpr double kFrameTol = 1e-8;

struct SvdParts {
  DenseMatrix u;
  Vector s;
  DenseMatrix v;
};

SvdParts svd_thin(const DenseMatrix& m) {
  const Index k = std::min(m.rows(), m.cols());
  if (k <= 16) {
    Eigen::JacobiSVD<DenseMatrix, Eigen::ColPivHouseholderQRPreconditioner> svd(
        m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    if (svd.info() != Eigen::Success) throw NumericError("SVD did not converge");
    return {svd.matrixU(), svd.singularValues(), svd.matrixV()};
  }
  Eigen::BDCSVD<DenseMatrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (svd.info() != Eigen::Success) throw NumericError("SVD did not converge");
  return {svd.matrixU(), svd.singularValues(), svd.matrixV()};
}

double gram_deviation(const DenseMatrix& frame) {
  const DenseMatrix g = frame.transpose() * frame - DenseMatrix::Identity(frame.cols(), frame.cols());
  return g.size() == 0 ? 0.0 : g.cwiseAbs().maxCoeff();
}

// Orthonormal columns spanning a complement of `keep` (which has orthonormal
// columns), chosen deterministically by column-pivoted QR of the projector.
DenseMatrix orthonormal_complement(const DenseMatrix& keep, Index rows, Index count) {
  DenseMatrix proj = DenseMatrix::Identity(rows, rows);
  if (keep.cols() > 0) proj -= keep * keep.transpose();
  Eigen::ColPivHouseholderQR<DenseMatrix> qr(proj);
  DenseMatrix q = qr.householderQ() * DenseMatrix::Identity(rows, count);
  // Re-orthogonalize against the kept block for numerical hygiene.
  if (keep.cols() > 0) {
    q -= keep * (keep.transpose() * q);
    Eigen::HouseholderQR<DenseMatrix> qr2(q);
    DenseMatrix q2 = qr2.householderQ() * DenseMatrix::Identity(rows, count);
    return q2;
  }
  return q;
}

}  // namespace

void require_finite(const DenseMatrix& m, const char* what) {
  if (!m.allFinite()) throw ArgumentError(std::string(what) + ": matrix contains NaN or Inf");
}

DenseMatrix FactoredLowRank::dense() const {
  if (rank() == 0) return DenseMatrix::Zero(U.rows(), V.rows());
  return U * sigma.asDiagonal() * V.transpose();
}

FactoredLowRank FactoredLowRank::zero(Index rows, Index cols, Index rank) {
  FactoredLowRank out;
  out.U = DenseMatrix::Identity(rows, rank);
  out.V = DenseMatrix::Identity(cols, rank);
  out.sigma = Vector::Zero(rank);
  return out;
}

SparseEntrySet::SparseEntrySet(Index rows, Index cols) : rows_(rows), cols_(cols) {
  if (rows <= 0 || cols <= 0) throw ArgumentError("sparse set: dimensions must be positive");
}

SparseEntrySet::SparseEntrySet(Index rows, Index cols, std::vector<SparseEntry> entries)
    : SparseEntrySet(rows, cols) {
  for (const auto& e : entries) {
    if (e.row < 0 || e.row >= rows || e.col < 0 || e.col >= cols)
      throw ArgumentError("sparse set: coordinate out of range");
    if (e.value == 0.0 || !std::isfinite(e.value))
      throw ArgumentError("sparse set: values must be nonzero and finite");
  }
  std::sort(entries.begin(), entries.end(), [](const SparseEntry& a, const SparseEntry& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  for (std::size_t k = 1; k < entries.size(); ++k) {
    if (entries[k].row == entries[k - 1].row && entries[k].col == entries[k - 1].col)
      throw ArgumentError("sparse set: duplicate coordinate");
  }
  entries_ = std::move(entries);
}

DenseMatrix SparseEntrySet::dense() const {
  DenseMatrix out = DenseMatrix::Zero(rows_, cols_);
  add_to(out);
  return out;
}

void SparseEntrySet::add_to(DenseMatrix& target, double scale) const {
  for (const auto& e : entries_) target(e.row, e.col) += scale * e.value;
}

double SparseEntrySet::squared_norm() const {
  double acc = 0.0;
  for (const auto& e : entries_) acc += e.value * e.value;
  return acc;
}

FactoredLowRank thin_svd(const DenseMatrix& m, Index rank) {
  if (rank <= 0 || rank > std::min(m.rows(), m.cols()))
    throw ArgumentError("thin_svd: rank " + std::to_string(rank) + " out of range");
  require_finite(m, "thin_svd");
  SvdParts parts = svd_thin(m);
  FactoredLowRank out;
  out.U = parts.u.leftCols(rank);
  out.sigma = parts.s.head(rank);
  out.V = parts.v.leftCols(rank);
  return out;
}

Vector singular_values(const DenseMatrix& m) {
  if (m.size() == 0) return Vector();
  if (std::min(m.rows(), m.cols()) <= 16) {
    Eigen::JacobiSVD<DenseMatrix> svd(m);
    return svd.singularValues();
  }
  Eigen::BDCSVD<DenseMatrix> svd(m);
  return svd.singularValues();
}

double max_row_norm(const DenseMatrix& m) {
  if (m.size() == 0) return 0.0;
  return m.rowwise().norm().maxCoeff();
}

IncoherenceReading incoherence(const DenseMatrix& frame) {
  if (frame.cols() == 0) return {};
  if (gram_deviation(frame) > 1e-6)
    throw ArgumentError("incoherence: columns are not orthonormal");
  IncoherenceReading out;
  out.max_row_norm = max_row_norm(frame);
  out.mu = static_cast<double>(frame.rows()) / static_cast<double>(frame.cols()) *
           out.max_row_norm * out.max_row_norm;
  return out;
}

namespace {

// Indices (row-major linear) of the s entries with the largest magnitude.
std::vector<Index> top_indices(const DenseMatrix& m, Index s) {
  const Index cols = m.cols();
  std::vector<Index> idx;
  idx.reserve(static_cast<std::size_t>(m.size()));
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < cols; ++j)
      if (m(i, j) != 0.0) idx.push_back(i * cols + j);
  const auto keep = static_cast<std::size_t>(std::min<Index>(s, static_cast<Index>(idx.size())));
  auto larger = [&](Index a, Index b) {
    const double va = std::abs(m(a / cols, a % cols));
    const double vb = std::abs(m(b / cols, b % cols));
    return va != vb ? va > vb : a < b;
  };
  if (keep < idx.size()) {
    std::nth_element(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(keep), idx.end(), larger);
    idx.resize(keep);
  }
  return idx;
}

}  // namespace

SparseEntrySet hard_threshold(const DenseMatrix& m, Index s) {
  if (s < 0 || s > m.size()) throw ArgumentError("hard_threshold: s out of range");
  std::vector<Index> idx = top_indices(m, s);
  std::sort(idx.begin(), idx.end());
  std::vector<SparseEntry> entries;
  entries.reserve(idx.size());
  const Index cols = m.cols();
  for (Index k : idx) entries.push_back({k / cols, k % cols, m(k / cols, k % cols)});
  return SparseEntrySet(m.rows(), m.cols(), std::move(entries));
}

double top_squared_sum(const DenseMatrix& m, Index s) {
  if (s <= 0) return 0.0;
  const Index cols = m.cols();
  double acc = 0.0;
  for (Index k : top_indices(m, s)) {
    const double v = m(k / cols, k % cols);
    acc += v * v;
  }
  return acc;
}

SignResult matrix_sign(const DenseMatrix& m) {
  require_finite(m, "matrix_sign");
  if (m.size() == 0 || m.cwiseAbs().maxCoeff() == 0.0)
    throw ArgumentError("matrix_sign: input must be nonzero");
  SvdParts parts = svd_thin(m);
  const Index k = parts.s.size();
  const double cutoff = kRankTol * parts.s(0);

  SignResult out;
  for (Index i = 0; i < k; ++i)
    if (parts.s(i) <= cutoff) out.deficient.push_back(i);

  if (out.flagged()) {
    // Singular values are sorted, so the deficient directions are the trailing
    // block. Keep the well-posed left vectors and complete the rest.
    const Index good = k - static_cast<Index>(out.deficient.size());
    DenseMatrix keep = parts.u.leftCols(good);
    DenseMatrix fill = orthonormal_complement(keep, m.rows(), k - good);
    parts.u.rightCols(k - good) = fill;
  }
  out.value = parts.u * parts.v.transpose();
  return out;
}

Vector project_simplex_vector(const Vector& v, double total) {
  const Index n = v.size();
  if (n == 0) return v;
  std::vector<double> sorted(v.data(), v.data() + n);
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  double cumsum = 0.0;
  double theta = 0.0;
  for (Index j = 0; j < n; ++j) {
    cumsum += sorted[static_cast<std::size_t>(j)];
    const double candidate = (cumsum - total) / static_cast<double>(j + 1);
    if (sorted[static_cast<std::size_t>(j)] - candidate > 0.0) theta = candidate;
  }
  Vector out = (v.array() - theta).cwiseMax(0.0).matrix();
  return out;
}

DenseMatrix project_simplex(const DenseMatrix& m, ProjectionMode mode) {
  require_finite(m, "project_simplex");
  DenseMatrix out(m.rows(), m.cols());
  if (mode == ProjectionMode::Global) {
    // Reshape as one vector (order is irrelevant for the projection).
    Eigen::Map<const Vector> flat(m.data(), m.size());
    Vector projected = project_simplex_vector(flat);
    out = Eigen::Map<const DenseMatrix>(projected.data(), m.rows(), m.cols());
  } else {
    for (Index i = 0; i < m.rows(); ++i)
      out.row(i) = project_simplex_vector(m.row(i).transpose()).transpose();
  }
  return out;
}

DenseMatrix flat_frame(Index rows, Index rank) {
  if (rank <= 0 || rank > rows) throw ArgumentError("flat_frame: rank out of range");
  if (rank == rows) return DenseMatrix::Identity(rows, rows);
  DenseMatrix f(rows, rank);
  const double p = static_cast<double>(rows);
  Index col = 0;
  if (rank % 2 == 1) {
    f.col(col++).setConstant(1.0 / std::sqrt(p));
  }
  // cos/sin pairs at frequencies 1, 2, ... (all strictly below p/2).
  for (Index freq = 1; col < rank; ++freq) {
    for (Index j = 0; j < rows; ++j) {
      const double angle = 2.0 * std::numbers::pi * static_cast<double>(freq * j) / p;
      f(j, col) = std::sqrt(2.0 / p) * std::cos(angle);
      f(j, col + 1) = std::sqrt(2.0 / p) * std::sin(angle);
    }
    col += 2;
  }
  return f;
}

namespace {

bool frame_feasible(const DenseMatrix& f, double bound) {
  return gram_deviation(f) <= kFrameTol && max_row_norm(f) <= bound + kFrameTol;
}

DenseMatrix clip_rows(const DenseMatrix& f, double bound) {
  DenseMatrix out = f;
  for (Index i = 0; i < f.rows(); ++i) {
    const double n = f.row(i).norm();
    if (n > bound) out.row(i) *= bound / n;
  }
  return out;
}

}  // namespace

DenseMatrix project_rows_incoherent(const DenseMatrix& frame, double bound) {
  require_finite(frame, "project_rows_incoherent");
  const Index p = frame.rows();
  const Index r = frame.cols();
  if (r == 0 || r > p) throw ArgumentError("project_rows_incoherent: bad frame shape");
  if (!(bound > 0.0) || bound * bound * static_cast<double>(p) < static_cast<double>(r) * (1.0 - 1e-12))
    throw ArgumentError("project_rows_incoherent: bound below sqrt(rank/rows), constraint set empty");
  if (frame_feasible(frame, bound)) return frame;

  DenseMatrix current = matrix_sign(frame).value;
  for (int round = 0; round < 50 && !frame_feasible(current, bound); ++round) {
    DenseMatrix clipped = clip_rows(current, bound);
    DenseMatrix next = matrix_sign(clipped).value;
    const double change = (next - current).norm();
    current = std::move(next);
    if (change < 1e-10) break;
  }
  if (frame_feasible(current, bound)) return current;

  // Alternation stalled (e.g. a single spiky coordinate that clipping cannot
  // spread). Blend toward an equal-row-norm frame, rotated to align with the
  // current one so the blend never loses rank, and bisect for the first
  // feasible mixing weight.
  const DenseMatrix flat = flat_frame(p, r);
  const DenseMatrix cross = flat.transpose() * current;
  const DenseMatrix rotation = cross.cwiseAbs().maxCoeff() > 0.0 ? matrix_sign(cross).value
                                                                 : DenseMatrix::Identity(r, r);
  const DenseMatrix target = flat * rotation;
  auto blended = [&](double t) { return matrix_sign((1.0 - t) * current + t * target).value; };
  double lo = 0.0;
  double hi = 1.0;
  DenseMatrix best = target;
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    DenseMatrix cand = blended(mid);
    if (frame_feasible(cand, bound)) {
      hi = mid;
      best = std::move(cand);
    } else {
      lo = mid;
    }
  }
  return best;
}

double spectral_norm(const DenseMatrix& m) {
  if (m.size() == 0) return 0.0;
  if (std::min(m.rows(), m.cols()) <= 64) {
    Vector s = singular_values(m);
    return s.size() ? s(0) : 0.0;
  }
  if (m.cwiseAbs().maxCoeff() == 0.0) return 0.0;
  // Power iteration on M^T M from a seeded start.
  Rng rng(0x5eed);
  Vector x(m.cols());
  for (Index i = 0; i < x.size(); ++i) x(i) = rng.normal();
  x.normalize();
  double estimate = 0.0;
  for (int it = 0; it < 10000; ++it) {
    Vector y = m.transpose() * (m * x);
    const double ny = y.norm();
    if (ny == 0.0) return 0.0;
    const double next = std::sqrt(ny);
    x = y / ny;
    if (std::abs(next - estimate) <= 1e-10 * next) return next;
    estimate = next;
  }
  return estimate;
}

Norms norms(const DenseMatrix& m) {
  Norms out;
  if (m.size() == 0) return out;
  out.fro = m.norm();
  out.max = m.cwiseAbs().maxCoeff();
  out.l1 = m.cwiseAbs().sum();
  out.spectral = spectral_norm(m);
  return out;
}

SeparationReading separation_ratio(const FactoredLowRank& p, const FactoredLowRank& q) {
  if (p.rows() != q.rows() || p.cols() != q.cols())
    throw ArgumentError("separation_ratio: shape mismatch");
  const DenseMatrix delta = p.dense() - q.dense();
  const double fro2 = delta.squaredNorm();
  SeparationReading out;
  if (fro2 == 0.0) return out;
  const double mx = delta.cwiseAbs().maxCoeff();
  out.ratio = mx * mx / fro2;
  const double mu = std::max({incoherence(p.U).mu, incoherence(p.V).mu, incoherence(q.U).mu,
                              incoherence(q.V).mu});
  const double r = static_cast<double>(std::max(p.rank(), q.rank()));
  if (mu > 0.0 && r > 0.0)
    out.scaled = out.ratio * static_cast<double>(p.rows()) / (mu * r * r * r * r);
  return out;
}

std::pair<FactoredLowRank, FactoredLowRank> adversarial_pair(Index p, double eps) {
  if (p < 3) throw ArgumentError("adversarial_pair: p must be at least 3");
  if (!(eps > 0.0)) throw ArgumentError("adversarial_pair: eps must be positive");
  const double root = std::sqrt(static_cast<double>(p));
  Vector u = Vector::Constant(p, 1.0 / root);
  Vector v = u;
  v(p - 2) += eps / root;
  v(p - 1) -= eps / root;

  FactoredLowRank first;
  first.U = u;
  first.V = u;
  first.sigma = Vector::Constant(1, 1.0);

  FactoredLowRank second;
  const double vnorm = v.norm();
  second.U = u;
  second.V = v / vnorm;
  second.sigma = Vector::Constant(1, vnorm);
  return {first, second};
}

}  // namespace lrsm
