#pragma once

// Dense/sparse matrix primitives shared by the solver and the estimators.

#include <Eigen/Dense>

#include <cstddef>
#include <utility>
#include <vector>

namespace lrsm {

using Index = Eigen::Index;
using DenseMatrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Throws ArgumentError when any entry is NaN or infinite.
void require_finite(const DenseMatrix& m, const char* what);

/// Thin factorization L = U diag(sigma) V^T with orthonormal U, V.
struct FactoredLowRank {
  DenseMatrix U;
  Vector sigma;
  DenseMatrix V;

  Index rows() const { return U.rows(); }
  Index cols() const { return V.rows(); }
  Index rank() const { return sigma.size(); }

  DenseMatrix dense() const;

  // Zero factorization of the given shape and rank (frames are the leading
  // identity columns).
  static FactoredLowRank zero(Index rows, Index cols, Index rank);
};

struct SparseEntry {
  Index row;
  Index col;
  double value;

  friend bool operator==(const SparseEntry&, const SparseEntry&) = default;
};

/// Coordinate-form sparse matrix. Entries are kept sorted in row-major order,
/// coordinates are distinct and values are nonzero.
class SparseEntrySet {
public:
  SparseEntrySet() = default;
  SparseEntrySet(Index rows, Index cols);
  SparseEntrySet(Index rows, Index cols, std::vector<SparseEntry> entries);

  Index rows() const { return rows_; }
  Index cols() const { return cols_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  const std::vector<SparseEntry>& entries() const { return entries_; }

  DenseMatrix dense() const;
  // target += scale * this
  void add_to(DenseMatrix& target, double scale = 1.0) const;
  double squared_norm() const;

private:
  Index rows_ = 0;
  Index cols_ = 0;
  std::vector<SparseEntry> entries_;
};

struct IncoherenceReading {
  double mu = 0.0;
  double max_row_norm = 0.0;
};

/// Best rank-`rank` factorization by singular value truncation.
FactoredLowRank thin_svd(const DenseMatrix& m, Index rank);

/// Full singular value list, nonincreasing.
Vector singular_values(const DenseMatrix& m);

/// mu = (p / r) * max_i ||U_i||^2 for an orthonormal-column frame.
IncoherenceReading incoherence(const DenseMatrix& frame);

/// Keeps the s largest-magnitude entries. Ties go to the smaller row-major
/// coordinate, so exactly min(s, nnz) entries survive.
SparseEntrySet hard_threshold(const DenseMatrix& m, Index s);

/// Sum of the s largest squared magnitudes (the squared (s,F) norm).
double top_squared_sum(const DenseMatrix& m, Index s);

struct SignResult {
  DenseMatrix value;
  // Singular directions treated as zero (below 1e-12 * sigma_1) and replaced
  // by a deterministic orthonormal completion.
  std::vector<Index> deficient;

  bool flagged() const { return !deficient.empty(); }
};

/// Polar factor U_X V_X^T of a nonzero matrix.
SignResult matrix_sign(const DenseMatrix& m);

enum class ProjectionMode { Global, Rowwise };

/// Euclidean projection of a vector onto {x >= 0, sum x = total}.
Vector project_simplex_vector(const Vector& v, double total = 1.0);

/// Global: all entries jointly onto the unit-mass simplex.
/// Rowwise: each row separately onto the unit-mass simplex.
DenseMatrix project_simplex(const DenseMatrix& m, ProjectionMode mode = ProjectionMode::Global);

/// Orthonormal frame whose rows all have 2-norm <= bound.
DenseMatrix project_rows_incoherent(const DenseMatrix& frame, double bound);

/// Equal-row-norm orthonormal frame (every row has norm sqrt(r/p)).
DenseMatrix flat_frame(Index rows, Index rank);

double max_row_norm(const DenseMatrix& m);

struct Norms {
  double fro = 0.0;
  double spectral = 0.0;
  double max = 0.0;
  double l1 = 0.0;
};

Norms norms(const DenseMatrix& m);
double spectral_norm(const DenseMatrix& m);

struct SeparationReading {
  double ratio = 0.0;
  double scaled = 0.0;
};

/// ||P - Q||_max^2 / ||P - Q||_F^2 and its incoherence/rank normalization.
SeparationReading separation_ratio(const FactoredLowRank& p, const FactoredLowRank& q);

/// Rank-1 pair with a maximally concentrated difference:
/// u = 1/sqrt(p), v = u + eps/sqrt(p) (e_{p-1} - e_p), P = u u^T, Q = u v^T.
std::pair<FactoredLowRank, FactoredLowRank> adversarial_pair(Index p, double eps);

}  // namespace lrsm
