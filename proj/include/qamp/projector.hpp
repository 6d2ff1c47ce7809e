#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "qamp/local_ops.hpp"
#include "qamp/types.hpp"

namespace qamp {

struct ProjectorReport {
  double hermiticity_residual = 0.0;
  double idempotency_residual = 0.0;
  bool ok = false;
};

namespace detail {
// Operator norm, replaced by the Frobenius upper bound for large matrices
// that already sit below the tolerance.
inline double residual_norm(const Matrix& m, double tolerance) {
  const double f = m.norm();
  if (f == 0.0) return 0.0;
  if (m.rows() > 32 && f <= tolerance) return f;
  return operator_norm(m);
}
}  // namespace detail

/// Residuals are operator norms of M - M^dagger and M^2 - M.
inline ProjectorReport validate_projector(const Matrix& m, double tolerance = tol::projector) {
  ProjectorReport r;
  if (m.rows() != m.cols()) return r;
  r.hermiticity_residual = detail::residual_norm(m - m.adjoint(), tolerance);
  r.idempotency_residual = detail::residual_norm(m * m - m, tolerance);
  r.ok = r.hermiticity_residual <= tolerance && r.idempotency_residual <= tolerance;
  return r;
}

/// An orthogonal projector acting on a strictly increasing list of qubits.
class LocalProjector {
 public:
  LocalProjector() = default;

  LocalProjector(std::vector<int> support, Matrix matrix, double tolerance = tol::projector)
      : support_(std::move(support)), matrix_(std::move(matrix)) {
    for (std::size_t i = 0; i < support_.size(); ++i) {
      if (support_[i] < 0) throw StructuralError("projector support has a negative qubit");
      if (i > 0 && support_[i] <= support_[i - 1]) throw StructuralError("projector support must be strictly increasing");
    }
    const Eigen::Index dim = Eigen::Index{1} << support_.size();
    if (matrix_.rows() != dim || matrix_.cols() != dim)
      throw StructuralError("projector matrix must be " + std::to_string(dim) + "x" + std::to_string(dim) +
                            " for a support of size " + std::to_string(support_.size()));
    const auto rep = validate_projector(matrix_, tolerance);
    if (!rep.ok)
      throw StructuralError("matrix is not a projector (hermiticity " + std::to_string(rep.hermiticity_residual) +
                            ", idempotency " + std::to_string(rep.idempotency_residual) + ")");
  }

  const std::vector<int>& support() const { return support_; }
  const Matrix& matrix() const { return matrix_; }
  int locality() const { return static_cast<int>(support_.size()); }

  Matrix complement() const { return Matrix::Identity(matrix_.rows(), matrix_.cols()) - matrix_; }

  /// Same projector with every qubit index moved by `offset`.
  LocalProjector shifted(int offset) const {
    LocalProjector p;
    p.support_ = shift_support(support_, offset);
    p.matrix_ = matrix_;
    return p;
  }

 private:
  std::vector<int> support_;
  Matrix matrix_;
};

/// Dense 2^n x 2^n embedding of a local operator.
inline Matrix embed_global(const Matrix& local, const std::vector<int>& support, int n_qubits) {
  if (n_qubits > kDenseQubitLimit) throw BudgetError("embed_global is limited to " + std::to_string(kDenseQubitLimit) + " qubits");
  const Eigen::Index dim = Eigen::Index{1} << n_qubits;
  Matrix out = Matrix::Identity(dim, dim);
  if (support.empty()) return local.size() == 1 ? Matrix(local(0, 0) * out) : out;
  LocalOp op(local, support, n_qubits);
  for (Eigen::Index c = 0; c < dim; ++c) {
    Vector col = out.col(c);
    op.apply(col);
    out.col(c) = col;
  }
  return out;
}

inline Matrix embed_global(const LocalProjector& p, int n_qubits) { return embed_global(p.matrix(), p.support(), n_qubits); }

inline std::vector<int> support_union(const std::vector<int>& a, const std::vector<int>& b) {
  std::vector<int> out;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

inline bool supports_overlap(const std::vector<int>& a, const std::vector<int>& b) {
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (*i == *j) return true;
    if (*i < *j) ++i; else ++j;
  }
  return false;
}

/// Matrix of `p` on the qubit list `onto`, which must contain its support.
inline Matrix lift_to(const LocalProjector& p, const std::vector<int>& onto) {
  std::vector<int> pos;
  for (int q : p.support()) {
    auto it = std::lower_bound(onto.begin(), onto.end(), q);
    if (it == onto.end() || *it != q) throw StructuralError("lift_to target does not contain the support");
    pos.push_back(static_cast<int>(it - onto.begin()));
  }
  const int k = static_cast<int>(onto.size());
  const Eigen::Index dim = Eigen::Index{1} << k;
  Matrix out = Matrix::Identity(dim, dim);
  LocalOp op(p.matrix(), pos, k);
  for (Eigen::Index c = 0; c < dim; ++c) {
    Vector col = out.col(c);
    op.apply(col);
    out.col(c) = col;
  }
  return out;
}

/// Operator norm of [A, B] on the union of the two supports.
inline double commutator_norm(const LocalProjector& a, const LocalProjector& b) {
  if (!supports_overlap(a.support(), b.support())) return 0.0;
  const auto onto = support_union(a.support(), b.support());
  const Matrix ma = lift_to(a, onto);
  const Matrix mb = lift_to(b, onto);
  const Matrix c = ma * mb - mb * ma;
  if (c.norm() == 0.0) return 0.0;
  // i[A, B] is Hermitian for Hermitian A and B.
  return hermitian_norm(cplx{0.0, 1.0} * c);
}

}  // namespace qamp
