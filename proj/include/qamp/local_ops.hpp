#pragma once

#include <algorithm>
#include <cstdint>
#include <span>
#include <vector>

#include "qamp/types.hpp"

// Qubit 0 is the most significant bit of a basis index. A local operator on
// qubits (q_0, ..., q_{k-1}) reads q_0 as the most significant local bit.

namespace qamp {

inline std::uint64_t qubit_bit(int q, int n_qubits) { return std::uint64_t{1} << (n_qubits - 1 - q); }

/// Precomputed index plan for applying a 2^k x 2^k matrix to k qubits of an
/// n-qubit state vector in place.
class LocalOp {
 public:
  LocalOp() = default;

  LocalOp(Matrix op, std::vector<int> qubits, int n_qubits) : op_(std::move(op)), qubits_(std::move(qubits)), n_(n_qubits) {
    const int k = static_cast<int>(qubits_.size());
    if (op_.rows() != (Eigen::Index{1} << k) || op_.cols() != op_.rows())
      throw StructuralError("local operator dimension does not match its support");
    for (int q : qubits_)
      if (q < 0 || q >= n_) throw StructuralError("local operator qubit out of range");
    offsets_.resize(std::size_t{1} << k);
    for (std::size_t l = 0; l < offsets_.size(); ++l) {
      std::uint64_t off = 0;
      for (int b = 0; b < k; ++b)
        if ((l >> (k - 1 - b)) & 1U) off |= qubit_bit(qubits_[b], n_);
      offsets_[l] = off;
    }
    for (int q : qubits_) positions_.push_back(n_ - 1 - q);
    std::sort(positions_.begin(), positions_.end());
    if (std::adjacent_find(positions_.begin(), positions_.end()) != positions_.end())
      throw StructuralError("local operator repeats a qubit");
    diagonal_ = true;
    for (Eigen::Index i = 0; i < op_.rows() && diagonal_; ++i)
      for (Eigen::Index j = 0; j < op_.cols(); ++j)
        if (i != j && op_(i, j) != cplx{0.0, 0.0}) {
          diagonal_ = false;
          break;
        }
  }

  const Matrix& matrix() const { return op_; }
  const std::vector<int>& qubits() const { return qubits_; }
  int n_qubits() const { return n_; }

  void apply(std::span<cplx> state) const {
    const std::size_t groups = state.size() >> qubits_.size();
    const std::size_t width = offsets_.size();
    if (diagonal_) {
      for (std::size_t g = 0; g < groups; ++g) {
        const std::uint64_t base = spread(g);
        for (std::size_t l = 0; l < width; ++l) state[base + offsets_[l]] *= op_(l, l);
      }
      return;
    }
    std::vector<cplx> in(width), out(width);
    for (std::size_t g = 0; g < groups; ++g) {
      const std::uint64_t base = spread(g);
      for (std::size_t l = 0; l < width; ++l) in[l] = state[base + offsets_[l]];
      for (std::size_t r = 0; r < width; ++r) {
        cplx acc{0.0, 0.0};
        for (std::size_t c = 0; c < width; ++c) acc += op_(r, c) * in[c];
        out[r] = acc;
      }
      for (std::size_t l = 0; l < width; ++l) state[base + offsets_[l]] = out[l];
    }
  }

  void apply(Vector& v) const { apply(std::span<cplx>(v.data(), static_cast<std::size_t>(v.size()))); }

 private:
  // Inserts zero bits at the target positions of a compressed group index.
  std::uint64_t spread(std::uint64_t g) const {
    for (int p : positions_) {
      const std::uint64_t low = g & ((std::uint64_t{1} << p) - 1);
      g = ((g >> p) << (p + 1)) | low;
    }
    return g;
  }

  Matrix op_;
  std::vector<int> qubits_;
  std::vector<int> positions_;
  std::vector<std::uint64_t> offsets_;
  int n_ = 0;
  bool diagonal_ = false;
};

inline void apply_local(const Matrix& op, const std::vector<int>& qubits, int n_qubits, Vector& v) {
  LocalOp(op, qubits, n_qubits).apply(v);
}

inline std::vector<int> shift_support(const std::vector<int>& support, int offset) {
  std::vector<int> out(support);
  for (int& q : out) q += offset;
  return out;
}

inline Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

/// Largest singular value.
inline double operator_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues()(0);
}

/// Spectral norm of a Hermitian matrix via its eigenvalues.
inline double hermitian_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

/// Dense operator of every basis column pushed through `apply`.
template <class ApplyFn>
Matrix dense_from_apply(std::size_t dim, ApplyFn&& apply) {
  Matrix out(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  Vector col(static_cast<Eigen::Index>(dim)), res(static_cast<Eigen::Index>(dim));
  for (std::size_t c = 0; c < dim; ++c) {
    col.setZero();
    col[static_cast<Eigen::Index>(c)] = 1.0;
    apply(col, res);
    out.col(static_cast<Eigen::Index>(c)) = res;
  }
  return out;
}

}  // namespace qamp
