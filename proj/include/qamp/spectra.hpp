#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <span>
#include <string>

#include "qamp/local_ops.hpp"
#include "qamp/random.hpp"
#include "qamp/types.hpp"

namespace qamp {

/// Anything that acts as a Hermitian matrix on n qubits.
template <class Op>
concept HermitianOperator = requires(const Op& op, std::span<const cplx> in, std::span<cplx> out) {
  { op.n_qubits() } -> std::convertible_to<int>;
  op.apply(in, out);
};

class DenseOperator {
 public:
  explicit DenseOperator(Matrix m) : m_(std::move(m)) {
    n_ = 0;
    while ((Eigen::Index{1} << n_) < m_.rows()) ++n_;
    if ((Eigen::Index{1} << n_) != m_.rows() || m_.rows() != m_.cols()) throw StructuralError("dense operator must be 2^n square");
  }
  int n_qubits() const { return n_; }
  void apply(std::span<const cplx> in, std::span<cplx> out) const {
    Eigen::Map<const Vector> x(in.data(), static_cast<Eigen::Index>(in.size()));
    Eigen::Map<Vector> y(out.data(), static_cast<Eigen::Index>(out.size()));
    y.noalias() = m_ * x;
  }
  Matrix dense() const { return m_; }

 private:
  Matrix m_;
  int n_ = 0;
};

template <HermitianOperator Op>
void apply_op(const Op& op, const Vector& in, Vector& out) {
  out.resize(in.size());
  op.apply(std::span<const cplx>(in.data(), static_cast<std::size_t>(in.size())),
           std::span<cplx>(out.data(), static_cast<std::size_t>(out.size())));
}

template <HermitianOperator Op>
Vector apply_op(const Op& op, const Vector& in) {
  Vector out;
  apply_op(op, in, out);
  return out;
}

template <HermitianOperator Op>
Matrix to_dense(const Op& op) {
  if constexpr (requires { { op.dense() } -> std::convertible_to<Matrix>; }) {
    return op.dense();
  } else {
    if (op.n_qubits() > kDenseQubitLimit) throw BudgetError("dense conversion is limited to 12 qubits");
    return dense_from_apply(std::size_t{1} << op.n_qubits(), [&](const Vector& x, Vector& y) { apply_op(op, x, y); });
  }
}

struct SpectralResult {
  double lambda_min = 0.0;
  Vector ground_state;
  double residual = 0.0;
  int iterations = 0;
  std::string method;
  RealVector eigenvalues;  ///< full spectrum, dense path only
  Matrix ground_space;     ///< orthonormal columns, dense path only
};

/// <v|op|v>; the imaginary part must vanish.
template <HermitianOperator Op>
double energy(const Op& op, const Vector& v) {
  const cplx e = v.dot(apply_op(op, v));
  if (std::abs(e.imag()) > tol::imag_energy * std::max(1.0, v.squaredNorm()))
    throw StructuralError("energy has an imaginary part of " + std::to_string(e.imag()));
  return e.real();
}

/// Full dense eigensolve; ground space collects eigenvalues within 1e-9 of the minimum.
inline SpectralResult min_eig_dense_matrix(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(m);
  if (es.info() != Eigen::Success) throw ConvergenceError("dense eigensolver failed");
  SpectralResult r;
  r.method = "dense";
  r.eigenvalues = es.eigenvalues();
  r.lambda_min = r.eigenvalues[0];
  r.ground_state = es.eigenvectors().col(0);
  Eigen::Index deg = 1;
  while (deg < r.eigenvalues.size() && r.eigenvalues[deg] - r.lambda_min <= 1e-9) ++deg;
  r.ground_space = es.eigenvectors().leftCols(deg);
  r.residual = (m * r.ground_state - r.lambda_min * r.ground_state).norm();
  return r;
}

template <HermitianOperator Op>
SpectralResult min_eig_dense(const Op& op) {
  if (op.n_qubits() > kDenseQubitLimit) throw BudgetError("dense eigensolver is limited to 12 qubits");
  return min_eig_dense_matrix(to_dense(op));
}

struct IterativeOptions {
  double tol = tol::iterative_eig;
  int max_iter = 20000;
  std::uint64_t seed = 0;
  int basis = 48;
  int keep = 8;
};

/// Thick-restarted Krylov (Lanczos with full reorthogonalisation, written in
/// Rayleigh-Ritz form) for the lowest eigenpair. Converged when
/// ||H v - lambda v|| <= tol.
template <HermitianOperator Op>
SpectralResult min_eig_iterative(const Op& op, const IterativeOptions& opt = {}) {
  const Eigen::Index n = Eigen::Index{1} << op.n_qubits();
  if (n <= opt.basis) {
    auto r = min_eig_dense(op);
    r.method = "iterative";
    return r;
  }
  const Eigen::Index kmax = opt.basis;
  const Eigen::Index keep = std::min<Eigen::Index>(opt.keep, kmax - 2);
  Matrix v(n, kmax), av(n, kmax);
  Matrix t = Matrix::Zero(kmax, kmax);
  Eigen::Index k = 0;
  int matvecs = 0;
  Rng rng(opt.seed);
  Vector w(n), aw(n);

  auto add = [&](Vector x) {
    for (int attempt = 0;; ++attempt) {
      const double before = x.norm();
      for (int pass = 0; pass < 2; ++pass)
        if (k > 0) x -= v.leftCols(k) * (v.leftCols(k).adjoint() * x);
      const double after = x.norm();
      if (after > 1e-10 * std::max(before, 1e-300)) break;
      if (attempt > 4) throw ConvergenceError("Krylov basis could not be extended");
      x = random_state(static_cast<std::size_t>(n), rng);
    }
    x /= x.norm();
    apply_op(op, x, aw);
    ++matvecs;
    v.col(k) = x;
    av.col(k) = aw;
    for (Eigen::Index i = 0; i <= k; ++i) {
      const cplx e = v.col(i).dot(aw);
      t(i, k) = e;
      t(k, i) = std::conj(e);
    }
    t(k, k) = t(k, k).real();
    ++k;
  };

  add(random_state(static_cast<std::size_t>(n), rng));
  SpectralResult res;
  res.method = "iterative";
  for (;;) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(t.topLeftCorner(k, k));
    const double theta = es.eigenvalues()[0];
    const Vector y = es.eigenvectors().col(0);
    Vector x = v.leftCols(k) * y;
    Vector ax = av.leftCols(k) * y;
    Vector r = ax - theta * x;
    const double rn = r.norm();
    if (rn <= opt.tol || k >= n) {
      const double nx = x.norm();
      res.ground_state = x / nx;
      res.lambda_min = energy(op, res.ground_state);
      res.residual = (apply_op(op, res.ground_state) - res.lambda_min * res.ground_state).norm();
      res.iterations = matvecs;
      if (res.residual <= opt.tol * 10.0 || k >= n) return res;
    }
    if (matvecs >= opt.max_iter)
      throw ConvergenceError("iterative eigensolver did not reach residual " + std::to_string(opt.tol) + " in " +
                             std::to_string(opt.max_iter) + " products (residual " + std::to_string(rn) + ")");
    if (k == kmax) {
      const Matrix yk = es.eigenvectors().leftCols(keep);
      Matrix nv = v.leftCols(k) * yk;
      Matrix nav = av.leftCols(k) * yk;
      v.leftCols(keep) = nv;
      av.leftCols(keep) = nav;
      t.setZero();
      for (Eigen::Index i = 0; i < keep; ++i) t(i, i) = es.eigenvalues()[i];
      k = keep;
    }
    add(r);
  }
}

enum class EigMethod { Auto, Dense, Iterative };

/// Dense up to `dense_limit` qubits, iterative beyond.
template <HermitianOperator Op>
SpectralResult min_eig(const Op& op, EigMethod method = EigMethod::Auto, const IterativeOptions& opt = {},
                       int dense_limit = 10) {
  if (method == EigMethod::Dense || (method == EigMethod::Auto && op.n_qubits() <= dense_limit)) return min_eig_dense(op);
  return min_eig_iterative(op, opt);
}

/// Seeded unit vector drawn from the span of the ground-space columns.
inline Vector ground_state_representative(const Matrix& ground_space, std::uint64_t seed) {
  Rng rng(seed);
  Vector c(ground_space.cols());
  for (Eigen::Index i = 0; i < c.size(); ++i) c[i] = rng.complex_normal();
  Vector v = ground_space * c;
  return v / v.norm();
}

}  // namespace qamp
