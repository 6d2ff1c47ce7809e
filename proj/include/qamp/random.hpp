#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "qamp/types.hpp"

namespace qamp {

/// Seeded generator whose output is fixed by the standard and by the
/// bit-to-double conversions below, so streams reproduce across builds.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t bits() { return engine_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) {
    if (n <= 1) return 0;
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % n;
  }

  int range(int lo, int hi) { return lo + static_cast<int>(below(static_cast<std::uint64_t>(hi - lo + 1))); }

  bool coin(double p = 0.5) { return uniform() < p; }

  /// Standard normal via Box-Muller.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double rad = std::sqrt(-2.0 * std::log(u1));
    const double ang = 2.0 * std::numbers::pi * u2;
    spare_ = rad * std::sin(ang);
    has_spare_ = true;
    return rad * std::cos(ang);
  }

  cplx complex_normal() {
    const double re = normal();
    return {re, normal()};
  }

  template <class T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[below(i)]);
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

inline Vector random_state(std::size_t dim, Rng& rng) {
  Vector v(static_cast<Eigen::Index>(dim));
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = rng.complex_normal();
  return v / v.norm();
}

/// Orthogonal projector onto a Haar-like random subspace of the given rank.
inline Matrix random_projector(int k, int rank, Rng& rng) {
  const Eigen::Index dim = Eigen::Index{1} << k;
  Matrix basis(dim, rank);
  for (int c = 0; c < rank; ++c) {
    Vector v(dim);
    for (Eigen::Index i = 0; i < dim; ++i) v[i] = rng.complex_normal();
    for (int pass = 0; pass < 2; ++pass)
      for (int p = 0; p < c; ++p) v -= basis.col(p) * basis.col(p).dot(v);
    basis.col(c) = v / v.norm();
  }
  Matrix proj = basis * basis.adjoint();
  return (proj + proj.adjoint()) / 2.0;
}

}  // namespace qamp
