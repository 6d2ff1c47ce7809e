#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qamp/coloring.hpp"
#include "qamp/local_ops.hpp"
#include "qamp/projector.hpp"
#include "qamp/types.hpp"

namespace qamp {

class LayeredHamiltonian;

/// Validates and assembles a layered Hamiltonian. Layers default to an
/// equitable colouring of the constraint graph; weights default to m_chi / m.
/// `check_commutation` may be disabled only for terms already known to commute.
LayeredHamiltonian build_layered(int n_qubits, std::vector<LocalProjector> terms,
                                 std::optional<std::vector<std::vector<int>>> layers = std::nullopt,
                                 std::optional<std::vector<double>> weights = std::nullopt,
                                 bool check_commutation = true);

/// H = sum_chi w_chi H_chi with H_chi the average of the layer's projectors.
/// Projectors inside a layer commute.
class LayeredHamiltonian {
 public:
  LayeredHamiltonian() = default;

  int n_qubits() const { return n_; }
  std::size_t dim() const { return std::size_t{1} << n_; }
  const std::vector<LocalProjector>& terms() const { return terms_; }
  const std::vector<std::vector<int>>& layers() const { return layers_; }
  const std::vector<double>& weights() const { return weights_; }
  int num_layers() const { return static_cast<int>(layers_.size()); }
  std::size_t num_terms() const { return terms_.size(); }
  double min_weight() const { return *std::min_element(weights_.begin(), weights_.end()); }
  /// 1 / min weight.
  double omega_min() const { return 1.0 / min_weight(); }
  int locality() const {
    int k = 0;
    for (const auto& t : terms_) k = std::max(k, t.locality());
    return k;
  }
  /// Layer index of every term.
  std::vector<int> term_layers() const {
    std::vector<int> out(terms_.size(), -1);
    for (std::size_t c = 0; c < layers_.size(); ++c)
      for (int i : layers_[c]) out[i] = static_cast<int>(c);
    return out;
  }

  /// out = H in.
  void apply(std::span<const cplx> in, std::span<cplx> out) const {
    std::fill(out.begin(), out.end(), cplx{0.0, 0.0});
    std::vector<cplx> tmp(in.size());
    for (std::size_t c = 0; c < layers_.size(); ++c) {
      const double coef = weights_[c] / static_cast<double>(layers_[c].size());
      for (int i : layers_[c]) {
        std::copy(in.begin(), in.end(), tmp.begin());
        ops_[i].apply(tmp);
        for (std::size_t x = 0; x < tmp.size(); ++x) out[x] += coef * tmp[x];
      }
    }
  }

  /// out = H_chi in for one layer.
  void apply_layer(int chi, std::span<const cplx> in, std::span<cplx> out) const {
    std::fill(out.begin(), out.end(), cplx{0.0, 0.0});
    std::vector<cplx> tmp(in.size());
    const double coef = 1.0 / static_cast<double>(layers_[chi].size());
    for (int i : layers_[chi]) {
      std::copy(in.begin(), in.end(), tmp.begin());
      ops_[i].apply(tmp);
      for (std::size_t x = 0; x < tmp.size(); ++x) out[x] += coef * tmp[x];
    }
  }

  Vector apply(const Vector& v) const {
    Vector out(v.size());
    apply(std::span<const cplx>(v.data(), static_cast<std::size_t>(v.size())),
          std::span<cplx>(out.data(), static_cast<std::size_t>(out.size())));
    return out;
  }

  /// Dense matrix, n <= 12.
  Matrix dense() const {
    if (n_ > kDenseQubitLimit) throw BudgetError("dense Hamiltonian is limited to 12 qubits");
    const Eigen::Index d = Eigen::Index{1} << n_;
    Matrix out = Matrix::Zero(d, d);
    for (std::size_t c = 0; c < layers_.size(); ++c) {
      const double coef = weights_[c] / static_cast<double>(layers_[c].size());
      for (int i : layers_[c]) out += coef * embed_global(terms_[i], n_);
    }
    return out;
  }

  Matrix dense_layer(int chi) const {
    if (n_ > kDenseQubitLimit) throw BudgetError("dense Hamiltonian is limited to 12 qubits");
    const Eigen::Index d = Eigen::Index{1} << n_;
    Matrix out = Matrix::Zero(d, d);
    for (int i : layers_[chi]) out += embed_global(terms_[i], n_) / static_cast<double>(layers_[chi].size());
    return out;
  }

  /// Local apply plan for term i on a system of `total` qubits, shifted by `offset`.
  LocalOp term_op(int i, int offset, int total, bool complement) const {
    const auto& t = terms_[i];
    return LocalOp(complement ? t.complement() : t.matrix(), shift_support(t.support(), offset), total);
  }

  friend LayeredHamiltonian build_layered(int, std::vector<LocalProjector>, std::optional<std::vector<std::vector<int>>>,
                                          std::optional<std::vector<double>>, bool);

 private:
  int n_ = 0;
  std::vector<LocalProjector> terms_;
  std::vector<std::vector<int>> layers_;
  std::vector<double> weights_;
  std::vector<LocalOp> ops_;
};

inline LayeredHamiltonian build_layered(int n_qubits, std::vector<LocalProjector> terms,
                                        std::optional<std::vector<std::vector<int>>> layers,
                                        std::optional<std::vector<double>> weights, bool check_commutation) {
  if (n_qubits < 1) throw StructuralError("a Hamiltonian needs at least one qubit");
  if (n_qubits > 62) throw BudgetError("at most 62 qubits are addressable");
  if (terms.empty()) throw StructuralError("a Hamiltonian needs at least one term");
  for (std::size_t i = 0; i < terms.size(); ++i)
    for (int q : terms[i].support())
      if (q >= n_qubits)
        throw StructuralError("term " + std::to_string(i) + " acts on qubit " + std::to_string(q) + " but n_qubits is " +
                              std::to_string(n_qubits));

  std::vector<std::vector<int>> ls;
  if (layers) {
    ls = *layers;
    std::vector<int> seen(terms.size(), 0);
    for (auto& l : ls) {
      if (l.empty()) throw StructuralError("layers must be non-empty");
      std::sort(l.begin(), l.end());
      for (int i : l) {
        if (i < 0 || static_cast<std::size_t>(i) >= terms.size()) throw StructuralError("layer refers to a missing term");
        ++seen[i];
      }
    }
    for (std::size_t i = 0; i < terms.size(); ++i)
      if (seen[i] != 1) throw StructuralError("term " + std::to_string(i) + " must belong to exactly one layer");
  } else {
    const Coloring col = equitable_color(constraint_graph(terms));
    for (auto& cls : col.classes())
      if (!cls.empty()) ls.push_back(std::move(cls));
  }

  std::vector<double> ws;
  if (weights) {
    ws = *weights;
    if (ws.size() != ls.size()) throw StructuralError("need one weight per layer");
    double sum = 0.0;
    for (double w : ws) {
      if (!(w > 0.0)) throw StructuralError("layer weights must be positive");
      sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-12) throw StructuralError("layer weights must sum to 1");
  } else {
    for (const auto& l : ls) ws.push_back(static_cast<double>(l.size()) / static_cast<double>(terms.size()));
  }

  if (check_commutation) {
    for (std::size_t c = 0; c < ls.size(); ++c)
      for (std::size_t a = 0; a < ls[c].size(); ++a)
        for (std::size_t b = a + 1; b < ls[c].size(); ++b) {
          const int i = ls[c][a];
          const int j = ls[c][b];
          const double norm = commutator_norm(terms[i], terms[j]);
          if (norm > tol::commutation)
            throw LayeringError("terms " + std::to_string(i) + " and " + std::to_string(j) + " of layer " +
                                std::to_string(c) + " do not commute (commutator norm " + std::to_string(norm) + ")");
        }
  }

  LayeredHamiltonian h;
  h.n_ = n_qubits;
  h.terms_ = std::move(terms);
  h.layers_ = std::move(ls);
  h.weights_ = std::move(ws);
  h.ops_.reserve(h.terms_.size());
  for (const auto& t : h.terms_) h.ops_.emplace_back(t.matrix(), t.support(), n_qubits);
  return h;
}

inline Vector hamiltonian_apply(const LayeredHamiltonian& h, const Vector& v) {
  if (static_cast<std::size_t>(v.size()) != h.dim()) throw StructuralError("vector dimension does not match the Hamiltonian");
  return h.apply(v);
}

/// Projector-valued product of the layer's complements, dense.
inline Matrix layer_complement_product(const LayeredHamiltonian& h, int chi) {
  const Eigen::Index d = static_cast<Eigen::Index>(h.dim());
  Matrix out = Matrix::Identity(d, d);
  for (int i : h.layers()[chi]) {
    const LocalOp op = h.term_op(i, 0, h.n_qubits(), true);
    for (Eigen::Index c = 0; c < d; ++c) {
      Vector col = out.col(c);
      op.apply(col);
      out.col(c) = col;
    }
  }
  return out;
}

}  // namespace qamp
