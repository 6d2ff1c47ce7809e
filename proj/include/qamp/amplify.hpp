#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qamp/expander.hpp"
#include "qamp/hamiltonian.hpp"
#include "qamp/local_ops.hpp"
#include "qamp/spectra.hpp"
#include "qamp/types.hpp"

namespace qamp {

enum class AmpMode {
  Walks,   ///< sum_chi w_chi E_f Pi_f over expander walks of length 2t
  Tensor,  ///< I - (I - H)^{(x) t}
  DL,      ///< I - E_chi (x)_j prod_i (I - Pi_i^chi)
};

inline std::string mode_name(AmpMode m) {
  switch (m) {
    case AmpMode::Walks: return "walks";
    case AmpMode::Tensor: return "tensor";
    case AmpMode::DL: return "dl";
  }
  return "walks";
}

inline AmpMode parse_mode(const std::string& s) {
  if (s == "walks") return AmpMode::Walks;
  if (s == "tensor") return AmpMode::Tensor;
  if (s == "dl") return AmpMode::DL;
  throw DomainError("unknown amplification mode '" + s + "'");
}

/// Walk graph of one layer: vertex v stands for clause v mod clauses.
struct LayerWalk {
  ExpanderGraph graph;
  int replication = 1;
  int clauses = 0;

  int clause_of(int v) const { return v % clauses; }
  /// Number of path terms, m * d^(L-1).
  std::uint64_t path_count(int registers) const { return WalkFamily(graph, registers).size(); }
};

/// Amplified Hamiltonian on copies of the base register, applied matrix-free.
class AmplifiedOperator {
 public:
  AmplifiedOperator(std::shared_ptr<const LayeredHamiltonian> base, AmpMode mode, int t, std::vector<LayerWalk> walks = {})
      : base_(std::move(base)), mode_(mode), t_(t), walks_(std::move(walks)) {
    if (t < 1) throw DomainError("t must be at least 1");
    registers_ = mode_ == AmpMode::Walks ? 2 * t : t;
    const long total = static_cast<long>(registers_) * base_->n_qubits();
    if (total > 30) throw BudgetError("amplified system would need " + std::to_string(total) + " qubits");
    if (mode_ == AmpMode::Walks && static_cast<int>(walks_.size()) != base_->num_layers())
      throw StructuralError("walk mode needs one graph per layer");
    for (std::size_t c = 0; c < walks_.size(); ++c) {
      const auto& w = walks_[c];
      const int mc = static_cast<int>(base_->layers()[c].size());
      if (w.clauses != mc) throw StructuralError("layer graph clause count mismatch");
      if (w.graph.m != w.replication * mc)
        throw StructuralError("layer " + std::to_string(c) + " graph has " + std::to_string(w.graph.m) +
                              " vertices but needs replication * clauses = " + std::to_string(w.replication * mc));
      WalkFamily(w.graph, registers_);
    }
    const int n = base_->n_qubits();
    const int nt = n_qubits();
    q_ops_.resize(static_cast<std::size_t>(registers_));
    p_ops_.resize(static_cast<std::size_t>(registers_));
    for (int j = 0; j < registers_; ++j)
      for (std::size_t i = 0; i < base_->num_terms(); ++i) {
        q_ops_[j].push_back(base_->term_op(static_cast<int>(i), j * n, nt, true));
        p_ops_[j].push_back(base_->term_op(static_cast<int>(i), j * n, nt, false));
      }
  }

  int n_qubits() const { return registers_ * base_->n_qubits(); }
  std::size_t dim() const { return std::size_t{1} << n_qubits(); }
  int registers() const { return registers_; }
  int t() const { return t_; }
  AmpMode mode() const { return mode_; }
  const LayeredHamiltonian& base() const { return *base_; }
  std::shared_ptr<const LayeredHamiltonian> base_ptr() const { return base_; }
  const std::vector<LayerWalk>& walks() const { return walks_; }

  /// Largest mu over the layer graphs (0 when there are none).
  double mu() const {
    double mu = 0.0;
    for (const auto& w : walks_) mu = std::max(mu, w.graph.mu);
    return mu;
  }

  /// Base term index reached by walk vertex v of layer chi.
  int term_at(int chi, int v) const { return base_->layers()[chi][walks_[chi].clause_of(v)]; }

  const LocalOp& complement_op(int reg, int term) const { return q_ops_[reg][term]; }
  const LocalOp& projector_op(int reg, int term) const { return p_ops_[reg][term]; }

  /// E_f (x)_{j in mask} (I - Pi_{f(j)}) in, by a transfer recursion along the walk.
  void survival(int chi, const Vector& in, Vector& out, std::uint64_t mask) const {
    const auto& w = walks_[chi];
    const int m = w.graph.m;
    const int d = w.graph.d;
    std::vector<Vector> cur(static_cast<std::size_t>(m), in), next(static_cast<std::size_t>(m));
    if (mask & 1U)
      for (int v = 0; v < m; ++v) q_ops_[0][term_at(chi, v)].apply(cur[v]);
    for (int j = 1; j < registers_; ++j) {
      for (int u = 0; u < m; ++u) {
        next[u] = cur[w.graph.rot(u, 0).vertex];
        for (int p = 1; p < d; ++p) next[u] += cur[w.graph.rot(u, p).vertex];
        if ((mask >> j) & 1U) q_ops_[j][term_at(chi, u)].apply(next[u]);
      }
      std::swap(cur, next);
    }
    out = cur[0];
    for (int v = 1; v < m; ++v) out += cur[v];
    out /= static_cast<double>(m) * std::pow(static_cast<double>(d), registers_ - 1);
  }

  /// Same quantity streamed walk by walk; slow, kept as a reference.
  void survival_by_walks(int chi, const Vector& in, Vector& out, std::uint64_t mask) const {
    WalkFamily walks(walks_[chi].graph, registers_);
    out = Vector::Zero(in.size());
    Vector y;
    walks.for_each([&](std::uint64_t, const std::vector<int>& f) {
      y = in;
      for (int j = 0; j < registers_; ++j)
        if ((mask >> j) & 1U) q_ops_[j][term_at(chi, f[j])].apply(y);
      out += y;
    });
    out /= static_cast<double>(walks.size());
  }

  std::uint64_t full_mask() const { return (std::uint64_t{1} << registers_) - 1; }

  /// out = H_chi^(2t) in for one layer (walk mode).
  void apply_layer(int chi, const Vector& in, Vector& out) const {
    survival(chi, in, out, full_mask());
    out = in - out;
  }

  /// H^{(j)} in: the base Hamiltonian on register j.
  void apply_base_on(int reg, const Vector& in, Vector& out) const {
    out = Vector::Zero(in.size());
    Vector tmp;
    for (int c = 0; c < base_->num_layers(); ++c) {
      const auto& layer = base_->layers()[c];
      const double coef = base_->weights()[c] / static_cast<double>(layer.size());
      for (int i : layer) {
        tmp = in;
        p_ops_[reg][i].apply(tmp);
        out += coef * tmp;
      }
    }
  }

  void apply(std::span<const cplx> in_span, std::span<cplx> out_span) const {
    Eigen::Map<const Vector> in(in_span.data(), static_cast<Eigen::Index>(in_span.size()));
    Eigen::Map<Vector> out(out_span.data(), static_cast<Eigen::Index>(out_span.size()));
    const Vector x = in;
    Vector acc = Vector::Zero(x.size());
    Vector tmp;
    switch (mode_) {
      case AmpMode::Walks:
        for (int c = 0; c < base_->num_layers(); ++c) {
          survival(c, x, tmp, full_mask());
          acc += base_->weights()[c] * tmp;
        }
        break;
      case AmpMode::Tensor: {
        acc = x;
        for (int j = 0; j < registers_; ++j) {
          apply_base_on(j, acc, tmp);
          acc -= tmp;
        }
        break;
      }
      case AmpMode::DL:
        for (int c = 0; c < base_->num_layers(); ++c) {
          tmp = x;
          for (int j = 0; j < registers_; ++j)
            for (int i : base_->layers()[c]) q_ops_[j][i].apply(tmp);
          acc += base_->weights()[c] * tmp;
        }
        break;
    }
    out = x - acc;
  }

  Vector apply(const Vector& v) const { return apply_op(*this, v); }

  Matrix dense() const {
    if (n_qubits() > kDenseQubitLimit) throw BudgetError("dense amplified operator is limited to 12 qubits");
    return dense_from_apply(dim(), [&](const Vector& x, Vector& y) { y = apply(x); });
  }

  /// Number of path terms per layer (walk mode).
  std::vector<std::uint64_t> path_counts() const {
    std::vector<std::uint64_t> out;
    for (const auto& w : walks_) out.push_back(w.path_count(registers_));
    return out;
  }

 private:
  std::shared_ptr<const LayeredHamiltonian> base_;
  AmpMode mode_;
  int t_;
  int registers_ = 0;
  std::vector<LayerWalk> walks_;
  std::vector<std::vector<LocalOp>> q_ops_;
  std::vector<std::vector<LocalOp>> p_ops_;
};

/// One walk graph per layer. `replication` overrides the default smallest
/// factor reaching the family minimum; `custom` supplies graphs directly.
inline std::vector<LayerWalk> layer_walks(const LayeredHamiltonian& h, GraphFamily family,
                                          std::optional<int> replication = std::nullopt,
                                          const std::vector<ExpanderGraph>& custom = {}) {
  std::vector<LayerWalk> out;
  for (int c = 0; c < h.num_layers(); ++c) {
    const int mc = static_cast<int>(h.layers()[c].size());
    LayerWalk w;
    w.clauses = mc;
    if (family == GraphFamily::Custom) {
      if (custom.size() != static_cast<std::size_t>(h.num_layers()))
        throw StructuralError("custom family needs one graph per layer");
      w.graph = custom[c];
      if (w.graph.m % mc != 0)
        throw StructuralError("custom graph for layer " + std::to_string(c) + " has " + std::to_string(w.graph.m) +
                              " vertices, not a multiple of " + std::to_string(mc));
      w.replication = w.graph.m / mc;
    } else {
      w.replication = replication.value_or(default_replication(mc, family));
      if (w.replication < 1) throw DomainError("replication must be at least 1");
      w.graph = build_graph(w.replication * mc, family);
    }
    out.push_back(std::move(w));
  }
  return out;
}

inline AmplifiedOperator amplify_derandomised(std::shared_ptr<const LayeredHamiltonian> h, int t, GraphFamily family,
                                              std::optional<int> replication = std::nullopt,
                                              const std::vector<ExpanderGraph>& custom = {}) {
  auto walks = layer_walks(*h, family, replication, custom);
  return AmplifiedOperator(std::move(h), AmpMode::Walks, t, std::move(walks));
}

inline AmplifiedOperator amplify_derandomised(const LayeredHamiltonian& h, int t, GraphFamily family,
                                              std::optional<int> replication = std::nullopt,
                                              const std::vector<ExpanderGraph>& custom = {}) {
  return amplify_derandomised(std::make_shared<const LayeredHamiltonian>(h), t, family, replication, custom);
}

inline AmplifiedOperator amplify_full_tensor(const LayeredHamiltonian& h, int t) {
  return AmplifiedOperator(std::make_shared<const LayeredHamiltonian>(h), AmpMode::Tensor, t);
}

inline AmplifiedOperator amplify_dl(const LayeredHamiltonian& h, int t) {
  return AmplifiedOperator(std::make_shared<const LayeredHamiltonian>(h), AmpMode::DL, t);
}

/// Writes every path term out as a dense projector on its union support.
/// Layers and weights carry over from the base.
inline LayeredHamiltonian expand_to_layered(const AmplifiedOperator& amp, bool check_commutation = true) {
  if (amp.mode() != AmpMode::Walks) throw DomainError("only walk-mode operators expand into path terms");
  const auto& base = amp.base();
  const int n = base.n_qubits();
  const int regs = amp.registers();
  std::vector<LocalProjector> terms;
  std::vector<std::vector<int>> layers;
  for (int c = 0; c < base.num_layers(); ++c) {
    WalkFamily walks(amp.walks()[c].graph, regs);
    if (walks.size() > 100000) throw BudgetError("too many path terms to expand");
    std::vector<int> layer;
    walks.for_each([&](std::uint64_t, const std::vector<int>& f) {
      std::vector<int> support;
      Matrix q = Matrix::Identity(1, 1);
      for (int j = 0; j < regs; ++j) {
        const auto& term = base.terms()[amp.term_at(c, f[j])];
        for (int s : term.support()) support.push_back(s + j * n);
        q = kron(q, term.complement());
      }
      Matrix pi = Matrix::Identity(q.rows(), q.cols()) - q;
      pi = (pi + pi.adjoint()) / 2.0;
      layer.push_back(static_cast<int>(terms.size()));
      terms.emplace_back(std::move(support), std::move(pi));
    });
    layers.push_back(std::move(layer));
  }
  return build_layered(amp.n_qubits(), std::move(terms), std::move(layers), base.weights(), check_commutation);
}

/// Register-shifted projectors of one path term. Ids run over the layers in
/// order and over walks in enumeration order within a layer.
inline std::vector<LocalProjector> path_term_projectors(const AmplifiedOperator& amp, std::uint64_t id) {
  if (amp.mode() != AmpMode::Walks) throw DomainError("path terms exist only in walk mode");
  const int n = amp.base().n_qubits();
  for (int c = 0; c < amp.base().num_layers(); ++c) {
    WalkFamily walks(amp.walks()[c].graph, amp.registers());
    if (id >= walks.size()) {
      id -= walks.size();
      continue;
    }
    const auto f = walks.walk(id);
    std::vector<LocalProjector> out;
    for (int j = 0; j < amp.registers(); ++j) out.push_back(amp.base().terms()[amp.term_at(c, f[j])].shifted(j * n));
    return out;
  }
  throw DomainError("path term id out of range");
}

/// M_0 = H and M_i = expansion of the walk amplification of M_{i-1}.
inline std::vector<LayeredHamiltonian> iterate_hamiltonian(const LayeredHamiltonian& h, int t, int rounds,
                                                           GraphFamily family, int qubit_budget = 16) {
  if (rounds < 0) throw DomainError("rounds must be non-negative");
  long long q = h.n_qubits();
  for (int i = 0; i < rounds; ++i) q *= 2 * t;
  if (q > qubit_budget)
    throw BudgetError("iteration would reach " + std::to_string(q) + " qubits, above the budget of " +
                      std::to_string(qubit_budget));
  std::vector<LayeredHamiltonian> out{h};
  for (int i = 0; i < rounds; ++i) out.push_back(expand_to_layered(amplify_derandomised(out.back(), t, family)));
  return out;
}

struct IterationParams {
  std::optional<int> rounds;          ///< ceil(6 log p / log t)
  double completeness_multiplier = 0;  ///< (2t)^rounds
  double soundness_floor = 0;          ///< (1/3) log t / t
  double clause_multiplier = 0;        ///< d^((2t-1) rounds)
  double locality = 0;                 ///< k (2t)^rounds
  double eta = 0;                      ///< 1 / (20 max(1 + C_mu, omega))
  bool cube_root_condition = false;    ///< t^(1/3) >= log t
  bool eta_condition = false;          ///< t > eta^-6
  std::vector<std::string> warnings;
};

/// Multipliers after `rounds` rounds of amplification with parameter t.
inline IterationParams iteration_bounds(int t, int rounds, int k, int d) {
  IterationParams p;
  p.rounds = rounds;
  p.completeness_multiplier = std::pow(2.0 * t, rounds);
  p.soundness_floor = t > 1 ? std::log(static_cast<double>(t)) / (3.0 * t) : 0.0;
  p.clause_multiplier = std::pow(static_cast<double>(d), (2.0 * t - 1.0) * rounds);
  p.locality = k * std::pow(2.0 * t, rounds);
  return p;
}

/// Round count for a target 1/p gap and the side conditions on t.
inline IterationParams choose_iteration_params(double p, int t, double c_mu = 0.0, double omega = 1.0, int k = 1,
                                               int d = 1) {
  if (p < 1.0) throw DomainError("p must be at least 1");
  if (t < 1) throw DomainError("t must be at least 1");
  IterationParams out;
  if (p == 1.0) {
    out = iteration_bounds(t, 0, k, d);
  } else if (t < 2) {
    out = iteration_bounds(t, 0, k, d);
    out.rounds.reset();
    out.warnings.push_back("log t = 0 for t = 1, so no round count reaches the target");
  } else {
    const double r = std::ceil(6.0 * std::log(p) / std::log(static_cast<double>(t)) - 1e-12);
    out = iteration_bounds(t, static_cast<int>(r), k, d);
  }
  const double lt = std::log(static_cast<double>(t));
  out.cube_root_condition = std::cbrt(static_cast<double>(t)) >= lt;
  out.eta = 1.0 / (20.0 * std::max(1.0 + c_mu, omega));
  out.eta_condition = static_cast<double>(t) > std::pow(out.eta, -6.0);
  if (!out.cube_root_condition) out.warnings.push_back("t^(1/3) < log t");
  if (!out.eta_condition) out.warnings.push_back("t <= eta^-6; the asymptotic floor is not guaranteed");
  return out;
}

}  // namespace qamp
