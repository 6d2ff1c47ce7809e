#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "qamp/local_ops.hpp"
#include "qamp/projector.hpp"
#include "qamp/types.hpp"

// Circuit for exp(i T Pi) with Pi = I - prod_i (I - Pi_i) over projectors on
// disjoint supports. Each projector flips its own ancilla, an OR tree folds
// the ancillas, a phase acts on the root and everything is uncomputed.

namespace qamp {

struct Gate {
  std::string name;
  std::vector<int> targets;  ///< first target is the most significant local bit
  Matrix matrix;
};

struct GateCircuit {
  int system_qubits = 0;
  int ancillas = 0;
  std::vector<Gate> gates;
  int tree_depth = 0;  ///< OR levels plus the phase gate

  int total_qubits() const { return system_qubits + ancillas; }
};

namespace detail {

inline Matrix pauli_x() {
  Matrix x = Matrix::Zero(2, 2);
  x(0, 1) = x(1, 0) = 1.0;
  return x;
}

// |a b c> -> |a b, c xor (a or b)>.
inline Matrix or_gate() {
  Matrix m = Matrix::Zero(8, 8);
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int c = 0; c < 2; ++c) {
        const int in = (a << 2) | (b << 1) | c;
        const int out = (a << 2) | (b << 1) | (c ^ (a | b));
        m(out, in) = 1.0;
      }
  return m;
}

}  // namespace detail

/// Projectors must have pairwise disjoint supports inside [0, system_qubits).
inline GateCircuit emit_simulation_circuit(const std::vector<LocalProjector>& projectors, double T, int system_qubits = -1) {
  if (projectors.empty()) throw StructuralError("need at least one projector");
  int maxq = -1;
  for (std::size_t i = 0; i < projectors.size(); ++i) {
    if (projectors[i].support().empty()) throw StructuralError("projector " + std::to_string(i) + " has empty support");
    maxq = std::max(maxq, projectors[i].support().back());
    for (std::size_t j = 0; j < i; ++j)
      if (supports_overlap(projectors[i].support(), projectors[j].support()))
        throw StructuralError("projectors " + std::to_string(j) + " and " + std::to_string(i) + " overlap");
  }
  GateCircuit c;
  c.system_qubits = system_qubits < 0 ? maxq + 1 : system_qubits;
  if (maxq >= c.system_qubits) throw StructuralError("projector support exceeds the system register");
  int next_ancilla = c.system_qubits;

  std::vector<Gate> compute;
  std::vector<int> nodes;
  for (const auto& p : projectors) {
    const int anc = next_ancilla++;
    Gate g;
    g.name = "flag";
    g.targets = p.support();
    g.targets.push_back(anc);
    g.matrix = kron(p.matrix(), detail::pauli_x()) + kron(p.complement(), Matrix::Identity(2, 2));
    compute.push_back(std::move(g));
    nodes.push_back(anc);
  }
  int levels = 0;
  while (nodes.size() > 2) {
    std::vector<int> next;
    for (std::size_t i = 0; i + 1 < nodes.size(); i += 2) {
      const int anc = next_ancilla++;
      compute.push_back({"or", {nodes[i], nodes[i + 1], anc}, detail::or_gate()});
      next.push_back(anc);
    }
    if (nodes.size() % 2) next.push_back(nodes.back());
    nodes = std::move(next);
    ++levels;
  }
  const cplx phase = std::exp(cplx{0.0, T});
  Gate root;
  root.name = "phase";
  if (nodes.size() == 1) {
    root.targets = {nodes[0]};
    root.matrix = Matrix::Identity(2, 2);
    root.matrix(1, 1) = phase;
  } else {
    root.targets = {nodes[0], nodes[1]};
    root.matrix = Matrix::Identity(4, 4);
    for (int k = 1; k < 4; ++k) root.matrix(k, k) = phase;
  }
  c.ancillas = next_ancilla - c.system_qubits;
  c.gates = compute;
  c.gates.push_back(std::move(root));
  for (auto it = compute.rbegin(); it != compute.rend(); ++it) {
    Gate g = *it;
    g.matrix = g.matrix.adjoint();
    c.gates.push_back(std::move(g));
  }
  c.tree_depth = levels + 1;
  return c;
}

inline void validate_circuit(const GateCircuit& c) {
  const int total = c.total_qubits();
  for (std::size_t i = 0; i < c.gates.size(); ++i) {
    const auto& g = c.gates[i];
    for (int q : g.targets)
      if (q < 0 || q >= total) throw StructuralError("gate " + std::to_string(i) + " targets a missing qubit");
    const Eigen::Index dim = Eigen::Index{1} << g.targets.size();
    if (g.matrix.rows() != dim || g.matrix.cols() != dim)
      throw StructuralError("gate " + std::to_string(i) + " matrix does not match its targets");
    const double err = operator_norm(g.matrix.adjoint() * g.matrix - Matrix::Identity(dim, dim));
    if (err > 1e-10) throw StructuralError("gate " + std::to_string(i) + " is not unitary");
  }
}

/// Runs the circuit on a state of all system and ancilla qubits.
inline void apply_circuit(const GateCircuit& c, Vector& state) {
  const int total = c.total_qubits();
  if (state.size() != (Eigen::Index{1} << total)) throw StructuralError("state size does not match the circuit");
  for (const auto& g : c.gates) LocalOp(g.matrix, g.targets, total).apply(state);
}

/// Dense unitary of the whole circuit; at most 14 qubits.
inline Matrix circuit_unitary(const GateCircuit& c) {
  const int total = c.total_qubits();
  if (total > kCircuitDenseLimit) throw BudgetError("circuit_unitary is limited to 14 qubits");
  const Eigen::Index dim = Eigen::Index{1} << total;
  Matrix u = Matrix::Identity(dim, dim);
  std::vector<LocalOp> ops;
  for (const auto& g : c.gates) ops.emplace_back(g.matrix, g.targets, total);
  for (Eigen::Index col = 0; col < dim; ++col) {
    Vector v = u.col(col);
    for (const auto& op : ops) op.apply(v);
    u.col(col) = v;
  }
  return u;
}

/// Action on system inputs with ancillas in |0>: the system block of the
/// output and the weight that leaked out of the ancilla-zero subspace.
struct RestrictedAction {
  Matrix block;
  double leakage = 0;
};

inline RestrictedAction restricted_action(const GateCircuit& c) {
  const int total = c.total_qubits();
  if (total > 20) throw BudgetError("restricted action is limited to 20 qubits");
  const Eigen::Index sdim = Eigen::Index{1} << c.system_qubits;
  const Eigen::Index shift = Eigen::Index{1} << c.ancillas;
  RestrictedAction out;
  out.block = Matrix::Zero(sdim, sdim);
  std::vector<LocalOp> ops;
  for (const auto& g : c.gates) ops.emplace_back(g.matrix, g.targets, total);
  Vector v(Eigen::Index{1} << total);
  for (Eigen::Index x = 0; x < sdim; ++x) {
    v.setZero();
    v[x * shift] = 1.0;
    for (const auto& op : ops) op.apply(v);
    double kept = 0.0;
    for (Eigen::Index y = 0; y < sdim; ++y) {
      out.block(y, x) = v[y * shift];
      kept += std::norm(v[y * shift]);
    }
    out.leakage = std::max(out.leakage, std::abs(1.0 - kept));
  }
  return out;
}

/// exp(i T Pi) for the OR of the projectors, from a dense eigendecomposition.
inline Matrix target_exponential(const std::vector<LocalProjector>& projectors, double T, int system_qubits) {
  const Eigen::Index dim = Eigen::Index{1} << system_qubits;
  Matrix q = Matrix::Identity(dim, dim);
  for (const auto& p : projectors) q = q * embed_global(p.complement(), p.support(), system_qubits);
  Matrix pi = Matrix::Identity(dim, dim) - q;
  pi = (pi + pi.adjoint()) / 2.0;
  Eigen::SelfAdjointEigenSolver<Matrix> es(pi);
  Vector ph(dim);
  for (Eigen::Index k = 0; k < dim; ++k) ph[k] = std::exp(cplx{0.0, T * es.eigenvalues()[k]});
  return es.eigenvectors() * ph.asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace qamp
