#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "qamp/qamp.hpp"

using namespace qamp;

namespace {

Matrix one() {
  Matrix m = Matrix::Zero(2, 2);
  m(1, 1) = 1.0;
  return m;
}

// exp(i T P) = I + (e^{iT} - 1) P for a projector P.
Matrix projector_exponential(const Matrix& p, double T) {
  return Matrix::Identity(p.rows(), p.cols()) + (std::exp(cplx{0.0, T}) - 1.0) * p;
}

std::vector<LocalProjector> random_disjoint(int m, int max_k, Rng& rng, int& system) {
  std::vector<LocalProjector> out;
  int next = 0;
  for (int i = 0; i < m; ++i) {
    const int k = rng.range(1, max_k);
    std::vector<int> sup;
    for (int q = 0; q < k; ++q) sup.push_back(next++);
    out.emplace_back(sup, random_projector(k, rng.range(1, (1 << k) - 1), rng));
  }
  system = next;
  return out;
}

}  // namespace

TEST(Circuit, SingleProjectorAtPiIsZ) {
  const auto c = emit_simulation_circuit({LocalProjector({0}, one())}, std::numbers::pi, 1);
  Matrix z = Matrix::Identity(2, 2);
  z(1, 1) = -1.0;
  const auto act = restricted_action(c);
  EXPECT_LT(operator_norm(act.block - z), 1e-12);
  EXPECT_LT(act.leakage, 1e-12);
}

TEST(Circuit, ZeroTimeIsIdentity) {
  Rng rng(40);
  int system = 0;
  const auto ps = random_disjoint(3, 2, rng, system);
  const auto c = emit_simulation_circuit(ps, 0.0, system);
  const Matrix u = circuit_unitary(c);
  EXPECT_LT((u - Matrix::Identity(u.rows(), u.cols())).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Circuit, TwoProjectorsMatchClosedForm) {
  const LocalProjector a({0}, one()), b({1}, one());
  for (double T : {0.3, 1.0, 2.1}) {
    const auto c = emit_simulation_circuit({a, b}, T, 2);
    // The OR of |1><1| on either qubit is I - |00><00|.
    Matrix pi = Matrix::Identity(4, 4);
    pi(0, 0) = 0.0;
    const auto act = restricted_action(c);
    EXPECT_LT(operator_norm(act.block - projector_exponential(pi, T)), 1e-12);
    EXPECT_LT(operator_norm(target_exponential({a, b}, T, 2) - projector_exponential(pi, T)), 1e-12);
  }
}

TEST(Circuit, RandomProjectorsMatchDenseExponential) {
  Rng rng(41);
  for (int m = 1; m <= 4; ++m)
    for (double T : {0.0, 0.3, std::numbers::pi / 2, std::numbers::pi, 2.1}) {
      int system = 0;
      const auto ps = random_disjoint(m, 2, rng, system);
      const auto c = emit_simulation_circuit(ps, T, system);
      // Oracle: I - prod (I - P_i) built from entrywise embeddings.
      Matrix q = oracle::identity(system);
      for (const auto& p : ps) q = q * oracle::embed(p.complement(), p.support(), system);
      const Matrix pi = oracle::identity(system) - q;
      const auto act = restricted_action(c);
      EXPECT_LT(operator_norm(act.block - projector_exponential(pi, T)), 1e-9) << "m=" << m << " T=" << T;
      EXPECT_LT(act.leakage, 1e-9);
      EXPECT_LE(static_cast<int>(c.gates.size()), 4 * m + 2);
      EXPECT_LE(c.tree_depth, static_cast<int>(std::ceil(std::log2(static_cast<double>(m)))) + 1);
    }
}

TEST(Circuit, AncillasReturnToZero) {
  Rng rng(42);
  int system = 0;
  const auto ps = random_disjoint(4, 1, rng, system);
  const auto c = emit_simulation_circuit(ps, 1.3, system);
  Vector sys = random_state(std::size_t{1} << system, rng);
  Vector full = Vector::Zero(Eigen::Index{1} << c.total_qubits());
  const Eigen::Index shift = Eigen::Index{1} << c.ancillas;
  for (Eigen::Index x = 0; x < sys.size(); ++x) full[x * shift] = sys[x];
  apply_circuit(c, full);
  double kept = 0.0;
  for (Eigen::Index x = 0; x < sys.size(); ++x) kept += std::norm(full[x * shift]);
  EXPECT_GE(kept, 1.0 - 1e-10);
}

TEST(Circuit, RejectsOverlapAndEmpty) {
  EXPECT_THROW(emit_simulation_circuit({}, 1.0), StructuralError);
  EXPECT_THROW(emit_simulation_circuit({LocalProjector({0}, one()), LocalProjector({0}, one())}, 1.0), StructuralError);
  EXPECT_THROW(emit_simulation_circuit({LocalProjector({3}, one())}, 1.0, 2), StructuralError);
}

TEST(CircuitUnitary, EmptyAndSingleGate) {
  GateCircuit empty;
  empty.system_qubits = 2;
  EXPECT_LT(operator_norm(circuit_unitary(empty) - Matrix::Identity(4, 4)), 1e-15);
  GateCircuit x;
  x.system_qubits = 2;
  Matrix px = Matrix::Zero(2, 2);
  px(0, 1) = px(1, 0) = 1.0;
  x.gates.push_back({"x", {0}, px});
  EXPECT_LT(operator_norm(circuit_unitary(x) - oracle::embed(px, {0}, 2)), 1e-15);
}

TEST(CircuitUnitary, WholeCircuitIsUnitary) {
  Rng rng(43);
  int system = 0;
  const auto ps = random_disjoint(3, 1, rng, system);
  const Matrix u = circuit_unitary(emit_simulation_circuit(ps, 0.7, system));
  EXPECT_LT(operator_norm(u.adjoint() * u - Matrix::Identity(u.rows(), u.cols())), 1e-10);
}
