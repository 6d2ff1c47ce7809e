#include <cmath>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "qamp/qamp.hpp"

using namespace qamp;

namespace {

Matrix diag_proj(int k, std::initializer_list<int> states) {
  Matrix m = Matrix::Zero(Eigen::Index{1} << k, Eigen::Index{1} << k);
  for (int s : states) m(s, s) = 1.0;
  return m;
}

LayeredHamiltonian single_projector() { return build_layered(1, {LocalProjector({0}, diag_proj(1, {1}))}); }

std::vector<CorpusItem> small_items(int max_qubits) {
  std::vector<CorpusItem> out;
  for (auto& it : make_corpus(1))
    if (it.h.n_qubits() <= max_qubits) out.push_back(std::move(it));
  return out;
}

// Diagonal of a classical (diagonal) projector at a local basis index.
double diag_at(const LocalProjector& p, std::uint64_t x, int n) {
  int local = 0;
  for (int q : p.support()) local = (local << 1) | oracle::bit(x, q, n);
  return p.matrix()(local, local).real();
}

// Register j of a 2t-register bitstring.
std::uint64_t reg_bits(std::uint64_t x, int j, int n, int regs) { return (x >> ((regs - 1 - j) * n)) & ((1U << n) - 1); }

// Classical energy of a bitstring under each amplification mode.
double classical_energy(const AmplifiedOperator& amp, std::uint64_t x) {
  const auto& h = amp.base();
  const int n = h.n_qubits();
  const int regs = amp.registers();
  double e = 0.0;
  for (int c = 0; c < h.num_layers(); ++c) {
    const auto& layer = h.layers()[c];
    double sat = 0.0;
    if (amp.mode() == AmpMode::Walks) {
      const auto fs = oracle::walks(amp.walks()[c].graph, regs);
      for (const auto& f : fs) {
        bool all_ok = true;
        for (int j = 0; j < regs && all_ok; ++j)
          all_ok = diag_at(h.terms()[layer[f[j] % layer.size()]], reg_bits(x, j, n, regs), n) < 0.5;
        sat += all_ok;
      }
      sat /= static_cast<double>(fs.size());
    } else if (amp.mode() == AmpMode::DL) {
      sat = 1.0;
      for (int j = 0; j < regs; ++j)
        for (int i : layer) sat *= 1.0 - diag_at(h.terms()[i], reg_bits(x, j, n, regs), n);
    }
    e += h.weights()[c] * (1.0 - sat);
  }
  if (amp.mode() == AmpMode::Tensor) {
    double prod = 1.0;
    for (int j = 0; j < regs; ++j) {
      double hx = 0.0;
      for (int c = 0; c < h.num_layers(); ++c)
        for (int i : h.layers()[c])
          hx += h.weights()[c] / h.layers()[c].size() * diag_at(h.terms()[i], reg_bits(x, j, n, regs), n);
      prod *= 1.0 - hx;
    }
    e = 1.0 - prod;
  }
  return e;
}

}  // namespace

TEST(Amplify, SingleProjectorSelfLoop) {
  const auto amp = amplify_derandomised(single_projector(), 1, GraphFamily::CompleteWithLoops);
  const Matrix p = diag_proj(1, {1});
  const Matrix q = Matrix::Identity(2, 2) - p;
  EXPECT_LT((amp.dense() - (Matrix::Identity(4, 4) - kron(q, q))).norm(), 1e-15);
  EXPECT_NEAR(min_eig(amp).lambda_min, 0.0, 1e-14);
}

TEST(Amplify, MuZeroFamilyEqualsPerLayerTensorOracle) {
  for (const auto& it : small_items(4))
    for (int t = 1; t <= 2; ++t) {
      if (2 * t * it.h.n_qubits() > 8) continue;
      const auto amp = amplify_derandomised(it.h, t, GraphFamily::CompleteWithLoops);
      EXPECT_LT((amp.dense() - oracle::tensor_amplification(it.h, 2 * t, true)).cwiseAbs().maxCoeff(), 1e-12)
          << it.name << " t=" << t;
    }
}

TEST(Amplify, WalkModeEqualsDenseWalkOracle) {
  for (auto fam : {GraphFamily::Complete, GraphFamily::Cycle, GraphFamily::ChordalCycle})
    for (const auto& it : small_items(2))
      for (int t = 1; t <= 2; ++t) {
        const auto amp = amplify_derandomised(it.h, t, fam);
        EXPECT_LT((amp.dense() - oracle::walk_amplification(amp)).cwiseAbs().maxCoeff(), 1e-12)
            << it.name << " " << family_name(fam) << " t=" << t;
      }
}

TEST(Amplify, TransferRecursionMatchesWalkStreaming) {
  Rng rng(4);
  for (const auto& it : small_items(3))
    for (auto fam : {GraphFamily::Complete, GraphFamily::Cycle}) {
      const auto amp = amplify_derandomised(it.h, 2, fam);
      const Vector v = random_state(amp.dim(), rng);
      for (int c = 0; c < it.h.num_layers(); ++c)
        for (std::uint64_t mask : {std::uint64_t{0xF}, std::uint64_t{0x5}, std::uint64_t{0x6}, std::uint64_t{0}}) {
          Vector a, b;
          amp.survival(c, v, a, mask);
          amp.survival_by_walks(c, v, b, mask);
          EXPECT_LT((a - b).norm(), 1e-12) << it.name;
        }
    }
}

TEST(Amplify, ReplicationForSmallLayers) {
  const auto h = single_projector();
  const auto amp = amplify_derandomised(h, 1, GraphFamily::Complete);
  EXPECT_EQ(amp.walks()[0].replication, 3);
  EXPECT_EQ(amp.walks()[0].graph.m, 3);
  // Replicated clauses leave the operator equal to the unreplicated mu = 0 case.
  const auto ref = amplify_derandomised(h, 1, GraphFamily::CompleteWithLoops);
  EXPECT_LT((amp.dense() - ref.dense()).norm(), 1e-12);
  const auto rep = amplify_derandomised(h, 1, GraphFamily::Complete, 5);
  EXPECT_EQ(rep.walks()[0].graph.m, 5);
  EXPECT_THROW(amplify_derandomised(h, 1, GraphFamily::Complete, 0), DomainError);
}

TEST(Amplify, PathTermsAreProjectors) {
  Rng rng(21);
  for (const auto& it : small_items(2)) {
    const auto amp = amplify_derandomised(it.h, 1, GraphFamily::Complete);
    std::uint64_t total = 0;
    for (const auto& w : amp.walks()) total += w.path_count(amp.registers());
    for (int s = 0; s < 50; ++s) {
      const auto ps = path_term_projectors(amp, rng.below(total));
      Matrix q = oracle::identity(amp.n_qubits());
      for (const auto& p : ps) q = q * oracle::embed(p.complement(), p.support(), amp.n_qubits());
      const Matrix pi = oracle::identity(amp.n_qubits()) - q;
      EXPECT_LT((pi * pi - pi).norm(), 1e-12);
      EXPECT_LT((pi - pi.adjoint()).norm(), 1e-12);
    }
  }
}

TEST(Amplify, ExpandedTermsMatchMatrixFree) {
  for (const auto& it : small_items(2)) {
    const auto amp = amplify_derandomised(it.h, 1, GraphFamily::Complete);
    const auto ex = expand_to_layered(amp);
    EXPECT_EQ(ex.num_layers(), it.h.num_layers());
    EXPECT_EQ(ex.weights(), it.h.weights());
    EXPECT_LT((ex.dense() - amp.dense()).norm(), 1e-12) << it.name;
    for (int c = 0; c < ex.num_layers(); ++c)
      EXPECT_EQ(ex.layers()[c].size(), amp.walks()[c].path_count(amp.registers()));
  }
}

TEST(Tensor, SpecExamples) {
  const auto zero_gap = single_projector();
  for (int t = 1; t <= 3; ++t) EXPECT_NEAR(min_eig(amplify_full_tensor(zero_gap, t)).lambda_min, 0.0, 1e-12);

  // lambda_min = 1/4 on two qubits.
  const auto h = build_layered(2, {LocalProjector({0}, diag_proj(1, {1})), LocalProjector({0, 1}, diag_proj(2, {0, 1}))},
                               std::vector<std::vector<int>>{{0}, {1}}, std::vector<double>{0.25, 0.75});
  const double lam = oracle::lambda_min(oracle::hamiltonian(h));
  ASSERT_NEAR(lam, 0.25, 1e-12);
  EXPECT_NEAR(min_eig(amplify_full_tensor(h, 2)).lambda_min, 0.4375, 1e-12);
  EXPECT_LT((amplify_full_tensor(h, 1).dense() - oracle::hamiltonian(h)).norm(), 1e-14);
}

TEST(Tensor, ClosedFormOnCorpus) {
  for (const auto& it : small_items(3))
    for (int t = 1; t <= 3; ++t) {
      if (t * it.h.n_qubits() > 9) continue;
      const double lam = oracle::lambda_min(oracle::hamiltonian(it.h));
      const auto amp = amplify_full_tensor(it.h, t);
      EXPECT_NEAR(min_eig(amp).lambda_min, 1.0 - std::pow(1.0 - lam, t), 1e-9) << it.name;
      EXPECT_LT((amp.dense() - oracle::tensor_amplification(it.h, t, false)).norm(), 1e-11) << it.name;
    }
}

TEST(DL, SpecExamples) {
  const auto h = build_layered(1, {LocalProjector({0}, diag_proj(1, {1})), LocalProjector({0}, diag_proj(1, {0}))},
                               std::vector<std::vector<int>>{{0, 1}});
  const auto dl = amplify_dl(h, 1);
  EXPECT_LT((dl.dense() - Matrix::Identity(2, 2)).norm(), 1e-15);
  EXPECT_NEAR(min_eig(dl).lambda_min, 1.0, 1e-14);

  const auto single = single_projector();
  EXPECT_LT((amplify_dl(single, 2).dense() - amplify_derandomised(single, 1, GraphFamily::CompleteWithLoops).dense()).norm(),
            1e-15);
  for (const auto& it : small_items(3)) {
    if (oracle::lambda_min(oracle::hamiltonian(it.h)) > 1e-10) continue;
    EXPECT_NEAR(min_eig(amplify_dl(it.h, 2)).lambda_min, 0.0, 1e-10) << it.name;
  }
}

TEST(DL, MatchesDenseLayerProducts) {
  for (const auto& it : small_items(2)) {
    const int t = 2, n = it.h.n_qubits();
    Matrix ref = oracle::identity(n * t);
    for (int c = 0; c < it.h.num_layers(); ++c) {
      Matrix q = oracle::identity(n);
      for (int i : it.h.layers()[c])
        q = q * oracle::embed(it.h.terms()[i].complement(), it.h.terms()[i].support(), n);
      Matrix qt = oracle::identity(n * t);
      for (int j = 0; j < t; ++j) qt = qt * oracle::on_register(q, j, n, t);
      ref -= it.h.weights()[c] * qt;
    }
    EXPECT_LT((amplify_dl(it.h, t).dense() - ref).norm(), 1e-12) << it.name;
  }
}

TEST(Classical, EveryModeMatchesBruteForce) {
  for (const auto& it : make_corpus(1)) {
    if (it.kind != CorpusKind::Classical && it.kind != CorpusKind::SingleProjector) continue;
    const int n = it.h.n_qubits();
    std::vector<AmplifiedOperator> amps;
    for (int t = 1; t <= 2; ++t) {
      if (2 * t * n <= 12) {
        for (auto fam : {GraphFamily::CompleteWithLoops, GraphFamily::Complete, GraphFamily::Cycle})
          amps.push_back(amplify_derandomised(it.h, t, fam));
      }
      amps.push_back(amplify_full_tensor(it.h, t));
      amps.push_back(amplify_dl(it.h, t));
    }
    for (const auto& amp : amps) {
      double best = 1e300;
      Vector e = Vector::Zero(static_cast<Eigen::Index>(amp.dim())), out(e.size());
      for (std::uint64_t x = 0; x < amp.dim(); ++x) {
        const double ex = classical_energy(amp, x);
        best = std::min(best, ex);
        e[static_cast<Eigen::Index>(x)] = 1.0;
        amp.apply(std::span<const cplx>(e.data(), amp.dim()), std::span<cplx>(out.data(), amp.dim()));
        e[static_cast<Eigen::Index>(x)] = 0.0;
        out[static_cast<Eigen::Index>(x)] -= ex;
        ASSERT_LT(out.norm(), 1e-12) << it.name << " " << mode_name(amp.mode()) << " x=" << x;
      }
      EXPECT_NEAR(min_eig(amp).lambda_min, best, 1e-12) << it.name << " " << mode_name(amp.mode());
    }
  }
}

TEST(Iterate, RoundsAndBounds) {
  const auto h = make_corpus(1)[0].h;
  const auto zero = iterate_hamiltonian(h, 1, 0, GraphFamily::CompleteWithLoops);
  ASSERT_EQ(zero.size(), 1u);
  EXPECT_LT((zero[0].dense() - h.dense()).norm(), 1e-15);

  LayeredHamiltonian h2;
  for (const auto& it : make_corpus(1))
    if (it.h.n_qubits() == 2 && it.kind == CorpusKind::NonCommuting) {
      h2 = it.h;
      break;
    }
  const auto ms = iterate_hamiltonian(h2, 1, 2, GraphFamily::CompleteWithLoops);
  ASSERT_EQ(ms.size(), 3u);
  EXPECT_EQ(ms[2].n_qubits(), 8);
  const double l0 = oracle::lambda_min(oracle::hamiltonian(ms[0]));
  const double l1 = oracle::lambda_min(ms[1].dense());
  const double l2 = oracle::lambda_min(ms[2].dense());
  EXPECT_LE(l1, 2 * l0 + 1e-10);
  EXPECT_LE(l2, 4 * l0 + 1e-10);
  for (const auto& m : ms) EXPECT_EQ(m.weights(), h2.weights());
  EXPECT_THROW(iterate_hamiltonian(h2, 2, 2, GraphFamily::Complete), BudgetError);
}

TEST(Iterate, ZeroEnergyPersists) {
  const auto ms = iterate_hamiltonian(single_projector(), 1, 3, GraphFamily::CompleteWithLoops);
  for (const auto& m : ms) EXPECT_NEAR(min_eig(m).lambda_min, 0.0, 1e-12);
}

TEST(IterationParams, SpecExamples) {
  EXPECT_EQ(choose_iteration_params(512, 8).rounds.value(), 18);
  EXPECT_EQ(choose_iteration_params(1, 8).rounds.value(), 0);
  EXPECT_DOUBLE_EQ(iteration_bounds(1, 3, 2, 3).completeness_multiplier, 8.0);
  EXPECT_DOUBLE_EQ(iteration_bounds(2, 2, 2, 3).locality, 32.0);
  EXPECT_DOUBLE_EQ(iteration_bounds(2, 1, 2, 3).clause_multiplier, 27.0);
  EXPECT_FALSE(choose_iteration_params(10, 1).rounds.has_value());
  EXPECT_FALSE(choose_iteration_params(10, 8).eta_condition);
}

TEST(Amplify, RejectsBadParameters) {
  EXPECT_THROW(amplify_full_tensor(single_projector(), 0), DomainError);
  const auto big = make_corpus(1);
  for (const auto& it : big)
    if (it.h.n_qubits() == 4) {
      EXPECT_THROW(amplify_derandomised(it.h, 4, GraphFamily::Complete), BudgetError);
    }
}
