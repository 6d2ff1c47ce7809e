#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qamp/hamiltonian.hpp"
#include "qamp/local_ops.hpp"
#include "qamp/projector.hpp"
#include "qamp/random.hpp"
#include "qamp/types.hpp"

namespace qamp {

enum class CorpusKind { Classical, Stabilizer, NonCommuting, SingleProjector };

inline std::string kind_name(CorpusKind k) {
  switch (k) {
    case CorpusKind::Classical: return "classical";
    case CorpusKind::Stabilizer: return "stabilizer";
    case CorpusKind::NonCommuting: return "noncommuting";
    case CorpusKind::SingleProjector: return "single";
  }
  return "?";
}

struct CorpusItem {
  std::string name;
  CorpusKind kind;
  LayeredHamiltonian h;
};

namespace detail {

inline Matrix pauli(char c) {
  Matrix m = Matrix::Zero(2, 2);
  switch (c) {
    case 'I': m(0, 0) = m(1, 1) = 1.0; break;
    case 'X': m(0, 1) = m(1, 0) = 1.0; break;
    case 'Y': m(0, 1) = cplx{0, -1}; m(1, 0) = cplx{0, 1}; break;
    case 'Z': m(0, 0) = 1.0; m(1, 1) = -1.0; break;
    default: throw DomainError(std::string("unknown Pauli ") + c);
  }
  return m;
}

/// Pauli string over the full register; 'I' marks qubits outside the support.
inline bool paulis_commute(const std::string& a, const std::string& b) {
  int anti = 0;
  for (std::size_t q = 0; q < a.size(); ++q) anti += a[q] != 'I' && b[q] != 'I' && a[q] != b[q];
  return anti % 2 == 0;
}

/// (I - sign P) / 2 restricted to the non-identity qubits of P.
inline LocalProjector stabilizer_term(const std::string& p, int sign) {
  std::vector<int> support;
  Matrix m = Matrix::Identity(1, 1);
  for (std::size_t q = 0; q < p.size(); ++q)
    if (p[q] != 'I') {
      support.push_back(static_cast<int>(q));
      m = kron(m, pauli(p[q]));
    }
  const Eigen::Index dim = m.rows();
  return LocalProjector(std::move(support), (Matrix::Identity(dim, dim) - static_cast<double>(sign) * m) / 2.0);
}

inline std::vector<int> random_support(int n, int k, Rng& rng) {
  std::vector<int> q(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) q[i] = i;
  rng.shuffle(q);
  q.resize(static_cast<std::size_t>(k));
  std::sort(q.begin(), q.end());
  return q;
}

inline Matrix basis_projector(int k, const std::vector<int>& states) {
  const Eigen::Index dim = Eigen::Index{1} << k;
  Matrix m = Matrix::Zero(dim, dim);
  for (int s : states) m(s, s) = 1.0;
  return m;
}

/// Odd indices carry a frustrated core: an odd cycle of 2-colouring
/// constraints, or on two qubits the pair "equal" and "different".
inline CorpusItem classical_item(int idx, int n, Rng& rng) {
  for (;;) {
    const int clauses = rng.range(idx % 2 == 1 ? 0 : 2, n + 2);
    std::vector<LocalProjector> terms;
    if (idx % 2 == 1 && n >= 3) {
      for (const auto& e : {std::vector<int>{0, 1}, std::vector<int>{1, 2}, std::vector<int>{0, 2}})
        terms.emplace_back(e, basis_projector(2, {0, 3}));
    } else if (idx % 2 == 1 && n == 2) {
      terms.emplace_back(std::vector<int>{0, 1}, basis_projector(2, {0, 3}));
      terms.emplace_back(std::vector<int>{0, 1}, basis_projector(2, {1, 2}));
    }
    for (int c = 0; c < clauses && static_cast<int>(terms.size()) < 5; ++c) {
      if (n == 1 || rng.coin(0.15)) {
        terms.emplace_back(random_support(n, 1, rng), basis_projector(1, {rng.range(0, 1)}));
      } else if (rng.coin(0.5)) {
        // 2-colouring constraint: violated when both ends agree.
        terms.emplace_back(random_support(n, 2, rng), basis_projector(2, {0, 3}));
      } else {
        // 2-SAT clause: exactly one forbidden assignment.
        terms.emplace_back(random_support(n, 2, rng), basis_projector(2, {rng.range(0, 3)}));
      }
    }
    LayeredHamiltonian h = build_layered(n, std::move(terms));
    if (h.num_layers() <= 3) return {"classical-" + std::to_string(idx), CorpusKind::Classical, std::move(h)};
  }
}

/// Indices other than multiples of 4 start from XX, YY, ZZ on qubits 0 and 1 with sign +1; these
/// commute but XX ZZ = -YY, so the three cannot all be satisfied.
inline CorpusItem stabilizer_item(int idx, int n, bool single_layer, Rng& rng) {
  static const char kPaulis[] = {'X', 'Y', 'Z'};
  for (;;) {
    std::vector<std::string> chosen;
    const std::size_t core = idx % 4 != 0 ? 3 : 0;
    for (std::size_t c = 0; c < core; ++c) {
      std::string p(static_cast<std::size_t>(n), 'I');
      p[0] = p[1] = kPaulis[c];
      chosen.push_back(p);
    }
    const int want = rng.range(2, n + 1) + static_cast<int>(core);
    for (int attempt = 0; attempt < 64 && static_cast<int>(chosen.size()) < want; ++attempt) {
      std::string p(static_cast<std::size_t>(n), 'I');
      for (int q : random_support(n, std::min(n, rng.range(1, 2) + (n > 2 && rng.coin(0.3))), rng))
        p[q] = kPaulis[rng.below(3)];
      bool ok = true;
      for (const auto& c : chosen) ok = ok && c != p && paulis_commute(c, p);
      if (ok) chosen.push_back(p);
    }
    if (chosen.size() < 2) continue;
    std::vector<LocalProjector> terms;
    for (std::size_t i = 0; i < chosen.size(); ++i)
      terms.push_back(stabilizer_term(chosen[i], i < core || rng.coin(0.7) ? 1 : -1));
    std::optional<std::vector<std::vector<int>>> layers;
    if (single_layer) {
      layers.emplace(1);
      for (std::size_t i = 0; i < terms.size(); ++i) (*layers)[0].push_back(static_cast<int>(i));
    }
    LayeredHamiltonian h = build_layered(n, std::move(terms), std::move(layers));
    if (h.num_layers() <= 3) return {"stabilizer-" + std::to_string(idx), CorpusKind::Stabilizer, std::move(h)};
  }
}

inline CorpusItem noncommuting_item(int idx, int n, Rng& rng) {
  for (;;) {
    const int count = rng.range(2, n + 1);
    std::vector<LocalProjector> terms;
    for (int c = 0; c < count; ++c) {
      const int k = std::min(n, rng.range(1, 2));
      const int rank = rng.range(1, (1 << k) - 1);
      terms.emplace_back(random_support(n, k, rng), random_projector(k, rank, rng));
    }
    LayeredHamiltonian h = build_layered(n, std::move(terms));
    if (h.num_layers() < 2 || h.num_layers() > 3) continue;
    bool noncommuting = false;
    for (std::size_t i = 0; i < h.num_terms() && !noncommuting; ++i)
      for (std::size_t j = 0; j < i && !noncommuting; ++j)
        noncommuting = commutator_norm(h.terms()[i], h.terms()[j]) > 1e-6;
    if (noncommuting) return {"noncommuting-" + std::to_string(idx), CorpusKind::NonCommuting, std::move(h)};
  }
}

}  // namespace detail

/// Single projector |1><1| on one qubit; lambda_min = 0.
inline CorpusItem single_projector_toy() {
  return {"single-0", CorpusKind::SingleProjector, build_layered(1, {LocalProjector({0}, detail::basis_projector(1, {1}))})};
}

/// Deterministic test corpus of 32 Hamiltonians with n <= 4 and at most three layers.
inline std::vector<CorpusItem> make_corpus(std::uint64_t seed = 1) {
  Rng rng(seed);
  std::vector<CorpusItem> items;
  items.push_back(single_projector_toy());
  const int classical_n[] = {1, 2, 2, 2, 2, 3, 3, 3, 3, 4, 2};
  for (int i = 0; i < 11; ++i) items.push_back(detail::classical_item(i, classical_n[i], rng));
  const int stabilizer_n[] = {2, 2, 2, 3, 3, 3, 2, 3, 4, 2};
  for (int i = 0; i < 10; ++i) items.push_back(detail::stabilizer_item(i, stabilizer_n[i], i % 2 == 0, rng));
  const int noncommuting_n[] = {2, 2, 2, 2, 3, 3, 3, 2, 3, 2};
  for (int i = 0; i < 10; ++i) items.push_back(detail::noncommuting_item(i, noncommuting_n[i], rng));
  return items;
}

}  // namespace qamp
