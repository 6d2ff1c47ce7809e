#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "qamp/types.hpp"

namespace qamp {

enum class GraphFamily {
  CompleteWithLoops,  ///< K_m plus a loop at every vertex, d = m, mu = 0.
  Complete,           ///< K_m, d = m - 1, mu = 1 / (m - 1).
  Cycle,              ///< C_m, d = 2.
  ChordalCycle,       ///< circulant with offsets +-1 and +-floor(sqrt m), d = 4.
  Custom,             ///< rotation map supplied by the caller.
};

inline std::string family_name(GraphFamily f) {
  switch (f) {
    case GraphFamily::CompleteWithLoops: return "complete-loops";
    case GraphFamily::Complete: return "complete";
    case GraphFamily::Cycle: return "cycle";
    case GraphFamily::ChordalCycle: return "chordal";
    case GraphFamily::Custom: return "custom";
  }
  return "custom";
}

inline GraphFamily parse_family(const std::string& s) {
  if (s == "complete-loops" || s == "mu0") return GraphFamily::CompleteWithLoops;
  if (s == "complete" || s == "K") return GraphFamily::Complete;
  if (s == "cycle") return GraphFamily::Cycle;
  if (s == "chordal") return GraphFamily::ChordalCycle;
  if (s == "custom") return GraphFamily::Custom;
  throw DomainError("unknown graph family '" + s + "'");
}

/// Fewest vertices for which the family is defined and connected.
inline int family_min_vertices(GraphFamily f) {
  switch (f) {
    case GraphFamily::CompleteWithLoops: return 1;
    case GraphFamily::Complete: return 3;
    case GraphFamily::Cycle: return 3;
    case GraphFamily::ChordalCycle: return 5;
    case GraphFamily::Custom: return 1;
  }
  return 1;
}

struct Port {
  int vertex = 0;
  int port = 0;
  bool operator==(const Port&) const = default;
};

/// Regular multigraph given by its rotation map, with its certified
/// normalised second eigenvalue.
struct ExpanderGraph {
  int m = 0;
  int d = 0;
  GraphFamily family = GraphFamily::Custom;
  std::vector<Port> rotation;  ///< index v * d + p
  double mu = 1.0;             ///< max |lambda_k| over the non-top eigenvalues of A / d
  double lambda2 = 1.0;        ///< second largest signed eigenvalue of A / d

  const Port& rot(int v, int p) const { return rotation[static_cast<std::size_t>(v) * d + p]; }
  bool is_expander() const { return mu < 1.0 - 1e-12; }

  RealMatrix transition() const {
    RealMatrix p = RealMatrix::Zero(m, m);
    for (int v = 0; v < m; ++v)
      for (int q = 0; q < d; ++q) p(v, rot(v, q).vertex) += 1.0 / d;
    return p;
  }

  /// Integer adjacency counting parallel edges and loops by port multiplicity.
  std::vector<std::vector<std::uint64_t>> adjacency_counts() const {
    std::vector<std::vector<std::uint64_t>> a(m, std::vector<std::uint64_t>(m, 0));
    for (int v = 0; v < m; ++v)
      for (int q = 0; q < d; ++q) ++a[v][rot(v, q).vertex];
    return a;
  }
};

/// Checks that the rotation map is an involution on (vertex, port) pairs.
inline void validate_rotation(int m, int d, const std::vector<Port>& rotation) {
  if (m < 1 || d < 1) throw StructuralError("graph needs m >= 1 and d >= 1");
  if (rotation.size() != static_cast<std::size_t>(m) * d) throw StructuralError("rotation map must have m * d entries");
  for (int v = 0; v < m; ++v)
    for (int p = 0; p < d; ++p) {
      const Port& to = rotation[static_cast<std::size_t>(v) * d + p];
      if (to.vertex < 0 || to.vertex >= m || to.port < 0 || to.port >= d)
        throw StructuralError("rotation map entry out of range");
      const Port& back = rotation[static_cast<std::size_t>(to.vertex) * d + to.port];
      if (back.vertex != v || back.port != p) throw StructuralError("rotation map is not an involution");
    }
}

/// mu and the signed second eigenvalue from a dense eigensolve of A / d.
inline std::pair<double, double> certify_spectrum(const ExpanderGraph& g) {
  if (g.m == 1) return {0.0, 0.0};
  if (g.m > 4096) throw BudgetError("dense certification is limited to 4096 vertices");
  Eigen::SelfAdjointEigenSolver<RealMatrix> es(g.transition(), Eigen::EigenvaluesOnly);
  const RealVector ev = es.eigenvalues();  // ascending
  double mu = 0.0;
  for (Eigen::Index k = 0; k + 1 < ev.size(); ++k) mu = std::max(mu, std::abs(ev[k]));
  return {std::min(mu, 1.0), ev[ev.size() - 2]};
}

inline ExpanderGraph make_custom_graph(int m, int d, std::vector<Port> rotation) {
  validate_rotation(m, d, rotation);
  ExpanderGraph g;
  g.m = m;
  g.d = d;
  g.family = GraphFamily::Custom;
  g.rotation = std::move(rotation);
  std::tie(g.mu, g.lambda2) = certify_spectrum(g);
  return g;
}

namespace detail {
inline std::vector<Port> circulant_rotation(int m, const std::vector<int>& offsets) {
  const int d = 2 * static_cast<int>(offsets.size());
  std::vector<Port> rot(static_cast<std::size_t>(m) * d);
  for (int v = 0; v < m; ++v)
    for (std::size_t i = 0; i < offsets.size(); ++i) {
      const int s = offsets[i] % m;
      const int fwd = static_cast<int>(2 * i);
      rot[static_cast<std::size_t>(v) * d + fwd] = {(v + s) % m, fwd + 1};
      rot[static_cast<std::size_t>(v) * d + fwd + 1] = {((v - s) % m + m) % m, fwd};
    }
  return rot;
}
}  // namespace detail

/// Builds and certifies a member of a named family on m vertices.
inline ExpanderGraph build_graph(int m, GraphFamily family) {
  if (family == GraphFamily::Custom) throw DomainError("custom graphs need a rotation map");
  if (m < family_min_vertices(family))
    throw DomainError(family_name(family) + " needs at least " + std::to_string(family_min_vertices(family)) +
                      " vertices");
  ExpanderGraph g;
  g.m = m;
  g.family = family;
  switch (family) {
    case GraphFamily::CompleteWithLoops:
      g.d = m;
      g.rotation.resize(static_cast<std::size_t>(m) * m);
      for (int v = 0; v < m; ++v)
        for (int p = 0; p < m; ++p) g.rotation[static_cast<std::size_t>(v) * m + p] = {p, v};
      break;
    case GraphFamily::Complete:
      g.d = m - 1;
      g.rotation.resize(static_cast<std::size_t>(m) * (m - 1));
      for (int v = 0; v < m; ++v)
        for (int p = 0; p < m - 1; ++p) {
          const int u = p < v ? p : p + 1;
          const int q = v < u ? v : v - 1;
          g.rotation[static_cast<std::size_t>(v) * (m - 1) + p] = {u, q};
        }
      break;
    case GraphFamily::Cycle:
      g.d = 2;
      g.rotation = detail::circulant_rotation(m, {1});
      break;
    case GraphFamily::ChordalCycle: {
      g.d = 4;
      const int s = static_cast<int>(std::floor(std::sqrt(static_cast<double>(m))));
      g.rotation = detail::circulant_rotation(m, {1, s});
      break;
    }
    case GraphFamily::Custom: break;
  }
  validate_rotation(g.m, g.d, g.rotation);
  std::tie(g.mu, g.lambda2) = certify_spectrum(g);
  return g;
}

/// Smallest r with r * clauses >= the family minimum.
inline int default_replication(int clauses, GraphFamily family) {
  const int m0 = family_min_vertices(family);
  return std::max(1, (m0 + clauses - 1) / clauses);
}

/// All walks of length L, indexed by start vertex then ports, most
/// significant first.
class WalkFamily {
 public:
  WalkFamily(ExpanderGraph g, int length) : g_(std::move(g)), length_(length) {
    if (length < 1) throw DomainError("walk length must be at least 1");
    long double count = g_.m;
    for (int i = 1; i < length; ++i) count *= g_.d;
    if (count > 9223372036854775808.0L) throw EnumerationError("walk count exceeds 2^63");
    count_ = static_cast<std::uint64_t>(g_.m);
    for (int i = 1; i < length; ++i) count_ *= static_cast<std::uint64_t>(g_.d);
  }

  std::uint64_t size() const { return count_; }
  int length() const { return length_; }
  const ExpanderGraph& graph() const { return g_; }

  /// Vertex sequence of walk `index`.
  std::vector<int> walk(std::uint64_t index) const {
    std::vector<int> ports(static_cast<std::size_t>(length_ - 1));
    for (int i = length_ - 2; i >= 0; --i) {
      ports[i] = static_cast<int>(index % static_cast<std::uint64_t>(g_.d));
      index /= static_cast<std::uint64_t>(g_.d);
    }
    std::vector<int> out(static_cast<std::size_t>(length_));
    out[0] = static_cast<int>(index);
    for (int i = 1; i < length_; ++i) out[i] = g_.rot(out[i - 1], ports[i - 1]).vertex;
    return out;
  }

  template <class Fn>
  void for_each(Fn&& fn) const {
    for (std::uint64_t i = 0; i < count_; ++i) fn(i, walk(i));
  }

 private:
  ExpanderGraph g_;
  int length_;
  std::uint64_t count_ = 0;
};

inline WalkFamily enumerate_walks(const ExpanderGraph& g, int length) { return WalkFamily(g, length); }

struct QuadraticFormCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  bool ok = false;
};

/// a^T P^steps b against (1/m)|a|_1|b|_1 + mu^steps (|a|_1 + |b|_1).
inline QuadraticFormCheck check_quadratic_form(const ExpanderGraph& g, const RealVector& a, const RealVector& b, int steps) {
  if (a.size() != g.m || b.size() != g.m) throw StructuralError("vector length must equal the vertex count");
  for (Eigen::Index i = 0; i < a.size(); ++i)
    if (a[i] < 0.0 || a[i] > 1.0 || b[i] < 0.0 || b[i] > 1.0) throw DomainError("entries must lie in [0, 1]");
  if (steps < 1) throw DomainError("steps must be at least 1");
  RealVector x = b;
  for (int s = 0; s < steps; ++s) {
    RealVector y = RealVector::Zero(g.m);
    for (int v = 0; v < g.m; ++v)
      for (int p = 0; p < g.d; ++p) y[v] += x[g.rot(v, p).vertex];
    x = y / static_cast<double>(g.d);
  }
  QuadraticFormCheck c;
  c.lhs = a.dot(x);
  const double a1 = a.sum();
  const double b1 = b.sum();
  c.rhs = a1 * b1 / g.m + std::pow(g.mu, steps) * (a1 + b1);
  c.ok = c.lhs <= c.rhs + tol::quadratic_form;
  return c;
}

/// Pr[f(i) = u, f(j) = v] under the uniform walk law, positions 1-based.
inline RealMatrix stationary_walk_marginals(const WalkFamily& walks, int i, int j) {
  if (i < 1 || j > walks.length() || i >= j) throw DomainError("need 1 <= i < j <= L");
  const auto& g = walks.graph();
  const auto a = g.adjacency_counts();
  // counts[u][v]: number of port sequences of length j - i from u ending at v.
  std::vector<std::vector<std::uint64_t>> counts(g.m, std::vector<std::uint64_t>(g.m, 0));
  for (int u = 0; u < g.m; ++u) counts[u][u] = 1;
  for (int s = 0; s < j - i; ++s) {
    std::vector<std::vector<std::uint64_t>> next(g.m, std::vector<std::uint64_t>(g.m, 0));
    for (int u = 0; u < g.m; ++u)
      for (int w = 0; w < g.m; ++w) {
        if (!counts[u][w]) continue;
        for (int v = 0; v < g.m; ++v) next[u][v] += counts[u][w] * a[w][v];
      }
    counts = std::move(next);
  }
  const double denom = static_cast<double>(g.m) * std::pow(static_cast<double>(g.d), j - i);
  RealMatrix out(g.m, g.m);
  for (int u = 0; u < g.m; ++u)
    for (int v = 0; v < g.m; ++v) out(u, v) = static_cast<double>(counts[u][v]) / denom;
  return out;
}

}  // namespace qamp
