#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <optional>
#include <string>
#include <vector>

#include "qamp/projector.hpp"
#include "qamp/types.hpp"

namespace qamp {

/// Simple undirected graph on vertices 0..n-1 with sorted adjacency lists.
struct Graph {
  std::vector<std::vector<int>> adj;

  Graph() = default;
  explicit Graph(int n) : adj(static_cast<std::size_t>(n)) {}

  int size() const { return static_cast<int>(adj.size()); }

  void add_edge(int u, int v) {
    if (u == v) return;
    auto insert = [](std::vector<int>& a, int x) {
      auto it = std::lower_bound(a.begin(), a.end(), x);
      if (it == a.end() || *it != x) a.insert(it, x);
    };
    insert(adj[u], v);
    insert(adj[v], u);
  }

  bool has_edge(int u, int v) const { return std::binary_search(adj[u].begin(), adj[u].end(), v); }

  int max_degree() const {
    int d = 0;
    for (const auto& a : adj) d = std::max(d, static_cast<int>(a.size()));
    return d;
  }

  std::size_t edge_count() const {
    std::size_t e = 0;
    for (const auto& a : adj) e += a.size();
    return e / 2;
  }
};

/// Vertices are terms; an edge joins two terms whose supports intersect.
inline Graph constraint_graph(const std::vector<std::vector<int>>& supports) {
  Graph g(static_cast<int>(supports.size()));
  for (std::size_t i = 0; i < supports.size(); ++i)
    for (std::size_t j = i + 1; j < supports.size(); ++j)
      if (supports_overlap(supports[i], supports[j])) g.add_edge(static_cast<int>(i), static_cast<int>(j));
  return g;
}

inline Graph constraint_graph(const std::vector<LocalProjector>& terms) {
  std::vector<std::vector<int>> supports;
  supports.reserve(terms.size());
  for (const auto& t : terms) supports.push_back(t.support());
  return constraint_graph(supports);
}

struct Coloring {
  int g = 0;
  std::vector<int> color;

  /// All g classes, each in ascending vertex order; some may be empty.
  std::vector<std::vector<int>> classes() const {
    std::vector<std::vector<int>> out(static_cast<std::size_t>(g));
    for (std::size_t v = 0; v < color.size(); ++v) out[color[v]].push_back(static_cast<int>(v));
    return out;
  }

  std::vector<int> class_sizes() const {
    std::vector<int> s(static_cast<std::size_t>(g), 0);
    for (int c : color) ++s[c];
    return s;
  }
};

inline bool is_proper(const Graph& graph, const Coloring& c) {
  for (int u = 0; u < graph.size(); ++u) {
    if (c.color[u] < 0 || c.color[u] >= c.g) return false;
    for (int v : graph.adj[u])
      if (c.color[u] == c.color[v]) return false;
  }
  return true;
}

inline bool is_equitable(const Coloring& c) {
  const auto s = c.class_sizes();
  if (s.empty()) return c.color.empty();
  const auto [lo, hi] = std::minmax_element(s.begin(), s.end());
  return *hi - *lo <= 1;
}

namespace detail {

class EquitableColorer {
 public:
  EquitableColorer(const Graph& graph, int g) : graph_(graph), g_(g), n_(graph.size()) {}

  std::optional<std::vector<int>> run() {
    if (!greedy()) return backtrack();
    while (!balanced()) {
      if (path_move()) continue;
      if (kempe_swap()) continue;
      return backtrack();
    }
    return color_;
  }

 private:
  bool greedy() {
    color_.assign(static_cast<std::size_t>(n_), -1);
    size_.assign(static_cast<std::size_t>(g_), 0);
    std::vector<char> blocked(static_cast<std::size_t>(g_));
    for (int v = 0; v < n_; ++v) {
      std::fill(blocked.begin(), blocked.end(), 0);
      for (int u : graph_.adj[v])
        if (color_[u] >= 0) blocked[color_[u]] = 1;
      int best = -1;
      for (int c = 0; c < g_; ++c)
        if (!blocked[c] && (best < 0 || size_[c] < size_[best])) best = c;
      if (best < 0) return false;
      color_[v] = best;
      ++size_[best];
    }
    return true;
  }

  bool balanced() const {
    const auto [lo, hi] = std::minmax_element(size_.begin(), size_.end());
    return *hi - *lo <= 1;
  }

  // Smallest vertex of class a with no neighbour in class b, or -1.
  int witness(int a, int b) const {
    for (int v = 0; v < n_; ++v) {
      if (color_[v] != a) continue;
      bool free = true;
      for (int u : graph_.adj[v])
        if (color_[u] == b) {
          free = false;
          break;
        }
      if (free) return v;
    }
    return -1;
  }

  // Shifts one vertex from a largest class to a smallest class along a chain
  // of single-vertex moves, each into a class where the mover has no neighbour.
  bool path_move() {
    const int hi = *std::max_element(size_.begin(), size_.end());
    const int lo = *std::min_element(size_.begin(), size_.end());
    std::vector<int> parent(static_cast<std::size_t>(g_), -2);
    std::deque<int> queue;
    for (int c = 0; c < g_; ++c)
      if (size_[c] == hi) {
        parent[c] = -1;
        queue.push_back(c);
      }
    int target = -1;
    while (!queue.empty() && target < 0) {
      const int a = queue.front();
      queue.pop_front();
      for (int b = 0; b < g_; ++b) {
        if (parent[b] != -2 || witness(a, b) < 0) continue;
        parent[b] = a;
        if (size_[b] == lo) {
          target = b;
          break;
        }
        queue.push_back(b);
      }
    }
    if (target < 0) return false;
    std::vector<int> chain{target};
    while (parent[chain.back()] >= 0) chain.push_back(parent[chain.back()]);
    // chain = target, ..., source; move from the target end first.
    for (std::size_t i = 0; i + 1 < chain.size(); ++i) {
      const int into = chain[i];
      const int from = chain[i + 1];
      const int v = witness(from, into);
      color_[v] = into;
      --size_[from];
      ++size_[into];
    }
    return true;
  }

  // Swaps a two-class component whose imbalance strictly reduces the spread.
  bool kempe_swap() {
    const int hi = *std::max_element(size_.begin(), size_.end());
    for (int a = 0; a < g_; ++a) {
      if (size_[a] != hi) continue;
      for (int b = 0; b < g_; ++b) {
        if (b == a || size_[a] - size_[b] < 2) continue;
        std::vector<char> seen(static_cast<std::size_t>(n_), 0);
        for (int v = 0; v < n_; ++v) {
          if (color_[v] != a || seen[v]) continue;
          std::vector<int> comp{v};
          seen[v] = 1;
          for (std::size_t i = 0; i < comp.size(); ++i)
            for (int u : graph_.adj[comp[i]])
              if (!seen[u] && (color_[u] == a || color_[u] == b)) {
                seen[u] = 1;
                comp.push_back(u);
              }
          int in_a = 0;
          for (int u : comp) in_a += color_[u] == a;
          const int delta = in_a - (static_cast<int>(comp.size()) - in_a);
          if (delta >= 1 && delta <= size_[a] - size_[b] - 1) {
            for (int u : comp) color_[u] = color_[u] == a ? b : a;
            size_[a] -= delta;
            size_[b] += delta;
            return true;
          }
        }
      }
    }
    return false;
  }

  // Exact search for a proper colouring with equitable class sizes.
  std::optional<std::vector<int>> backtrack() {
    order_.resize(static_cast<std::size_t>(n_));
    for (int v = 0; v < n_; ++v) order_[v] = v;
    std::stable_sort(order_.begin(), order_.end(),
                     [&](int a, int b) { return graph_.adj[a].size() > graph_.adj[b].size(); });
    lo_ = n_ / g_;
    hi_count_ = n_ % g_;
    color_.assign(static_cast<std::size_t>(n_), -1);
    size_.assign(static_cast<std::size_t>(g_), 0);
    full_hi_ = 0;
    nodes_ = 0;
    exhausted_ = false;
    if (search(0, -1)) return color_;
    return std::nullopt;
  }

  bool search(int idx, int max_used) {
    if (idx == n_) return true;
    if (++nodes_ > kNodeBudget) {
      exhausted_ = true;
      return false;
    }
    const int v = order_[idx];
    const int limit = std::min(g_ - 1, max_used + 1);
    for (int c = 0; c <= limit; ++c) {
      bool clash = false;
      for (int u : graph_.adj[v])
        if (color_[u] == c) {
          clash = true;
          break;
        }
      if (clash) continue;
      const int cap = size_[c] < lo_ ? lo_ : lo_ + 1;
      if (size_[c] >= cap) continue;
      const bool grows_hi = size_[c] == lo_;
      if (grows_hi && full_hi_ >= hi_count_) continue;
      color_[v] = c;
      ++size_[c];
      full_hi_ += grows_hi;
      if (search(idx + 1, std::max(max_used, c))) return true;
      full_hi_ -= grows_hi;
      --size_[c];
      color_[v] = -1;
      if (exhausted_) return false;
    }
    return false;
  }

 public:
  bool exhausted() const { return exhausted_; }

 private:
  static constexpr std::uint64_t kNodeBudget = 2'000'000;

  const Graph& graph_;
  int g_;
  int n_;
  std::vector<int> color_;
  std::vector<int> size_;
  std::vector<int> order_;
  int lo_ = 0;
  int hi_count_ = 0;
  int full_hi_ = 0;
  std::uint64_t nodes_ = 0;
  bool exhausted_ = false;
};

}  // namespace detail

/// Proper colouring with g classes whose sizes differ by at most one.
/// Deterministic: every choice breaks ties by the smallest index.
inline Coloring equitable_color(const Graph& graph, std::optional<int> g = std::nullopt) {
  const int colors = g.value_or(graph.max_degree() + 1);
  if (colors < 1) throw DomainError("equitable_color needs at least one colour");
  Coloring out;
  out.g = colors;
  if (graph.size() == 0) return out;
  detail::EquitableColorer colorer(graph, colors);
  auto result = colorer.run();
  if (!result) {
    std::string why = colorer.exhausted() ? "search budget exhausted" : "none exists";
    throw InfeasibleColoring("no equitable proper colouring with g=" + std::to_string(colors) + " (" + why +
                             "); try g=" + std::to_string(colors + 1));
  }
  out.color = std::move(*result);
  return out;
}

}  // namespace qamp
