#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <numeric>
#include <optional>
#include <queue>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "treeuniv/error.hpp"

namespace treeuniv {

using Vertex = std::int32_t;
using Edge = std::pair<Vertex, Vertex>;

// Sorted, duplicate-free set of vertex ids.
class VertexSet {
 public:
  VertexSet() = default;
  VertexSet(std::initializer_list<Vertex> init) : members_(init) { normalize(); }
  explicit VertexSet(std::vector<Vertex> members) : members_(std::move(members)) { normalize(); }

  static VertexSet range(Vertex n) {
    VertexSet s;
    s.members_.resize(static_cast<std::size_t>(n));
    std::iota(s.members_.begin(), s.members_.end(), 0);
    return s;
  }

  std::size_t size() const noexcept { return members_.size(); }
  bool empty() const noexcept { return members_.empty(); }
  auto begin() const noexcept { return members_.begin(); }
  auto end() const noexcept { return members_.end(); }
  Vertex operator[](std::size_t i) const { return members_[i]; }
  const std::vector<Vertex>& members() const noexcept { return members_; }

  bool contains(Vertex v) const { return std::binary_search(members_.begin(), members_.end(), v); }

  VertexSet without(const VertexSet& other) const {
    VertexSet out;
    std::set_difference(begin(), end(), other.begin(), other.end(), std::back_inserter(out.members_));
    return out;
  }
  VertexSet intersect(const VertexSet& other) const {
    VertexSet out;
    std::set_intersection(begin(), end(), other.begin(), other.end(), std::back_inserter(out.members_));
    return out;
  }
  VertexSet unite(const VertexSet& other) const {
    VertexSet out;
    std::set_union(begin(), end(), other.begin(), other.end(), std::back_inserter(out.members_));
    return out;
  }
  bool disjoint_from(const VertexSet& other) const { return intersect(other).empty(); }

  friend bool operator==(const VertexSet&, const VertexSet&) = default;

 private:
  void normalize() {
    std::sort(members_.begin(), members_.end());
    members_.erase(std::unique(members_.begin(), members_.end()), members_.end());
  }

  std::vector<Vertex> members_;
};

// Simple undirected graph on vertices 0..n-1 with sorted adjacency lists.
// Values are immutable once built; use GraphBuilder or from_edges.
class Graph {
 public:
  Graph() = default;

  // Throws InputError on self-loops, duplicate edges or out-of-range ids.
  static Graph from_edges(std::size_t n, std::span<const Edge> edges) {
    Graph g(n);
    for (const auto& [u, v] : edges) {
      g.check_vertex(u);
      g.check_vertex(v);
      if (u == v) throw InputError("self-loop at vertex " + std::to_string(u));
      g.adj_[static_cast<std::size_t>(u)].push_back(v);
      g.adj_[static_cast<std::size_t>(v)].push_back(u);
    }
    for (auto& list : g.adj_) {
      std::sort(list.begin(), list.end());
      if (std::adjacent_find(list.begin(), list.end()) != list.end()) {
        throw InputError("duplicate edge");
      }
    }
    g.m_ = edges.size();
    return g;
  }
  static Graph from_edges(std::size_t n, std::initializer_list<Edge> edges) {
    return from_edges(n, std::span<const Edge>(edges.begin(), edges.size()));
  }
  static Graph from_edges(std::size_t n, const std::vector<Edge>& edges) {
    return from_edges(n, std::span<const Edge>(edges));
  }

  std::size_t order() const noexcept { return adj_.size(); }
  std::size_t size() const noexcept { return m_; }
  Vertex n() const noexcept { return static_cast<Vertex>(adj_.size()); }

  const std::vector<Vertex>& neighbors(Vertex v) const { return adj_[static_cast<std::size_t>(v)]; }
  std::size_t degree(Vertex v) const { return neighbors(v).size(); }
  std::size_t max_degree() const {
    std::size_t best = 0;
    for (const auto& list : adj_) best = std::max(best, list.size());
    return best;
  }

  bool has_edge(Vertex u, Vertex v) const {
    const auto& list = neighbors(u);
    return std::binary_search(list.begin(), list.end(), v);
  }

  bool valid_vertex(Vertex v) const noexcept { return v >= 0 && static_cast<std::size_t>(v) < adj_.size(); }
  void check_vertex(Vertex v) const {
    if (!valid_vertex(v)) {
      throw InputError("vertex " + std::to_string(v) + " out of range [0, " + std::to_string(adj_.size()) + ")");
    }
  }
  void check_set(const VertexSet& x) const {
    for (Vertex v : x) check_vertex(v);
  }

  // Edges as (u, v) with u < v in lexicographic order.
  std::vector<Edge> edges() const {
    std::vector<Edge> out;
    out.reserve(m_);
    for (Vertex u = 0; u < n(); ++u) {
      for (Vertex v : neighbors(u)) {
        if (u < v) out.emplace_back(u, v);
      }
    }
    return out;
  }

  friend bool operator==(const Graph&, const Graph&) = default;

 private:
  friend class GraphBuilder;
  explicit Graph(std::size_t n) : adj_(n) {}

  std::vector<std::vector<Vertex>> adj_;
  std::size_t m_ = 0;
};

// Accumulates edges; duplicates are ignored, self-loops rejected.
class GraphBuilder {
 public:
  explicit GraphBuilder(std::size_t n) : adj_(n) {}

  std::size_t order() const noexcept { return adj_.size(); }

  bool add_edge(Vertex u, Vertex v) {
    if (u < 0 || v < 0 || static_cast<std::size_t>(u) >= adj_.size() || static_cast<std::size_t>(v) >= adj_.size()) {
      throw InputError("edge endpoint out of range");
    }
    if (u == v) throw InputError("self-loop at vertex " + std::to_string(u));
    if (!adj_[static_cast<std::size_t>(u)].insert(v).second) return false;
    adj_[static_cast<std::size_t>(v)].insert(u);
    ++m_;
    return true;
  }

  bool has_edge(Vertex u, Vertex v) const { return adj_[static_cast<std::size_t>(u)].count(v) != 0; }

  Graph build() const {
    Graph g(adj_.size());
    for (std::size_t v = 0; v < adj_.size(); ++v) {
      g.adj_[v].assign(adj_[v].begin(), adj_[v].end());
    }
    g.m_ = m_;
    return g;
  }

 private:
  std::vector<std::set<Vertex>> adj_;
  std::size_t m_ = 0;
};

// Fixed-width bitset over vertex ids, sized at runtime.
class VertexBits {
 public:
  VertexBits() = default;
  explicit VertexBits(std::size_t n) : n_(n), words_((n + 63) / 64, 0) {}

  void set(Vertex v) { words_[static_cast<std::size_t>(v) >> 6] |= bit(v); }
  void reset(Vertex v) { words_[static_cast<std::size_t>(v) >> 6] &= ~bit(v); }
  bool test(Vertex v) const { return (words_[static_cast<std::size_t>(v) >> 6] & bit(v)) != 0; }
  void clear() { std::fill(words_.begin(), words_.end(), 0); }

  std::size_t count() const {
    std::size_t c = 0;
    for (auto w : words_) c += static_cast<std::size_t>(std::popcount(w));
    return c;
  }
  // |this & ~mask|
  std::size_t count_without(const VertexBits& mask) const {
    std::size_t c = 0;
    for (std::size_t i = 0; i < words_.size(); ++i) c += static_cast<std::size_t>(std::popcount(words_[i] & ~mask.words_[i]));
    return c;
  }
  std::size_t count_common(const VertexBits& other) const {
    std::size_t c = 0;
    for (std::size_t i = 0; i < words_.size(); ++i) c += static_cast<std::size_t>(std::popcount(words_[i] & other.words_[i]));
    return c;
  }

  VertexBits& operator|=(const VertexBits& o) {
    for (std::size_t i = 0; i < words_.size(); ++i) words_[i] |= o.words_[i];
    return *this;
  }
  VertexBits& operator&=(const VertexBits& o) {
    for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= o.words_[i];
    return *this;
  }
  VertexBits& subtract(const VertexBits& o) {
    for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= ~o.words_[i];
    return *this;
  }
  VertexBits complement() const {
    VertexBits out(n_);
    for (std::size_t i = 0; i < words_.size(); ++i) out.words_[i] = ~words_[i];
    if (n_ % 64 != 0 && !out.words_.empty()) out.words_.back() &= (std::uint64_t{1} << (n_ % 64)) - 1;
    return out;
  }

  // Ascending list of members; stops after `limit` entries.
  std::vector<Vertex> members(std::size_t limit = std::numeric_limits<std::size_t>::max()) const {
    std::vector<Vertex> out;
    for (std::size_t i = 0; i < words_.size() && out.size() < limit; ++i) {
      std::uint64_t w = words_[i];
      while (w != 0 && out.size() < limit) {
        out.push_back(static_cast<Vertex>(i * 64 + static_cast<std::size_t>(std::countr_zero(w))));
        w &= w - 1;
      }
    }
    return out;
  }

  void assign_or(const VertexBits& a, const VertexBits& b) {
    for (std::size_t i = 0; i < words_.size(); ++i) words_[i] = a.words_[i] | b.words_[i];
  }

  friend bool operator==(const VertexBits&, const VertexBits&) = default;

 private:
  static std::uint64_t bit(Vertex v) { return std::uint64_t{1} << (static_cast<unsigned>(v) & 63U); }

  std::size_t n_ = 0;
  std::vector<std::uint64_t> words_;
};

inline VertexBits to_bits(std::size_t n, const VertexSet& set) {
  VertexBits b(n);
  for (Vertex v : set) b.set(v);
  return b;
}

// Per-vertex neighborhood bitsets for enumeration-heavy checks.
inline std::vector<VertexBits> neighbor_bits(const Graph& g) {
  std::vector<VertexBits> out(g.order(), VertexBits(g.order()));
  for (Vertex v = 0; v < g.n(); ++v) {
    for (Vertex w : g.neighbors(v)) out[static_cast<std::size_t>(v)].set(w);
  }
  return out;
}

// An injective map from pattern vertices to host vertices.
struct Embedding {
  std::vector<Vertex> map;

  std::size_t size() const noexcept { return map.size(); }
  Vertex operator[](std::size_t v) const { return map[v]; }
  friend bool operator==(const Embedding&, const Embedding&) = default;
};

// { y not in X : y adjacent to some x in X }
inline VertexSet external_neighborhood(const Graph& g, const VertexSet& x) {
  g.check_set(x);
  std::vector<Vertex> out;
  for (Vertex v : x) {
    for (Vertex w : g.neighbors(v)) {
      if (!x.contains(w)) out.push_back(w);
    }
  }
  return VertexSet(std::move(out));
}

// Number of ordered pairs (x, y) in X x Y that are edges; edges inside
// X ∩ Y are counted twice.
inline std::size_t ordered_edge_count(const Graph& g, const VertexSet& x, const VertexSet& y) {
  g.check_set(x);
  g.check_set(y);
  std::size_t count = 0;
  for (Vertex v : x) {
    const auto& nb = g.neighbors(v);
    if (nb.size() < y.size()) {
      for (Vertex w : nb) count += y.contains(w) ? 1 : 0;
    } else {
      for (Vertex w : y) count += std::binary_search(nb.begin(), nb.end(), w) ? 1 : 0;
    }
  }
  return count;
}

struct InducedSubgraph {
  Graph graph;
  std::vector<Vertex> to_parent;  // new id -> original id
};

// G[X] with vertices relabeled 0..|X|-1 in ascending order of original id.
inline InducedSubgraph induced_subgraph(const Graph& g, const VertexSet& x) {
  g.check_set(x);
  std::vector<Vertex> local(g.order(), -1);
  for (std::size_t i = 0; i < x.size(); ++i) local[static_cast<std::size_t>(x[i])] = static_cast<Vertex>(i);
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (Vertex w : g.neighbors(x[i])) {
      const Vertex j = local[static_cast<std::size_t>(w)];
      if (j > static_cast<Vertex>(i)) edges.emplace_back(static_cast<Vertex>(i), j);
    }
  }
  return {Graph::from_edges(x.size(), edges), x.members()};
}

// True iff phi is injective and maps every pattern edge onto a host edge.
inline bool validate_embedding(const Embedding& phi, const Graph& pattern, const Graph& host) {
  if (phi.size() != pattern.order()) {
    throw InputError("embedding length " + std::to_string(phi.size()) + " does not match pattern order " +
                     std::to_string(pattern.order()));
  }
  std::vector<char> used(host.order(), 0);
  for (Vertex image : phi.map) {
    if (!host.valid_vertex(image) || used[static_cast<std::size_t>(image)]) return false;
    used[static_cast<std::size_t>(image)] = 1;
  }
  for (const auto& [u, v] : pattern.edges()) {
    if (!host.has_edge(phi[static_cast<std::size_t>(u)], phi[static_cast<std::size_t>(v)])) return false;
  }
  return true;
}

inline constexpr int kUnreachable = -1;

inline std::vector<int> bfs_distances(const Graph& g, Vertex source) {
  std::vector<int> dist(g.order(), kUnreachable);
  std::vector<Vertex> queue{source};
  dist[static_cast<std::size_t>(source)] = 0;
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const Vertex v = queue[head];
    for (Vertex w : g.neighbors(v)) {
      if (dist[static_cast<std::size_t>(w)] == kUnreachable) {
        dist[static_cast<std::size_t>(w)] = dist[static_cast<std::size_t>(v)] + 1;
        queue.push_back(w);
      }
    }
  }
  return dist;
}

inline bool is_connected(const Graph& g) {
  if (g.order() == 0) return true;
  const auto dist = bfs_distances(g, 0);
  return std::none_of(dist.begin(), dist.end(), [](int d) { return d == kUnreachable; });
}

// min over u of max over v of dist(u, v); BFS from every vertex.
inline int radius(const Graph& g) {
  if (g.order() == 0) throw InputError("radius of the empty graph is undefined");
  int best = std::numeric_limits<int>::max();
  for (Vertex u = 0; u < g.n(); ++u) {
    const auto dist = bfs_distances(g, u);
    int ecc = 0;
    for (int d : dist) {
      if (d == kUnreachable) throw InputError("radius: graph is disconnected");
      ecc = std::max(ecc, d);
    }
    best = std::min(best, ecc);
  }
  return best;
}

// Length of a shortest cycle, or nullopt for forests.
inline std::optional<int> girth(const Graph& g) {
  int best = std::numeric_limits<int>::max();
  for (Vertex s = 0; s < g.n(); ++s) {
    std::vector<int> dist(g.order(), kUnreachable);
    std::vector<Vertex> parent(g.order(), -1);
    std::vector<Vertex> queue{s};
    dist[static_cast<std::size_t>(s)] = 0;
    for (std::size_t head = 0; head < queue.size(); ++head) {
      const Vertex v = queue[head];
      for (Vertex w : g.neighbors(v)) {
        if (dist[static_cast<std::size_t>(w)] == kUnreachable) {
          dist[static_cast<std::size_t>(w)] = dist[static_cast<std::size_t>(v)] + 1;
          parent[static_cast<std::size_t>(w)] = v;
          queue.push_back(w);
        } else if (parent[static_cast<std::size_t>(v)] != w) {
          best = std::min(best, dist[static_cast<std::size_t>(v)] + dist[static_cast<std::size_t>(w)] + 1);
        }
      }
    }
  }
  if (best == std::numeric_limits<int>::max()) return std::nullopt;
  return best;
}

}  // namespace treeuniv
