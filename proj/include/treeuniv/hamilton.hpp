#pragma once

#include <algorithm>
#include <cstdint>
#include <vector>

#include "treeuniv/error.hpp"
#include "treeuniv/graph.hpp"
#include "treeuniv/rng.hpp"

namespace treeuniv {

struct EmbedBudget {
  std::size_t max_backtracks = 200000;
  std::size_t max_restarts = 20;
  std::uint64_t seed = 0;
};

struct HamiltonResult {
  bool found = false;
  bool conclusive = false;  // true when the search was exhaustive
  std::vector<Vertex> path;
  std::size_t rotations = 0;
  std::size_t restarts = 0;
};

inline constexpr std::size_t kHamiltonExactLimit = 10;

inline bool is_hamilton_path(const Graph& g, const std::vector<Vertex>& path, Vertex s, Vertex t) {
  if (path.size() != g.order() || path.empty() || path.front() != s || path.back() != t) return false;
  std::vector<char> seen(g.order(), 0);
  for (std::size_t i = 0; i < path.size(); ++i) {
    if (!g.valid_vertex(path[i]) || seen[static_cast<std::size_t>(path[i])]) return false;
    seen[static_cast<std::size_t>(path[i])] = 1;
    if (i > 0 && !g.has_edge(path[i - 1], path[i])) return false;
  }
  return true;
}

namespace detail {

// Bitmask DP over (visited set, end vertex); exhaustive for tiny graphs.
inline HamiltonResult hamilton_exact(const Graph& g, Vertex s, Vertex t) {
  const std::size_t n = g.order();
  const std::size_t full = (std::size_t{1} << n) - 1;
  std::vector<std::uint32_t> adj(n, 0);
  for (Vertex v = 0; v < g.n(); ++v) {
    for (Vertex w : g.neighbors(v)) adj[static_cast<std::size_t>(v)] |= 1U << w;
  }
  // reach[mask] = bitset of end vertices of s-started paths covering mask.
  std::vector<std::uint32_t> reach(full + 1, 0);
  reach[std::size_t{1} << s] = 1U << s;
  for (std::size_t mask = 1; mask <= full; ++mask) {
    const std::uint32_t ends = reach[mask];
    if (ends == 0) continue;
    for (std::size_t v = 0; v < n; ++v) {
      if (!(ends >> v & 1U)) continue;
      std::uint32_t nxt = adj[v] & ~static_cast<std::uint32_t>(mask);
      while (nxt != 0) {
        const int w = __builtin_ctz(nxt);
        nxt &= nxt - 1;
        reach[mask | (std::size_t{1} << w)] |= 1U << w;
      }
    }
  }
  HamiltonResult r;
  r.conclusive = true;
  if (!(reach[full] >> t & 1U)) return r;
  std::vector<Vertex> rev{t};
  std::size_t mask = full;
  Vertex cur = t;
  while (cur != s) {
    const std::size_t prev_mask = mask & ~(std::size_t{1} << cur);
    Vertex pick = -1;
    for (Vertex w : g.neighbors(cur)) {
      if ((prev_mask >> w & 1U) && (reach[prev_mask] >> w & 1U)) {
        pick = w;
        break;
      }
    }
    mask = prev_mask;
    cur = pick;
    rev.push_back(cur);
  }
  r.found = true;
  r.path.assign(rev.rbegin(), rev.rend());
  return r;
}

// Rotation-extension search for a Hamilton path from t through V - s whose
// free end is adjacent to s. The t end stays pinned; rotations use a
// neighbor of the free end on the path. Restarts after 2n rotations
// without a new endpoint.
inline HamiltonResult hamilton_rotation(const Graph& g, Vertex s, Vertex t, const EmbedBudget& budget) {
  const std::size_t n = g.order();
  HamiltonResult result;
  const Rng base(budget.seed);
  std::vector<Vertex> path;
  std::vector<int> pos(n);
  std::vector<char> endpoint_seen(n);
  std::vector<std::size_t> unvisited_deg(n);
  const std::size_t target = n - 1;  // every vertex except s
  std::size_t total_rotations = 0;

  for (std::size_t restart = 0; restart <= budget.max_restarts; ++restart) {
    result.restarts = restart;
    Rng rng = base.split(restart);
    path.assign(1, t);
    std::fill(pos.begin(), pos.end(), -1);
    pos[static_cast<std::size_t>(t)] = 0;
    for (Vertex v = 0; v < g.n(); ++v) {
      std::size_t c = 0;
      for (Vertex w : g.neighbors(v)) c += (w != s && w != t) ? 1 : 0;
      unvisited_deg[static_cast<std::size_t>(v)] = c;
    }
    auto visit = [&](Vertex v) {
      pos[static_cast<std::size_t>(v)] = static_cast<int>(path.size());
      path.push_back(v);
      for (Vertex w : g.neighbors(v)) --unvisited_deg[static_cast<std::size_t>(w)];
    };
    std::fill(endpoint_seen.begin(), endpoint_seen.end(), 0);
    std::size_t stale = 0;
    std::vector<Vertex> options;
    while (total_rotations < budget.max_backtracks) {
      const Vertex end = path.back();
      // Extension: prefer the unvisited neighbor with fewest onward options.
      options.clear();
      std::size_t best = SIZE_MAX;
      for (Vertex w : g.neighbors(end)) {
        if (w == s || pos[static_cast<std::size_t>(w)] >= 0) continue;
        const std::size_t c = unvisited_deg[static_cast<std::size_t>(w)];
        if (c < best) {
          best = c;
          options.clear();
        }
        if (c == best) options.push_back(w);
      }
      if (!options.empty()) {
        visit(options[rng.below(options.size())]);
        std::fill(endpoint_seen.begin(), endpoint_seen.end(), 0);
        stale = 0;
        continue;
      }
      if (path.size() == target && g.has_edge(end, s)) {
        path.push_back(s);
        result.found = true;
        result.path.assign(path.rbegin(), path.rend());
        result.rotations = total_rotations;
        return result;
      }
      // Rotation around a random path neighbor y of the free end.
      options.clear();
      for (Vertex y : g.neighbors(end)) {
        const int py = pos[static_cast<std::size_t>(y)];
        if (y != s && py >= 0 && py + 2 < static_cast<int>(path.size())) options.push_back(y);
      }
      if (options.empty()) break;
      const Vertex y = options[rng.below(options.size())];
      const auto from = static_cast<std::size_t>(pos[static_cast<std::size_t>(y)] + 1);
      std::reverse(path.begin() + static_cast<std::ptrdiff_t>(from), path.end());
      for (std::size_t i = from; i < path.size(); ++i) pos[static_cast<std::size_t>(path[i])] = static_cast<int>(i);
      ++total_rotations;
      const Vertex fresh = path.back();
      if (!endpoint_seen[static_cast<std::size_t>(fresh)]) {
        endpoint_seen[static_cast<std::size_t>(fresh)] = 1;
        stale = 0;
      } else if (++stale > 2 * n) {
        break;
      }
    }
    if (total_rotations >= budget.max_backtracks) break;
  }
  result.rotations = total_rotations;
  return result;
}

}  // namespace detail

// Hamilton path from s to t. Exhaustive (and conclusive) for n <= 10,
// otherwise a heuristic whose failure only means the search gave up.
inline HamiltonResult hamilton_path(const Graph& g, Vertex s, Vertex t, const EmbedBudget& budget = {}) {
  g.check_vertex(s);
  g.check_vertex(t);
  if (s == t) throw InputError("hamilton_path: endpoints must differ");
  if (g.order() <= kHamiltonExactLimit) return detail::hamilton_exact(g, s, t);
  if (!is_connected(g)) {
    HamiltonResult r;
    r.conclusive = true;
    return r;
  }
  return detail::hamilton_rotation(g, s, t, budget);
}

// Hamilton path of G[allowed] between s and t, in host labels.
inline HamiltonResult hamilton_path_within(const Graph& g, const VertexSet& allowed, Vertex s, Vertex t,
                                           const EmbedBudget& budget = {}) {
  if (!allowed.contains(s) || !allowed.contains(t)) throw InputError("hamilton_path_within: endpoints must be allowed");
  const auto sub = induced_subgraph(g, allowed);
  auto local = [&](Vertex v) {
    return static_cast<Vertex>(std::lower_bound(sub.to_parent.begin(), sub.to_parent.end(), v) - sub.to_parent.begin());
  };
  auto r = hamilton_path(sub.graph, local(s), local(t), budget);
  for (auto& v : r.path) v = sub.to_parent[static_cast<std::size_t>(v)];
  return r;
}

}  // namespace treeuniv
