#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <optional>
#include <queue>
#include <vector>

#include "treeuniv/error.hpp"
#include "treeuniv/graph.hpp"

namespace treeuniv {

// Dinic's algorithm on an integral network.
class MaxFlow {
 public:
  explicit MaxFlow(std::size_t nodes) : head_(nodes, -1), level_(nodes), iter_(nodes) {}

  int add_edge(int from, int to, std::int64_t cap) {
    const int id = static_cast<int>(to_.size());
    push(from, to, cap);
    push(to, from, 0);
    return id;
  }

  std::int64_t run(int s, int t) {
    std::int64_t total = 0;
    while (bfs(s, t)) {
      std::copy(head_.begin(), head_.end(), iter_.begin());
      while (const std::int64_t f = dfs(s, t, std::numeric_limits<std::int64_t>::max())) total += f;
    }
    return total;
  }

  std::int64_t flow_on(int edge) const { return cap_[static_cast<std::size_t>(edge ^ 1)]; }

  // Nodes reachable from s in the residual network (source side of a min cut).
  std::vector<char> source_side(int s) const {
    std::vector<char> seen(head_.size(), 0);
    std::vector<int> stack{s};
    seen[static_cast<std::size_t>(s)] = 1;
    while (!stack.empty()) {
      const int v = stack.back();
      stack.pop_back();
      for (int e = head_[static_cast<std::size_t>(v)]; e != -1; e = next_[static_cast<std::size_t>(e)]) {
        const int w = to_[static_cast<std::size_t>(e)];
        if (cap_[static_cast<std::size_t>(e)] > 0 && !seen[static_cast<std::size_t>(w)]) {
          seen[static_cast<std::size_t>(w)] = 1;
          stack.push_back(w);
        }
      }
    }
    return seen;
  }

 private:
  void push(int from, int to, std::int64_t cap) {
    to_.push_back(to);
    cap_.push_back(cap);
    next_.push_back(head_[static_cast<std::size_t>(from)]);
    head_[static_cast<std::size_t>(from)] = static_cast<int>(to_.size()) - 1;
  }

  bool bfs(int s, int t) {
    std::fill(level_.begin(), level_.end(), -1);
    std::queue<int> q;
    level_[static_cast<std::size_t>(s)] = 0;
    q.push(s);
    while (!q.empty()) {
      const int v = q.front();
      q.pop();
      for (int e = head_[static_cast<std::size_t>(v)]; e != -1; e = next_[static_cast<std::size_t>(e)]) {
        const int w = to_[static_cast<std::size_t>(e)];
        if (cap_[static_cast<std::size_t>(e)] > 0 && level_[static_cast<std::size_t>(w)] < 0) {
          level_[static_cast<std::size_t>(w)] = level_[static_cast<std::size_t>(v)] + 1;
          q.push(w);
        }
      }
    }
    return level_[static_cast<std::size_t>(t)] >= 0;
  }

  std::int64_t dfs(int v, int t, std::int64_t limit) {
    if (v == t) return limit;
    for (int& e = iter_[static_cast<std::size_t>(v)]; e != -1; e = next_[static_cast<std::size_t>(e)]) {
      const int w = to_[static_cast<std::size_t>(e)];
      if (cap_[static_cast<std::size_t>(e)] <= 0 || level_[static_cast<std::size_t>(w)] != level_[static_cast<std::size_t>(v)] + 1) {
        continue;
      }
      const std::int64_t got = dfs(w, t, std::min(limit, cap_[static_cast<std::size_t>(e)]));
      if (got > 0) {
        cap_[static_cast<std::size_t>(e)] -= got;
        cap_[static_cast<std::size_t>(e ^ 1)] += got;
        return got;
      }
    }
    return 0;
  }

  std::vector<int> head_;
  std::vector<int> to_;
  std::vector<int> next_;
  std::vector<std::int64_t> cap_;
  std::vector<int> level_;
  std::vector<int> iter_;
};

// Centers U, targets W and a demand k(u) for every center (aligned with
// centers.members()). Sum of demands must equal |W|.
struct StarDemand {
  VertexSet centers;
  VertexSet targets;
  std::vector<std::size_t> demand;
};

struct StarMatching {
  bool feasible = false;
  std::vector<VertexSet> parts;           // W_u, aligned with centers
  std::optional<VertexSet> hall_violator;  // X with |N(X) ∩ W| < sum of k over X
};

inline void validate_demand(const Graph& g, const StarDemand& dem) {
  g.check_set(dem.centers);
  g.check_set(dem.targets);
  if (dem.demand.size() != dem.centers.size()) throw InputError("star matching: one demand per center required");
  if (!dem.centers.disjoint_from(dem.targets)) throw InputError("star matching: centers and targets must be disjoint");
  std::size_t total = 0;
  for (auto k : dem.demand) total += k;
  if (total != dem.targets.size()) {
    throw InputError("star matching: demands sum to " + std::to_string(total) + " but |W| = " +
                     std::to_string(dem.targets.size()));
  }
}

// Partitions W into sets W_u ⊆ N(u) ∩ W with |W_u| = k(u), via max-flow
// source -> u (k(u)) -> w (unbounded) -> sink (1). When no such partition
// exists the source side of a minimum cut yields a Hall violator.
inline StarMatching star_matching(const Graph& g, const StarDemand& dem) {
  validate_demand(g, dem);
  const std::size_t nu = dem.centers.size();
  const std::size_t nw = dem.targets.size();
  const int source = 0;
  const int sink = static_cast<int>(nu + nw + 1);
  MaxFlow net(nu + nw + 2);
  std::vector<int> target_index(g.order(), -1);
  for (std::size_t j = 0; j < nw; ++j) target_index[static_cast<std::size_t>(dem.targets[j])] = static_cast<int>(j);
  const auto unbounded = static_cast<std::int64_t>(nw + 1);
  std::vector<std::vector<std::pair<int, Vertex>>> arcs(nu);
  for (std::size_t i = 0; i < nu; ++i) {
    net.add_edge(source, static_cast<int>(1 + i), static_cast<std::int64_t>(dem.demand[i]));
    for (Vertex w : g.neighbors(dem.centers[i])) {
      const int j = target_index[static_cast<std::size_t>(w)];
      if (j >= 0) arcs[i].emplace_back(net.add_edge(static_cast<int>(1 + i), static_cast<int>(1 + nu + static_cast<std::size_t>(j)), unbounded), w);
    }
  }
  for (std::size_t j = 0; j < nw; ++j) net.add_edge(static_cast<int>(1 + nu + j), sink, 1);

  StarMatching out;
  const auto flow = net.run(source, sink);
  if (flow == static_cast<std::int64_t>(nw)) {
    out.feasible = true;
    for (std::size_t i = 0; i < nu; ++i) {
      std::vector<Vertex> part;
      for (const auto& [edge, w] : arcs[i]) {
        if (net.flow_on(edge) > 0) part.push_back(w);
      }
      out.parts.emplace_back(std::move(part));
    }
    return out;
  }
  const auto side = net.source_side(source);
  std::vector<Vertex> x;
  for (std::size_t i = 0; i < nu; ++i) {
    if (side[1 + i]) x.push_back(dem.centers[i]);
  }
  out.hall_violator = VertexSet(std::move(x));
  return out;
}

// Re-checks a star matching against the demand from scratch.
inline bool star_matching_is_valid(const Graph& g, const StarDemand& dem, const std::vector<VertexSet>& parts) {
  if (parts.size() != dem.centers.size()) return false;
  std::vector<char> used(g.order(), 0);
  std::size_t covered = 0;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (parts[i].size() != dem.demand[i]) return false;
    for (Vertex w : parts[i]) {
      if (!dem.targets.contains(w) || !g.has_edge(dem.centers[i], w) || used[static_cast<std::size_t>(w)]) return false;
      used[static_cast<std::size_t>(w)] = 1;
      ++covered;
    }
  }
  return covered == dem.targets.size();
}

}  // namespace treeuniv
