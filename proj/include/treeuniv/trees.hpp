#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "treeuniv/error.hpp"
#include "treeuniv/graph.hpp"
#include "treeuniv/real_param.hpp"
#include "treeuniv/rng.hpp"

namespace treeuniv {

class Tree {
 public:
  Tree() : graph_(Graph::from_edges(1, std::vector<Edge>{})) {}

  static Tree from_edges(std::size_t n, const std::vector<Edge>& edges) {
    if (n < 1) throw InputError("a tree needs at least one vertex");
    if (edges.size() + 1 != n) throw InputError("a tree on n vertices has n-1 edges");
    Tree t;
    t.graph_ = Graph::from_edges(n, edges);
    if (!is_connected(t.graph_)) throw InputError("edge list is not connected");
    return t;
  }

  static Tree from_graph(const Graph& g) { return from_edges(g.order(), g.edges()); }

  const Graph& graph() const noexcept { return graph_; }
  std::size_t order() const noexcept { return graph_.order(); }
  Vertex n() const noexcept { return graph_.n(); }
  std::size_t degree(Vertex v) const { return graph_.degree(v); }
  std::size_t max_degree() const { return graph_.max_degree(); }
  const std::vector<Vertex>& neighbors(Vertex v) const { return graph_.neighbors(v); }
  std::vector<Edge> edges() const { return graph_.edges(); }

  friend bool operator==(const Tree& a, const Tree& b) { return a.graph_ == b.graph_; }

 private:
  Graph graph_;
};

// Decodes a Prüfer sequence into the labeled tree on seq.size() + 2 vertices.
inline Tree tree_from_pruefer(const std::vector<Vertex>& seq) {
  const std::size_t n = seq.size() + 2;
  std::vector<std::size_t> degree(n, 1);
  for (Vertex s : seq) {
    if (s < 0 || static_cast<std::size_t>(s) >= n) {
      throw InputError("Pruefer entry " + std::to_string(s) + " outside [0," + std::to_string(n) + ")");
    }
    ++degree[static_cast<std::size_t>(s)];
  }
  std::vector<Edge> edges;
  edges.reserve(n - 1);
  // Linear-time decoding with a moving pointer to the smallest leaf.
  std::size_t ptr = 0;
  while (degree[ptr] != 1) ++ptr;
  std::size_t leaf = ptr;
  for (Vertex s : seq) {
    const auto v = static_cast<std::size_t>(s);
    edges.emplace_back(static_cast<Vertex>(std::min(leaf, v)), static_cast<Vertex>(std::max(leaf, v)));
    if (--degree[v] == 1 && v < ptr) {
      leaf = v;
    } else {
      ++ptr;
      while (degree[ptr] != 1) ++ptr;
      leaf = ptr;
    }
  }
  edges.emplace_back(static_cast<Vertex>(leaf), static_cast<Vertex>(n - 1));
  return Tree::from_edges(n, edges);
}

inline std::vector<Vertex> pruefer_from_tree(const Tree& t) {
  const std::size_t n = t.order();
  if (n < 2) throw InputError("Pruefer sequences need at least two vertices");
  std::vector<std::size_t> degree(n);
  for (Vertex v = 0; v < t.n(); ++v) degree[static_cast<std::size_t>(v)] = t.degree(v);
  std::vector<char> removed(n, 0);
  std::vector<Vertex> seq;
  seq.reserve(n - 2);
  std::size_t ptr = 0;
  while (degree[ptr] != 1) ++ptr;
  std::size_t leaf = ptr;
  for (std::size_t step = 0; step + 2 < n; ++step) {
    removed[leaf] = 1;
    Vertex next = -1;
    for (Vertex w : t.neighbors(static_cast<Vertex>(leaf))) {
      if (!removed[static_cast<std::size_t>(w)]) next = w;
    }
    seq.push_back(next);
    const auto v = static_cast<std::size_t>(next);
    if (--degree[v] == 1 && v < ptr) {
      leaf = v;
    } else {
      ++ptr;
      while (ptr < n && (degree[ptr] != 1 || removed[ptr])) ++ptr;
      leaf = ptr;
    }
  }
  return seq;
}

struct TreeSample {
  Tree tree;
  bool uniform = true;        // false when the fallback construction was used
  std::size_t attempts = 0;   // Prüfer sequences drawn
};

inline constexpr std::size_t kTreeRejectionBudget = 20000;

// Uniform over T(n, Delta) by rejection on uniform Prüfer sequences (a label
// occurring c times has degree c + 1). Past the budget, a random-attachment
// tree respecting the degree bound is returned with uniform = false.
inline TreeSample random_bounded_degree_tree_detailed(std::size_t n, const RealParam& delta, std::uint64_t seed,
                                                      std::size_t budget = kTreeRejectionBudget) {
  if (n < 1) throw InputError("tree needs at least one vertex");
  if (n == 1) return {Tree(), true, 0};
  const auto cap = static_cast<std::int64_t>(std::floor(delta.value() + RealParam::kTolerance));
  if (n == 2) {
    if (cap < 1) throw InputError("Delta must be at least 1 for n = 2");
    return {Tree::from_edges(2, {{0, 1}}), true, 0};
  }
  if (cap < 2) throw InputError("Delta must be at least 2 for n >= 3");
  const Rng base(seed);
  Rng rng = base.split(0);
  std::vector<Vertex> seq(n - 2);
  std::vector<std::int64_t> count(n);
  TreeSample out;
  for (std::size_t attempt = 1; attempt <= budget; ++attempt) {
    std::fill(count.begin(), count.end(), 0);
    bool ok = true;
    for (auto& s : seq) {
      s = static_cast<Vertex>(rng.below(n));
      if (++count[static_cast<std::size_t>(s)] > cap - 1) {
        ok = false;
        break;
      }
    }
    out.attempts = attempt;
    if (ok) {
      out.tree = tree_from_pruefer(seq);
      return out;
    }
  }
  Rng fb = base.split(1);
  std::vector<Vertex> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = static_cast<Vertex>(i);
  fb.shuffle(order);
  std::vector<std::int64_t> deg(n, 0);
  std::vector<Vertex> open{order[0]};
  std::vector<Edge> edges;
  for (std::size_t i = 1; i < n; ++i) {
    const std::size_t pick = fb.below(open.size());
    const Vertex parent = open[pick];
    const Vertex child = order[i];
    edges.emplace_back(std::min(parent, child), std::max(parent, child));
    if (++deg[static_cast<std::size_t>(parent)] >= cap) {
      open[pick] = open.back();
      open.pop_back();
    }
    ++deg[static_cast<std::size_t>(child)];
    if (deg[static_cast<std::size_t>(child)] < cap) open.push_back(child);
  }
  out.tree = Tree::from_edges(n, edges);
  out.uniform = false;
  return out;
}

inline Tree random_bounded_degree_tree(std::size_t n, const RealParam& delta, std::uint64_t seed) {
  return random_bounded_degree_tree_detailed(n, delta, seed).tree;
}

// Rooted b-ary tree, levels filled left to right, BFS labels: parent(i) = (i-1)/b.
inline Tree complete_ary_tree(std::size_t n, std::size_t b) {
  if (b < 1) throw InputError("branching must be at least 1");
  if (n < 1) throw InputError("tree needs at least one vertex");
  std::vector<Edge> edges;
  for (std::size_t i = 1; i < n; ++i) edges.emplace_back(static_cast<Vertex>((i - 1) / b), static_cast<Vertex>(i));
  return Tree::from_edges(n, edges);
}

inline Tree path_tree(std::size_t n) {
  std::vector<Edge> edges;
  for (std::size_t i = 1; i < n; ++i) edges.emplace_back(static_cast<Vertex>(i - 1), static_cast<Vertex>(i));
  return Tree::from_edges(n, edges);
}

inline Tree star_tree(std::size_t n) {
  std::vector<Edge> edges;
  for (std::size_t i = 1; i < n; ++i) edges.emplace_back(0, static_cast<Vertex>(i));
  return Tree::from_edges(n, edges);
}

inline int radius(const Tree& t) { return radius(t.graph()); }

struct TreeDecomposition {
  VertexSet leaves;                  // L
  VertexSet leaf_neighbors;          // K = N_T(L)
  VertexSet second_level_leaves;     // M': degree-1 vertices of T - L
  VertexSet branching;               // degree >= 3
  std::vector<std::vector<Vertex>> bare_paths;               // maximal, first level
  std::vector<Vertex> longest_bare_path;
  std::vector<std::vector<Vertex>> second_level_bare_paths;  // maximal, in T - L
  std::vector<Vertex> longest_second_level_bare_path;
};

namespace detail {

// Maximal paths through vertices whose degree (restricted to `alive`) is 2.
// Each path is oriented so that its vertex sequence is lexicographically smaller.
inline std::vector<std::vector<Vertex>> degree_two_chains(const Graph& g, const std::vector<char>& alive) {
  const std::size_t n = g.order();
  std::vector<std::size_t> deg(n, 0);
  for (Vertex v = 0; v < g.n(); ++v) {
    if (!alive[static_cast<std::size_t>(v)]) continue;
    for (Vertex w : g.neighbors(v)) deg[static_cast<std::size_t>(v)] += alive[static_cast<std::size_t>(w)] ? 1 : 0;
  }
  auto inner = [&](Vertex v) { return alive[static_cast<std::size_t>(v)] && deg[static_cast<std::size_t>(v)] == 2; };
  std::vector<char> seen(n, 0);
  std::vector<std::vector<Vertex>> chains;
  for (Vertex v = 0; v < g.n(); ++v) {
    if (!inner(v) || seen[static_cast<std::size_t>(v)]) continue;
    // Walk to one end of the chain, then collect forward.
    Vertex prev = -1;
    Vertex cur = v;
    for (;;) {
      Vertex step = -1;
      for (Vertex w : g.neighbors(cur)) {
        if (w != prev && inner(w)) step = w;
      }
      if (step == -1 || step == v) break;
      prev = cur;
      cur = step;
    }
    std::vector<Vertex> chain;
    prev = -1;
    for (;;) {
      chain.push_back(cur);
      seen[static_cast<std::size_t>(cur)] = 1;
      Vertex step = -1;
      for (Vertex w : g.neighbors(cur)) {
        if (w != prev && inner(w) && !seen[static_cast<std::size_t>(w)]) step = w;
      }
      if (step == -1) break;
      prev = cur;
      cur = step;
    }
    std::vector<Vertex> rev(chain.rbegin(), chain.rend());
    chains.push_back(std::min(chain, rev));
  }
  std::sort(chains.begin(), chains.end());
  return chains;
}

inline std::vector<Vertex> longest_of(const std::vector<std::vector<Vertex>>& chains) {
  std::vector<Vertex> best;
  for (const auto& c : chains) {
    if (c.size() > best.size() || (c.size() == best.size() && !best.empty() && c < best)) best = c;
  }
  return best;
}

}  // namespace detail

inline TreeDecomposition decompose(const Tree& t) {
  if (t.order() < 2) throw InputError("decompose needs at least two vertices");
  const Graph& g = t.graph();
  const std::size_t n = t.order();
  TreeDecomposition dec;
  std::vector<Vertex> leaves;
  std::vector<Vertex> branching;
  std::vector<char> not_leaf(n, 1);
  for (Vertex v = 0; v < t.n(); ++v) {
    if (t.degree(v) == 1) {
      leaves.push_back(v);
      not_leaf[static_cast<std::size_t>(v)] = 0;
    } else if (t.degree(v) >= 3) {
      branching.push_back(v);
    }
  }
  dec.leaves = VertexSet(leaves);
  dec.branching = VertexSet(branching);
  std::vector<Vertex> k;
  for (Vertex v : leaves) k.push_back(t.neighbors(v).front());
  dec.leaf_neighbors = VertexSet(k);

  std::vector<Vertex> second;
  for (Vertex v = 0; v < t.n(); ++v) {
    if (!not_leaf[static_cast<std::size_t>(v)]) continue;
    std::size_t inner_deg = 0;
    for (Vertex w : t.neighbors(v)) inner_deg += not_leaf[static_cast<std::size_t>(w)] ? 1 : 0;
    if (inner_deg == 1) second.push_back(v);
  }
  dec.second_level_leaves = VertexSet(second);

  const std::vector<char> everyone(n, 1);
  dec.bare_paths = detail::degree_two_chains(g, everyone);
  dec.longest_bare_path = detail::longest_of(dec.bare_paths);
  dec.second_level_bare_paths = detail::degree_two_chains(g, not_leaf);
  dec.longest_second_level_bare_path = detail::longest_of(dec.second_level_bare_paths);
  return dec;
}

struct PathOrLeaves {
  std::size_t path_vertices = 0;
  std::size_t leaves = 0;
  bool holds = false;
};

// 2(|V(P)| + 1)(|L| - 1) >= |V(T)| for a longest bare path P and leaf set L.
inline PathOrLeaves verify_path_or_leaves(const Tree& t) {
  const auto dec = decompose(t);
  PathOrLeaves r;
  r.path_vertices = dec.longest_bare_path.size();
  r.leaves = dec.leaves.size();
  r.holds = 2 * (r.path_vertices + 1) * (r.leaves - 1) >= t.order();
  return r;
}

enum class TreeCase { Case1, Case2, Case3 };

inline std::string to_string(TreeCase c) {
  switch (c) {
    case TreeCase::Case1: return "Case1";
    case TreeCase::Case2: return "Case2";
    case TreeCase::Case3: return "Case3";
  }
  return "Case1";
}

struct CaseThresholds {
  std::size_t path = 0;    // tau_path
  std::size_t leaves = 0;  // tau_leaves
};

// ceil(50 Delta m) and ceil(25 Delta m^2)
inline CaseThresholds default_thresholds(const RealParam& delta, std::size_t m) {
  const auto mm = static_cast<std::int64_t>(m);
  return {static_cast<std::size_t>(delta.ceil_times(50 * mm)), static_cast<std::size_t>(delta.ceil_times(25 * mm * mm))};
}

class NoCaseError : public std::runtime_error {
 public:
  NoCaseError(std::size_t path, std::size_t second_path, std::size_t leaves, std::size_t second_leaves,
              const CaseThresholds& th)
      : std::runtime_error("no case applies: longest bare path " + std::to_string(path) + ", second-level path " +
                           std::to_string(second_path) + ", leaves " + std::to_string(leaves) +
                           ", second-level leaves " + std::to_string(second_leaves) + " (tau_path " +
                           std::to_string(th.path) + ", tau_leaves " + std::to_string(th.leaves) + ")"),
        longest_path(path),
        longest_second_path(second_path),
        leaf_count(leaves),
        second_leaf_count(second_leaves) {}

  std::size_t longest_path;
  std::size_t longest_second_path;
  std::size_t leaf_count;
  std::size_t second_leaf_count;
};

inline TreeCase classify_case(const TreeDecomposition& dec, const CaseThresholds& th) {
  if (dec.longest_bare_path.size() >= th.path) return TreeCase::Case1;
  if (dec.leaves.size() >= th.leaves && dec.longest_second_level_bare_path.size() >= th.path) return TreeCase::Case2;
  if (dec.leaves.size() >= th.leaves && dec.second_level_leaves.size() >= th.leaves) return TreeCase::Case3;
  throw NoCaseError(dec.longest_bare_path.size(), dec.longest_second_level_bare_path.size(), dec.leaves.size(),
                    dec.second_level_leaves.size(), th);
}

inline TreeCase classify_case(const Tree& t, const RealParam& delta, std::size_t m,
                              std::optional<std::size_t> tau_path = std::nullopt,
                              std::optional<std::size_t> tau_leaves = std::nullopt) {
  auto th = default_thresholds(delta, m);
  if (tau_path) th.path = *tau_path;
  if (tau_leaves) th.leaves = *tau_leaves;
  return classify_case(decompose(t), th);
}

// Parent-array form "n p_1 ... p_{n-1}" rooted at vertex 0.
inline std::string write_tree_parents(const Tree& t) {
  std::vector<Vertex> parent(t.order(), -1);
  std::vector<Vertex> queue{0};
  std::vector<char> seen(t.order(), 0);
  seen[0] = 1;
  for (std::size_t head = 0; head < queue.size(); ++head) {
    for (Vertex w : t.neighbors(queue[head])) {
      if (!seen[static_cast<std::size_t>(w)]) {
        seen[static_cast<std::size_t>(w)] = 1;
        parent[static_cast<std::size_t>(w)] = queue[head];
        queue.push_back(w);
      }
    }
  }
  std::ostringstream os;
  os << t.order();
  for (std::size_t i = 1; i < t.order(); ++i) os << ' ' << parent[i];
  os << '\n';
  return os.str();
}

// Prüfer form "n : s_1 ... s_{n-2}".
inline std::string write_tree_pruefer(const Tree& t) {
  std::ostringstream os;
  os << t.order() << " :";
  if (t.order() >= 2) {
    for (Vertex s : pruefer_from_tree(t)) os << ' ' << s;
  }
  os << '\n';
  return os.str();
}

inline Tree parse_tree(const std::string& text) {
  std::string body;
  std::istringstream lines(text);
  std::string line;
  while (std::getline(lines, line)) {
    const auto pos = line.find_first_not_of(" \t\r");
    if (pos == std::string::npos || line[pos] == '#') continue;
    body += line + ' ';
  }
  const bool pruefer = body.find(':') != std::string::npos;
  if (pruefer) body[body.find(':')] = ' ';
  std::istringstream in(body);
  long long n = 0;
  if (!(in >> n) || n < 1) throw InputError("tree file must start with a positive vertex count");
  std::vector<long long> values;
  long long x = 0;
  while (in >> x) values.push_back(x);
  if (!in.eof()) throw InputError("tree file contains a non-integer token");
  if (pruefer) {
    if (n == 1 && values.empty()) return Tree();
    if (static_cast<long long>(values.size()) != n - 2) throw InputError("Pruefer form needs n-2 entries");
    return tree_from_pruefer(std::vector<Vertex>(values.begin(), values.end()));
  }
  if (static_cast<long long>(values.size()) != n - 1) throw InputError("parent-array form needs n-1 entries");
  std::vector<Edge> edges;
  for (long long i = 1; i < n; ++i) {
    const long long p = values[static_cast<std::size_t>(i - 1)];
    if (p < 0 || p >= n || p == i) throw InputError("parent entry out of range");
    edges.emplace_back(static_cast<Vertex>(std::min(p, i)), static_cast<Vertex>(std::max(p, i)));
  }
  return Tree::from_edges(static_cast<std::size_t>(n), edges);
}

// Calls fn(tree) for every labeled tree on n vertices, in Prüfer order.
template <typename Fn>
void for_each_labeled_tree(std::size_t n, Fn&& fn) {
  if (n < 2) {
    fn(Tree());
    return;
  }
  std::vector<Vertex> seq(n - 2, 0);
  for (;;) {
    fn(tree_from_pruefer(seq));
    std::size_t i = seq.size();
    while (i > 0 && seq[i - 1] == static_cast<Vertex>(n - 1)) seq[--i] = 0;
    if (i == 0) return;
    ++seq[i - 1];
  }
}

}  // namespace treeuniv
