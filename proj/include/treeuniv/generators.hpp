#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "json.hpp"
#include "treeuniv/error.hpp"
#include "treeuniv/expansion.hpp"
#include "treeuniv/graph.hpp"
#include "treeuniv/graph_io.hpp"
#include "treeuniv/real_param.hpp"
#include "treeuniv/rng.hpp"

namespace treeuniv {

inline Graph complete_graph(std::size_t n) {
  if (n < 1) throw InputError("complete_graph: n must be at least 1");
  std::vector<Edge> edges;
  edges.reserve(n * (n - 1) / 2);
  for (Vertex u = 0; u < static_cast<Vertex>(n); ++u) {
    for (Vertex v = u + 1; v < static_cast<Vertex>(n); ++v) edges.emplace_back(u, v);
  }
  return Graph::from_edges(n, edges);
}

inline Graph empty_graph(std::size_t n) { return Graph::from_edges(n, std::vector<Edge>{}); }

inline Graph complement(const Graph& g) {
  std::vector<Edge> edges;
  for (Vertex u = 0; u < g.n(); ++u) {
    for (Vertex v = u + 1; v < g.n(); ++v) {
      if (!g.has_edge(u, v)) edges.emplace_back(u, v);
    }
  }
  return Graph::from_edges(g.order(), edges);
}

// Binomial random graph: every pair {u, v} is an edge independently with
// probability p, pairs visited in lexicographic order.
inline Graph gen_gnp(std::size_t n, double p, std::uint64_t seed) {
  if (!(p >= 0.0 && p <= 1.0)) throw InputError("gen_gnp: p must lie in [0, 1]");
  Rng rng(seed);
  std::vector<Edge> edges;
  for (Vertex u = 0; u < static_cast<Vertex>(n); ++u) {
    for (Vertex v = u + 1; v < static_cast<Vertex>(n); ++v) {
      if (rng.bernoulli(p)) edges.emplace_back(u, v);
    }
  }
  return Graph::from_edges(n, edges);
}

// Degree at or below which the pairing model is used with plain rejection.
inline constexpr std::size_t kRegularRejectBelow = 3;
inline constexpr std::size_t kRegularRestarts = 100;

namespace detail {

inline std::uint64_t pair_key(Vertex a, Vertex b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) | static_cast<std::uint32_t>(b);
}

inline std::vector<Edge> random_pairing(std::size_t n, std::size_t r, Rng& rng) {
  std::vector<Vertex> points;
  points.reserve(n * r);
  for (Vertex v = 0; v < static_cast<Vertex>(n); ++v) {
    for (std::size_t i = 0; i < r; ++i) points.push_back(v);
  }
  rng.shuffle(points);
  std::vector<Edge> pairs;
  pairs.reserve(points.size() / 2);
  for (std::size_t i = 0; i + 1 < points.size(); i += 2) pairs.emplace_back(points[i], points[i + 1]);
  return pairs;
}

inline bool pairing_is_simple(const std::vector<Edge>& pairs) {
  std::unordered_map<std::uint64_t, int> seen;
  for (const auto& [a, b] : pairs) {
    if (a == b || seen[pair_key(a, b)]++ > 0) return false;
  }
  return true;
}

// Removes loops and multi-edges from a pairing by switchings: a defective
// pair {a, b} and a random pair {c, e} become {a, c}, {b, e} (or {a, e},
// {b, c}) when both new pairs are loop-free and absent. Degrees are preserved.
inline bool repair_by_switching(std::vector<Edge>& pairs, Rng& rng, std::size_t budget) {
  std::unordered_map<std::uint64_t, int> mult;
  for (const auto& [a, b] : pairs) ++mult[pair_key(a, b)];
  auto defective = [&](std::size_t i) {
    const auto& [a, b] = pairs[i];
    return a == b || mult[pair_key(a, b)] > 1;
  };
  std::vector<std::size_t> bad;
  auto collect = [&] {
    bad.clear();
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      if (defective(i)) bad.push_back(i);
    }
  };
  collect();
  for (std::size_t step = 0; step < budget && !bad.empty(); ++step) {
    const std::size_t i = bad[rng.below(bad.size())];
    const std::size_t j = rng.below(pairs.size());
    if (i == j) continue;
    auto [a, b] = pairs[i];
    auto [c, e] = pairs[j];
    if (rng.bernoulli(0.5)) std::swap(c, e);
    if (a == c || b == e) continue;
    const auto k1 = pair_key(a, c);
    const auto k2 = pair_key(b, e);
    if (k1 == k2 || mult[k1] > 0 || mult[k2] > 0) continue;
    --mult[pair_key(a, b)];
    --mult[pair_key(pairs[j].first, pairs[j].second)];
    pairs[i] = {a, c};
    pairs[j] = {b, e};
    ++mult[k1];
    ++mult[k2];
    if (step % 8 == 7 || !defective(i)) collect();
  }
  collect();
  return bad.empty();
}

}  // namespace detail

// Random simple r-regular graph from the pairing model. For r <= 3 pairings
// with loops or multi-edges are rejected outright; above that they are
// repaired by switchings. Outputs are approximately (not exactly) uniform.
// Dense requests (2r > n - 1) are built as complements of the sparse side.
inline Graph gen_random_regular(std::size_t n, std::size_t r, std::uint64_t seed) {
  if (n == 0) throw InputError("gen_random_regular: n must be positive");
  if (r >= n) throw InputError("gen_random_regular: need r < n");
  if ((r * n) % 2 != 0) throw InputError("gen_random_regular: r*n must be even");
  if (r == 0) return empty_graph(n);
  if (r == n - 1) return complete_graph(n);
  if (2 * r > n - 1) return complement(gen_random_regular(n, n - 1 - r, Rng(seed).split(7).seed()));

  const Rng base(seed);
  if (r <= kRegularRejectBelow) {
    for (std::size_t attempt = 0; attempt < 100 * kRegularRestarts; ++attempt) {
      Rng rng = base.split(attempt);
      auto pairs = detail::random_pairing(n, r, rng);
      if (detail::pairing_is_simple(pairs)) return Graph::from_edges(n, pairs);
    }
    throw BudgetExhausted("gen_random_regular: rejection sampling exhausted");
  }
  for (std::size_t attempt = 0; attempt < kRegularRestarts; ++attempt) {
    Rng rng = base.split(attempt);
    auto pairs = detail::random_pairing(n, r, rng);
    if (detail::repair_by_switching(pairs, rng, 200 * n * r + 1000)) return Graph::from_edges(n, pairs);
  }
  throw BudgetExhausted("gen_random_regular: switching did not converge after 100 restarts");
}

namespace detail {

// Dense symmetric 0/1 matrix; enough for the k-subset scans below.
class AdjMatrix {
 public:
  explicit AdjMatrix(const Graph& g) : n_(g.order()), cells_(n_ * n_, 0) {
    for (const auto& [u, v] : g.edges()) set(u, v, true);
  }
  bool at(Vertex u, Vertex v) const { return cells_[idx(u, v)] != 0; }
  void set(Vertex u, Vertex v, bool on) {
    cells_[idx(u, v)] = on ? 1 : 0;
    cells_[idx(v, u)] = on ? 1 : 0;
  }
  Graph to_graph() const {
    std::vector<Edge> edges;
    for (Vertex u = 0; u < static_cast<Vertex>(n_); ++u) {
      for (Vertex v = u + 1; v < static_cast<Vertex>(n_); ++v) {
        if (at(u, v)) edges.emplace_back(u, v);
      }
    }
    return Graph::from_edges(n_, edges);
  }

 private:
  std::size_t idx(Vertex u, Vertex v) const { return static_cast<std::size_t>(u) * n_ + static_cast<std::size_t>(v); }
  std::size_t n_;
  std::vector<char> cells_;
};

// Depth-first scan over k-subsets (in the order given by `order`) that only
// descends while the prefix misses at most `slack` of its possible pairs.
// A k-set with >= C(k,2) - slack edges is handed to visit(set), which may
// mutate the matrix; it returns false to stop.
template <typename Visit>
bool dense_subset_scan(AdjMatrix& adj, const std::vector<Vertex>& order, std::size_t k, std::size_t slack,
                       Visit&& visit) {
  const std::size_t n = order.size();
  std::vector<Vertex> chosen;
  std::vector<std::size_t> edges_at{0};
  chosen.reserve(k);
  auto recount = [&] {
    edges_at.assign(1, 0);
    for (std::size_t i = 0; i < chosen.size(); ++i) {
      std::size_t add = 0;
      for (std::size_t j = 0; j < i; ++j) add += adj.at(chosen[i], chosen[j]) ? 1 : 0;
      edges_at.push_back(edges_at.back() + add);
    }
  };
  auto rec = [&](auto&& self, std::size_t start) -> bool {
    const std::size_t s = chosen.size();
    for (std::size_t pos = start; pos + (k - s) <= n; ++pos) {
      const Vertex v = order[pos];
      std::size_t add = 0;
      for (Vertex u : chosen) add += adj.at(u, v) ? 1 : 0;
      const std::size_t e = edges_at.back() + add;
      const std::size_t pairs = (s + 1) * s / 2;
      if (pairs - e > slack) continue;
      chosen.push_back(v);
      edges_at.push_back(e);
      bool keep_going = true;
      if (s + 1 == k) {
        keep_going = visit(chosen);
        recount();
      } else {
        keep_going = self(self, pos + 1);
      }
      chosen.pop_back();
      edges_at.pop_back();
      if (!keep_going) return false;
    }
    return true;
  };
  return rec(rec, 0);
}

}  // namespace detail

// True iff every induced k-vertex subgraph has at most l edges.
inline bool check_locally_sparse(const Graph& g, std::size_t k, std::size_t l, double guard = kDefaultExactGuard) {
  if (k < 2) throw InputError("check_locally_sparse: k must be at least 2");
  if (k > g.order()) return true;
  const std::size_t all_pairs = k * (k - 1) / 2;
  if (l >= all_pairs) return true;
  if (binomial(g.order(), k) > guard) {
    throw TooLargeError("C(" + std::to_string(g.order()) + "," + std::to_string(k) + ") subsets");
  }
  detail::AdjMatrix adj(g);
  std::vector<Vertex> order(g.order());
  std::iota(order.begin(), order.end(), 0);
  bool dense_found = false;
  detail::dense_subset_scan(adj, order, k, all_pairs - (l + 1), [&](const std::vector<Vertex>&) {
    dense_found = true;
    return false;
  });
  return !dense_found;
}

struct LocallySparseResult {
  Graph graph;
  std::size_t base_edges = 0;
  std::size_t family_size = 0;   // edge-disjoint k-vertex, l-edge subgraphs removed
  bool verified = false;
  bool verified_exactly = false;
};

// G(n, p) followed by removal of a maximal family of edge-disjoint subgraphs
// on k vertices with l edges each. k-subsets are scanned once, in an order
// fixed by a seed-drawn vertex permutation; whenever the current graph spans
// >= l edges on a k-set, its l lexicographically first edges join the family
// and are deleted. Deletions never add edges, so one pass is maximal and the
// result spans at most l - 1 edges on every k-set.
inline LocallySparseResult gen_locally_sparse_detailed(std::size_t n, std::size_t k, std::size_t l, double p,
                                                       std::uint64_t seed, double guard = kDefaultExactGuard) {
  if (l < 2) throw InputError("gen_locally_sparse: l must be at least 2");
  if (k < 2 || k > n) throw InputError("gen_locally_sparse: need 2 <= k <= n");
  const Rng base(seed);
  LocallySparseResult out;
  const Graph g = gen_gnp(n, p, base.split(0).seed());
  out.base_edges = g.size();
  detail::AdjMatrix adj(g);
  std::vector<Vertex> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng shuffler = base.split(1);
  shuffler.shuffle(order);
  const std::size_t all_pairs = k * (k - 1) / 2;
  if (l <= all_pairs) {
    detail::dense_subset_scan(adj, order, k, all_pairs - l, [&](const std::vector<Vertex>& set) {
      std::vector<Vertex> sorted = set;
      std::sort(sorted.begin(), sorted.end());
      std::size_t taken = 0;
      for (std::size_t i = 0; i < sorted.size() && taken < l; ++i) {
        for (std::size_t j = i + 1; j < sorted.size() && taken < l; ++j) {
          if (adj.at(sorted[i], sorted[j])) {
            adj.set(sorted[i], sorted[j], false);
            ++taken;
          }
        }
      }
      ++out.family_size;
      return true;
    });
  }
  out.graph = adj.to_graph();
  if (binomial(n, k) <= guard) {
    out.verified = check_locally_sparse(out.graph, k, l, guard);
    out.verified_exactly = true;
  } else {
    // Sampled maximality pass on random k-sets.
    Rng probe = base.split(2);
    out.verified = true;
    for (int t = 0; t < 20000 && out.verified; ++t) {
      const auto s = probe.sample(static_cast<int>(n), static_cast<int>(k));
      std::size_t e = 0;
      for (std::size_t i = 0; i < s.size(); ++i) {
        for (std::size_t j = i + 1; j < s.size(); ++j) e += adj.at(s[i], s[j]) ? 1 : 0;
      }
      out.verified = e <= l;
    }
  }
  return out;
}

inline Graph gen_locally_sparse(std::size_t n, std::size_t k, std::size_t l, double p, std::uint64_t seed) {
  return gen_locally_sparse_detailed(n, k, l, p, seed).graph;
}

// Member of the doubled class of H: vertex v becomes 2v and 2v+1; every edge
// {v, w} becomes the parallel pair {2v,2w},{2v+1,2w+1} or the crossed pair
// {2v,2w+1},{2v+1,2w}, each with probability 1/2.
inline Graph gen_doubled(const Graph& h, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Edge> edges;
  edges.reserve(2 * h.size());
  for (const auto& [v, w] : h.edges()) {
    if (rng.bernoulli(0.5)) {
      edges.emplace_back(2 * v, 2 * w);
      edges.emplace_back(2 * v + 1, 2 * w + 1);
    } else {
      edges.emplace_back(2 * v, 2 * w + 1);
      edges.emplace_back(2 * v + 1, 2 * w);
    }
  }
  return Graph::from_edges(2 * h.order(), edges);
}

// Probability bound that G(n, p) is not an (n, d)-expander: the union bound
// over the (X, Y) events that witness a violation of (E1) or (E2), clamped to 1.
inline double gnp_expander_failure_bound(std::size_t n, double p, const RealParam& d) {
  const std::size_t m = m_param(n, d);
  auto log_binom = [](double a, double b) { return std::lgamma(a + 1) - std::lgamma(b + 1) - std::lgamma(a - b + 1); };
  const double log_q = p >= 1.0 ? -std::numeric_limits<double>::infinity() : std::log1p(-p);
  double total = 0.0;
  const auto nn = static_cast<std::int64_t>(n);
  for (std::size_t k = 1; k < m && k <= n; ++k) {
    const std::int64_t s = nn - d.ceil_times(static_cast<std::int64_t>(k)) - static_cast<std::int64_t>(k) + 1;
    if (s <= 0) return 1.0;
    if (s > nn - static_cast<std::int64_t>(k)) continue;
    const double kk = static_cast<double>(k);
    const double ss = static_cast<double>(s);
    total += std::exp(log_binom(static_cast<double>(n), kk) + log_binom(static_cast<double>(n) - kk, ss) + kk * ss * log_q);
  }
  if (2 * m <= n) {
    const double mm = static_cast<double>(m);
    total += std::exp(log_binom(static_cast<double>(n), mm) + log_binom(static_cast<double>(n) - mm, mm) + mm * mm * log_q);
  }
  return std::min(1.0, total);
}

struct DensityCheck {
  bool holds = true;
  double worst_ratio = std::numeric_limits<double>::infinity();  // min e(X,Y) / required
  std::optional<VertexSet> witness_x;
};

// The density guarantee of the locally sparse construction:
//   e_H(X, Y) >= 48 d |X||Y| ln(n) / n
// for (not necessarily disjoint) X, Y with 1 <= |X| < m, |Y| = n - ceil((d+1)|X|) + 1,
// or |X| = |Y| = m. For a fixed X the worst Y takes the vertices with the
// fewest neighbors in X, so only X is enumerated.
inline DensityCheck sparse_density_holds(const Graph& h, const RealParam& d, double guard = kDefaultExactGuard) {
  const std::size_t n = h.order();
  const std::size_t m = m_param(n, d);
  if (detail::exact_check_cost(n, m) > guard) throw TooLargeError("density check enumeration");
  const double scale = 48.0 * d.value() * std::log(static_cast<double>(n)) / static_cast<double>(n);
  const auto nb = neighbor_bits(h);
  DensityCheck result;
  std::vector<std::size_t> into(n);
  auto examine = [&](const std::vector<Vertex>& x, const VertexBits& mem, std::size_t ysize) {
    for (std::size_t y = 0; y < n; ++y) into[y] = nb[y].count_common(mem);
    std::nth_element(into.begin(), into.begin() + static_cast<std::ptrdiff_t>(ysize - 1), into.end());
    std::size_t e = 0;
    for (std::size_t i = 0; i < ysize; ++i) e += into[i];
    const double need = scale * static_cast<double>(x.size()) * static_cast<double>(ysize);
    const double ratio = need > 0 ? static_cast<double>(e) / need : std::numeric_limits<double>::infinity();
    if (ratio < result.worst_ratio) {
      result.worst_ratio = ratio;
      if (ratio < 1.0) {
        result.holds = false;
        result.witness_x = VertexSet(x);
      }
    }
    return true;
  };
  detail::SubsetWalker walker(nb, n);
  for (std::size_t k = 1; k < m && k <= n; ++k) {
    const std::int64_t s = static_cast<std::int64_t>(n) - d.ceil_times(static_cast<std::int64_t>(k)) -
                           static_cast<std::int64_t>(k) + 1;
    if (s <= 0 || s > static_cast<std::int64_t>(n)) continue;
    walker.walk(k, [&](const std::vector<Vertex>& x, const VertexBits&, const VertexBits& mem) {
      return examine(x, mem, static_cast<std::size_t>(s));
    });
  }
  if (m <= n) {
    walker.walk(m, [&](const std::vector<Vertex>& x, const VertexBits&, const VertexBits& mem) {
      return examine(x, mem, m);
    });
  }
  return result;
}

// A generator request; serialized into the provenance header of graph files.
struct GenSpec {
  enum class Kind { Gnp, RandomRegular, LocallySparse, Doubled, Complete };
  Kind kind = Kind::Complete;
  std::size_t n = 1;
  double p = 0.0;
  std::size_t r = 0;
  std::size_t k = 2;
  std::size_t l = 2;
  std::string base;  // Doubled: path of the base graph file
  std::uint64_t seed = 0;
};

inline std::string kind_name(GenSpec::Kind k) {
  switch (k) {
    case GenSpec::Kind::Gnp: return "gnp";
    case GenSpec::Kind::RandomRegular: return "regular";
    case GenSpec::Kind::LocallySparse: return "locally_sparse";
    case GenSpec::Kind::Doubled: return "doubled";
    case GenSpec::Kind::Complete: return "complete";
  }
  return "complete";
}

inline GenSpec::Kind kind_from_name(const std::string& name) {
  if (name == "gnp") return GenSpec::Kind::Gnp;
  if (name == "regular") return GenSpec::Kind::RandomRegular;
  if (name == "locally_sparse") return GenSpec::Kind::LocallySparse;
  if (name == "doubled") return GenSpec::Kind::Doubled;
  if (name == "complete") return GenSpec::Kind::Complete;
  throw InputError("unknown generator kind: " + name);
}

inline nlohmann::json to_json(const GenSpec& s) {
  nlohmann::json j;
  j["kind"] = kind_name(s.kind);
  switch (s.kind) {
    case GenSpec::Kind::Gnp:
      j["n"] = s.n;
      j["p"] = s.p;
      break;
    case GenSpec::Kind::RandomRegular:
      j["n"] = s.n;
      j["r"] = s.r;
      break;
    case GenSpec::Kind::LocallySparse:
      j["n"] = s.n;
      j["k"] = s.k;
      j["l"] = s.l;
      j["p"] = s.p;
      break;
    case GenSpec::Kind::Doubled:
      j["base"] = s.base;
      break;
    case GenSpec::Kind::Complete:
      j["n"] = s.n;
      break;
  }
  j["seed"] = s.seed;
  return j;
}

inline GenSpec gen_spec_from_json(const nlohmann::json& j) {
  GenSpec s;
  s.kind = kind_from_name(j.at("kind").get<std::string>());
  s.n = j.value("n", std::size_t{1});
  s.p = j.value("p", 0.0);
  s.r = j.value("r", std::size_t{0});
  s.k = j.value("k", std::size_t{2});
  s.l = j.value("l", std::size_t{2});
  s.base = j.value("base", std::string{});
  s.seed = j.value("seed", std::uint64_t{0});
  return s;
}

inline Graph generate(const GenSpec& s) {
  switch (s.kind) {
    case GenSpec::Kind::Gnp: return gen_gnp(s.n, s.p, s.seed);
    case GenSpec::Kind::RandomRegular: return gen_random_regular(s.n, s.r, s.seed);
    case GenSpec::Kind::LocallySparse: return gen_locally_sparse(s.n, s.k, s.l, s.p, s.seed);
    case GenSpec::Kind::Doubled: return gen_doubled(load_graph(s.base).graph, s.seed);
    case GenSpec::Kind::Complete: return complete_graph(s.n);
  }
  throw InputError("unknown generator kind");
}

}  // namespace treeuniv
