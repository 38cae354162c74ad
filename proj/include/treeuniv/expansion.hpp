#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "treeuniv/error.hpp"
#include "treeuniv/graph.hpp"
#include "treeuniv/real_param.hpp"
#include "treeuniv/rng.hpp"

namespace treeuniv {

// m(n, d) = ceil(n / (2d))
inline std::size_t m_param(std::size_t n, const RealParam& d) {
  if (n < 1) throw InputError("m_param: n must be at least 1");
  if (!(RealParam(0.0) < d)) throw InputError("m_param: d must be positive");
  return static_cast<std::size_t>(d.ceil_quotient(static_cast<std::int64_t>(n), 2));
}

enum class VerdictStatus { Pass, FailE1, FailE2, Unknown };

inline std::string to_string(VerdictStatus s) {
  switch (s) {
    case VerdictStatus::Pass: return "Pass";
    case VerdictStatus::FailE1: return "FailE1";
    case VerdictStatus::FailE2: return "FailE2";
    case VerdictStatus::Unknown: return "Unknown";
  }
  return "Unknown";
}

struct CheckMode {
  bool exact = true;
  std::size_t trials = 0;
  std::uint64_t seed = 0;
};

struct ExpanderVerdict {
  VerdictStatus status = VerdictStatus::Unknown;
  std::optional<VertexSet> witness_x;
  std::optional<VertexSet> witness_y;  // FailE2 only
  CheckMode mode;
  RealParam d;
  std::size_t m = 0;

  bool failed() const { return status == VerdictStatus::FailE1 || status == VerdictStatus::FailE2; }
};

inline nlohmann::json to_json(const ExpanderVerdict& v) {
  nlohmann::json j;
  j["status"] = to_string(v.status);
  if (v.witness_x) {
    j["witness"]["X"] = v.witness_x->members();
    if (v.witness_y) j["witness"]["Y"] = v.witness_y->members();
  } else {
    j["witness"] = nullptr;
  }
  j["mode"] = v.mode.exact ? "exact" : "sampled";
  if (!v.mode.exact) {
    j["trials"] = v.mode.trials;
    j["seed"] = v.mode.seed;
  }
  j["d"] = v.d.value();
  j["m"] = v.m;
  return j;
}

// Default cap on the number of vertex sets an exact check may enumerate.
inline constexpr double kDefaultExactGuard = 2e7;

inline double binomial(std::size_t n, std::size_t k) {
  if (k > n) return 0.0;
  k = std::min(k, n - k);
  double r = 1.0;
  for (std::size_t i = 1; i <= k; ++i) r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
  return std::round(r);
}

namespace detail {

// Enumerates the k-subsets of [0, n) in lexicographic order, keeping the
// member mask and the union of closed-out neighborhoods for each prefix.
// fn(indices, neighborhood_union, members) returns false to stop early.
class SubsetWalker {
 public:
  SubsetWalker(const std::vector<VertexBits>& nb, std::size_t n) : nb_(nb), n_(n) {}

  template <typename Fn>
  bool walk(std::size_t k, Fn&& fn) {
    if (k == 0 || k > n_) return true;
    idx_.assign(k, 0);
    unions_.assign(k + 1, VertexBits(n_));
    members_.assign(k + 1, VertexBits(n_));
    return recurse(0, 0, k, fn);
  }

 private:
  template <typename Fn>
  bool recurse(std::size_t level, std::size_t start, std::size_t k, Fn& fn) {
    for (std::size_t v = start; v + (k - level) <= n_; ++v) {
      idx_[level] = static_cast<Vertex>(v);
      unions_[level + 1].assign_or(unions_[level], nb_[v]);
      members_[level + 1] = members_[level];
      members_[level + 1].set(static_cast<Vertex>(v));
      if (level + 1 == k) {
        if (!fn(idx_, unions_[k], members_[k])) return false;
      } else if (!recurse(level + 1, v + 1, k, fn)) {
        return false;
      }
    }
    return true;
  }

  const std::vector<VertexBits>& nb_;
  std::size_t n_;
  std::vector<Vertex> idx_;
  std::vector<VertexBits> unions_;
  std::vector<VertexBits> members_;
};

inline double exact_check_cost(std::size_t n, std::size_t m) {
  double total = 0;
  for (std::size_t k = 1; k < m && k <= n; ++k) total += binomial(n, k);
  if (2 * m <= n) total += binomial(n, m);
  return total;
}

}  // namespace detail

// Decides (E1) and (E2) by enumeration. E1 is checked by increasing |X| so a
// FailE1 witness has minimum size; ties go to the lexicographically first set.
inline ExpanderVerdict check_expander_exact(const Graph& g, const RealParam& d, double guard = kDefaultExactGuard) {
  const std::size_t n = g.order();
  ExpanderVerdict verdict;
  verdict.d = d;
  verdict.m = m_param(n, d);
  verdict.mode = CheckMode{true, 0, 0};
  const std::size_t m = verdict.m;
  const double cost = detail::exact_check_cost(n, m);
  if (cost > guard) {
    throw TooLargeError("n=" + std::to_string(n) + ", m=" + std::to_string(m) + " needs " +
                        std::to_string(static_cast<long long>(cost)) + " sets");
  }
  const auto nb = neighbor_bits(g);
  detail::SubsetWalker walker(nb, n);
  for (std::size_t k = 1; k < m && k <= n; ++k) {
    walker.walk(k, [&](const std::vector<Vertex>& x, const VertexBits& uni, const VertexBits& mem) {
      const auto ext = static_cast<std::int64_t>(uni.count_without(mem));
      if (d.covered_by(ext, static_cast<std::int64_t>(k))) return true;
      verdict.status = VerdictStatus::FailE1;
      verdict.witness_x = VertexSet(x);
      return false;
    });
    if (verdict.failed()) return verdict;
  }
  if (2 * m <= n) {
    walker.walk(m, [&](const std::vector<Vertex>& x, const VertexBits& uni, const VertexBits& mem) {
      VertexBits closed(n);
      closed.assign_or(uni, mem);
      const auto rest = closed.complement();
      if (rest.count() < m) return true;
      verdict.status = VerdictStatus::FailE2;
      verdict.witness_x = VertexSet(x);
      verdict.witness_y = VertexSet(rest.members(m));
      return false;
    });
    if (verdict.failed()) return verdict;
  }
  verdict.status = VerdictStatus::Pass;
  return verdict;
}

// One-sided Monte-Carlo refutation. Each trial draws one uniform set of every
// size 1..m-1 for (E1) and one uniform m-set X for (E2), in which case any m
// vertices outside X ∪ N(X) form the partner Y. Trials use independent streams
// split from `seed`; the lowest failing trial wins. Never reports Pass.
inline ExpanderVerdict check_expander_sampled(const Graph& g, const RealParam& d, std::size_t trials,
                                              std::uint64_t seed) {
  if (trials < 1) throw InputError("sampled check needs at least one trial");
  const std::size_t n = g.order();
  ExpanderVerdict verdict;
  verdict.d = d;
  verdict.m = m_param(n, d);
  verdict.mode = CheckMode{false, trials, seed};
  const std::size_t m = verdict.m;
  const auto nb = neighbor_bits(g);
  const Rng base(seed);
  VertexBits uni(n);
  VertexBits mem(n);
  auto load = [&](const std::vector<int>& x) {
    uni.clear();
    mem.clear();
    for (int v : x) {
      uni |= nb[static_cast<std::size_t>(v)];
      mem.set(v);
    }
  };
  for (std::size_t t = 0; t < trials; ++t) {
    Rng rng = base.split(t);
    for (std::size_t k = 1; k < m && k <= n; ++k) {
      const auto x = rng.sample(static_cast<int>(n), static_cast<int>(k));
      load(x);
      if (!d.covered_by(static_cast<std::int64_t>(uni.count_without(mem)), static_cast<std::int64_t>(k))) {
        verdict.status = VerdictStatus::FailE1;
        verdict.witness_x = VertexSet(std::vector<Vertex>(x.begin(), x.end()));
        return verdict;
      }
    }
    if (2 * m <= n) {
      const auto x = rng.sample(static_cast<int>(n), static_cast<int>(m));
      load(x);
      uni |= mem;
      const auto rest = uni.complement();
      if (rest.count() >= m) {
        verdict.status = VerdictStatus::FailE2;
        verdict.witness_x = VertexSet(std::vector<Vertex>(x.begin(), x.end()));
        verdict.witness_y = VertexSet(rest.members(m));
        return verdict;
      }
    }
  }
  verdict.status = VerdictStatus::Unknown;
  return verdict;
}

// Re-derives a failure witness from the raw definition.
inline bool witness_is_valid(const Graph& g, const ExpanderVerdict& v) {
  if (!v.witness_x) return false;
  const auto& x = *v.witness_x;
  if (v.status == VerdictStatus::FailE1) {
    if (x.empty() || x.size() >= v.m) return false;
    const auto ext = external_neighborhood(g, x).size();
    return !v.d.covered_by(static_cast<std::int64_t>(ext), static_cast<std::int64_t>(x.size()));
  }
  if (v.status == VerdictStatus::FailE2) {
    if (!v.witness_y) return false;
    const auto& y = *v.witness_y;
    return x.size() == v.m && y.size() == v.m && x.disjoint_from(y) && ordered_edge_count(g, x, y) == 0;
  }
  return false;
}

// e_G(X, Y) >= |X||Y| / (4m) for disjoint X, Y with |X| >= m, |Y| >= 2m.
inline bool verify_density_bound(const Graph& g, std::size_t m, const VertexSet& x, const VertexSet& y) {
  g.check_set(x);
  g.check_set(y);
  if (m < 1) throw InputError("density bound: m must be positive");
  if (!x.disjoint_from(y)) throw InputError("density bound: X and Y must be disjoint");
  if (x.size() < m || y.size() < 2 * m) throw InputError("density bound: needs |X| >= m and |Y| >= 2m");
  return 4 * m * ordered_edge_count(g, x, y) >= x.size() * y.size();
}

namespace detail {

inline VertexSet low_degree_into(const Graph& g, const VertexSet& w, std::size_t m) {
  const auto wb = to_bits(g.order(), w);
  std::vector<Vertex> out;
  for (Vertex v = 0; v < g.n(); ++v) {
    if (wb.test(v)) continue;
    std::size_t hits = 0;
    for (Vertex u : g.neighbors(v)) hits += wb.test(u) ? 1 : 0;
    if (hits + 1 <= m) out.push_back(v);
  }
  return VertexSet(std::move(out));
}

}  // namespace detail

// Vertices outside W with at most m-1 neighbors in W. Requires |W| >= m^2.
inline VertexSet exceptional_vertices(const Graph& g, const VertexSet& w, std::size_t m) {
  g.check_set(w);
  if (w.size() < m * m) {
    throw InputError("exceptional_vertices: |W|=" + std::to_string(w.size()) + " < m^2=" + std::to_string(m * m));
  }
  return detail::low_degree_into(g, w, m);
}

struct Partition {
  std::vector<VertexSet> parts;
  std::vector<RealParam> part_expansions;  // d_i = |U_i| d / (5n)
};

struct PartitionOptions {
  std::size_t max_retries = 50;
  double exact_guard = kDefaultExactGuard;
  std::size_t sampled_trials = 2000;
};

struct PartitionResult {
  bool ok = false;
  Partition partition;  // last attempt, verified when ok
  std::size_t attempts = 0;
  bool exact_verification = true;
  std::optional<VertexSet> witness_x;  // last violating X
  std::size_t witness_part = 0;
};

namespace detail {

struct PartViolation {
  VertexSet x;
  std::size_t part;
};

// Checks |N(X) ∩ U_i| >= d_i |X| for every part and the given X.
inline std::optional<std::size_t> violated_part(const VertexBits& neighborhood, std::size_t k,
                                                const std::vector<VertexBits>& part_bits,
                                                const std::vector<RealParam>& di) {
  for (std::size_t i = 0; i < part_bits.size(); ++i) {
    const auto hits = static_cast<std::int64_t>(neighborhood.count_common(part_bits[i]));
    if (!di[i].covered_by(hits, static_cast<std::int64_t>(k))) return i;
  }
  return std::nullopt;
}

}  // namespace detail

// Uniformly random partition into parts of the given sizes, redrawn until
// |N_G(X) ∩ U_i| >= d_i |X| holds for all 1 <= |X| < m(n, d) and all parts.
// The check is exhaustive when affordable and sampled otherwise.
inline PartitionResult partition_vertices(const Graph& g, const RealParam& d, const std::vector<std::size_t>& sizes,
                                          std::uint64_t seed, const PartitionOptions& opts = {}) {
  const std::size_t n = g.order();
  std::size_t total = 0;
  for (auto s : sizes) total += s;
  if (total != n) throw InputError("partition sizes sum to " + std::to_string(total) + ", expected " + std::to_string(n));
  const std::size_t m = m_param(n, d);
  std::vector<RealParam> di;
  for (auto s : sizes) di.push_back(d.scaled(static_cast<std::int64_t>(s), static_cast<std::int64_t>(5 * n)));

  const auto nb = neighbor_bits(g);
  double cost = 0;
  for (std::size_t k = 1; k < m && k <= n; ++k) cost += binomial(n, k);
  PartitionResult result;
  result.exact_verification = cost <= opts.exact_guard;

  const Rng base(seed);
  std::vector<Vertex> order(n);
  for (std::size_t attempt = 0; attempt < std::max<std::size_t>(1, opts.max_retries); ++attempt) {
    Rng rng = base.split(attempt);
    std::iota(order.begin(), order.end(), 0);
    rng.shuffle(order);
    Partition p;
    p.part_expansions = di;
    std::vector<VertexBits> part_bits;
    std::size_t pos = 0;
    for (auto s : sizes) {
      std::vector<Vertex> members(order.begin() + static_cast<std::ptrdiff_t>(pos),
                                  order.begin() + static_cast<std::ptrdiff_t>(pos + s));
      pos += s;
      p.parts.emplace_back(std::move(members));
      part_bits.push_back(to_bits(n, p.parts.back()));
    }
    result.attempts = attempt + 1;

    std::optional<detail::PartViolation> bad;
    if (result.exact_verification) {
      detail::SubsetWalker walker(nb, n);
      for (std::size_t k = 1; k < m && k <= n && !bad; ++k) {
        walker.walk(k, [&](const std::vector<Vertex>& x, const VertexBits& uni, const VertexBits& mem) {
          VertexBits ext = uni;
          ext.subtract(mem);
          if (auto i = detail::violated_part(ext, k, part_bits, di)) {
            bad = detail::PartViolation{VertexSet(x), *i};
            return false;
          }
          return true;
        });
      }
    } else {
      Rng probe = rng.split(0xC0FFEE);
      VertexBits ext(n);
      VertexBits mem(n);
      for (std::size_t t = 0; t < opts.sampled_trials && !bad; ++t) {
        for (std::size_t k = 1; k < m && k <= n && !bad; ++k) {
          const auto x = probe.sample(static_cast<int>(n), static_cast<int>(k));
          ext.clear();
          mem.clear();
          for (int v : x) {
            ext |= nb[static_cast<std::size_t>(v)];
            mem.set(v);
          }
          ext.subtract(mem);
          if (auto i = detail::violated_part(ext, k, part_bits, di)) {
            bad = detail::PartViolation{VertexSet(std::vector<Vertex>(x.begin(), x.end())), *i};
          }
        }
      }
    }
    result.partition = std::move(p);
    if (!bad) {
      result.ok = true;
      result.witness_x.reset();
      return result;
    }
    result.witness_x = bad->x;
    result.witness_part = bad->part;
  }
  return result;
}

}  // namespace treeuniv
