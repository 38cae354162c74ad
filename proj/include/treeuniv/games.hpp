#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "treeuniv/embed.hpp"
#include "treeuniv/error.hpp"
#include "treeuniv/expansion.hpp"
#include "treeuniv/graph.hpp"
#include "treeuniv/real_param.hpp"
#include "treeuniv/rng.hpp"
#include "treeuniv/trees.hpp"

namespace treeuniv {

enum class Side { Maker, Breaker };
enum class Owner : std::uint8_t { Unclaimed, Maker, Breaker };

inline std::string to_string(Side s) { return s == Side::Maker ? "maker" : "breaker"; }
inline Side other(Side s) { return s == Side::Maker ? Side::Breaker : Side::Maker; }

class StrategyFault : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct GameHypergraph {
  std::size_t board_size = 0;
  std::vector<std::pair<Vertex, Vertex>> board_edges;  // host edge per element, empty for abstract boards
  std::vector<std::vector<std::size_t>> sets;          // sorted element indices
  std::size_t a = 1;                                   // Maker's bias
  std::size_t b = 1;                                   // Breaker's bias
  std::vector<std::vector<std::size_t>> incidence;     // element -> sets containing it

  static GameHypergraph make(std::size_t board_size, std::vector<std::vector<std::size_t>> sets, std::size_t a,
                             std::size_t b) {
    if (a == 0 || b == 0) throw InputError("biases must be at least 1");
    GameHypergraph h;
    h.board_size = board_size;
    h.a = a;
    h.b = b;
    h.incidence.assign(board_size, {});
    for (std::size_t i = 0; i < sets.size(); ++i) {
      auto& s = sets[i];
      std::sort(s.begin(), s.end());
      s.erase(std::unique(s.begin(), s.end()), s.end());
      for (std::size_t e : s) {
        if (e >= board_size) throw InputError("winning set element " + std::to_string(e) + " out of range");
        h.incidence[e].push_back(i);
      }
    }
    h.sets = std::move(sets);
    return h;
  }

  // (1+b)^(-1/a): the weight of one unclaimed element.
  double element_weight() const { return std::pow(1.0 + static_cast<double>(b), -1.0 / static_cast<double>(a)); }
};

struct GameState {
  std::vector<Owner> claims;
  Side turn = Side::Maker;
  std::size_t picks_left = 0;
  std::size_t unclaimed = 0;
  std::vector<std::size_t> open;          // per set: unclaimed elements
  std::vector<std::size_t> breaker_hits;  // per set: Breaker elements

  static GameState start(const GameHypergraph& h, Side first = Side::Maker) {
    GameState s;
    s.claims.assign(h.board_size, Owner::Unclaimed);
    s.turn = first;
    s.picks_left = std::min(first == Side::Maker ? h.a : h.b, h.board_size);
    s.unclaimed = h.board_size;
    s.open.resize(h.sets.size());
    for (std::size_t i = 0; i < h.sets.size(); ++i) s.open[i] = h.sets[i].size();
    s.breaker_hits.assign(h.sets.size(), 0);
    return s;
  }

  bool alive(std::size_t set) const { return breaker_hits[set] == 0; }
  bool completed_by_maker(std::size_t set) const { return breaker_hits[set] == 0 && open[set] == 0; }

  void claim(const GameHypergraph& h, std::size_t e, Side side) {
    if (e >= claims.size() || claims[e] != Owner::Unclaimed) {
      throw StrategyFault("element " + std::to_string(e) + " is not available");
    }
    claims[e] = side == Side::Maker ? Owner::Maker : Owner::Breaker;
    --unclaimed;
    for (std::size_t i : h.incidence[e]) {
      --open[i];
      if (side == Side::Breaker) ++breaker_hits[i];
    }
  }

  // Called after each pick by the side to move.
  void advance(const GameHypergraph& h) {
    if (picks_left > 0) --picks_left;
    if (picks_left == 0 && unclaimed > 0) {
      turn = other(turn);
      picks_left = std::min(turn == Side::Maker ? h.a : h.b, unclaimed);
    }
  }

  bool maker_has_won() const {
    for (std::size_t i = 0; i < open.size(); ++i) {
      if (completed_by_maker(i)) return true;
    }
    return false;
  }
};

// Sum over winning sets without a Breaker element of (1+b)^(-|unclaimed part|/a).
inline double es_potential(const GameHypergraph& h, const GameState& s) {
  const double w = h.element_weight();
  double total = 0;
  for (std::size_t i = 0; i < h.sets.size(); ++i) {
    if (s.alive(i)) total += std::pow(w, static_cast<double>(s.open[i]));
  }
  return total;
}

inline double es_potential(const GameHypergraph& h) { return es_potential(h, GameState::start(h)); }

namespace detail {

inline std::size_t lowest_unclaimed(const GameState& s) {
  for (std::size_t e = 0; e < s.claims.size(); ++e) {
    if (s.claims[e] == Owner::Unclaimed) return e;
  }
  throw StrategyFault("no unclaimed element");
}

// Unclaimed element with the largest total weight over live sets through it.
inline std::size_t heaviest_element(const GameHypergraph& h, const GameState& s) {
  const double w = h.element_weight();
  std::size_t best = h.board_size;
  double best_val = -1;
  for (std::size_t e = 0; e < h.board_size; ++e) {
    if (s.claims[e] != Owner::Unclaimed) continue;
    double val = 0;
    for (std::size_t i : h.incidence[e]) {
      if (s.alive(i)) val += std::pow(w, static_cast<double>(s.open[i]));
    }
    if (val > best_val) {
      best_val = val;
      best = e;
    }
  }
  if (best == h.board_size) throw StrategyFault("no unclaimed element");
  return best;
}

}  // namespace detail

// Erdős–Selfridge move: claiming the heaviest element removes the most
// potential; ties go to the lowest index.
inline std::size_t breaker_potential_move(const GameHypergraph& h, const GameState& s) {
  return detail::heaviest_element(h, s);
}

using Strategy = std::function<std::size_t(const GameHypergraph&, const GameState&, Rng&)>;

enum class StrategyKind { Random, Greedy, Potential };

inline std::string to_string(StrategyKind k) {
  switch (k) {
    case StrategyKind::Random: return "random";
    case StrategyKind::Greedy: return "greedy";
    case StrategyKind::Potential: return "potential";
  }
  return "?";
}

inline StrategyKind strategy_from_name(const std::string& name) {
  if (name == "random") return StrategyKind::Random;
  if (name == "greedy") return StrategyKind::Greedy;
  if (name == "potential") return StrategyKind::Potential;
  throw InputError("unknown strategy: " + name + " (expected random, greedy or potential)");
}

inline Strategy random_strategy() {
  return [](const GameHypergraph&, const GameState& s, Rng& rng) {
    std::size_t k = rng.below(s.unclaimed);
    for (std::size_t e = 0; e < s.claims.size(); ++e) {
      if (s.claims[e] != Owner::Unclaimed) continue;
      if (k-- == 0) return e;
    }
    throw StrategyFault("no unclaimed element");
  };
}

// Both sides look at the live set closest to completion. Maker extends it,
// Breaker blocks it, each taking its lowest unclaimed element.
inline Strategy greedy_strategy() {
  return [](const GameHypergraph& h, const GameState& s, Rng&) {
    std::size_t target = h.sets.size();
    for (std::size_t i = 0; i < h.sets.size(); ++i) {
      if (!s.alive(i) || s.open[i] == 0) continue;
      if (target == h.sets.size() || s.open[i] < s.open[target]) target = i;
    }
    if (target == h.sets.size()) return detail::lowest_unclaimed(s);
    for (std::size_t e : h.sets[target]) {
      if (s.claims[e] == Owner::Unclaimed) return e;
    }
    return detail::lowest_unclaimed(s);
  };
}

// For Breaker this is the Erdős–Selfridge strategy; Maker uses the same
// weights to attack the heaviest element.
inline Strategy potential_strategy() {
  return [](const GameHypergraph& h, const GameState& s, Rng&) { return detail::heaviest_element(h, s); };
}

inline Strategy make_strategy(StrategyKind k) {
  switch (k) {
    case StrategyKind::Random: return random_strategy();
    case StrategyKind::Greedy: return greedy_strategy();
    case StrategyKind::Potential: return potential_strategy();
  }
  return random_strategy();
}

struct GameMove {
  Side side;
  std::size_t element;
};

struct GameResult {
  Side winner = Side::Breaker;
  Side first = Side::Maker;
  std::vector<GameMove> moves;
  std::vector<Owner> claims;
  double initial_potential = 0;
  double final_potential = 0;
};

inline nlohmann::json to_json(const GameResult& r, const GameHypergraph& h) {
  nlohmann::json moves = nlohmann::json::array();
  for (const auto& m : r.moves) {
    nlohmann::json mv{{"side", to_string(m.side)}, {"element", m.element}};
    if (!h.board_edges.empty()) mv["edge"] = {h.board_edges[m.element].first, h.board_edges[m.element].second};
    moves.push_back(mv);
  }
  std::vector<std::string> claims;
  for (auto c : r.claims) claims.push_back(c == Owner::Maker ? "M" : c == Owner::Breaker ? "B" : "-");
  return {{"first_mover", to_string(r.first)},
          {"moves", moves},
          {"claims", claims},
          {"winner", to_string(r.winner)},
          {"initial_potential", r.initial_potential},
          {"final_potential", r.final_potential}};
}

// Plays the whole board out. Maker wins when it owns every element of some
// winning set.
inline GameResult play_game(const GameHypergraph& h, const Strategy& maker, const Strategy& breaker,
                            std::uint64_t seed, Side first = Side::Maker) {
  const Rng base(seed);
  Rng rng_maker = base.split(0);
  Rng rng_breaker = base.split(1);
  auto s = GameState::start(h, first);
  GameResult r;
  r.first = first;
  r.initial_potential = es_potential(h, s);
  while (s.unclaimed > 0) {
    const Side side = s.turn;
    const std::size_t e = side == Side::Maker ? maker(h, s, rng_maker) : breaker(h, s, rng_breaker);
    s.claim(h, e, side);
    r.moves.push_back({side, e});
    s.advance(h);
  }
  r.claims = s.claims;
  r.final_potential = es_potential(h, s);
  r.winner = s.maker_has_won() ? Side::Maker : Side::Breaker;
  return r;
}

namespace detail {

inline bool breaker_survives(const GameHypergraph& h, GameState& s) {
  if (s.maker_has_won()) return false;
  if (s.unclaimed == 0) return true;
  if (s.turn == Side::Breaker) {
    GameState next = s;
    const std::size_t e = breaker_potential_move(h, next);
    next.claim(h, e, Side::Breaker);
    next.advance(h);
    return breaker_survives(h, next);
  }
  for (std::size_t e = 0; e < h.board_size; ++e) {
    if (s.claims[e] != Owner::Unclaimed) continue;
    GameState next = s;
    next.claim(h, e, Side::Maker);
    next.advance(h);
    if (!breaker_survives(h, next)) return false;
  }
  return true;
}

}  // namespace detail

// True when Breaker's potential strategy wins against every Maker line.
// Intended for boards of at most a dozen elements.
inline bool potential_breaker_never_loses(const GameHypergraph& h, Side first = Side::Maker) {
  if (h.board_size > 16) throw TooLargeError("board of " + std::to_string(h.board_size) + " elements too large for exact mode: limit 16");
  auto s = GameState::start(h, first);
  return detail::breaker_survives(h, s);
}

inline constexpr double kDefaultGameGuard = 2e6;

namespace detail {

// |Y| for a type-(i) set with |X| = x: n - ceil((d+1) x) + 1, possibly <= 0.
inline std::int64_t blocking_size(std::size_t n, const RealParam& d, std::size_t x) {
  return static_cast<std::int64_t>(n) - d.ceil_times(static_cast<std::int64_t>(x)) - static_cast<std::int64_t>(x) + 1;
}

inline double expander_family_size(std::size_t n, const RealParam& d) {
  const std::size_t m = m_param(n, d);
  double total = 0;
  for (std::size_t x = 1; x < m; ++x) {
    const auto y = blocking_size(n, d, x);
    total += binomial(n, x) * (y <= 0 ? 1.0 : binomial(n - x, static_cast<std::size_t>(y)));
  }
  if (2 * m <= n) total += binomial(n, m) * binomial(n - m, m) / 2;
  return total;
}

inline std::vector<std::size_t> cross_edges(const Graph& g, const std::vector<int>& edge_index, const VertexBits& xb,
                                            const std::vector<Vertex>& xs, const VertexBits& yb) {
  std::vector<std::size_t> out;
  for (Vertex v : xs) {
    for (Vertex w : g.neighbors(v)) {
      if (yb.test(w) && !xb.test(w)) {
        out.push_back(static_cast<std::size_t>(edge_index[static_cast<std::size_t>(v) * g.order() + static_cast<std::size_t>(w)]));
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace detail

// The reversed-game family on E(G): for disjoint X, Y with either
// 1 <= |X| < m and |Y| = n - ceil((d+1)|X|) + 1, or |X| = |Y| = m, the set
// of G-edges between X and Y. When no such Y fits, X contributes the empty
// set (its expansion cannot be met). Identical edge sets are merged.
inline GameHypergraph expander_game_hypergraph(const Graph& g, const RealParam& d, std::size_t a = 1,
                                               std::size_t b = 1, double guard = kDefaultGameGuard) {
  const std::size_t n = g.order();
  const double count = detail::expander_family_size(n, d);
  if (count > guard) {
    throw TooLargeError("expander game family of ~" + std::to_string(static_cast<std::uint64_t>(count)) +
                        " sets too large for exact mode: guard " + std::to_string(static_cast<std::uint64_t>(guard)));
  }
  const auto edges = g.edges();
  std::vector<int> edge_index(n * n, -1);
  for (std::size_t i = 0; i < edges.size(); ++i) {
    edge_index[static_cast<std::size_t>(edges[i].first) * n + static_cast<std::size_t>(edges[i].second)] = static_cast<int>(i);
    edge_index[static_cast<std::size_t>(edges[i].second) * n + static_cast<std::size_t>(edges[i].first)] = static_cast<int>(i);
  }
  const std::size_t m = m_param(n, d);
  std::vector<std::vector<std::size_t>> sets;
  auto for_each_subset = [&](const std::vector<Vertex>& pool, std::size_t k, auto&& fn) {
    std::vector<std::size_t> idx(k);
    for (std::size_t i = 0; i < k; ++i) idx[i] = i;
    if (k > pool.size()) return;
    for (;;) {
      std::vector<Vertex> pick(k);
      for (std::size_t i = 0; i < k; ++i) pick[i] = pool[idx[i]];
      fn(pick);
      std::size_t i = k;
      while (i > 0 && idx[i - 1] == pool.size() - k + (i - 1)) --i;
      if (i == 0) return;
      ++idx[i - 1];
      for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
    }
  };
  std::vector<Vertex> all(n);
  for (std::size_t i = 0; i < n; ++i) all[i] = static_cast<Vertex>(i);
  for (std::size_t x = 1; x < m; ++x) {
    const auto y = detail::blocking_size(n, d, x);
    for_each_subset(all, x, [&](const std::vector<Vertex>& xs) {
      if (y <= 0) {
        sets.emplace_back();
        return;
      }
      const auto xb = to_bits(n, VertexSet(xs));
      std::vector<Vertex> rest;
      for (Vertex v : all) {
        if (!xb.test(v)) rest.push_back(v);
      }
      for_each_subset(rest, static_cast<std::size_t>(y), [&](const std::vector<Vertex>& ys) {
        sets.push_back(detail::cross_edges(g, edge_index, xb, xs, to_bits(n, VertexSet(ys))));
      });
    });
  }
  if (2 * m <= n) {
    for_each_subset(all, m, [&](const std::vector<Vertex>& xs) {
      const auto xb = to_bits(n, VertexSet(xs));
      std::vector<Vertex> rest;
      for (Vertex v : all) {
        if (!xb.test(v) && v > xs.front()) rest.push_back(v);
      }
      for_each_subset(rest, m, [&](const std::vector<Vertex>& ys) {
        sets.push_back(detail::cross_edges(g, edge_index, xb, xs, to_bits(n, VertexSet(ys))));
      });
    });
  }
  std::sort(sets.begin(), sets.end());
  sets.erase(std::unique(sets.begin(), sets.end()), sets.end());
  auto h = GameHypergraph::make(edges.size(), std::move(sets), a, b);
  h.board_edges = edges;
  return h;
}

struct CriterionResult {
  double potential = 0;
  bool maker_wins = false;
  std::size_t family_size = 0;
};

// Sum over the family of 2^(-|F|/b); below 1/2 predicts that Maker wins the
// (1:b) expander game on G.
inline CriterionResult maker_win_criterion(const Graph& g, const RealParam& d, std::size_t b,
                                           double guard = kDefaultGameGuard) {
  if (b == 0) throw InputError("b must be at least 1");
  const auto h = expander_game_hypergraph(g, d, b, 1, guard);
  CriterionResult r;
  r.family_size = h.sets.size();
  r.potential = es_potential(h);
  r.maker_wins = r.potential < 0.5;
  return r;
}

// Closed-form potential over the singleton part of the family (X = {v}),
// used when the full family cannot be enumerated. For vertex v with u
// unclaimed and k Maker-owned incident edges, the live sets are the Y of
// size y avoiding Maker's neighbors of v.
class SingletonPotential {
 public:
  SingletonPotential(const Graph& g, const RealParam& d, std::size_t b)
      : n_(g.order()), weight_(std::pow(2.0, -1.0 / static_cast<double>(b))),
        y_(detail::blocking_size(g.order(), d, 1)), open_(g.order()), owned_(g.order(), 0) {
    for (Vertex v = 0; v < g.n(); ++v) open_[static_cast<std::size_t>(v)] = g.degree(v);
  }

  double total() const {
    double s = 0;
    for (std::size_t v = 0; v < n_; ++v) s += vertex_total(v);
    return s;
  }

  // Weight of the live sets at v that contain the unclaimed edge to one neighbor.
  double through_edge(Vertex v) const {
    if (y_ <= 0) return 0;
    const auto u = open_[static_cast<std::size_t>(v)];
    const auto rest = static_cast<double>(n_ - 1 - u - owned_[static_cast<std::size_t>(v)]);
    double s = 0;
    for (std::size_t j = 0; j + 1 <= u; ++j) {
      const auto need = y_ - 1 - static_cast<std::int64_t>(j);
      if (need < 0) break;
      s += binomial(u - 1, j) * binom_real(rest, static_cast<std::size_t>(need)) * std::pow(weight_, static_cast<double>(j + 1));
    }
    return s;
  }

  void claim(Vertex v, Vertex w, Side side) {
    for (Vertex x : {v, w}) {
      --open_[static_cast<std::size_t>(x)];
      if (side == Side::Breaker) ++owned_[static_cast<std::size_t>(x)];
    }
  }

 private:
  static double binom_real(double n, std::size_t k) {
    if (static_cast<double>(k) > n) return 0;
    return binomial(static_cast<std::size_t>(n), k);
  }

  double vertex_total(std::size_t v) const {
    if (y_ <= 0) return 1;
    const auto u = open_[v];
    const auto rest = static_cast<double>(n_ - 1 - u - owned_[v]);
    double s = 0;
    for (std::size_t j = 0; j <= u; ++j) {
      const auto need = y_ - static_cast<std::int64_t>(j);
      if (need < 0) break;
      s += binomial(u, j) * binom_real(rest, static_cast<std::size_t>(need)) * std::pow(weight_, static_cast<double>(j));
    }
    return s;
  }

  std::size_t n_;
  double weight_;
  std::int64_t y_;
  std::vector<std::size_t> open_;
  std::vector<std::size_t> owned_;  // edges held by the potential side
};

struct UniversalityOptions {
  StrategyKind breaker = StrategyKind::Random;
  Side first = Side::Maker;  // in the original game
  SpanningOptions embed;
  double family_guard = kDefaultGameGuard;
  double exact_check_guard = kDefaultExactGuard;
  std::size_t sampled_trials = 2000;
};

struct TreeOutcome {
  bool ok = false;
  std::string tree_case;
  bool used_fallback = false;
  std::string failed_stage;
};

struct UniversalityReport {
  std::string mode;  // "exact_family" or "singleton_surrogate"
  std::size_t n = 0;
  std::size_t b = 0;
  std::string d;
  std::string delta;
  std::string breaker;
  Side first = Side::Maker;
  std::size_t family_size = 0;
  double initial_potential = 0;
  double final_potential = 0;
  bool criterion = false;
  std::vector<std::pair<Vertex, Vertex>> maker_edges;
  ExpanderVerdict verdict;
  std::vector<TreeOutcome> trees;

  bool expander_pass() const { return verdict.status == VerdictStatus::Pass; }
  std::size_t embedded() const {
    return static_cast<std::size_t>(std::count_if(trees.begin(), trees.end(), [](const auto& t) { return t.ok; }));
  }
};

inline constexpr int kGameReportSchemaVersion = 1;

inline nlohmann::json to_json(const UniversalityReport& r) {
  nlohmann::json trees = nlohmann::json::array();
  for (const auto& t : r.trees) {
    trees.push_back({{"ok", t.ok}, {"case", t.tree_case}, {"fallback", t.used_fallback}, {"failed_stage", t.failed_stage}});
  }
  nlohmann::json edges = nlohmann::json::array();
  for (const auto& [u, v] : r.maker_edges) edges.push_back({u, v});
  return {{"schema_version", kGameReportSchemaVersion},
          {"mode", r.mode},
          {"n", r.n},
          {"b", r.b},
          {"d", r.d},
          {"delta", r.delta},
          {"breaker", r.breaker},
          {"first_mover", to_string(r.first)},
          {"family_size", r.family_size},
          {"initial_potential", r.initial_potential},
          {"final_potential", r.final_potential},
          {"criterion", r.criterion},
          {"maker_edges", edges},
          {"expander", to_json(r.verdict)},
          {"trees", trees}};
}

namespace detail {

// Original game, surrogate mode: Maker (bias 1) maximizes the singleton
// potential it removes, Breaker (bias b) follows its strategy on the edge
// list directly.
inline std::vector<std::pair<Vertex, Vertex>> play_singleton_surrogate(const Graph& g, const RealParam& d,
                                                                       std::size_t b, StrategyKind breaker,
                                                                       Side first, std::uint64_t seed,
                                                                       UniversalityReport& rep) {
  const auto edges = g.edges();
  SingletonPotential pot(g, d, b);
  rep.initial_potential = pot.total();
  std::vector<Owner> claims(edges.size(), Owner::Unclaimed);
  std::vector<std::size_t> maker_deg(g.order(), 0);
  std::size_t left = edges.size();
  const Rng base(seed);
  Rng rng = base.split(1);
  Side turn = first;
  while (left > 0) {
    const std::size_t picks = std::min(turn == Side::Maker ? std::size_t{1} : b, left);
    for (std::size_t p = 0; p < picks; ++p) {
      std::size_t pick = edges.size();
      if (turn == Side::Maker) {
        double best = -1;
        for (std::size_t e = 0; e < edges.size(); ++e) {
          if (claims[e] != Owner::Unclaimed) continue;
          const double val = pot.through_edge(edges[e].first) + pot.through_edge(edges[e].second);
          if (val > best) {
            best = val;
            pick = e;
          }
        }
      } else if (breaker == StrategyKind::Random) {
        std::size_t k = rng.below(left);
        for (std::size_t e = 0; e < edges.size(); ++e) {
          if (claims[e] == Owner::Unclaimed && k-- == 0) {
            pick = e;
            break;
          }
        }
      } else {
        // Greedy and potential Breakers both cut at the vertex Maker has served least.
        std::size_t best = SIZE_MAX;
        for (std::size_t e = 0; e < edges.size(); ++e) {
          if (claims[e] != Owner::Unclaimed) continue;
          const auto val = std::min(maker_deg[static_cast<std::size_t>(edges[e].first)],
                                    maker_deg[static_cast<std::size_t>(edges[e].second)]);
          if (val < best) {
            best = val;
            pick = e;
          }
        }
      }
      claims[pick] = turn == Side::Maker ? Owner::Maker : Owner::Breaker;
      --left;
      // The potential belongs to Maker here, who plays Breaker's role in the reversed game.
      pot.claim(edges[pick].first, edges[pick].second, turn == Side::Maker ? Side::Breaker : Side::Maker);
      if (turn == Side::Maker) {
        ++maker_deg[static_cast<std::size_t>(edges[pick].first)];
        ++maker_deg[static_cast<std::size_t>(edges[pick].second)];
      }
    }
    turn = other(turn);
  }
  rep.final_potential = pot.total();
  std::vector<std::pair<Vertex, Vertex>> out;
  for (std::size_t e = 0; e < edges.size(); ++e) {
    if (claims[e] == Owner::Maker) out.push_back(edges[e]);
  }
  return out;
}

}  // namespace detail

// The (1:b) game on E(G), played through its reversal: original Maker is
// Breaker of the reversed (b:1) expander game and uses the potential
// strategy; original Breaker is reversed Maker. Maker's graph is then
// checked for expansion and used as a host for each sampled tree.
inline UniversalityReport universality_game(const Graph& g, const RealParam& delta, const RealParam& d, std::size_t b,
                                            const std::vector<Tree>& trees, std::uint64_t seed,
                                            const UniversalityOptions& opts = {}) {
  if (b == 0) throw InputError("b must be at least 1");
  for (const auto& t : trees) {
    if (t.order() != g.order()) throw InputError("sampled tree order differs from host order");
  }
  UniversalityReport rep;
  rep.n = g.order();
  rep.b = b;
  rep.d = d.str();
  rep.delta = delta.str();
  rep.breaker = to_string(opts.breaker);
  rep.first = opts.first;
  const Rng base(seed);

  const double family = detail::expander_family_size(g.order(), d);
  if (family <= opts.family_guard) {
    rep.mode = "exact_family";
    const auto h = expander_game_hypergraph(g, d, b, 1, opts.family_guard);
    rep.family_size = h.sets.size();
    // Reversed roles: original Breaker is Maker here, original Maker is Breaker.
    const auto result = play_game(h, make_strategy(opts.breaker), potential_strategy(), base.split(0).seed(),
                                  other(opts.first));
    rep.initial_potential = result.initial_potential;
    rep.final_potential = result.final_potential;
    for (std::size_t e = 0; e < h.board_size; ++e) {
      if (result.claims[e] == Owner::Breaker) rep.maker_edges.push_back(h.board_edges[e]);
    }
  } else {
    rep.mode = "singleton_surrogate";
    rep.family_size = g.order();
    rep.maker_edges = detail::play_singleton_surrogate(g, d, b, opts.breaker, opts.first, base.split(0).seed(), rep);
  }
  rep.criterion = rep.initial_potential < 0.5;

  const auto maker_graph = Graph::from_edges(static_cast<Vertex>(g.order()), rep.maker_edges);
  try {
    rep.verdict = check_expander_exact(maker_graph, d, opts.exact_check_guard);
  } catch (const TooLargeError&) {
    rep.verdict = check_expander_sampled(maker_graph, d, opts.sampled_trials, base.split(1).seed());
  }

  for (std::size_t i = 0; i < trees.size(); ++i) {
    TreeOutcome out;
    auto eo = opts.embed;
    eo.budget.seed = base.split(2 + i).seed();
    try {
      const auto er = embed_spanning_tree(maker_graph, trees[i], delta, d, eo);
      out.ok = er.ok && validate_embedding(er.embedding, trees[i].graph(), maker_graph);
      out.tree_case = er.tree_case;
      out.used_fallback = er.used_fallback;
      out.failed_stage = er.ok ? "" : er.failed_stage;
    } catch (const NoCaseError& e) {
      out.tree_case = "NoCase";
      out.failed_stage = "classify";
    }
    rep.trees.push_back(out);
  }
  return rep;
}

}  // namespace treeuniv
