#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "treeuniv/error.hpp"
#include "treeuniv/expansion.hpp"
#include "treeuniv/graph.hpp"
#include "treeuniv/hamilton.hpp"
#include "treeuniv/real_param.hpp"
#include "treeuniv/rng.hpp"
#include "treeuniv/star_matching.hpp"
#include "treeuniv/trees.hpp"

namespace treeuniv {

inline constexpr std::size_t kExactEmbedLimit = 9;

struct ForestSearch {
  bool ok = false;
  bool exhausted = false;  // the complete search space was explored without success
  std::vector<Vertex> map;  // pattern vertex -> host vertex, -1 when not part of the forest
  std::size_t backtracks = 0;
};

// Which pattern vertices to embed, where, and with what side conditions.
struct ForestRequest {
  std::vector<char> present;          // pattern vertices belonging to the forest
  std::vector<char> allowed;          // host vertices available to the forest
  std::vector<Vertex> preferred_roots;
  std::vector<std::size_t> need_ext;  // per pattern vertex: host neighbors required in `ext`
  std::vector<char> ext;
};

namespace detail {

struct ForestPlan {
  std::vector<Vertex> order;
  std::vector<Vertex> parent;
  std::vector<std::size_t> children;
};

inline ForestPlan plan_forest(const Graph& pattern, const ForestRequest& req) {
  const std::size_t n = pattern.order();
  ForestPlan plan;
  plan.parent.assign(n, -1);
  plan.children.assign(n, 0);
  std::vector<char> seen(n, 0);
  std::vector<std::vector<Vertex>> comps;
  auto grow = [&](Vertex root) {
    std::vector<Vertex> comp{root};
    seen[static_cast<std::size_t>(root)] = 1;
    for (std::size_t head = 0; head < comp.size(); ++head) {
      const Vertex v = comp[head];
      for (Vertex w : pattern.neighbors(v)) {
        if (!req.present[static_cast<std::size_t>(w)] || seen[static_cast<std::size_t>(w)]) continue;
        seen[static_cast<std::size_t>(w)] = 1;
        plan.parent[static_cast<std::size_t>(w)] = v;
        ++plan.children[static_cast<std::size_t>(v)];
        comp.push_back(w);
      }
    }
    comps.push_back(std::move(comp));
  };
  for (Vertex r : req.preferred_roots) {
    if (req.present[static_cast<std::size_t>(r)] && !seen[static_cast<std::size_t>(r)]) grow(r);
  }
  for (Vertex v = 0; v < pattern.n(); ++v) {
    if (req.present[static_cast<std::size_t>(v)] && !seen[static_cast<std::size_t>(v)]) grow(v);
  }
  std::stable_sort(comps.begin(), comps.end(), [](const auto& a, const auto& b) { return a.size() > b.size(); });
  for (const auto& c : comps) plan.order.insert(plan.order.end(), c.begin(), c.end());
  return plan;
}

}  // namespace detail

// Chronological backtracking in BFS order. Candidates for a vertex are the
// free allowed neighbors of its parent's image (any free allowed vertex for
// a root), filtered by "enough free neighbors for its children" and sorted by
// free-neighbor count, largest first. `limit` caps backtracks (0 = none);
// with rng set, equal counts are ordered randomly instead of by id.
inline ForestSearch search_forest(const Graph& host, const Graph& pattern, const ForestRequest& req,
                                  std::size_t limit, Rng* rng) {
  const auto plan = detail::plan_forest(pattern, req);
  const std::size_t k = plan.order.size();
  ForestSearch out;
  out.map.assign(pattern.order(), -1);
  if (k == 0) {
    out.ok = true;
    return out;
  }
  std::vector<char> used(host.order(), 0);
  std::vector<std::size_t> free_nb(host.order(), 0);
  std::vector<std::size_t> ext_nb(host.order(), 0);
  for (Vertex h = 0; h < host.n(); ++h) {
    for (Vertex w : host.neighbors(h)) {
      if (req.allowed[static_cast<std::size_t>(w)]) ++free_nb[static_cast<std::size_t>(h)];
      if (!req.ext.empty() && req.ext[static_cast<std::size_t>(w)]) ++ext_nb[static_cast<std::size_t>(h)];
    }
  }
  std::vector<std::uint64_t> tiebreak(host.order(), 0);
  if (rng != nullptr) {
    for (auto& x : tiebreak) x = (*rng)();
  }
  auto occupy = [&](Vertex h, bool on) {
    used[static_cast<std::size_t>(h)] = on ? 1 : 0;
    for (Vertex w : host.neighbors(h)) {
      if (on) {
        --free_nb[static_cast<std::size_t>(w)];
      } else {
        ++free_nb[static_cast<std::size_t>(w)];
      }
    }
  };
  auto usable = [&](Vertex h, Vertex x) {
    if (!req.allowed[static_cast<std::size_t>(h)] || used[static_cast<std::size_t>(h)]) return false;
    if (free_nb[static_cast<std::size_t>(h)] < plan.children[static_cast<std::size_t>(x)]) return false;
    if (!req.need_ext.empty() && ext_nb[static_cast<std::size_t>(h)] < req.need_ext[static_cast<std::size_t>(x)]) {
      return false;
    }
    return true;
  };
  auto candidates = [&](Vertex x) {
    std::vector<Vertex> c;
    const Vertex p = plan.parent[static_cast<std::size_t>(x)];
    if (p < 0) {
      for (Vertex h = 0; h < host.n(); ++h) {
        if (usable(h, x)) c.push_back(h);
      }
    } else {
      for (Vertex h : host.neighbors(out.map[static_cast<std::size_t>(p)])) {
        if (usable(h, x)) c.push_back(h);
      }
    }
    std::sort(c.begin(), c.end(), [&](Vertex a, Vertex b) {
      const auto fa = free_nb[static_cast<std::size_t>(a)];
      const auto fb = free_nb[static_cast<std::size_t>(b)];
      if (fa != fb) return fa > fb;
      const auto ta = tiebreak[static_cast<std::size_t>(a)];
      const auto tb = tiebreak[static_cast<std::size_t>(b)];
      if (ta != tb) return ta < tb;
      return a < b;
    });
    return c;
  };

  std::vector<std::vector<Vertex>> cands(k);
  std::vector<std::size_t> next(k, 0);
  std::size_t level = 0;
  cands[0] = candidates(plan.order[0]);
  for (;;) {
    const Vertex x = plan.order[level];
    if (next[level] < cands[level].size()) {
      const Vertex h = cands[level][next[level]++];
      out.map[static_cast<std::size_t>(x)] = h;
      occupy(h, true);
      if (++level == k) {
        out.ok = true;
        return out;
      }
      cands[level] = candidates(plan.order[level]);
      next[level] = 0;
      continue;
    }
    if (level == 0) {
      out.exhausted = true;
      break;
    }
    --level;
    const Vertex back = plan.order[level];
    occupy(out.map[static_cast<std::size_t>(back)], false);
    out.map[static_cast<std::size_t>(back)] = -1;
    if (limit != 0 && ++out.backtracks > limit) break;
  }
  std::fill(out.map.begin(), out.map.end(), -1);
  return out;
}

struct AlmostSpanningResult {
  bool ok = false;
  bool conclusive = false;
  Embedding embedding;
  std::size_t backtracks = 0;
  std::size_t restarts = 0;
};

namespace detail {

inline AlmostSpanningResult embed_forest_with_restarts(const Graph& host, const Graph& pattern,
                                                       const ForestRequest& req, const EmbedBudget& budget,
                                                       bool exact) {
  AlmostSpanningResult r;
  const Rng base(budget.seed);
  const std::size_t rounds = exact ? 1 : budget.max_restarts + 1;
  for (std::size_t round = 0; round < rounds; ++round) {
    Rng rng = base.split(round);
    const auto s = search_forest(host, pattern, req, exact ? 0 : budget.max_backtracks, round == 0 ? nullptr : &rng);
    r.backtracks += s.backtracks;
    r.restarts = round;
    if (s.ok) {
      r.ok = true;
      r.embedding = Embedding{s.map};
      return r;
    }
    if (s.exhausted) {
      r.conclusive = true;
      return r;
    }
  }
  return r;
}

}  // namespace detail

// Embeds T into G by BFS-order attachment with backtracking. Exhaustive (so
// failure is conclusive) when G has at most 9 vertices.
inline AlmostSpanningResult embed_almost_spanning_tree(const Graph& g, const Tree& t, const RealParam& d,
                                                       const EmbedBudget& budget = {}) {
  if (t.order() > 1 && d < RealParam::ratio(static_cast<std::int64_t>(t.max_degree()), 1)) {
    throw InputError("tree maximum degree " + std::to_string(t.max_degree()) + " exceeds d = " + d.str());
  }
  if (t.order() > g.order()) throw InputError("tree has more vertices than the host");
  ForestRequest req;
  req.present.assign(t.order(), 1);
  req.allowed.assign(g.order(), 1);
  auto r = detail::embed_forest_with_restarts(g, t.graph(), req, budget, g.order() <= kExactEmbedLimit);
  if (r.ok && !validate_embedding(r.embedding, t.graph(), g)) throw std::logic_error("forest search produced an invalid embedding");
  return r;
}

struct StageRecord {
  std::string stage;
  bool ok = false;
  std::string note;
};

struct SpanningOptions {
  EmbedBudget budget;
  std::optional<std::size_t> tau_path;
  std::optional<std::size_t> tau_leaves;
  std::optional<std::size_t> forest_slack;  // default ceil(4 Delta m)
  std::optional<std::size_t> leaf_slack;    // default ceil(Delta m)
  std::size_t attempts = 10;
  std::size_t anchor_pairs = 8;
  std::size_t hamilton_restarts = 4;
  bool allow_fallback = true;
  PartitionOptions partition{20, kDefaultExactGuard, 200};
};

struct SpanningReport {
  bool ok = false;
  Embedding embedding;
  std::string tree_case = "NoCase";
  CaseThresholds thresholds;
  std::size_t m = 0;
  std::size_t forest_slack = 0;
  std::size_t leaf_slack = 0;
  bool slack_clamped = false;
  std::size_t attempts = 0;
  std::size_t forest_components = 0;
  bool partition_verified = false;
  bool used_fallback = false;
  std::string fallback;
  std::vector<StageRecord> stages;
  std::string failed_stage;
  nlohmann::json witness;
  nlohmann::json sets = nlohmann::json::object();
};

inline nlohmann::json to_json(const SpanningReport& r) {
  nlohmann::json j;
  j["ok"] = r.ok;
  j["case"] = r.tree_case;
  j["thresholds"] = {{"tau_path", r.thresholds.path}, {"tau_leaves", r.thresholds.leaves}};
  j["m"] = r.m;
  j["forest_slack"] = r.forest_slack;
  j["leaf_slack"] = r.leaf_slack;
  j["slack_clamped"] = r.slack_clamped;
  j["attempts"] = r.attempts;
  j["forest_components"] = r.forest_components;
  j["partition_verified"] = r.partition_verified;
  j["fallback"] = r.used_fallback ? nlohmann::json(r.fallback) : nlohmann::json(nullptr);
  j["stages"] = nlohmann::json::array();
  for (const auto& s : r.stages) j["stages"].push_back({{"stage", s.stage}, {"ok", s.ok}, {"note", s.note}});
  if (!r.ok) {
    j["failed_stage"] = r.failed_stage;
    j["witness"] = r.witness;
  }
  j["sets"] = r.sets;
  if (r.ok) j["embedding"] = r.embedding.map;
  return j;
}

namespace detail {

struct StageFailure {
  std::string stage;
  nlohmann::json witness;
};

class CaseRunner {
 public:
  CaseRunner(const Graph& g, const Tree& t, const TreeDecomposition& dec, const RealParam& delta, const RealParam& d,
             const SpanningOptions& opts, SpanningReport& rep, std::uint64_t seed)
      : g_(g), t_(t), dec_(dec), delta_(delta), d_(d), opts_(opts), rep_(rep), rng_(seed), seed_(seed),
        map_(t.order(), -1), used_(g.order(), 0) {}

  std::optional<StageFailure> run(TreeCase c) {
    rep_.stages.clear();
    rep_.sets = nlohmann::json::object();
    switch (c) {
      case TreeCase::Case1: return case_bare_path();
      case TreeCase::Case2: return case_leaves_and_path();
      case TreeCase::Case3: return case_two_levels();
    }
    return StageFailure{"classify", nullptr};
  }

  Embedding embedding() const { return Embedding{map_}; }

 private:
  std::size_t default_forest_slack() const {
    return opts_.forest_slack ? *opts_.forest_slack : static_cast<std::size_t>(delta_.ceil_times(4 * static_cast<std::int64_t>(rep_.m)));
  }
  std::size_t default_leaf_slack() const {
    return opts_.leaf_slack ? *opts_.leaf_slack : static_cast<std::size_t>(delta_.ceil_times(static_cast<std::int64_t>(rep_.m)));
  }

  void stage(const std::string& name, bool ok, const std::string& note = "") { rep_.stages.push_back({name, ok, note}); }

  static std::vector<Vertex> members_of(const std::vector<char>& mask) {
    std::vector<Vertex> out;
    for (std::size_t i = 0; i < mask.size(); ++i) {
      if (mask[i]) out.push_back(static_cast<Vertex>(i));
    }
    return out;
  }

  std::vector<char> host_mask(const VertexSet& s) const {
    std::vector<char> m(g_.order(), 0);
    for (Vertex v : s) m[static_cast<std::size_t>(v)] = 1;
    return m;
  }

  std::optional<Partition> partition(const std::vector<std::size_t>& sizes) {
    const auto pr = partition_vertices(g_, d_, sizes, rng_.split(1).seed(), opts_.partition);
    rep_.partition_verified = pr.ok;
    std::string note = pr.ok ? "verified" : "unverified after " + std::to_string(pr.attempts) + " draws";
    note += pr.exact_verification ? " (exact)" : " (sampled)";
    stage("partition", true, note);
    return pr.partition;
  }

  // Embeds the forest `present` of T into `allowed`, optionally requiring
  // anchor vertices to keep neighbors in `ext`.
  std::optional<StageFailure> embed_forest(const std::vector<char>& present, const VertexSet& allowed,
                                           const std::vector<Vertex>& anchors, const VertexSet& ext) {
    ForestRequest req;
    req.present = present;
    req.allowed = host_mask(allowed);
    req.preferred_roots = anchors;
    if (!anchors.empty()) {
      req.need_ext.assign(t_.order(), 0);
      for (Vertex a : anchors) req.need_ext[static_cast<std::size_t>(a)] = 1;
      req.ext = host_mask(ext);
    }
    std::size_t comps = 0;
    {
      std::vector<char> seen(t_.order(), 0);
      for (Vertex v = 0; v < t_.n(); ++v) {
        if (!present[static_cast<std::size_t>(v)] || seen[static_cast<std::size_t>(v)]) continue;
        ++comps;
        std::vector<Vertex> stack{v};
        seen[static_cast<std::size_t>(v)] = 1;
        while (!stack.empty()) {
          const Vertex x = stack.back();
          stack.pop_back();
          for (Vertex w : t_.neighbors(x)) {
            if (present[static_cast<std::size_t>(w)] && !seen[static_cast<std::size_t>(w)]) {
              seen[static_cast<std::size_t>(w)] = 1;
              stack.push_back(w);
            }
          }
        }
      }
    }
    rep_.forest_components = comps;
    EmbedBudget b = opts_.budget;
    b.seed = rng_.split(2).seed();
    const bool exact = allowed.size() <= kExactEmbedLimit;
    const auto r = embed_forest_with_restarts(g_, t_.graph(), req, b, exact);
    if (!r.ok) {
      stage("forest", false, r.conclusive ? "no embedding exists" : "budget exhausted");
      return StageFailure{"forest", {{"backtracks", r.backtracks}, {"conclusive", r.conclusive},
                                     {"forest_vertices", members_of(present)}, {"host_part", allowed.members()}}};
    }
    for (Vertex v = 0; v < t_.n(); ++v) {
      if (present[static_cast<std::size_t>(v)]) place(v, r.embedding[static_cast<std::size_t>(v)]);
    }
    stage("forest", true, std::to_string(comps) + " component(s), " + std::to_string(r.backtracks) + " backtracks");
    return std::nullopt;
  }

  void place(Vertex tree_v, Vertex host_v) {
    map_[static_cast<std::size_t>(tree_v)] = host_v;
    used_[static_cast<std::size_t>(host_v)] = 1;
  }

  VertexSet images(const std::vector<Vertex>& tree_vs) const {
    std::vector<Vertex> out;
    for (Vertex v : tree_vs) out.push_back(map_[static_cast<std::size_t>(v)]);
    return VertexSet(std::move(out));
  }

  VertexSet unused() const {
    std::vector<Vertex> out;
    for (Vertex h = 0; h < g_.n(); ++h) {
      if (!used_[static_cast<std::size_t>(h)]) out.push_back(h);
    }
    return VertexSet(std::move(out));
  }

  // Outside neighbor of a path end: the neighbor within `alive` not on the path.
  Vertex outside_neighbor(Vertex end, const std::vector<char>& on_path, const std::vector<char>& alive,
                          Vertex avoid) const {
    for (Vertex w : t_.neighbors(end)) {
      if (alive[static_cast<std::size_t>(w)] && !on_path[static_cast<std::size_t>(w)] && w != avoid) return w;
    }
    return -1;
  }

  // Hamilton path through `free_set` whose ends are adjacent to the images of
  // s_F and t_F; anchors from `preferred` are tried first.
  std::optional<StageFailure> route_path(const std::vector<Vertex>& path, Vertex s_f, Vertex t_f,
                                         const VertexSet& free_set, const VertexSet& preferred) {
    const Vertex hs = map_[static_cast<std::size_t>(s_f)];
    const Vertex ht = map_[static_cast<std::size_t>(t_f)];
    auto anchors = [&](Vertex h) {
      std::vector<Vertex> first;
      std::vector<Vertex> second;
      for (Vertex w : g_.neighbors(h)) {
        if (!free_set.contains(w)) continue;
        (preferred.contains(w) ? first : second).push_back(w);
      }
      first.insert(first.end(), second.begin(), second.end());
      return first;
    };
    const auto as = anchors(hs);
    const auto at = anchors(ht);
    rep_.sets["anchor_candidates"] = {{"s", as}, {"t", at}};
    if (path.size() == 1) {
      for (Vertex v : as) {
        if (std::find(at.begin(), at.end(), v) != at.end() && free_set.size() == 1) {
          place(path[0], v);
          stage("hamilton", true, "single-vertex path");
          return std::nullopt;
        }
      }
      stage("hamilton", false, "no common anchor");
      return StageFailure{"hamilton", {{"anchors_s", as}, {"anchors_t", at}}};
    }
    EmbedBudget hb = opts_.budget;
    hb.max_restarts = opts_.hamilton_restarts;
    std::size_t tried = 0;
    for (Vertex v : as) {
      for (Vertex w : at) {
        if (v == w) continue;
        if (tried++ >= opts_.anchor_pairs) break;
        hb.seed = rng_.split(100 + tried).seed();
        const auto h = hamilton_path_within(g_, free_set, v, w, hb);
        if (!h.found) {
          if (h.conclusive) {
            stage("hamilton", false, "no Hamilton path for this anchor pair (exhaustive)");
          }
          continue;
        }
        for (std::size_t i = 0; i < path.size(); ++i) place(path[i], h.path[i]);
        rep_.sets["anchors"] = {v, w};
        stage("hamilton", true, "anchor pair " + std::to_string(tried));
        return std::nullopt;
      }
      if (tried >= opts_.anchor_pairs) break;
    }
    stage("hamilton", false, std::to_string(tried) + " anchor pairs tried");
    return StageFailure{"hamilton", {{"anchors_s", as}, {"anchors_t", at}, {"pairs_tried", tried},
                                     {"free_set", free_set.members()}}};
  }

  // Star matching from the images of `centers` onto `targets`; children(c)
  // lists the tree vertices that c's image must receive.
  std::optional<StageFailure> match_children(const std::string& name, const std::vector<Vertex>& centers,
                                             const std::vector<std::vector<Vertex>>& children,
                                             const VertexSet& targets) {
    StarDemand dem;
    std::vector<std::pair<Vertex, std::size_t>> by_image;
    for (std::size_t i = 0; i < centers.size(); ++i) by_image.emplace_back(map_[static_cast<std::size_t>(centers[i])], i);
    std::sort(by_image.begin(), by_image.end());
    std::vector<Vertex> imgs;
    for (const auto& [img, i] : by_image) {
      imgs.push_back(img);
      dem.demand.push_back(children[i].size());
    }
    dem.centers = VertexSet(imgs);
    dem.targets = targets;
    const auto sm = star_matching(g_, dem);
    if (!sm.feasible) {
      std::vector<Vertex> tree_x;
      for (Vertex h : *sm.hall_violator) {
        for (const auto& [img, i] : by_image) {
          if (img == h) tree_x.push_back(centers[i]);
        }
      }
      const auto nx = external_neighborhood(g_, *sm.hall_violator).intersect(targets).size();
      std::size_t need = 0;
      for (const auto& [img, i] : by_image) {
        if (sm.hall_violator->contains(img)) need += children[i].size();
      }
      stage(name, false, "Hall condition violated");
      return StageFailure{name, {{"hall_violator_tree", tree_x}, {"hall_violator_host", sm.hall_violator->members()},
                                 {"neighbors_in_targets", nx}, {"demand", need}}};
    }
    if (!star_matching_is_valid(g_, dem, sm.parts)) throw std::logic_error("star matching output failed validation");
    for (std::size_t j = 0; j < by_image.size(); ++j) {
      const auto& kids = children[by_image[j].second];
      for (std::size_t q = 0; q < kids.size(); ++q) place(kids[q], sm.parts[j][q]);
    }
    stage(name, true, std::to_string(targets.size()) + " vertices matched");
    return std::nullopt;
  }

  // Picks `count` vertices of `pool` avoiding `z`, highest portal degree first.
  VertexSet choose_avoiding(const VertexSet& pool, const VertexSet& z, const VertexSet& portals, std::size_t count,
                            std::size_t& z_used) const {
    auto portal_degree = [&](Vertex u) {
      std::size_t c = 0;
      for (Vertex w : g_.neighbors(u)) c += portals.contains(w) ? 1 : 0;
      return c;
    };
    std::vector<std::pair<std::size_t, Vertex>> good;
    std::vector<std::pair<std::size_t, Vertex>> bad;
    for (Vertex u : pool) (z.contains(u) ? bad : good).emplace_back(portal_degree(u), u);
    auto order = [](const auto& a, const auto& b) { return a.first != b.first ? a.first > b.first : a.second < b.second; };
    std::sort(good.begin(), good.end(), order);
    std::sort(bad.begin(), bad.end(), order);
    good.insert(good.end(), bad.begin(), bad.end());
    std::vector<Vertex> out;
    z_used = 0;
    for (std::size_t i = 0; i < count && i < good.size(); ++i) {
      out.push_back(good[i].second);
      z_used += z.contains(good[i].second) ? 1 : 0;
    }
    return VertexSet(std::move(out));
  }

  // {u in pool : |N(u) ∩ portals| < m}
  VertexSet exceptional(const VertexSet& pool, const VertexSet& portals) {
    const std::size_t m = rep_.m;
    if (portals.size() < m * m) {
      stage("exceptional", true, "portal set smaller than m^2; exceptional-set bound not applicable");
    }
    std::vector<Vertex> z;
    for (Vertex u : pool) {
      std::size_t c = 0;
      for (Vertex w : g_.neighbors(u)) c += portals.contains(w) ? 1 : 0;
      if (c + 1 <= m) z.push_back(u);
    }
    return VertexSet(std::move(z));
  }

  bool all_have_portal_degree(const VertexSet& chosen, const VertexSet& portals) const {
    for (Vertex u : chosen) {
      std::size_t c = 0;
      for (Vertex w : g_.neighbors(u)) c += portals.contains(w) ? 1 : 0;
      if (c < rep_.m) return false;
    }
    return true;
  }

  std::optional<StageFailure> case_bare_path() {
    const auto& longest = dec_.longest_bare_path;
    const std::size_t len = std::clamp<std::size_t>(rep_.thresholds.path, 1, longest.size());
    const std::vector<Vertex> path(longest.begin(), longest.begin() + static_cast<std::ptrdiff_t>(len));
    std::vector<char> on_path(t_.order(), 0);
    for (Vertex v : path) on_path[static_cast<std::size_t>(v)] = 1;
    std::vector<char> forest(t_.order(), 1);
    for (Vertex v : path) forest[static_cast<std::size_t>(v)] = 0;
    const std::vector<char> all(t_.order(), 1);
    const Vertex s_f = outside_neighbor(path.front(), on_path, all, -1);
    const Vertex t_f = outside_neighbor(path.back(), on_path, all, path.size() == 1 ? s_f : -1);
    const std::size_t forest_size = t_.order() - len;

    std::size_t slack = default_forest_slack();
    const std::size_t cap = len - std::min<std::size_t>(len, 2);
    if (slack > cap) {
      slack = cap;
      rep_.slack_clamped = true;
    }
    rep_.forest_slack = slack;
    const auto part = partition({forest_size + slack, len - slack});
    const auto& u_f = part->parts[0];
    const auto& u_p = part->parts[1];
    rep_.sets["U_F"] = u_f.members();
    rep_.sets["U_P"] = u_p.members();
    if (auto f = embed_forest(forest, u_f, {s_f, t_f}, u_p)) return f;
    const auto w_p = unused();
    rep_.sets["W_P"] = w_p.members();
    return route_path(path, s_f, t_f, w_p, u_p);
  }

  std::optional<StageFailure> case_leaves_and_path() {
    const auto& q = dec_.longest_second_level_bare_path;
    const std::size_t half = std::max<std::size_t>(1, rep_.thresholds.path / 2);
    const std::size_t h = std::min(half, q.size());
    std::vector<Vertex> first(q.begin(), q.begin() + static_cast<std::ptrdiff_t>(h));
    std::vector<Vertex> path = first;
    const std::size_t kcount = dec_.leaf_neighbors.size();
    auto k_on = [&](const std::vector<Vertex>& p) {
      std::size_t c = 0;
      for (Vertex v : p) c += dec_.leaf_neighbors.contains(v) ? 1 : 0;
      return c;
    };
    std::string choice = "first subpath";
    if (2 * k_on(first) > kcount && 2 * h <= q.size()) {
      std::vector<Vertex> second(q.begin() + static_cast<std::ptrdiff_t>(h), q.begin() + static_cast<std::ptrdiff_t>(2 * h));
      path = second;
      choice = "second subpath";
    }
    if (2 * k_on(path) > kcount) choice += " (holds more than |K|/2 portals)";
    stage("select_path", true, choice + ", " + std::to_string(path.size()) + " vertices");

    std::vector<char> on_path(t_.order(), 0);
    for (Vertex v : path) on_path[static_cast<std::size_t>(v)] = 1;
    std::vector<char> alive(t_.order(), 1);  // T - L
    for (Vertex v : dec_.leaves) alive[static_cast<std::size_t>(v)] = 0;
    std::vector<char> forest = alive;
    for (Vertex v : path) forest[static_cast<std::size_t>(v)] = 0;
    const Vertex s_f = outside_neighbor(path.front(), on_path, alive, -1);
    const Vertex t_f = outside_neighbor(path.back(), on_path, alive, path.size() == 1 ? s_f : -1);
    std::size_t forest_size = 0;
    for (char c : forest) forest_size += c ? 1 : 0;
    const std::size_t nl = dec_.leaves.size();

    std::size_t fs = default_forest_slack();
    std::size_t ls = default_leaf_slack();
    const std::size_t cap = path.size() - std::min<std::size_t>(path.size(), 2);
    if (fs + ls > cap) {
      rep_.slack_clamped = true;
      ls = std::min(ls, cap / 2);
      fs = std::min(fs, cap - ls);
    }
    rep_.forest_slack = fs;
    rep_.leaf_slack = ls;
    const auto part = partition({forest_size + fs, nl + ls, path.size() - fs - ls});
    const auto& u_f = part->parts[0];
    const auto& u_l = part->parts[1];
    const auto& u_p = part->parts[2];
    rep_.sets["U_F"] = u_f.members();
    rep_.sets["U_L"] = u_l.members();
    rep_.sets["U_P"] = u_p.members();
    if (auto f = embed_forest(forest, u_f, {s_f, t_f}, u_p)) return f;

    std::vector<Vertex> k_f;
    for (Vertex v : dec_.leaf_neighbors) {
      if (forest[static_cast<std::size_t>(v)]) k_f.push_back(v);
    }
    const auto portals = images(k_f);
    const auto z = exceptional(u_l, portals);
    std::size_t z_used = 0;
    const auto w_l = choose_avoiding(u_l, z, portals, nl, z_used);
    rep_.sets["Z"] = z.members();
    rep_.sets["W_L"] = w_l.members();
    stage("reserve_leaves", true,
          "|Z| = " + std::to_string(z.size()) + ", exceptional used " + std::to_string(z_used) +
              (all_have_portal_degree(w_l, portals) ? ", every reserved vertex sees >= m portals" : ""));

    std::vector<Vertex> free_v;
    for (Vertex h2 = 0; h2 < g_.n(); ++h2) {
      if (!used_[static_cast<std::size_t>(h2)] && !w_l.contains(h2)) free_v.push_back(h2);
    }
    const VertexSet w_p(free_v);
    rep_.sets["W_P"] = w_p.members();
    if (auto f = route_path(path, s_f, t_f, w_p, u_p)) return f;

    std::vector<Vertex> centers;
    std::vector<std::vector<Vertex>> kids;
    for (Vertex k : dec_.leaf_neighbors) {
      centers.push_back(k);
      std::vector<Vertex> ch;
      for (Vertex w : t_.neighbors(k)) {
        if (dec_.leaves.contains(w)) ch.push_back(w);
      }
      kids.push_back(ch);
    }
    return match_children("leaves", centers, kids, w_l);
  }

  std::optional<StageFailure> case_two_levels() {
    const auto& mprime = dec_.second_level_leaves.members();
    const std::size_t count = std::min(rep_.thresholds.leaves, mprime.size());
    const std::vector<Vertex> mset(mprime.begin(), mprime.begin() + static_cast<std::ptrdiff_t>(count));
    std::vector<char> in_m(t_.order(), 0);
    for (Vertex v : mset) in_m[static_cast<std::size_t>(v)] = 1;
    std::vector<char> forest(t_.order(), 1);
    std::vector<Vertex> lset;
    std::vector<Vertex> kset;
    std::vector<std::vector<Vertex>> m_kids;
    for (Vertex v : mset) {
      forest[static_cast<std::size_t>(v)] = 0;
      std::vector<Vertex> ch;
      for (Vertex w : t_.neighbors(v)) {
        if (dec_.leaves.contains(w)) {
          ch.push_back(w);
          lset.push_back(w);
          forest[static_cast<std::size_t>(w)] = 0;
        } else {
          kset.push_back(w);
        }
      }
      m_kids.push_back(ch);
    }
    std::sort(lset.begin(), lset.end());
    std::sort(kset.begin(), kset.end());
    kset.erase(std::unique(kset.begin(), kset.end()), kset.end());
    std::size_t forest_size = 0;
    for (char c : forest) forest_size += c ? 1 : 0;

    std::size_t fs = default_forest_slack();
    std::size_t ms = default_leaf_slack();
    const std::size_t cap = lset.size();
    if (fs + ms > cap) {
      rep_.slack_clamped = true;
      ms = std::min(ms, cap / 2);
      fs = std::min(fs, cap - ms);
    }
    rep_.forest_slack = fs;
    rep_.leaf_slack = ms;
    const auto part = partition({forest_size + fs, mset.size() + ms, lset.size() - fs - ms});
    const auto& u_f = part->parts[0];
    const auto& u_m = part->parts[1];
    rep_.sets["U_F"] = u_f.members();
    rep_.sets["U_M"] = u_m.members();
    rep_.sets["U_L"] = part->parts[2].members();
    if (auto f = embed_forest(forest, u_f, {}, VertexSet{})) return f;

    const auto portals = images(kset);
    const auto z = exceptional(u_m, portals);
    std::size_t z_used = 0;
    const auto w_m = choose_avoiding(u_m, z, portals, mset.size(), z_used);
    rep_.sets["Z"] = z.members();
    rep_.sets["W_M"] = w_m.members();
    stage("reserve_second_level", true,
          "|Z| = " + std::to_string(z.size()) + ", exceptional used " + std::to_string(z_used) +
              (all_have_portal_degree(w_m, portals) ? ", every reserved vertex sees >= m portals" : ""));

    std::vector<std::vector<Vertex>> k_kids;
    for (Vertex k : kset) {
      std::vector<Vertex> ch;
      for (Vertex w : t_.neighbors(k)) {
        if (in_m[static_cast<std::size_t>(w)]) ch.push_back(w);
      }
      k_kids.push_back(ch);
    }
    if (auto f = match_children("second_level_leaves", kset, k_kids, w_m)) return f;
    const auto w_l = unused();
    rep_.sets["W_L"] = w_l.members();
    return match_children("leaves", mset, m_kids, w_l);
  }

  const Graph& g_;
  const Tree& t_;
  const TreeDecomposition& dec_;
  RealParam delta_;
  RealParam d_;
  const SpanningOptions& opts_;
  SpanningReport& rep_;
  Rng rng_;
  std::uint64_t seed_;
  std::vector<Vertex> map_;
  std::vector<char> used_;
};

inline bool run_fallback(const Graph& g, const Tree& t, const SpanningOptions& opts, SpanningReport& rep) {
  ForestRequest req;
  req.present.assign(t.order(), 1);
  req.allowed.assign(g.order(), 1);
  const bool exact = g.order() <= kExactEmbedLimit;
  EmbedBudget b = opts.budget;
  b.seed = Rng(opts.budget.seed).split(999).seed();
  const auto r = embed_forest_with_restarts(g, t.graph(), req, b, exact);
  rep.used_fallback = true;
  rep.fallback = exact ? "exact" : "greedy";
  rep.stages.push_back({"fallback", r.ok, rep.fallback + (r.conclusive ? ", exhaustive" : "")});
  if (!r.ok) return false;
  rep.embedding = r.embedding;
  return true;
}

}  // namespace detail

// Spanning-tree embedding through the three-case pipeline: classify T, then
// run the matching case with fresh seeds up to opts.attempts times. With
// allow_fallback, a whole-tree search (exhaustive for n <= 9) takes over when
// the pipeline fails or no case applies.
inline SpanningReport embed_spanning_tree(const Graph& g, const Tree& t, const RealParam& delta, const RealParam& d,
                                          const SpanningOptions& opts = {}) {
  if (t.order() != g.order()) {
    throw InputError("tree has " + std::to_string(t.order()) + " vertices, host has " + std::to_string(g.order()));
  }
  if (t.order() > 1 && delta < RealParam::ratio(static_cast<std::int64_t>(t.max_degree()), 1)) {
    throw InputError("tree maximum degree " + std::to_string(t.max_degree()) + " exceeds Delta = " + delta.str());
  }
  SpanningReport rep;
  rep.m = m_param(g.order(), d);
  rep.thresholds = default_thresholds(delta, rep.m);
  if (opts.tau_path) rep.thresholds.path = *opts.tau_path;
  if (opts.tau_leaves) rep.thresholds.leaves = *opts.tau_leaves;

  if (t.order() <= 2) {
    if (!detail::run_fallback(g, t, opts, rep)) {
      rep.failed_stage = "fallback";
      return rep;
    }
    rep.ok = validate_embedding(rep.embedding, t.graph(), g);
    return rep;
  }

  const auto dec = decompose(t);
  std::optional<TreeCase> which;
  try {
    which = classify_case(dec, rep.thresholds);
  } catch (const NoCaseError& e) {
    if (!opts.allow_fallback) throw;
    rep.stages.push_back({"classify", false, e.what()});
    rep.witness = {{"longest_bare_path", e.longest_path}, {"longest_second_level_bare_path", e.longest_second_path},
                   {"leaves", e.leaf_count}, {"second_level_leaves", e.second_leaf_count}};
  }

  if (which) {
    rep.tree_case = to_string(*which);
    const Rng base(opts.budget.seed);
    for (std::size_t a = 0; a < std::max<std::size_t>(1, opts.attempts); ++a) {
      rep.attempts = a + 1;
      detail::CaseRunner runner(g, t, dec, delta, d, opts, rep, base.split(a).seed());
      const auto failure = runner.run(*which);
      if (!failure) {
        rep.embedding = runner.embedding();
        if (!validate_embedding(rep.embedding, t.graph(), g)) throw std::logic_error("pipeline produced an invalid embedding");
        rep.ok = true;
        rep.failed_stage.clear();
        rep.witness = nullptr;
        return rep;
      }
      rep.failed_stage = failure->stage;
      rep.witness = failure->witness;
    }
  } else {
    rep.failed_stage = "classify";
  }

  if (opts.allow_fallback && detail::run_fallback(g, t, opts, rep)) {
    if (!validate_embedding(rep.embedding, t.graph(), g)) throw std::logic_error("fallback produced an invalid embedding");
    rep.ok = true;
  }
  return rep;
}

}  // namespace treeuniv
