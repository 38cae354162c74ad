#include <catch_amalgamated.hpp>

#include <cmath>
#include <map>
#include <set>

#include "treeuniv/expansion.hpp"
#include "treeuniv/generators.hpp"

using namespace treeuniv;

namespace {

// Straight triple/quintuple loops, no pruning.
std::size_t max_edges_on_k_set(const Graph& g, std::size_t k) {
  std::size_t best = 0;
  const int n = g.n();
  std::vector<int> idx(k);
  auto rec = [&](auto&& self, std::size_t level, int start) -> void {
    if (level == k) {
      std::size_t e = 0;
      for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = i + 1; j < k; ++j) e += g.has_edge(idx[i], idx[j]) ? 1 : 0;
      }
      best = std::max(best, e);
      return;
    }
    for (int v = start; v < n; ++v) {
      idx[level] = v;
      self(self, level + 1, v + 1);
    }
  };
  rec(rec, 0, 0);
  return best;
}

bool is_regular_simple(const Graph& g, std::size_t r) {
  for (Vertex v = 0; v < g.n(); ++v) {
    if (g.degree(v) != r) return false;
  }
  return g.size() * 2 == r * g.order();
}

}  // namespace

TEST_CASE("complete graph") {
  CHECK(complete_graph(1).size() == 0);
  CHECK(complete_graph(4).size() == 6);
  CHECK(complete_graph(10).size() == 45);
}

TEST_CASE("gnp extremes and concentration") {
  CHECK(gen_gnp(30, 0.0, 4).size() == 0);
  CHECK(gen_gnp(30, 1.0, 4) == complete_graph(30));
  CHECK_THROWS_AS(gen_gnp(5, 1.5, 0), InputError);
  const double pairs = 1000.0 * 999.0 / 2.0;
  const double sd = std::sqrt(pairs * 0.25);
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    const auto g = gen_gnp(1000, 0.5, seed);
    CHECK(std::fabs(static_cast<double>(g.size()) - pairs / 2) < 5 * sd);
  }
  CHECK(gen_gnp(50, 0.3, 77) == gen_gnp(50, 0.3, 77));
  CHECK_FALSE(gen_gnp(50, 0.3, 77) == gen_gnp(50, 0.3, 78));
}

TEST_CASE("random regular graphs") {
  const auto c4 = gen_random_regular(4, 2, 3);
  CHECK(is_regular_simple(c4, 2));
  CHECK(is_connected(c4));
  CHECK(girth(c4) == 4);
  CHECK(gen_random_regular(9, 0, 1).size() == 0);
  CHECK(gen_random_regular(6, 5, 1) == complete_graph(6));
  CHECK_THROWS_AS(gen_random_regular(5, 3, 0), InputError);
  CHECK_THROWS_AS(gen_random_regular(5, 5, 0), InputError);

  for (std::size_t r : {1u, 2u, 3u, 4u, 5u, 7u, 10u}) {
    for (std::size_t n : {12u, 30u, 101u}) {
      if ((r * n) % 2 != 0) continue;
      for (std::uint64_t seed = 0; seed < 4; ++seed) {
        const auto g = gen_random_regular(n, r, seed);
        INFO("n " << n << " r " << r << " seed " << seed);
        CHECK(is_regular_simple(g, r));
        CHECK(g == gen_random_regular(n, r, seed));
      }
    }
  }
  CHECK(is_regular_simple(gen_random_regular(20, 15, 5), 15));
  CHECK(is_regular_simple(gen_random_regular(400, 30, 5), 30));
}

TEST_CASE("regular 2-factors on 4 vertices cover the three labeled 4-cycles") {
  std::set<std::vector<Edge>> seen;
  for (std::uint64_t seed = 0; seed < 200; ++seed) seen.insert(gen_random_regular(4, 2, seed).edges());
  CHECK(seen.size() == 3);
}

TEST_CASE("locally sparse checker") {
  const auto k4 = complete_graph(4);
  CHECK(check_locally_sparse(k4, 3, 3));
  CHECK_FALSE(check_locally_sparse(k4, 3, 2));
  const auto c5 = Graph::from_edges(5, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {0, 4}});
  CHECK(check_locally_sparse(c5, 3, 2));
  CHECK(check_locally_sparse(Graph::from_edges(8, std::vector<Edge>{}), 4, 0));
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const auto g = gen_gnp(10, 0.5, seed);
    for (std::size_t k = 3; k <= 5; ++k) {
      const auto top = max_edges_on_k_set(g, k);
      for (std::size_t l = 0; l <= k * (k - 1) / 2; ++l) CHECK(check_locally_sparse(g, k, l) == (top <= l));
    }
  }
  CHECK_THROWS_AS(check_locally_sparse(complete_graph(200), 6, 3), TooLargeError);
}

TEST_CASE("locally sparse generator") {
  const auto tri = gen_locally_sparse_detailed(4, 3, 3, 1.0, 0);
  CHECK(max_edges_on_k_set(tri.graph, 3) <= 2);
  CHECK(tri.family_size == 1);
  CHECK(tri.graph.size() == 3);
  CHECK(tri.verified);

  CHECK(gen_locally_sparse(20, 3, 3, 0.0, 1).size() == 0);

  const auto k5free = gen_locally_sparse_detailed(40, 5, 10, 0.3, 8);
  CHECK(k5free.verified);
  CHECK(k5free.verified_exactly);
  CHECK(max_edges_on_k_set(k5free.graph, 5) < 10);

  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto res = gen_locally_sparse_detailed(14, 4, 4, 0.5, seed);
    CHECK(max_edges_on_k_set(res.graph, 4) <= 3);
    CHECK(res.base_edges == res.graph.size() + 4 * res.family_size);
    // Edges only disappear.
    const auto base = gen_gnp(14, 0.5, Rng(seed).split(0).seed());
    for (const auto& [u, v] : res.graph.edges()) CHECK(base.has_edge(u, v));
  }
  CHECK_THROWS_AS(gen_locally_sparse(10, 3, 1, 0.5, 0), InputError);
}

TEST_CASE("doubled construction") {
  const auto one = gen_doubled(Graph::from_edges(2, {{0, 1}}), 5);
  CHECK(one.order() == 4);
  CHECK(one.size() == 2);
  CHECK(one.max_degree() == 1);

  std::set<std::vector<Edge>> variants;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const auto g = gen_doubled(complete_graph(3), seed);
    CHECK(g.order() == 6);
    CHECK(g.size() == 6);
    for (Vertex v = 0; v < 6; ++v) CHECK(g.degree(v) == 2);
    variants.insert(g.edges());
  }
  CHECK(variants.size() == 8);

  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto h = gen_gnp(8, 0.4, seed);
    const auto g = gen_doubled(h, seed + 1);
    CHECK(g.size() == 2 * h.size());
    std::map<Edge, int> hits;
    for (const auto& [a, b] : g.edges()) {
      const Vertex v = a / 2;
      const Vertex w = b / 2;
      REQUIRE(h.has_edge(v, w));
      ++hits[{std::min(v, w), std::max(v, w)}];
    }
    for (const auto& e : h.edges()) CHECK(hits[e] == 2);
  }
}

TEST_CASE("doubled graphs have radius at least the base girth") {
  int checked = 0;
  for (std::uint64_t seed = 0; seed < 300 && checked < 60; ++seed) {
    const std::size_t n = 4 + seed % 3;
    const auto h = gen_gnp(n, 0.5, seed);
    const auto g0 = girth(h);
    if (!g0 || !is_connected(h)) continue;
    const auto g = gen_doubled(h, seed);
    if (!is_connected(g)) continue;
    CHECK(radius(g) >= *g0);
    ++checked;
  }
  CHECK(checked > 20);
}

TEST_CASE("gnp union bound is an upper bound on the failure frequency") {
  const std::size_t n = 12;
  const double p = 0.6;
  const RealParam d = 2;
  const double bound = gnp_expander_failure_bound(n, p, d);
  int failures = 0;
  const int trials = 400;
  for (int t = 0; t < trials; ++t) {
    failures += check_expander_exact(gen_gnp(n, p, 5000 + static_cast<std::uint64_t>(t)), d).failed() ? 1 : 0;
  }
  const double freq = static_cast<double>(failures) / trials;
  const double sigma = std::sqrt(std::max(bound * (1 - bound), 1e-4) / trials);
  CHECK(freq <= bound + 5 * sigma);
  CHECK(gnp_expander_failure_bound(n, 1.0, d) == 0.0);
  CHECK(gnp_expander_failure_bound(n, 0.0, d) == 1.0);
}

TEST_CASE("sparse density predicate") {
  // K_n: e(X,Y) >= |X|(|Y|-|X|) outweighs 48 d |X||Y| ln n / n only for tiny d.
  const auto k = complete_graph(12);
  const auto strong = sparse_density_holds(k, RealParam::ratio(1, 20));
  CHECK(strong.holds);
  const auto weak = sparse_density_holds(k, 2);
  CHECK_FALSE(weak.holds);
  CHECK(weak.witness_x.has_value());
  CHECK_FALSE(sparse_density_holds(Graph::from_edges(12, std::vector<Edge>{}), 1).holds);
}

TEST_CASE("gen spec json round trip and dispatch") {
  GenSpec s;
  s.kind = GenSpec::Kind::LocallySparse;
  s.n = 20;
  s.k = 3;
  s.l = 3;
  s.p = 0.4;
  s.seed = 99;
  const auto j = to_json(s);
  CHECK(j["kind"] == "locally_sparse");
  const auto back = gen_spec_from_json(j);
  CHECK(to_json(back) == j);
  CHECK(generate(back) == generate(s));
  CHECK_THROWS_AS(kind_from_name("bogus"), InputError);
}
