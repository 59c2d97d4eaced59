#include <catch_amalgamated.hpp>

#include <numeric>

#include "quadcore/alg_d.hpp"
#include "quadcore/datasets.hpp"
#include "support.hpp"

using namespace quadcore;
using quadcore::testing::line_space;
using quadcore::testing::uniform_space;

namespace {

ConflictGraph graph_of(std::size_t m, const std::vector<std::pair<std::size_t, std::size_t>>& edges) {
  ConflictGraph g;
  g.vertices.resize(m);
  std::iota(g.vertices.begin(), g.vertices.end(), VertexId{0});
  g.adjacency.assign(m, {});
  for (auto [a, b] : edges) g.add_edge(a, b);
  return g;
}

// max over vertex subsets of the minimum induced degree
std::size_t degeneracy_by_subsets(const ConflictGraph& g) {
  const std::size_t m = g.size();
  std::size_t best = 0;
  for (std::uint32_t mask = 1; mask < (1u << m); ++mask) {
    std::size_t lo = m;
    for (std::size_t a = 0; a < m; ++a) {
      if (!(mask >> a & 1)) continue;
      std::size_t d = 0;
      for (auto b : g.adjacency[a]) d += mask >> b & 1;
      lo = std::min(lo, d);
    }
    best = std::max(best, lo);
  }
  return best;
}

OrderedEdgeSequence exact_internal_order(const MetricSpace& s, std::span<const VertexId> cls) {
  std::vector<Edge> e;
  for (std::size_t a = 0; a < cls.size(); ++a)
    for (std::size_t b = a + 1; b < cls.size(); ++b) e.emplace_back(cls[a], cls[b]);
  std::sort(e.begin(), e.end(), [&](const Edge& x, const Edge& y) { return s.shorter(x, y); });
  return OrderedEdgeSequence(std::move(e), {SortQuality::Kind::alpha_sorted, 1.0});
}

}  // namespace

TEST_CASE("degeneracy colouring examples", "[alg_d][coloring]") {
  auto empty = graph_of(5, {});
  auto c0 = degeneracy_color(empty);
  CHECK(c0.colors == 1);
  CHECK(c0.degeneracy == 0);

  auto path = graph_of(5, {{0, 1}, {1, 2}, {2, 3}, {3, 4}});
  auto c1 = degeneracy_color(path);
  CHECK(c1.colors <= 2);
  CHECK(is_proper(path, c1));

  auto clique = graph_of(4, {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}});
  auto c2 = degeneracy_color(clique);
  CHECK(c2.degeneracy == 3);
  CHECK(c2.colors == 4);
  CHECK(is_proper(clique, c2));
  CHECK(clique.edge_count() == 6);
  CHECK_THROWS_AS(clique.add_edge(1, 1), Error);
}

TEST_CASE("degeneracy matches subset enumeration on random graphs", "[alg_d][coloring][property]") {
  auto rng = make_rng(17);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t m = 3 + trial % 8;
    std::bernoulli_distribution coin(0.15 + 0.01 * trial);
    std::vector<std::pair<std::size_t, std::size_t>> edges;
    for (std::size_t a = 0; a < m; ++a)
      for (std::size_t b = a + 1; b < m; ++b)
        if (coin(rng)) edges.emplace_back(a, b);
    auto g = graph_of(m, edges);
    auto c = degeneracy_color(g);
    CHECK(is_proper(g, c));
    CHECK(c.degeneracy == degeneracy_by_subsets(g));
    CHECK(c.colors <= c.degeneracy + 1);
    CHECK(c.ordering.size() == m);
  }
}

TEST_CASE("net structure shape", "[alg_d][ann]") {
  auto s = uniform_space(300, 2, 3);
  std::vector<VertexId> cls(100);
  std::iota(cls.begin(), cls.end(), VertexId{0});
  auto t = construct_ann(cls, exact_internal_order(s, cls), 16);
  CHECK(t.members.size() == 100);
  CHECK(t.level_end.front() == 16);
  CHECK(t.level_end.back() == 100);
  CHECK(t.ruler.size() == 100 * 99 / 2);
  std::vector<char> child(100, 0);
  for (const auto& c : t.children)
    for (auto j : c) child[j] = 1;
  for (std::size_t j = 0; j < 100; ++j) CHECK(static_cast<bool>(child[j]) == (j >= 16));
  CHECK_THROWS_AS(construct_ann(std::vector<VertexId>{}, OrderedEdgeSequence{}, 16), Error);
}

TEST_CASE("tiny classes", "[alg_d][ann]") {
  auto s = line_space({0, 1, 3, 7, 12});
  auto exact = [&](OrientedEdge a, OrientedEdge b) { return to_answer(s.shorter(a.edge(), b.edge())); };
  auto never = [](VertexId) { return false; };
  std::vector<VertexId> one{2};
  auto t1 = construct_ann(one, OrderedEdgeSequence{}, 16);
  CHECK(traverse_ann(t1, 4, 8, exact, never).candidates == one);
  std::vector<VertexId> two{0, 3};
  auto t2 = construct_ann(two, exact_internal_order(s, two), 16);
  auto r = traverse_ann(t2, 4, 8, exact, never);
  CHECK(r.candidates == std::vector<VertexId>{3, 0});
}

TEST_CASE("exact comparator finds the true nearest class member", "[alg_d][ann]") {
  auto s = uniform_space(64 + 100, 2, 5);
  std::vector<VertexId> cls(64);
  std::iota(cls.begin(), cls.end(), VertexId{0});
  auto t = construct_ann(cls, exact_internal_order(s, cls), 16);
  auto exact = [&](OrientedEdge a, OrientedEdge b) { return to_answer(s.shorter(a.edge(), b.edge())); };
  std::size_t hits = 0, visited = 0;
  for (VertexId v = 64; v < 164; ++v) {
    auto r = traverse_ann(t, v, 24, exact, [](VertexId) { return false; });
    REQUIRE_FALSE(r.eliminated);
    CHECK(r.candidates.size() <= 24);
    hits += std::find(r.candidates.begin(), r.candidates.end(), nearest_in(s, v, cls)) != r.candidates.end();
    visited = std::max(visited, r.visited);
  }
  CHECK(hits == 100);
  CHECK(visited <= 64);
}

TEST_CASE("traversal on a large class is sublinear", "[alg_d][ann]") {
  auto s = uniform_space(1024 + 100, 2, 6);
  std::vector<VertexId> cls(1024);
  std::iota(cls.begin(), cls.end(), VertexId{0});
  auto t = construct_ann(cls, exact_internal_order(s, cls), 16);
  auto exact = [&](OrientedEdge a, OrientedEdge b) { return to_answer(s.shorter(a.edge(), b.edge())); };
  std::size_t hits = 0, visited = 0;
  for (VertexId v = 1024; v < 1124; ++v) {
    auto r = traverse_ann(t, v, 64, exact, [](VertexId) { return false; });
    hits += std::find(r.candidates.begin(), r.candidates.end(), nearest_in(s, v, cls)) != r.candidates.end();
    visited = std::max(visited, r.visited);
  }
  CHECK(hits >= 99);
  CHECK(visited < 1024 / 4);
}

TEST_CASE("lazy filter eliminates", "[alg_d][ann]") {
  auto s = uniform_space(40, 2, 6);
  std::vector<VertexId> cls{0, 1, 2, 3, 4, 5};
  auto t = construct_ann(cls, exact_internal_order(s, cls), 16);
  auto exact = [&](OrientedEdge a, OrientedEdge b) { return to_answer(s.shorter(a.edge(), b.edge())); };
  auto r = traverse_ann(t, 20, 8, exact, [](VertexId x) { return x == 3; });
  CHECK(r.eliminated);
  CHECK(r.candidates.empty());
}

TEST_CASE("close pairs without noise", "[alg_d]") {
  // Vertices 0 and 1 coincide; 2 is at the far end; S2 spread in between.
  Points p(402, 2);
  auto rng = make_rng(3);
  std::uniform_real_distribution<double> u(0.0, 100.0);
  p.row(0) << 0.0, 0.0;
  p.row(1) << 0.0, 0.0;
  p.row(2) << 100.0, 100.0;
  for (Eigen::Index i = 3; i < 402; ++i) p.row(i) << u(rng), u(rng);
  auto space = MetricSpace::euclidean(p);
  OracleSession o(space, NoiseModel::perfect(), 1);
  AlgoConstants c;
  auto sizes = round_sizes(402, 5, c);
  Samples smp;
  smp.s1 = {0, 1, 2};
  for (VertexId v = 3; v < 402; ++v) smp.s2.push_back(v);
  auto round = build_kernel_guard(o, 1, sizes, smp, c, 1);
  ProximityCache cache(o, round);
  auto g = close_pairs(cache, round);
  CHECK(std::find(g.adjacency[0].begin(), g.adjacency[0].end(), 1) != g.adjacency[0].end());
  CHECK(g.adjacency[2].empty());
}

TEST_CASE("trivial instances", "[alg_d]") {
  auto line = line_space({0, 1, 3, 7});
  OracleSession s(line, NoiseModel::probabilistic(0.0), 1);
  RunOptions opts;
  const auto all = all_vertices(line);
  CHECK(mapping_cost(line, alg_d(s, 4, 1, opts, 1).mapping, all, 1) == 0.0);
  CHECK(mapping_cost(line, alg_d(s, 2, 1, opts, 1).mapping, all, 1) <= 64 * brute_force_opt(line, all, 2, 1).cost);
}

TEST_CASE("alg_d rounds on a Gaussian mixture", "[alg_d]") {
  auto gm = synth_gaussian_mixture(5, 2000, 2, 1.0, 4);
  OracleSession s(gm.space, NoiseModel::probabilistic(0.15), 5);
  RunOptions opts;
  opts.constants.c_term = 0.0;
  const auto sizes = round_sizes(2000, 5, opts.constants);
  std::size_t rounds = 0, safe_total = 0, safe_far = 0;
  opts.observer = [&](const RoundView& rv) {
    ++rounds;
    REQUIRE(rv.classes);
    REQUIRE(rv.eliminated);
    const auto& st = rv.state;
    CHECK(rv.classes->size() <= 4 * sizes.L);
    CHECK(rv.outcome.report.chi == rv.classes->size());
    CHECK(rv.outcome.report.eliminated == rv.eliminated->size());
    // Classes partition S1 and hold no close pair (scores are persistent, so recomputing is exact).
    std::size_t members = 0;
    ProximityCache cache(s, st);
    for (const auto& cls : *rv.classes) {
      members += cls.size();
      for (std::size_t a = 0; a < cls.size(); ++a)
        for (std::size_t b = a + 1; b < cls.size(); ++b) {
          CHECK_FALSE(cache.close(cls[a], cls[b]));
          CHECK_FALSE(cache.close(cls[b], cls[a]));
        }
    }
    CHECK(members == st.s1.size());
    CHECK(rv.filter.survivors.size() + rv.eliminated->size() == rv.filter.candidates);
    for (auto [v, c] : rv.outcome.safe) {
      ++safe_total;
      safe_far += gm.space.distance(v, c) > 64 * distance_to_set(gm.space, v, st.s1);
    }
  };
  auto cp = alg_d(s, 5, 2, opts, 6);
  cp.validate();
  CHECK(rounds >= 1);
  CHECK(safe_far * 100 <= safe_total);
  CHECK(s.totals().strong_total == 0);
  const auto stages = s.stages();
  for (auto step : {"kernel", "close", "classsort", "ann", "advsort"})
    CHECK(std::find(stages.begin(), stages.end(), stage_name("alg_d", 1, step)) != stages.end());
}

TEST_CASE("noisy traversal stays within 16 times the class distance", "[alg_d][ann]") {
  auto gm = synth_gaussian_mixture(5, 2000, 2, 1.0, 7);
  OracleSession s(gm.space, NoiseModel::probabilistic(0.15), 8);
  AlgoConstants c;
  const auto sizes = round_sizes(2000, 5, c);
  const auto all = all_vertices(gm.space);
  auto round = build_kernel_guard(s, 1, sizes, draw_samples(all, sizes, c, 9), c, 9);
  ProximityCache cache(s, round);
  auto tester = [&](OrientedEdge a, OrientedEdge b) { return alg_tester(s, round, a, b); };
  auto coloring = degeneracy_color(close_pairs(cache, round));
  std::vector<std::vector<VertexId>> classes(coloring.colors);
  for (std::size_t i = 0; i < round.s1.size(); ++i) classes[coloring.color[i]].push_back(round.s1[i]);
  const auto cap = sizes.L * sizes.L;
  std::size_t queries = 0, good = 0;
  for (const auto& cls : classes) {
    std::vector<Edge> internal;
    for (std::size_t a = 0; a < cls.size(); ++a)
      for (std::size_t b = a + 1; b < cls.size(); ++b) internal.emplace_back(cls[a], cls[b]);
    auto cmp = [&](const Edge& x, const Edge& y) { return tester({x.u(), x.v()}, {y.u(), y.v()}); };
    auto t = construct_ann(cls, adv_sort(internal, cmp, 3, 1.0), c.fanout);
    for (VertexId v = 0; v < 2000; v += 5) {
      if (round.is_s1(v) || round.is_s2(v)) continue;
      auto r = traverse_ann(t, v, cap, tester, [&](VertexId x) { return cache.close(x, v); });
      if (r.eliminated) continue;
      ++queries;
      double best = std::numeric_limits<double>::infinity();
      for (auto x : r.candidates) best = std::min(best, gm.space.distance(x, v));
      good += best <= 16 * distance_to_set(gm.space, v, cls);
    }
  }
  REQUIRE(queries > 100);
  CHECK(good * 100 >= 95 * queries);
}
