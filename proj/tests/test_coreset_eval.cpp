#include <catch_amalgamated.hpp>

#include <sstream>

#include "quadcore/alg_g.hpp"
#include "quadcore/coreset_eval.hpp"
#include "quadcore/datasets.hpp"
#include "support.hpp"

using namespace quadcore;
using quadcore::testing::line_space;
using quadcore::testing::uniform_space;

TEST_CASE("weights count mapped vertices", "[eval]") {
  auto id = to_weighted(identity_coreset(6, 1));
  CHECK(id.size() == 6);
  for (double w : id.weights) CHECK(w == 1.0);

  auto cp = identity_coreset(6, 1);
  for (auto& m : cp.mapping) m = 2;
  cp.centers = {2};
  auto one = to_weighted(cp);
  CHECK(one.points == std::vector<VertexId>{2});
  CHECK(one.weights == std::vector<double>{6.0});
}

TEST_CASE("weights sum to n on pipeline output", "[eval]") {
  auto gm = synth_gaussian_mixture(3, 600, 2, 1.0, 1);
  OracleSession s(gm.space, NoiseModel::probabilistic(0.1), 1);
  RunOptions opts;
  opts.constants.c_term = 0.0;
  auto wc = to_weighted(alg_g(s, 3, 2, opts, 2));
  CHECK(wc.total_weight() == 600.0);
  for (double w : wc.weights) CHECK(w >= 1.0);
}

TEST_CASE("weighted k-means on tiny inputs", "[eval]") {
  auto line = line_space({0, 1, 3, 7});
  SECTION("k distinct points") {
    OracleSession s(line, NoiseModel::perfect(), 1);
    WeightedPointSet wc{{0, 2, 3}, {1, 5, 2}};
    auto c = weighted_kmeanspp(s, wc, 3, 2, 1);
    CHECK(c.cost == 0.0);
    CHECK(s.totals().strong_total == 3);
  }
  SECTION("line optimum over seeds") {
    WeightedPointSet wc{{0, 1, 2, 3}, {1, 1, 1, 1}};
    int hits = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      OracleSession s(line, NoiseModel::perfect(), seed);
      auto c = weighted_kmeanspp(s, wc, 2, 1, seed);
      std::sort(c.centers.begin(), c.centers.end());
      hits += c.cost == Catch::Approx(3.0) && c.centers == std::vector<VertexId>{1, 3};
    }
    CHECK(hits >= 95);
  }
  SECTION("too few points") {
    OracleSession s(line, NoiseModel::perfect(), 1);
    CHECK_THROWS_AS(weighted_kmeanspp(s, WeightedPointSet{{0}, {1}}, 2, 1, 1), Error);
  }
}

TEST_CASE("weights act like duplicated items", "[eval][property]") {
  auto s = uniform_space(12, 2, 3);
  auto dist = [&](std::size_t i, std::size_t j) { return s.distance(static_cast<VertexId>(i % 12), static_cast<VertexId>(j % 12)); };
  std::vector<double> w(12, 2.0), ones(24, 1.0);
  KMeansParams one;
  one.restarts = 1;
  auto a = discrete_kmeans(12, w, dist, 3, 2, 5, one);
  // Same items twice; the best over many restarts can only match or beat one weighted run.
  auto b = discrete_kmeans(24, ones, dist, 3, 2, 5);
  CHECK(b.cost <= a.cost + 1e-9);
  CHECK(a.cost >= 2 * brute_force_opt(s, all_vertices(s), 3, 2).cost - 1e-9);
}

TEST_CASE("reference clustering on small spaces reaches the optimum", "[eval]") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    auto s = uniform_space(12, 2, seed);
    for (int p : {1, 2}) {
      const double opt = brute_force_opt(s, all_vertices(s), 3, p).cost;
      const auto ref = reference_clustering(s, 3, p, seed);
      CHECK(ref.cost >= opt - 1e-9);
      CHECK(ref.cost <= 1.05 * opt);
    }
  }
}

TEST_CASE("pipeline evaluation", "[eval]") {
  SECTION("identity coreset with k = n") {
    auto s = uniform_space(10, 2, 1);
    OracleSession o(s, NoiseModel::perfect(), 1);
    auto r = evaluate_pipeline(o, identity_coreset(10, 2), 10, 2, 1, 0.0);
    CHECK(r.downstream_cost == 0.0);
    CHECK(r.mapping_cost == 0.0);
    CHECK(r.coreset_size == 10);
    CHECK(o.stage_counts("downstream").strong_total == r.strong_total);
  }
  SECTION("downstream cost never beats the optimum") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      auto s = uniform_space(13, 2, seed);
      OracleSession o(s, NoiseModel::probabilistic(0.1), seed);
      auto cp = alg_g(o, 2, 1, RunOptions{}, seed);
      auto r = evaluate_pipeline(o, cp, 2, 1, seed, 0.0);
      CHECK(r.downstream_cost >= brute_force_opt(s, all_vertices(s), 2, 1).cost - 1e-9);
      CHECK(r.downstream_cost >= r.mapping_cost - 1e-9);
    }
  }
}

TEST_CASE("strong distances appear only downstream", "[eval]") {
  auto gm = synth_gaussian_mixture(5, 1000, 2, 1.0, 2);
  OracleSession o(gm.space, NoiseModel::probabilistic(0.15), 1);
  auto cp = alg_g(o, 5, 2, RunOptions{}, 1);
  CHECK(o.totals().strong_total == 0);
  auto r = evaluate_pipeline(o, cp, 5, 2, 1, 1.0);
  CHECK(r.strong_total > 0);
  for (const auto& st : o.stages())
    if (st != "downstream") CHECK(o.stage_counts(st).strong_total == 0);
  // One query per unordered coreset pair.
  CHECK(r.strong_total == r.coreset_size * (r.coreset_size - 1) / 2);
}

TEST_CASE("report rows", "[eval]") {
  std::ostringstream out;
  write_report_header(out);
  ReportRow row;
  row.dataset = "synthetic";
  row.n = 100;
  row.k = 5;
  row.p = 2;
  row.phi = 0.15;
  row.method = "alg_g";
  row.report.coreset_size = 7;
  row.report.mapping_cost = 1.5;
  row.report.downstream_cost = 2.5;
  row.report.reference_cost = 2;
  row.report.quad_total = 99;
  row.report.strong_total = 21;
  row.seed = 4;
  write_report_row(out, row);
  CHECK(out.str() ==
        "dataset,n,k,p,phi,method,coreset_size,mapping_cost,downstream_cost,reference_cost,quad_total,strong_total,seed\n"
        "synthetic,100,5,2,0.15,alg_g,7,1.5,2.5,2,99,21,4\n");
}
