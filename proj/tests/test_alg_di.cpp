#include <catch_amalgamated.hpp>

#include <numeric>

#include "quadcore/alg_d.hpp"
#include "quadcore/alg_di.hpp"
#include "quadcore/datasets.hpp"
#include "support.hpp"

using namespace quadcore;
using quadcore::testing::uniform_space;

namespace {

// Center 0 owns vertices 1..u in that order; everything else is its own center.
CoresetPlus star(std::size_t n, std::size_t u, int p = 1) {
  auto cp = identity_coreset(n, p);
  for (VertexId v = 1; v <= u; ++v) {
    cp.mapping[v] = 0;
    cp.order_rank[v] = v;
  }
  cp.centers.clear();
  for (VertexId v = 0; v < n; ++v)
    if (cp.mapping[v] == v) cp.centers.push_back(v);
  return cp;
}

AlgoConstants imp(double c) {
  AlgoConstants k;
  k.c_IMP = c;
  return k;
}

}  // namespace

TEST_CASE("level sizes halve", "[alg_di]") {
  CHECK(LevelSampling::level_size(80, 0) == 80);
  CHECK(LevelSampling::level_size(80, 1) == 40);
  CHECK(LevelSampling::level_size(81, 1) == 41);
  CHECK(LevelSampling::level_size(80, 3) == 10);
  CHECK(LevelSampling::level_size(1, 9) == 1);
  CHECK(LevelSampling::level_size(0, 2) == 0);
}

TEST_CASE("cutoff and sampling on a star", "[alg_di]") {
  // n = 1024: L^3 = 1000, so c_IMP = 0.01 gives a level cap of 10.
  const auto cp = star(1024, 80);
  auto plan = build_level_sampling(cp, imp(0.01), 3);
  REQUIRE(plan.centers.size() == 1);
  const auto& ls = plan.centers[0];
  CHECK(ls.center == 0);
  CHECK(ls.level_cap == 10);
  CHECK(ls.cutoff == 3);  // 80 -> 40 -> 20 -> 10
  CHECK(ls.samples.size() == 3);
  for (std::size_t t = 0; t < ls.samples.size(); ++t) {
    const auto& w = ls.samples[t];
    CHECK(std::is_sorted(w.begin(), w.end()));
    CHECK(std::adjacent_find(w.begin(), w.end()) == w.end());
    CHECK(w.size() <= 10);
    // W^t lies in the level set U^t = the last ceil(80 / 2^t) vertices.
    for (auto v : w) CHECK(v > 80 - LevelSampling::level_size(80, t));
  }
  for (VertexId v = 71; v <= 80; ++v) CHECK(std::binary_search(ls.members.begin(), ls.members.end(), v));
  std::size_t outside = 0;
  for (VertexId v = 1; v <= 80; ++v) outside += !std::binary_search(ls.members.begin(), ls.members.end(), v);
  CHECK(plan.Z.size() == outside * ls.members.size());
}

TEST_CASE("small assigned sets are taken whole", "[alg_di]") {
  const auto cp = star(1024, 6);
  auto plan = build_level_sampling(cp, imp(1.0), 1);
  REQUIRE(plan.centers.size() == 1);
  CHECK(plan.centers[0].level_cap == 6);
  CHECK(plan.centers[0].cutoff == 1);
  // Six draws with replacement from six, plus the last three.
  for (VertexId v = 4; v <= 6; ++v)
    CHECK(std::binary_search(plan.centers[0].members.begin(), plan.centers[0].members.end(), v));
}

TEST_CASE("centers without assigned vertices are skipped", "[alg_di]") {
  auto plan = build_level_sampling(identity_coreset(50, 1), imp(1.0), 1);
  CHECK(plan.centers.empty());
  CHECK(plan.Z.empty());
}

TEST_CASE("noiseless refinement picks the nearest sampled member", "[alg_di]") {
  auto space = uniform_space(1024, 2, 4);
  OracleSession s(space, NoiseModel::perfect(), 1);
  const auto cp = star(1024, 300);
  auto r = refine(s, cp, imp(0.02), 5);
  const auto plan = build_level_sampling(cp, imp(0.02), 5);
  const auto& W = plan.centers[0].members;
  for (VertexId v = 1; v <= 300; ++v) {
    if (std::binary_search(W.begin(), W.end(), v)) {
      CHECK(r.coreset.mapping[v] == v);
      continue;
    }
    CHECK(r.coreset.mapping[v] == nearest_in(space, v, W));
  }
  CHECK(r.added == W.size());
  CHECK(r.z_size == plan.Z.size());
}

TEST_CASE("refinement of an alg_d run", "[alg_di]") {
  auto gm = synth_gaussian_mixture(5, 2000, 2, 1.0, 2);
  OracleSession s(gm.space, NoiseModel::probabilistic(0.15), 3);
  RunOptions opts;
  const auto cp = alg_d(s, 5, 1, opts, 4);
  std::vector<std::uint64_t> earlier;
  for (const auto& st : s.stages()) {
    auto k = s.stage_keys(st);
    earlier.insert(earlier.end(), k.begin(), k.end());
  }
  std::sort(earlier.begin(), earlier.end());

  const auto r = refine(s, cp, imp(0.02), 5);
  const auto& rc = r.coreset;
  rc.validate();
  CHECK(std::includes(rc.centers.begin(), rc.centers.end(), cp.centers.begin(), cp.centers.end()));
  const auto plan = build_level_sampling(cp, imp(0.02), 5);
  std::vector<std::vector<VertexId>> W(2000);
  for (const auto& ls : plan.centers) W[ls.center] = ls.members;
  for (VertexId v = 0; v < 2000; ++v) {
    const auto& w = W[cp.mapping[v]];
    CHECK((rc.mapping[v] == cp.mapping[v] || std::binary_search(w.begin(), w.end(), rc.mapping[v])));
  }
  CHECK(key_overlap(earlier, s.stage_keys("alg_di/zsort")) == 0);
  CHECK(r.quad == s.stage_counts("alg_di/zsort").quad_total);
  const auto all = all_vertices(gm.space);
  CHECK(mapping_cost(gm.space, rc.mapping, all, 1) <= mapping_cost(gm.space, cp.mapping, all, 1));
}

TEST_CASE("refinement preconditions", "[alg_di]") {
  auto space = uniform_space(64, 2, 1);
  OracleSession s(space, NoiseModel::perfect(), 1);
  CHECK_THROWS_AS(refine(s, star(64, 10, 2), imp(1.0), 1), Error);
  CHECK_THROWS_AS(refine(s, star(65, 10), imp(1.0), 1), Error);
}
