#include "quadcore/alg_di.hpp"

#include <algorithm>
#include <cmath>

#include "quadcore/rng.hpp"

namespace quadcore {

std::size_t LevelSampling::level_size(std::size_t u, std::size_t t) {
  if (t >= 64) return u ? 1 : 0;
  const std::size_t d = std::size_t{1} << t;
  return (u + d - 1) / d;
}

LevelPlan build_level_sampling(const CoresetPlus& cp, const AlgoConstants& c, std::uint64_t seed) {
  c.validate();
  const double L = static_cast<double>(ceil_log2(cp.n));
  const auto nominal = static_cast<std::size_t>(std::max(1.0, std::ceil(c.c_IMP * L * L * L)));
  LevelPlan plan;
  for (auto s : cp.centers) {
    auto U = cp.assigned(s);
    if (U.empty()) continue;
    LevelSampling ls;
    ls.center = s;
    ls.level_cap = std::min(nominal, U.size());
    ls.cutoff = 1;
    while (LevelSampling::level_size(U.size(), ls.cutoff) > ls.level_cap) ++ls.cutoff;

    auto rng = make_rng(seed, {0x4c56, s});
    std::vector<VertexId> W;
    for (std::size_t t = 0; t < ls.cutoff; ++t) {
      const std::size_t size = LevelSampling::level_size(U.size(), t);
      std::uniform_int_distribution<std::size_t> pick(U.size() - size, U.size() - 1);
      std::vector<VertexId> w;
      for (std::size_t j = 0; j < ls.level_cap; ++j) w.push_back(U[pick(rng)]);
      std::sort(w.begin(), w.end());
      w.erase(std::unique(w.begin(), w.end()), w.end());
      W.insert(W.end(), w.begin(), w.end());
      ls.samples.push_back(std::move(w));
    }
    W.insert(W.end(), U.end() - static_cast<std::ptrdiff_t>(LevelSampling::level_size(U.size(), ls.cutoff)), U.end());
    std::sort(W.begin(), W.end());
    W.erase(std::unique(W.begin(), W.end()), W.end());
    ls.members = std::move(W);

    // U^0 = U_s, so the union over t < t_s of E(U^t \ W_s, W_s) is E(U_s \ W_s, W_s).
    for (auto v : U)
      if (!std::binary_search(ls.members.begin(), ls.members.end(), v))
        for (auto w : ls.members) plan.Z.emplace_back(v, w);
    ls.assigned = std::move(U);
    plan.centers.push_back(std::move(ls));
  }
  return plan;
}

Refinement refine(OracleSession& session, const CoresetPlus& cp, const AlgoConstants& c, std::uint64_t seed) {
  if (cp.p != 1) throw Error("refinement is defined for p = 1");
  if (cp.n != session.n()) throw Error("coreset and session sizes differ");
  const auto before = session.quad_count();
  const auto previous = session.stage();
  const LevelPlan plan = build_level_sampling(cp, c, seed);

  session.set_stage("alg_di/zsort");
  const auto pi_z = prob_sort(session, plan.Z, derive_seed(seed, {0x5a}), c.probsort);
  session.set_stage(previous);

  Refinement out;
  out.z_size = plan.Z.size();
  CoresetPlus& r = out.coreset;
  r = cp;
  for (const auto& ls : plan.centers) {
    for (auto w : ls.members) {
      r.mapping[w] = w;
      r.order_rank[w] = 0;
    }
    // First edge of E(v, W_s) in the induced order is the lowest-ranked one.
    for (auto v : ls.assigned) {
      if (std::binary_search(ls.members.begin(), ls.members.end(), v)) continue;
      VertexId best = ls.members.front();
      std::size_t best_rank = pi_z.rank(Edge(v, best));
      for (auto w : ls.members) {
        const std::size_t rk = pi_z.rank(Edge(v, w));
        if (rk < best_rank) best_rank = rk, best = w;
      }
      r.mapping[v] = best;
    }
  }
  r.centers.clear();
  for (VertexId v = 0; v < r.n; ++v)
    if (r.mapping[v] == v) r.centers.push_back(v);
  out.added = r.centers.size() - cp.centers.size();
  out.quad = session.quad_count() - before;
  r.validate();
  return out;
}

}  // namespace quadcore
