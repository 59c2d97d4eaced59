#include "quadcore/alg_g.hpp"

#include <algorithm>
#include <cmath>

#include "quadcore/rng.hpp"

namespace quadcore {

namespace detail {

std::vector<std::pair<VertexId, VertexId>> first_incident(const OrderedEdgeSequence& order, const RoundState& round) {
  std::vector<std::pair<VertexId, VertexId>> out;
  std::vector<char> seen(round.in_s2.size(), 0);
  for (const auto& e : order) {
    const VertexId s = round.is_s1(e.u()) ? e.u() : e.v();
    const VertexId v = e.other(s);
    if (seen[v]) continue;
    seen[v] = 1;
    out.emplace_back(v, s);
  }
  return out;
}

std::size_t safe_count(std::size_t active, const AlgoConstants& c) {
  return static_cast<std::size_t>(std::floor(c.safe_fraction * static_cast<double>(active)));
}

}  // namespace detail

std::optional<RoundOutcome> run_round_general(OracleSession& session, std::span<const VertexId> active,
                                              const RoundSizes& sizes, std::size_t index, const RunOptions& opts,
                                              std::uint64_t seed) {
  const auto& c = opts.constants;
  const auto before = session.quad_count();
  auto samples = draw_samples(active, sizes, c, derive_seed(seed, {index, 1}));
  if (samples.terminal) return std::nullopt;

  session.set_stage(stage_name("alg_g", index, "kernel"));
  const RoundState round = build_kernel_guard(session, index, sizes, std::move(samples), c, derive_seed(seed, {index, 2}));

  session.set_stage(stage_name("alg_g", index, "filter"));
  ProximityCache cache(session, round);
  const FilterResult filter = filter_survivors(cache, round, active);

  session.set_stage(stage_name("alg_g", index, "advsort"));
  std::vector<Edge> Y;
  Y.reserve(round.s1.size() * filter.survivors.size());
  for (auto s : round.s1)
    for (auto v : filter.survivors) Y.emplace_back(s, v);
  TesterStats stats;
  auto orient = [&](const Edge& e) { return round.is_s1(e.u()) ? OrientedEdge{e.u(), e.v()} : OrientedEdge{e.v(), e.u()}; };
  auto cmp = [&](const Edge& a, const Edge& b) {
    const auto qa = orient(a), qb = orient(b);
    const Answer ans = alg_tester(session, round, qa, qb, &stats);
    if (opts.tester_hook) opts.tester_hook(qa, qb, ans);
    return ans;
  };
  const auto pi_y = adv_sort(Y, cmp, derive_seed(seed, {index, 3}), 1.0);

  RoundOutcome out;
  auto firsts = detail::first_incident(pi_y, round);
  firsts.resize(std::min(firsts.size(), detail::safe_count(active.size(), c)));
  out.safe = std::move(firsts);
  out.samples = round.s1;
  out.samples.insert(out.samples.end(), round.s2.begin(), round.s2.end());

  auto& r = out.report;
  r.active = active.size();
  r.s1 = round.s1.size();
  r.s2 = round.s2.size();
  r.survivors = filter.survivors.size();
  r.mapped = out.safe.size();
  r.tester_calls = stats.calls;
  r.tester_fallbacks = stats.fallbacks;
  r.quad = session.quad_count() - before;
  r.index = index;
  if (opts.observer) opts.observer(RoundView{round, active, filter, out});
  return out;
}

CoresetPlus alg_g(OracleSession& session, std::size_t k, int p, const RunOptions& opts, std::uint64_t seed) {
  if (k == 0) throw Error("k must be at least 1");
  const std::size_t n = session.n();
  const RoundSizes sizes = round_sizes(n, k, opts.constants);
  const auto previous = session.stage();
  auto cp = drive_rounds(n, p, sizes.terminal_size, sizes.round_cap, [&](std::span<const VertexId> active, std::size_t i) {
    return run_round_general(session, active, sizes, i, opts, seed);
  });
  session.set_stage(previous);
  return cp;
}

CoresetPlus baseline_generic(OracleSession& session, std::size_t k, int p, const AlgoConstants& c, std::uint64_t seed) {
  if (k == 0) throw Error("k must be at least 1");
  const std::size_t n = session.n();
  const RoundSizes sizes = round_sizes(n, k, c);
  const std::size_t terminal = std::max(static_cast<std::size_t>(std::ceil(c.c_term * static_cast<double>(k * sizes.L * sizes.L * sizes.L))),
                                        4 * sizes.m1);
  const auto previous = session.stage();
  auto step = [&](std::span<const VertexId> active, std::size_t index) -> std::optional<RoundOutcome> {
    RoundSizes only_s1 = sizes;
    only_s1.m2 = 0;
    auto samples = draw_samples(active, only_s1, c, derive_seed(seed, {index, 1}));
    if (samples.s1.empty()) return std::nullopt;
    const auto& S = samples.s1;
    std::vector<char> in_s(n, 0);
    for (auto s : S) in_s[s] = 1;

    session.set_stage(stage_name("baseline", index, "nearest"));
    std::vector<Edge> Y;
    std::vector<VertexId> owner(n, 0);
    for (auto v : active) {
      if (in_s[v]) continue;
      VertexId champ = S[0];
      for (std::size_t j = 1; j < S.size(); ++j)
        if (session.quad(Edge(v, S[j]), Edge(v, champ)) == Answer::yes) champ = S[j];
      owner[v] = champ;
      Y.emplace_back(v, champ);
    }
    session.set_stage(stage_name("baseline", index, "sort"));
    auto raw = [&](const Edge& a, const Edge& b) { return session.quad(a, b); };
    const auto order = adv_sort(Y, raw, derive_seed(seed, {index, 3}), 0.0);

    RoundOutcome out;
    const std::size_t keep = std::min(order.size(), detail::safe_count(active.size(), c));
    for (std::size_t i = 0; i < keep; ++i) {
      const VertexId v = in_s[order[i].u()] ? order[i].v() : order[i].u();
      out.safe.emplace_back(v, owner[v]);
    }
    out.samples = S;
    out.report.active = active.size();
    out.report.s1 = S.size();
    out.report.survivors = Y.size();
    out.report.mapped = keep;
    return out;
  };
  auto cp = drive_rounds(n, p, terminal, sizes.round_cap, step);
  session.set_stage(previous);
  return cp;
}

}  // namespace quadcore
