#include "quadcore/alg_d.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "quadcore/rng.hpp"

namespace quadcore {

std::size_t ConflictGraph::edge_count() const {
  std::size_t twice = 0;
  for (const auto& a : adjacency) twice += a.size();
  return twice / 2;
}

void ConflictGraph::add_edge(std::size_t a, std::size_t b) {
  if (a == b || a >= size() || b >= size()) throw Error("bad conflict edge");
  if (std::find(adjacency[a].begin(), adjacency[a].end(), b) != adjacency[a].end()) return;
  adjacency[a].push_back(b);
  adjacency[b].push_back(a);
}

Coloring degeneracy_color(const ConflictGraph& g) {
  const std::size_t m = g.size();
  Coloring out;
  std::vector<std::size_t> degree(m);
  std::vector<char> removed(m, 0);
  for (std::size_t i = 0; i < m; ++i) degree[i] = g.adjacency[i].size();
  for (std::size_t step = 0; step < m; ++step) {
    std::size_t arg = m;
    for (std::size_t i = 0; i < m; ++i)
      if (!removed[i] && (arg == m || degree[i] < degree[arg])) arg = i;
    out.degeneracy = std::max(out.degeneracy, degree[arg]);
    removed[arg] = 1;
    out.ordering.push_back(arg);
    for (auto j : g.adjacency[arg])
      if (!removed[j]) --degree[j];
  }
  constexpr auto none = std::numeric_limits<std::size_t>::max();
  out.color.assign(m, none);
  for (auto it = out.ordering.rbegin(); it != out.ordering.rend(); ++it) {
    std::vector<char> used(g.adjacency[*it].size() + 1, 0);
    for (auto j : g.adjacency[*it])
      if (out.color[j] != none && out.color[j] < used.size()) used[out.color[j]] = 1;
    std::size_t c = 0;
    while (used[c]) ++c;
    out.color[*it] = c;
    out.colors = std::max(out.colors, c + 1);
  }
  return out;
}

bool is_proper(const ConflictGraph& g, const Coloring& c) {
  for (std::size_t a = 0; a < g.size(); ++a)
    for (auto b : g.adjacency[a])
      if (c.color[a] == c.color[b]) return false;
  return true;
}

ConflictGraph close_pairs(ProximityCache& cache, const RoundState& round) {
  ConflictGraph g;
  g.vertices = round.s1;
  g.adjacency.assign(round.s1.size(), {});
  for (std::size_t a = 0; a < round.s1.size(); ++a)
    for (std::size_t b = a + 1; b < round.s1.size(); ++b)
      if (cache.close(round.s1[a], round.s1[b]) || cache.close(round.s1[b], round.s1[a])) g.add_edge(a, b);
  return g;
}

AnnStructure construct_ann(std::span<const VertexId> cls, const OrderedEdgeSequence& pi, std::size_t fanout) {
  const std::size_t m = cls.size();
  if (m == 0) throw Error("empty class");
  if (fanout < 1) throw Error("fanout must be positive");
  AnnStructure t;
  t.fanout = fanout;
  for (const auto& e : pi) t.ruler.push_back({e.u(), e.v()});

  std::vector<std::size_t> rank(m * m, 0);
  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t b = a + 1; b < m; ++b) rank[a * m + b] = rank[b * m + a] = pi.rank(Edge(cls[a], cls[b]));

  // Farthest-in-rank insertion.
  std::vector<std::size_t> order{0};
  std::vector<std::size_t> gap(m, std::numeric_limits<std::size_t>::max());
  std::vector<char> taken(m, 0);
  taken[0] = 1;
  while (order.size() < m) {
    const std::size_t last = order.back();
    std::size_t arg = m;
    for (std::size_t x = 0; x < m; ++x) {
      if (taken[x]) continue;
      gap[x] = std::min(gap[x], rank[x * m + last]);
      if (arg == m || gap[x] > gap[arg]) arg = x;
    }
    taken[arg] = 1;
    order.push_back(arg);
  }
  for (auto i : order) t.members.push_back(cls[i]);

  for (std::size_t end = std::min(m, fanout);; end = std::min(m, 4 * end)) {
    t.level_end.push_back(end);
    if (end == m) break;
  }
  t.children.assign(m, {});
  for (std::size_t l = 1; l < t.level_end.size(); ++l)
    for (std::size_t j = t.level_end[l - 1]; j < t.level_end[l]; ++j) {
      std::size_t parent = 0;
      for (std::size_t q = 1; q < t.level_end[l - 1]; ++q)
        if (rank[order[j] * m + order[q]] < rank[order[j] * m + order[parent]]) parent = q;
      t.children[parent].push_back(j);
    }
  return t;
}

AnnResult traverse_ann(const AnnStructure& t, VertexId v, std::size_t cap, const EdgeComparator& cmp,
                       const CloseCheck& close) {
  AnnResult out;
  const std::size_t m = t.members.size();
  constexpr auto unknown = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> pos(m, unknown);

  // Number of ruler edges answered shorter than {x, v}.
  auto locate = [&](std::size_t i) -> bool {
    if (pos[i] != unknown) return true;
    const VertexId x = t.members[i];
    if (close(x)) return false;
    const OrientedEdge q{x, v};
    std::size_t lo = 0, hi = t.ruler.size();
    while (lo < hi) {
      const std::size_t mid = lo + (hi - lo) / 2;
      const auto& r = t.ruler[mid];
      if (close(r.s) || close(r.v)) return false;
      if (cmp(r, q) == Answer::yes)
        lo = mid + 1;
      else
        hi = mid;
    }
    pos[i] = lo;
    ++out.visited;
    return true;
  };
  auto by_pos = [&](std::size_t a, std::size_t b) { return pos[a] != pos[b] ? pos[a] < pos[b] : a < b; };

  std::vector<std::size_t> pool;
  for (std::size_t i = 0; i < t.level_end[0]; ++i) pool.push_back(i);
  for (std::size_t l = 0;; ++l) {
    for (auto i : pool)
      if (!locate(i)) {
        out.eliminated = true;
        return out;
      }
    std::sort(pool.begin(), pool.end(), by_pos);
    if (pool.size() > t.fanout) pool.resize(t.fanout);
    if (l + 1 >= t.level_end.size()) break;
    const std::size_t from = t.level_end[l], to = t.level_end[l + 1];
    const std::size_t keep = pool.size();
    for (std::size_t a = 0; a < keep; ++a)
      for (auto c : t.children[pool[a]])
        if (c >= from && c < to) pool.push_back(c);
  }
  if (pool.size() > cap) pool.resize(cap);
  for (auto i : pool) out.candidates.push_back(t.members[i]);
  return out;
}

namespace {

OrientedEdge orient(const RoundState& round, const Edge& e) {
  return round.is_s1(e.u()) ? OrientedEdge{e.u(), e.v()} : OrientedEdge{e.v(), e.u()};
}

}  // namespace

std::optional<RoundOutcome> run_round_doubling(OracleSession& session, std::span<const VertexId> active,
                                               const RoundSizes& sizes, std::size_t index, const RunOptions& opts,
                                               std::uint64_t seed) {
  const auto& c = opts.constants;
  const auto before = session.quad_count();
  auto samples = draw_samples(active, sizes, c, derive_seed(seed, {index, 1}));
  if (samples.terminal) return std::nullopt;

  session.set_stage(stage_name("alg_d", index, "kernel"));
  const RoundState round = build_kernel_guard(session, index, sizes, std::move(samples), c, derive_seed(seed, {index, 2}));
  ProximityCache cache(session, round);
  TesterStats stats;
  auto tester = [&](OrientedEdge a, OrientedEdge b) {
    const Answer ans = alg_tester(session, round, a, b, &stats);
    if (opts.tester_hook) opts.tester_hook(a, b, ans);
    return ans;
  };

  session.set_stage(stage_name("alg_d", index, "close"));
  const ConflictGraph graph = close_pairs(cache, round);
  const Coloring coloring = degeneracy_color(graph);
  std::vector<std::vector<VertexId>> classes(coloring.colors);
  for (std::size_t i = 0; i < graph.size(); ++i) classes[coloring.color[i]].push_back(graph.vertices[i]);

  session.set_stage(stage_name("alg_d", index, "classsort"));
  std::vector<AnnStructure> nets;
  for (std::size_t j = 0; j < classes.size(); ++j) {
    std::vector<Edge> internal;
    for (std::size_t a = 0; a < classes[j].size(); ++a)
      for (std::size_t b = a + 1; b < classes[j].size(); ++b) internal.emplace_back(classes[j][a], classes[j][b]);
    auto cmp = [&](const Edge& x, const Edge& y) { return tester({x.u(), x.v()}, {y.u(), y.v()}); };
    const auto pi = adv_sort(internal, cmp, derive_seed(seed, {index, 4, j}), 1.0);
    nets.push_back(construct_ann(classes[j], pi, c.fanout));
  }

  session.set_stage(stage_name("alg_d", index, "ann"));
  const auto cap = static_cast<std::size_t>(std::ceil(c.c_F * static_cast<double>(sizes.L * sizes.L)));
  FilterResult filter;
  std::vector<VertexId> eliminated;
  std::vector<Edge> Y;
  for (auto v : active) {
    if (round.is_s1(v) || round.is_s2(v)) continue;
    ++filter.candidates;
    std::vector<VertexId> found;
    bool out = false;
    for (const auto& net : nets) {
      auto res = traverse_ann(net, v, cap, tester, [&](VertexId s) { return cache.close(s, v); });
      if ((out = res.eliminated)) break;
      found.insert(found.end(), res.candidates.begin(), res.candidates.end());
    }
    if (out) {
      eliminated.push_back(v);
      continue;
    }
    filter.survivors.push_back(v);
    for (auto x : found) Y.emplace_back(x, v);
  }

  session.set_stage(stage_name("alg_d", index, "advsort"));
  auto cmp = [&](const Edge& a, const Edge& b) { return tester(orient(round, a), orient(round, b)); };
  const auto pi_y = adv_sort(Y, cmp, derive_seed(seed, {index, 3}), 1.0);

  RoundOutcome out;
  auto firsts = detail::first_incident(pi_y, round);
  firsts.resize(std::min(firsts.size(), detail::safe_count(active.size(), c)));
  out.safe = std::move(firsts);
  out.samples = round.s1;
  out.samples.insert(out.samples.end(), round.s2.begin(), round.s2.end());

  auto& r = out.report;
  r.index = index;
  r.active = active.size();
  r.s1 = round.s1.size();
  r.s2 = round.s2.size();
  r.survivors = filter.survivors.size();
  r.mapped = out.safe.size();
  r.chi = coloring.colors;
  r.eliminated = eliminated.size();
  r.tester_calls = stats.calls;
  r.tester_fallbacks = stats.fallbacks;
  r.quad = session.quad_count() - before;
  if (opts.observer) {
    RoundView view{round, active, filter, out};
    view.classes = &classes;
    view.eliminated = &eliminated;
    opts.observer(view);
  }
  return out;
}

CoresetPlus alg_d(OracleSession& session, std::size_t k, int p, const RunOptions& opts, std::uint64_t seed) {
  if (k == 0) throw Error("k must be at least 1");
  const std::size_t n = session.n();
  const RoundSizes sizes = round_sizes(n, k, opts.constants);
  const auto previous = session.stage();
  auto cp = drive_rounds(n, p, sizes.terminal_size, sizes.round_cap, [&](std::span<const VertexId> active, std::size_t i) {
    return run_round_doubling(session, active, sizes, i, opts, seed);
  });
  session.set_stage(previous);
  return cp;
}

}  // namespace quadcore
