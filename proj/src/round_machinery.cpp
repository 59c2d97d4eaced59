#include "quadcore/round_machinery.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "quadcore/rng.hpp"

namespace quadcore {

void AlgoConstants::validate() const {
  for (double x : {c_s1, c_s2, c_win, c_D, c_r, c_IMP, c_F, safe_fraction, filter_threshold_fraction, sample_clamp})
    if (!(x > 0.0)) throw Error("algorithm constants must be positive");
  if (c_term < 0.0 || c_term_samples < 0.0) throw Error("terminal constants must be non-negative");
  if (safe_fraction > 1.0 || filter_threshold_fraction > 1.0 || sample_clamp > 1.0)
    throw Error("fractions must be at most 1");
  if (fanout < 2) throw Error("fanout must be at least 2");
}

namespace {
std::size_t ceil_pos(double x) { return static_cast<std::size_t>(std::max(1.0, std::ceil(x - 1e-9))); }
}  // namespace

RoundSizes round_sizes(std::size_t n, std::size_t k, const AlgoConstants& c) {
  c.validate();
  RoundSizes s;
  s.L = ceil_log2(n);
  const double L = static_cast<double>(s.L), K = static_cast<double>(k);
  s.m1 = ceil_pos(c.c_s1 * K * L * L);
  s.m2 = ceil_pos(c.c_s2 * K * L * L * L);
  s.D = ceil_pos(c.c_D * L);
  s.m_win = 2 * std::max(ceil_pos(c.c_win * L), s.D);
  s.filter_threshold = std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(c.filter_threshold_fraction * static_cast<double>(s.m_win))));
  s.terminal_size = std::max(static_cast<std::size_t>(std::ceil(c.c_term * K * L * L * L)),
                             static_cast<std::size_t>(std::ceil(c.c_term_samples * static_cast<double>(s.m1 + s.m2))));
  s.round_cap = ceil_pos(c.c_r * L);
  return s;
}

Samples draw_samples(std::span<const VertexId> active, const RoundSizes& sizes, const AlgoConstants& c,
                     std::uint64_t seed) {
  Samples out;
  if (active.empty()) {
    out.terminal = true;
    return out;
  }
  auto rng = make_rng(seed, {0x5331});
  std::uniform_int_distribution<std::size_t> pick(0, active.size() - 1);
  const auto cap = static_cast<std::size_t>(std::floor(c.sample_clamp * static_cast<double>(active.size())));
  auto draw = [&](std::size_t target) {
    std::vector<VertexId> s;
    for (std::size_t i = 0; i < std::min(target, cap); ++i) s.push_back(active[pick(rng)]);
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
    return s;
  };
  out.s1 = draw(sizes.m1);
  out.s2 = draw(sizes.m2);
  std::vector<VertexId> s2;
  std::set_difference(out.s2.begin(), out.s2.end(), out.s1.begin(), out.s1.end(), std::back_inserter(s2));
  out.s2 = std::move(s2);
  out.terminal = out.s1.empty() || out.s2.size() < 2 * sizes.m_win + 2 * sizes.D + 1;
  return out;
}

std::size_t RoundState::slot(VertexId s) const {
  auto it = slot_of.find(s);
  if (it == slot_of.end()) throw Error("vertex is not in S1");
  return it->second;
}

RoundState build_kernel_guard(OracleSession& session, std::size_t index, const RoundSizes& sizes, Samples samples,
                              const AlgoConstants& c, std::uint64_t seed) {
  const std::size_t need = 2 * sizes.m_win + 2 * sizes.D;
  if (samples.s2.size() <= need) throw Error("S2 too small for the kernel and guard windows");
  RoundState st;
  st.index = index;
  st.sizes = sizes;
  st.s1 = std::move(samples.s1);
  st.s2 = std::move(samples.s2);
  st.in_s2.assign(session.n(), 0);
  for (auto w : st.s2) st.in_s2[w] = 1;
  for (std::size_t i = 0; i < st.s1.size(); ++i) {
    if (st.in_s2[st.s1[i]]) throw Error("S1 and S2 must be disjoint");
    st.slot_of.emplace(st.s1[i], i);
  }

  std::vector<Edge> X;
  X.reserve(st.s1.size() * st.s2.size());
  for (auto s : st.s1)
    for (auto w : st.s2) X.emplace_back(s, w);
  st.pi_x = prob_sort(session, X, seed, c.probsort);

  const std::size_t m = st.s1.size();
  st.order.assign(m, {});
  st.kernel.assign(m, {});
  st.guard.assign(m, {});
  st.kernel_ranks.assign(m, {});
  for (std::size_t r = 0; r < st.pi_x.size(); ++r) {
    const Edge& e = st.pi_x[r];
    const VertexId s = st.slot_of.count(e.u()) ? e.u() : e.v();
    const std::size_t i = st.slot_of.at(s);
    const VertexId w = e.other(s);
    if (st.order[i].size() < sizes.m_win) {
      st.kernel[i].push_back(w);
      st.kernel_ranks[i].push_back(r + 1);
    } else if (st.order[i].size() >= sizes.m_win + 2 * sizes.D && st.order[i].size() < need) {
      st.guard[i].push_back(w);
    }
    st.order[i].push_back(w);
  }
  return st;
}

ProximityScore pcount(OracleSession& session, const RoundState& round, VertexId s, VertexId v) {
  const std::size_t i = round.slot(s);
  if (v == s) throw Error("pcount of a sample against itself");
  ProximityScore score;
  const Edge sv(s, v);
  for (auto g : round.guard[i]) {
    if (g == v) continue;
    ++score.denominator;
    if (session.quad(sv, Edge(s, g)) == Answer::yes) ++score.value;
  }
  return score;
}

std::size_t ProximityCache::score(VertexId s, VertexId v) {
  const std::uint64_t key = (std::uint64_t{round_.slot(s)} << 32) | v;
  auto it = cache_.find(key);
  if (it != cache_.end()) return it->second;
  const auto value = static_cast<std::uint32_t>(pcount(session_, round_, s, v).value);
  cache_.emplace(key, value);
  return value;
}

FilterResult filter_survivors(ProximityCache& cache, const RoundState& round, std::span<const VertexId> active) {
  FilterResult out;
  for (auto v : active) {
    if (round.is_s1(v) || round.is_s2(v)) continue;
    ++out.candidates;
    bool close = false;
    for (auto s : round.s1)
      if ((close = cache.close(s, v))) break;
    if (!close) out.survivors.push_back(v);
  }
  return out;
}

namespace {

// Majority test over `kernel`: how many w give "d(a) > d(w, x)".
std::size_t longer_votes(OracleSession& session, const Edge& a, const std::vector<VertexId>& kernel, VertexId x) {
  std::size_t t = 0;
  for (auto w : kernel)
    if (session.quad(a, Edge(w, x)) == Answer::no) ++t;
  return t;
}

// kernel(s_trim) without the members whose edge sits in the last D+1 ranks of pi_Z.
std::vector<VertexId> trimmed_kernel(const RoundState& round, std::size_t keep, std::size_t trim) {
  const auto& kr = round.kernel_ranks[trim];
  const auto& other = round.kernel_ranks[keep];
  const std::size_t z = kr.size() + other.size();
  const std::size_t cut = z > round.sizes.D ? z - round.sizes.D : 0;
  std::vector<VertexId> out;
  for (std::size_t j = 0; j < kr.size(); ++j) {
    const auto below = static_cast<std::size_t>(std::lower_bound(other.begin(), other.end(), kr[j]) - other.begin());
    if (j + 1 + below < cut) out.push_back(round.kernel[trim][j]);
  }
  return out;
}

}  // namespace

Answer alg_tester(OracleSession& session, const RoundState& round, OrientedEdge q1, OrientedEdge q2,
                  TesterStats* stats) {
  if (stats) ++stats->calls;
  const Edge e1 = q1.edge(), e2 = q2.edge();
  if (e1 == e2) return Answer::yes;
  const std::size_t i1 = round.slot(q1.s), i2 = round.slot(q2.s);

  // Votes are cast by the side whose kernel does not hold the last edge of pi_Z.
  bool first_votes = false;  // true: kernel'(s1) votes on ({s2,v2},{w,v1})
  std::vector<VertexId> kernel;
  if (i1 == i2) {
    kernel = round.kernel[i2];
  } else {
    const std::size_t last1 = round.kernel_ranks[i1].empty() ? 0 : round.kernel_ranks[i1].back();
    const std::size_t last2 = round.kernel_ranks[i2].empty() ? 0 : round.kernel_ranks[i2].back();
    if (last1 > last2) {
      kernel = trimmed_kernel(round, i1, i2);
    } else {
      kernel = trimmed_kernel(round, i2, i1);
      first_votes = true;
    }
  }
  if (kernel.size() < 3) {
    if (stats) ++stats->fallbacks;
    return session.quad(e1, e2);
  }
  const std::size_t half = kernel.size() / 2;
  if (!first_votes) {
    // "d(s1,v1) > d(s2,v2)" iff Tcount > half
    return longer_votes(session, e1, kernel, q2.v) > half ? Answer::no : Answer::yes;
  }
  // "d(s2,v2) > d(s1,v1)" iff Tcount > half
  return longer_votes(session, e2, kernel, q1.v) > half ? Answer::yes : Answer::no;
}

std::string stage_name(const std::string& algo, std::size_t round, const std::string& step) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "r%02zu", round);
  return algo + "/" + buf + "/" + step;
}

}  // namespace quadcore
