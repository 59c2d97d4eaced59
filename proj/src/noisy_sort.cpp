#include "quadcore/noisy_sort.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>

namespace quadcore {

std::size_t ceil_log2(std::size_t n) {
  std::size_t l = 0;
  while ((std::size_t{1} << l) < n) ++l;
  return std::max<std::size_t>(l, 1);
}

OrderedEdgeSequence::OrderedEdgeSequence(std::vector<Edge> edges, SortQuality quality)
    : edges_(std::move(edges)), quality_(quality) {
  rank_.reserve(edges_.size());
  for (std::size_t i = 0; i < edges_.size(); ++i)
    if (!rank_.emplace(edges_[i].key(), static_cast<std::uint32_t>(i + 1)).second)
      throw Error("ordered sequence contains a duplicate edge");
}

std::size_t OrderedEdgeSequence::rank(const Edge& e) const {
  auto it = rank_.find(e.key());
  if (it == rank_.end()) throw Error("edge not in sequence");
  return it->second;
}

namespace {

struct WindowSorter {
  OracleSession& session;
  std::vector<std::size_t> smaller;
  std::vector<std::pair<std::size_t, std::size_t>> key;
  std::vector<Edge> next;

  // Reposition every element by (window start + number of window members answered
  // smaller). Returns false when the order is a fixed point.
  bool pass(std::vector<Edge>& a, std::size_t half) {
    const std::size_t m = a.size();
    smaller.assign(m, 0);
    key.resize(m);
    next.resize(m);
    // Each neighbouring pair is asked once; persistence gives the reverse for free.
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = i + 1; j < std::min(m, i + half + 1); ++j) {
        if (session.quad(a[i], a[j]) == Answer::yes)
          ++smaller[j];
        else
          ++smaller[i];
      }
    for (std::size_t i = 0; i < m; ++i) key[i] = {(i > half ? i - half : 0) + smaller[i], i};
    std::sort(key.begin(), key.end());
    bool moved = false;
    for (std::size_t i = 0; i < m; ++i) {
      next[i] = a[key[i].second];
      moved |= key[i].second != i;
    }
    a.swap(next);
    return moved;
  }

  void repair(std::vector<Edge>& a, std::size_t half, std::size_t passes) {
    for (std::size_t p = 0; p < passes; ++p)
      if (!pass(a, half)) break;  // a fixed point would ask the same pairs again
  }
};

struct ProbSorter {
  OracleSession& session;
  WindowSorter windows;
  std::size_t half;       // repair window half-width
  std::size_t passes;     // repair passes
  std::size_t block;      // comparisons per binary-search step
  std::size_t base;       // below this size, sort by shrinking windows
  Rng rng;

  void sort(std::vector<Edge>& a) {
    const std::size_t m = a.size();
    if (m <= 1) return;
    if (m <= base) {
      for (std::size_t h = m; h > half; h /= 2) windows.pass(a, h);
      windows.repair(a, half, passes);
      return;
    }
    // Sort a random eighth recursively, then insert the rest by robust binary search.
    std::shuffle(a.begin(), a.end(), rng);
    const std::size_t r = std::max<std::size_t>(base / 2, m / 8);
    std::vector<Edge> ref(a.begin(), a.begin() + static_cast<std::ptrdiff_t>(r));
    sort(ref);
    std::vector<std::vector<Edge>> slots(r + 1);
    for (std::size_t i = r; i < m; ++i) slots[locate(ref, a[i])].push_back(a[i]);
    a.clear();
    for (std::size_t p = 0; p <= r; ++p) {
      a.insert(a.end(), slots[p].begin(), slots[p].end());
      if (p < r) a.push_back(ref[p]);
    }
    windows.repair(a, half, passes);
  }

  // Number of reference elements that x should follow. Each step compares x with a
  // block of consecutive references around the probe and follows the majority.
  std::size_t locate(const std::vector<Edge>& ref, const Edge& x) {
    std::size_t lo = 0, hi = ref.size();
    while (lo < hi) {
      const std::size_t mid = lo + (hi - lo) / 2;
      const std::size_t from = mid >= block / 2 ? mid - block / 2 : 0;
      const std::size_t to = std::min(ref.size(), from + block);
      std::size_t below = 0;
      for (std::size_t j = from; j < to; ++j) below += session.quad(ref[j], x) == Answer::yes;
      if (2 * below > to - from)
        lo = mid + 1;
      else
        hi = mid;
    }
    return lo;
  }
};

}  // namespace

OrderedEdgeSequence prob_sort(OracleSession& session, std::span<const Edge> X, std::uint64_t seed,
                              const ProbSortParams& params) {
  detail::check_distinct(X);
  const std::size_t L = ceil_log2(session.n());
  const SortQuality claim{SortQuality::Kind::dislocation, std::ceil(params.c_D * static_cast<double>(L))};
  std::vector<Edge> a(X.begin(), X.end());
  const auto width = static_cast<std::size_t>(std::ceil(params.c_W * static_cast<double>(L)));
  ProbSorter sorter{session,
                    WindowSorter{session, {}, {}, {}},
                    std::max<std::size_t>(1, width / 2),
                    static_cast<std::size_t>(std::ceil(params.c_R * static_cast<double>(L))),
                    2 * (2 * L) + 1,
                    std::max<std::size_t>(64, 4 * width),
                    make_rng(seed, {0x7073})};
  std::shuffle(a.begin(), a.end(), sorter.rng);
  sorter.sort(a);
  return OrderedEdgeSequence(std::move(a), claim);
}

OrderedEdgeSequence induced_order(const OrderedEdgeSequence& pi, std::span<const Edge> Y) {
  std::vector<std::pair<std::size_t, Edge>> ranked;
  ranked.reserve(Y.size());
  for (const auto& e : Y) ranked.emplace_back(pi.rank(e), e);
  std::sort(ranked.begin(), ranked.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
  std::vector<Edge> out;
  out.reserve(ranked.size());
  for (const auto& r : ranked) out.push_back(r.second);
  return OrderedEdgeSequence(std::move(out), pi.quality());
}

std::vector<std::size_t> true_ranks(const MetricSpace& space, const OrderedEdgeSequence& pi) {
  std::vector<std::size_t> idx(pi.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::vector<double> d(pi.size());
  for (std::size_t i = 0; i < pi.size(); ++i) d[i] = space.distance(pi[i]);
  std::sort(idx.begin(), idx.end(), [&](std::size_t x, std::size_t y) {
    if (d[x] != d[y]) return d[x] < d[y];
    return pi[x].key() < pi[y].key();
  });
  std::vector<std::size_t> rank(pi.size());
  for (std::size_t r = 0; r < idx.size(); ++r) rank[idx[r]] = r + 1;
  return rank;
}

std::size_t measure_dislocation(const MetricSpace& space, const OrderedEdgeSequence& pi) {
  const auto rank = true_ranks(space, pi);
  std::size_t worst = 0;
  for (std::size_t i = 0; i < rank.size(); ++i) {
    const std::size_t pos = i + 1;
    worst = std::max(worst, pos > rank[i] ? pos - rank[i] : rank[i] - pos);
  }
  return worst;
}

double measure_alpha(const MetricSpace& space, const OrderedEdgeSequence& pi) {
  double alpha = 1.0, prefix_max = 0.0;
  for (std::size_t j = 0; j < pi.size(); ++j) {
    const double d = space.distance(pi[j]);
    if (j > 0 && prefix_max > 0.0) {
      if (d == 0.0) return std::numeric_limits<double>::infinity();
      alpha = std::max(alpha, prefix_max / d);
    }
    prefix_max = std::max(prefix_max, d);
  }
  return alpha;
}

void write_order_dump(std::ostream& out, const MetricSpace& space, const OrderedEdgeSequence& pi) {
  const auto rank = true_ranks(space, pi);
  out << "rank,edge_u,edge_v,true_rank\n";
  for (std::size_t i = 0; i < pi.size(); ++i)
    out << i + 1 << ',' << pi[i].u() << ',' << pi[i].v() << ',' << rank[i] << '\n';
}

}  // namespace quadcore
