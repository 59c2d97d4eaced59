#pragma once

#include <algorithm>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <unordered_map>
#include <utility>
#include <vector>

#include "quadcore/metric_space.hpp"
#include "quadcore/oracle.hpp"
#include "quadcore/rng.hpp"
#include "quadcore/types.hpp"

namespace quadcore {

// ceil(log2 n), at least 1.
std::size_t ceil_log2(std::size_t n);

struct SortQuality {
  enum class Kind { none, dislocation, alpha_sorted };
  Kind kind = Kind::none;
  double bound = 0.0;  // dislocation count or alpha
};

// A permutation of a set of distinct edges with O(1) rank lookup (ranks are 1-based).
class OrderedEdgeSequence {
 public:
  OrderedEdgeSequence() = default;
  OrderedEdgeSequence(std::vector<Edge> edges, SortQuality quality);

  std::size_t size() const { return edges_.size(); }
  bool empty() const { return edges_.empty(); }
  const Edge& operator[](std::size_t i) const { return edges_[i]; }
  const std::vector<Edge>& edges() const { return edges_; }
  auto begin() const { return edges_.begin(); }
  auto end() const { return edges_.end(); }

  bool contains(const Edge& e) const { return rank_.count(e.key()) != 0; }
  std::size_t rank(const Edge& e) const;
  const SortQuality& quality() const { return quality_; }

 private:
  std::vector<Edge> edges_;
  std::unordered_map<std::uint64_t, std::uint32_t> rank_;
  SortQuality quality_;
};

struct ProbSortParams {
  double c_R = 4.0;  // repair passes per ceil(log2 n)
  double c_W = 8.0;  // window width per ceil(log2 n)
  double c_D = 6.0;  // claimed dislocation per ceil(log2 n)
};

// Ordering with bounded dislocation under persistent probabilistic noise.
OrderedEdgeSequence prob_sort(OracleSession& session, std::span<const Edge> X, std::uint64_t seed,
                              const ProbSortParams& params = {});

namespace detail {

inline void check_distinct(std::span<const Edge> X) {
  std::vector<std::uint64_t> keys;
  keys.reserve(X.size());
  for (const auto& e : X) keys.push_back(e.key());
  std::sort(keys.begin(), keys.end());
  if (std::adjacent_find(keys.begin(), keys.end()) != keys.end()) throw Error("edge set contains duplicates");
}

// Round-robin tournament: every pair asked once, sorted by wins (stable on ties).
template <typename Cmp>
void round_robin(std::vector<Edge>& a, std::size_t lo, std::size_t hi, Cmp& cmp) {
  const std::size_t m = hi - lo;
  std::vector<std::pair<int, std::size_t>> score(m);
  for (std::size_t i = 0; i < m; ++i) score[i] = {0, i};
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i + 1; j < m; ++j) {
      if (cmp(a[lo + i], a[lo + j]) == Answer::yes)
        --score[i].first;
      else
        --score[j].first;
    }
  std::stable_sort(score.begin(), score.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
  std::vector<Edge> tmp(m);
  for (std::size_t i = 0; i < m; ++i) tmp[i] = a[lo + score[i].second];
  std::copy(tmp.begin(), tmp.end(), a.begin() + static_cast<std::ptrdiff_t>(lo));
}

}  // namespace detail

// Randomized quicksort driven by a comparator; subproblems of size <= floor are
// ordered by round-robin. `mu` is the comparator's declared ambiguity parameter and
// only sets the quality tag, (1+mu)^2.
template <typename Cmp>
OrderedEdgeSequence adv_sort(std::span<const Edge> X, Cmp&& cmp, std::uint64_t seed, double mu,
                             std::size_t floor = 8) {
  detail::check_distinct(X);
  std::vector<Edge> a(X.begin(), X.end());
  auto rng = make_rng(seed, {0x6164});
  std::vector<std::pair<std::size_t, std::size_t>> stack{{0, a.size()}};
  std::vector<Edge> left, right;
  while (!stack.empty()) {
    auto [lo, hi] = stack.back();
    stack.pop_back();
    if (hi - lo <= 1) continue;
    if (hi - lo <= floor) {
      detail::round_robin(a, lo, hi, cmp);
      continue;
    }
    std::uniform_int_distribution<std::size_t> pick(lo, hi - 1);
    const Edge pivot = a[pick(rng)];
    left.clear();
    right.clear();
    for (std::size_t i = lo; i < hi; ++i) {
      if (a[i] == pivot) continue;
      (cmp(a[i], pivot) == Answer::yes ? left : right).push_back(a[i]);
    }
    std::copy(left.begin(), left.end(), a.begin() + static_cast<std::ptrdiff_t>(lo));
    const std::size_t mid = lo + left.size();
    a[mid] = pivot;
    std::copy(right.begin(), right.end(), a.begin() + static_cast<std::ptrdiff_t>(mid + 1));
    stack.emplace_back(lo, mid);
    stack.emplace_back(mid + 1, hi);
  }
  return OrderedEdgeSequence(std::move(a), {SortQuality::Kind::alpha_sorted, (1.0 + mu) * (1.0 + mu)});
}

// Subsequence of pi made of the edges in Y, in pi order.
OrderedEdgeSequence induced_order(const OrderedEdgeSequence& pi, std::span<const Edge> Y);

// Ground-truth diagnostics (test and audit use only).
std::vector<std::size_t> true_ranks(const MetricSpace& space, const OrderedEdgeSequence& pi);
std::size_t measure_dislocation(const MetricSpace& space, const OrderedEdgeSequence& pi);
double measure_alpha(const MetricSpace& space, const OrderedEdgeSequence& pi);
// `rank,edge_u,edge_v,true_rank`
void write_order_dump(std::ostream& out, const MetricSpace& space, const OrderedEdgeSequence& pi);

}  // namespace quadcore
