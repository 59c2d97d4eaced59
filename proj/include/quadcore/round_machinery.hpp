#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "quadcore/noisy_sort.hpp"
#include "quadcore/oracle.hpp"

namespace quadcore {

// Multipliers of the per-round sizes. Lengths scale with L = ceil(log2 n):
// m1 = c_s1 k L^2, m2 = c_s2 k L^3, D = c_D L, m_win = 2 max(c_win L, D).
struct AlgoConstants {
  double c_s1 = 0.0125;
  double c_s2 = 0.124;
  double c_win = 0.85;
  double c_D = 0.2;
  double c_r = 3.0;      // round cap, c_r * L
  double c_term = 0.25;  // terminal size c_term * k * L^3 ...
  double c_term_samples = 1.0;  // ... or c_term_samples * (m1 + m2), whichever is larger
  double c_IMP = 1.0;    // refinement level sample size c_IMP * L^3, clamped to |U_s|
  double c_F = 1.0;      // ANN traversal breadth cap c_F * L^2
  std::size_t fanout = 16;
  double safe_fraction = 0.25;
  double filter_threshold_fraction = 0.5;
  double sample_clamp = 0.25;  // each sample is at most this fraction of |V_i|
  ProbSortParams probsort;

  void validate() const;
};

struct RoundSizes {
  std::size_t L = 1;
  std::size_t m1 = 0;
  std::size_t m2 = 0;
  std::size_t D = 1;
  std::size_t m_win = 2;
  std::size_t filter_threshold = 1;  // floor(filter_threshold_fraction * m_win)
  std::size_t terminal_size = 0;
  std::size_t round_cap = 1;
};

RoundSizes round_sizes(std::size_t n, std::size_t k, const AlgoConstants& c);

struct Samples {
  std::vector<VertexId> s1;
  std::vector<VertexId> s2;
  bool terminal = false;
};

// Draws S1 and S2 from `active` with replacement, deduplicates, removes S1 from S2 and
// clamps each to sample_clamp * |active|. Terminal when S2 cannot hold the windows.
Samples draw_samples(std::span<const VertexId> active, const RoundSizes& sizes, const AlgoConstants& c,
                     std::uint64_t seed);

// One round's frozen sample structure.
struct RoundState {
  std::size_t index = 0;
  RoundSizes sizes;
  std::vector<VertexId> s1;
  std::vector<VertexId> s2;
  OrderedEdgeSequence pi_x;
  // Indexed by position of s in s1.
  std::vector<std::vector<VertexId>> order;   // S2 in the order induced on E(s, S2)
  std::vector<std::vector<VertexId>> kernel;  // order[0, m_win)
  std::vector<std::vector<VertexId>> guard;   // order[m_win + 2D, 2 m_win + 2D)
  std::vector<std::vector<std::size_t>> kernel_ranks;  // ranks in pi_x of E(s, kernel(s)), ascending
  std::unordered_map<VertexId, std::size_t> slot_of;
  std::vector<char> in_s2;  // indexed by vertex

  std::size_t slot(VertexId s) const;
  bool is_s1(VertexId v) const { return slot_of.count(v) != 0; }
  bool is_s2(VertexId v) const { return v < in_s2.size() && in_s2[v]; }
};

// Sorts E(S1, S2) with prob_sort and cuts kernel and guard windows per s.
RoundState build_kernel_guard(OracleSession& session, std::size_t index, const RoundSizes& sizes, Samples samples,
                              const AlgoConstants& c, std::uint64_t seed);

struct ProximityScore {
  std::size_t value = 0;
  std::size_t denominator = 0;
};

// Number of g in guard(s) with quad({s,v},{s,g}) = YES.
ProximityScore pcount(OracleSession& session, const RoundState& round, VertexId s, VertexId v);

// Per-round memo of proximity scores.
class ProximityCache {
 public:
  ProximityCache(OracleSession& session, const RoundState& round) : session_(session), round_(round) {}
  std::size_t score(VertexId s, VertexId v);
  bool close(VertexId s, VertexId v) { return score(s, v) >= round_.sizes.filter_threshold; }
  std::size_t evaluated() const { return cache_.size(); }

 private:
  OracleSession& session_;
  const RoundState& round_;
  std::unordered_map<std::uint64_t, std::uint32_t> cache_;
};

struct FilterResult {
  std::vector<VertexId> survivors;
  std::size_t candidates = 0;  // |V_i \ S_i|
  double survivor_fraction(std::size_t active) const {
    return active ? static_cast<double>(survivors.size()) / static_cast<double>(active) : 0.0;
  }
};

// V_i' = {v in V_i \ S_i : max_s Pcount_s(v) < threshold}.
FilterResult filter_survivors(ProximityCache& cache, const RoundState& round, std::span<const VertexId> active);

struct TesterStats {
  std::size_t calls = 0;
  std::size_t fallbacks = 0;  // kernel' too small, answered by a raw query
};

// Emulated adversarial comparator on ({s1,v1},{s2,v2}); YES means d(s1,v1) <= d(s2,v2).
Answer alg_tester(OracleSession& session, const RoundState& round, OrientedEdge q1, OrientedEdge q2,
                  TesterStats* stats = nullptr);

// Observer for tester answers; audits use it with ground truth.
using TesterHook = std::function<void(OrientedEdge, OrientedEdge, Answer)>;

std::string stage_name(const std::string& algo, std::size_t round, const std::string& step);

}  // namespace quadcore
