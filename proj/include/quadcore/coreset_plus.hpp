#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "quadcore/types.hpp"

namespace quadcore {

struct RoundReport {
  std::size_t index = 0;      // 1-based
  std::size_t active = 0;     // |V_i|
  std::size_t s1 = 0;
  std::size_t s2 = 0;
  std::size_t survivors = 0;  // |V_i'|
  std::size_t mapped = 0;     // |V_i''|
  std::size_t chi = 0;        // classes used by the doubling variant
  std::size_t eliminated = 0;
  std::size_t tester_calls = 0;
  std::size_t tester_fallbacks = 0;
  std::uint64_t quad = 0;     // quadruplet queries issued during the round
};

// Center set C with a total mapping M: V -> C (identity on C).
struct CoresetPlus {
  std::size_t n = 0;
  int p = 1;
  std::vector<VertexId> centers;          // sorted
  std::vector<VertexId> mapping;          // indexed by vertex
  std::vector<std::uint32_t> round;       // round in which v was mapped or became a center
  std::vector<std::uint32_t> order_rank;  // position of v in its round's safe-set order, 0 for centers
  std::vector<RoundReport> rounds;
  std::size_t final_active = 0;           // vertices left when the loop stopped

  bool is_center(VertexId v) const { return mapping[v] == v; }
  // Vertices mapped to c, excluding c, in safe-set order.
  std::vector<VertexId> assigned(VertexId c) const;
  // Throws unless mapping is total, lands in C and is the identity on C.
  void validate() const;
};

CoresetPlus identity_coreset(std::size_t n, int p);

// `vertex,center,round`, plus `refined_center` when given.
void write_coreset_dump(std::ostream& out, const CoresetPlus& cp, const std::vector<VertexId>* refined = nullptr);

// What one non-terminal round decided.
struct RoundOutcome {
  std::vector<std::pair<VertexId, VertexId>> safe;  // (v, center) in safe-set order
  std::vector<VertexId> samples;                    // S_i, all become centers
  RoundReport report;
};

// Returns nullopt to end the loop; everything still active then becomes a center.
using RoundStep = std::function<std::optional<RoundOutcome>(std::span<const VertexId> active, std::size_t index)>;

// Runs rounds until `step` declines, the active set drops to `terminal_size`, or
// `round_cap` rounds have run.
CoresetPlus drive_rounds(std::size_t n, int p, std::size_t terminal_size, std::size_t round_cap, const RoundStep& step);

}  // namespace quadcore
