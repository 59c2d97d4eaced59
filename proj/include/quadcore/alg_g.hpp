#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "quadcore/coreset_plus.hpp"
#include "quadcore/round_machinery.hpp"

namespace quadcore {

// Read-only view of a finished round, handed to observers (audits, tests).
struct RoundView {
  const RoundState& state;
  std::span<const VertexId> active;
  const FilterResult& filter;
  const RoundOutcome& outcome;
  // Doubling variant only.
  const std::vector<std::vector<VertexId>>* classes = nullptr;
  const std::vector<VertexId>* eliminated = nullptr;
};

struct RunOptions {
  AlgoConstants constants;
  std::function<void(const RoundView&)> observer;
  TesterHook tester_hook;
};

// One round of the general-metric algorithm over `active`; nullopt when sampling
// cannot support the windows (the loop ends there).
std::optional<RoundOutcome> run_round_general(OracleSession& session, std::span<const VertexId> active,
                                              const RoundSizes& sizes, std::size_t index, const RunOptions& opts,
                                              std::uint64_t seed);

CoresetPlus alg_g(OracleSession& session, std::size_t k, int p, const RunOptions& opts, std::uint64_t seed);

// Same recursion trusting every raw answer: nearest sample by a sequential scan and a
// plain quicksort of the resulting edges.
CoresetPlus baseline_generic(OracleSession& session, std::size_t k, int p, const AlgoConstants& c, std::uint64_t seed);

namespace detail {
// First edge per non-sample endpoint in a sorted E(S, V'); returns (v, s) pairs in order.
std::vector<std::pair<VertexId, VertexId>> first_incident(const OrderedEdgeSequence& order, const RoundState& round);
// Safe-set size for a round over `active` vertices.
std::size_t safe_count(std::size_t active, const AlgoConstants& c);
}  // namespace detail

}  // namespace quadcore
