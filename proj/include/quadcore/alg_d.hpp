#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "quadcore/alg_g.hpp"

namespace quadcore {

// Undirected graph on S1 positions 0..m-1.
struct ConflictGraph {
  std::vector<VertexId> vertices;
  std::vector<std::vector<std::size_t>> adjacency;

  std::size_t size() const { return vertices.size(); }
  std::size_t edge_count() const;
  void add_edge(std::size_t a, std::size_t b);
};

struct Coloring {
  std::vector<std::size_t> color;      // per graph position, 0-based
  std::vector<std::size_t> ordering;   // removal order (min degree first)
  std::size_t degeneracy = 0;
  std::size_t colors = 0;
};

// Smallest-last ordering, then greedy colouring in reverse removal order.
Coloring degeneracy_color(const ConflictGraph& g);
bool is_proper(const ConflictGraph& g, const Coloring& c);

// S1 pairs with max(Pcount_s(s'), Pcount_s'(s)) at or above the filter threshold.
ConflictGraph close_pairs(ProximityCache& cache, const RoundState& round);

// Hierarchical net over one class, built from the rank order of its internal edges only.
struct AnnStructure {
  std::vector<VertexId> members;              // greedy permutation by rank
  std::vector<std::size_t> level_end;         // prefix size per level, last == members.size()
  std::vector<std::vector<std::size_t>> children;  // member index -> indices first appearing one level down
  std::vector<OrientedEdge> ruler;            // internal edges in the given order
  std::size_t fanout = 16;
};

AnnStructure construct_ann(std::span<const VertexId> cls, const OrderedEdgeSequence& pi, std::size_t fanout);

using EdgeComparator = std::function<Answer(OrientedEdge, OrientedEdge)>;
// True when v is too close to class vertex s to be queried (lazy filter).
using CloseCheck = std::function<bool(VertexId s)>;

struct AnnResult {
  bool eliminated = false;
  std::vector<VertexId> candidates;  // class vertices x, closest first; edges {x, v}
  std::size_t visited = 0;
};

AnnResult traverse_ann(const AnnStructure& t, VertexId v, std::size_t cap, const EdgeComparator& cmp,
                       const CloseCheck& close);

CoresetPlus alg_d(OracleSession& session, std::size_t k, int p, const RunOptions& opts, std::uint64_t seed);

std::optional<RoundOutcome> run_round_doubling(OracleSession& session, std::span<const VertexId> active,
                                               const RoundSizes& sizes, std::size_t index, const RunOptions& opts,
                                               std::uint64_t seed);

}  // namespace quadcore
