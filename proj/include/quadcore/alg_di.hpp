#pragma once

#include <cstdint>
#include <vector>

#include "quadcore/coreset_plus.hpp"
#include "quadcore/round_machinery.hpp"

namespace quadcore {

// Level sets of one center's assigned vertices. U^t is the last ceil(|U|/2^t)
// vertices of the inherited order (the far end).
struct LevelSampling {
  VertexId center = 0;
  std::vector<VertexId> assigned;          // U_s, inherited order
  std::size_t level_cap = 0;               // min(ceil(c_IMP L^3), |U_s|)
  std::size_t cutoff = 0;                  // t_s
  std::vector<std::vector<VertexId>> samples;  // W^t for t < t_s, deduplicated
  std::vector<VertexId> members;           // W_s, sorted

  static std::size_t level_size(std::size_t u, std::size_t t);
};

struct LevelPlan {
  std::vector<LevelSampling> centers;  // only centers with a non-empty U_s
  std::vector<Edge> Z;                 // union of E(U_s \ W_s, W_s)
};

LevelPlan build_level_sampling(const CoresetPlus& cp, const AlgoConstants& c, std::uint64_t seed);

struct Refinement {
  CoresetPlus coreset;        // C+ = C u W with M+
  std::size_t z_size = 0;
  std::size_t added = 0;      // |C+| - |C|
  std::uint64_t quad = 0;     // queries spent here
};

// Remaps every non-center to the nearest member of W_{M(v)} by one ordering of Z.
// Defined for p = 1.
Refinement refine(OracleSession& session, const CoresetPlus& cp, const AlgoConstants& c, std::uint64_t seed);

}  // namespace quadcore
