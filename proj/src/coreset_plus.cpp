#include "quadcore/coreset_plus.hpp"

#include <algorithm>
#include <numeric>
#include <ostream>

namespace quadcore {

std::vector<VertexId> CoresetPlus::assigned(VertexId c) const {
  std::vector<VertexId> out;
  for (VertexId v = 0; v < mapping.size(); ++v)
    if (mapping[v] == c && v != c) out.push_back(v);
  std::stable_sort(out.begin(), out.end(), [&](VertexId a, VertexId b) { return order_rank[a] < order_rank[b]; });
  return out;
}

void CoresetPlus::validate() const {
  if (mapping.size() != n || round.size() != n || order_rank.size() != n) throw Error("coreset arrays must have size n");
  if (!std::is_sorted(centers.begin(), centers.end()) ||
      std::adjacent_find(centers.begin(), centers.end()) != centers.end())
    throw Error("centers must be sorted and distinct");
  std::vector<char> is_c(n, 0);
  for (auto c : centers) {
    if (c >= n) throw Error("center outside vertex range");
    is_c[c] = 1;
  }
  for (VertexId v = 0; v < n; ++v) {
    if (mapping[v] >= n || !is_c[mapping[v]]) throw Error("vertex mapped outside the center set");
    if (is_c[v] && mapping[v] != v) throw Error("center not mapped to itself");
  }
}

CoresetPlus identity_coreset(std::size_t n, int p) {
  CoresetPlus cp;
  cp.n = n;
  cp.p = p;
  cp.centers.resize(n);
  std::iota(cp.centers.begin(), cp.centers.end(), VertexId{0});
  cp.mapping = cp.centers;
  cp.round.assign(n, 1);
  cp.order_rank.assign(n, 0);
  cp.final_active = n;
  return cp;
}

void write_coreset_dump(std::ostream& out, const CoresetPlus& cp, const std::vector<VertexId>* refined) {
  out << "vertex,center,round" << (refined ? ",refined_center" : "") << '\n';
  for (VertexId v = 0; v < cp.n; ++v) {
    out << v << ',' << cp.mapping[v] << ',' << cp.round[v];
    if (refined) out << ',' << (*refined)[v];
    out << '\n';
  }
}

CoresetPlus drive_rounds(std::size_t n, int p, std::size_t terminal_size, std::size_t round_cap, const RoundStep& step) {
  CoresetPlus cp;
  cp.n = n;
  cp.p = p;
  cp.mapping.assign(n, 0);
  cp.round.assign(n, 0);
  cp.order_rank.assign(n, 0);
  std::vector<char> done(n, 0);
  std::vector<VertexId> active(n);
  std::iota(active.begin(), active.end(), VertexId{0});

  std::size_t index = 1;
  for (; index <= round_cap && active.size() > terminal_size; ++index) {
    auto outcome = step(active, index);
    if (!outcome) break;
    for (auto s : outcome->samples) {
      if (done[s]) throw Error("sample drawn from outside the active set");
      done[s] = 1;
      cp.centers.push_back(s);
      cp.mapping[s] = s;
      cp.round[s] = static_cast<std::uint32_t>(index);
    }
    std::uint32_t pos = 0;
    for (auto [v, c] : outcome->safe) {
      if (done[v] || v == c) throw Error("safe vertex already removed");
      done[v] = 1;
      cp.mapping[v] = c;
      cp.round[v] = static_cast<std::uint32_t>(index);
      cp.order_rank[v] = ++pos;
    }
    outcome->report.index = index;
    cp.rounds.push_back(outcome->report);
    std::erase_if(active, [&](VertexId v) { return done[v] != 0; });
  }
  cp.final_active = active.size();
  for (auto v : active) {
    cp.centers.push_back(v);
    cp.mapping[v] = v;
    cp.round[v] = static_cast<std::uint32_t>(index);
  }
  std::sort(cp.centers.begin(), cp.centers.end());
  return cp;
}

}  // namespace quadcore
