#pragma once

#include <vector>

#include <algorithm>
#include <random>

#include "quadcore/metric_space.hpp"
#include "quadcore/rng.hpp"

namespace quadcore::testing {

// Points on a line.
inline MetricSpace line_space(const std::vector<double>& xs) {
  Points p(static_cast<Eigen::Index>(xs.size()), 1);
  for (std::size_t i = 0; i < xs.size(); ++i) p(static_cast<Eigen::Index>(i), 0) = xs[i];
  return MetricSpace::euclidean(std::move(p));
}

// Uniform points in [0, side]^dim.
inline MetricSpace uniform_space(std::size_t n, std::size_t dim, std::uint64_t seed, double side = 1.0) {
  auto rng = make_rng(seed, {0x7465});
  std::uniform_real_distribution<double> u(0.0, side);
  Points p(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(dim));
  for (Eigen::Index i = 0; i < p.rows(); ++i)
    for (Eigen::Index j = 0; j < p.cols(); ++j) p(i, j) = u(rng);
  return MetricSpace::euclidean(std::move(p));
}

inline std::vector<Edge> random_edges(std::size_t n, std::size_t m, std::uint64_t seed) {
  auto rng = make_rng(seed, {0x6564});
  std::uniform_int_distribution<VertexId> pick(0, static_cast<VertexId>(n - 1));
  std::vector<Edge> out;
  std::vector<std::uint64_t> seen;
  while (out.size() < m) {
    VertexId a = pick(rng), b = pick(rng);
    if (a == b) continue;
    Edge e(a, b);
    if (std::find(seen.begin(), seen.end(), e.key()) != seen.end()) continue;
    seen.push_back(e.key());
    out.push_back(e);
  }
  return out;
}

}  // namespace quadcore::testing
