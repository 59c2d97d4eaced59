#include "quadcore/metric_space.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "quadcore/rng.hpp"

namespace quadcore {

MetricSpace MetricSpace::euclidean(Points points) {
  if (points.rows() == 0) throw Error("empty point set");
  if (!points.allFinite()) throw Error("non-finite coordinates");
  MetricSpace m;
  m.kind_ = Kind::euclidean;
  m.n_ = static_cast<std::size_t>(points.rows());
  m.points_ = std::move(points);
  return m;
}

MetricSpace MetricSpace::from_matrix(Eigen::MatrixXd matrix) {
  if (matrix.rows() == 0 || matrix.rows() != matrix.cols()) throw Error("distance matrix must be square and non-empty");
  if (!matrix.allFinite()) throw Error("non-finite distance");
  const Eigen::Index n = matrix.rows();
  for (Eigen::Index i = 0; i < n; ++i) {
    if (matrix(i, i) != 0.0) throw Error("distance matrix diagonal must be zero");
    for (Eigen::Index j = i + 1; j < n; ++j) {
      if (matrix(i, j) < 0.0) throw Error("negative distance");
      if (matrix(i, j) != matrix(j, i)) throw Error("distance matrix must be symmetric");
    }
  }
  MetricSpace m;
  m.kind_ = Kind::explicit_matrix;
  m.n_ = static_cast<std::size_t>(n);
  m.matrix_ = std::move(matrix);
  return m;
}

MetricSpace MetricSpace::subspace(std::span<const VertexId> vertices) const {
  for (auto v : vertices) check(v);
  const auto m = static_cast<Eigen::Index>(vertices.size());
  if (kind_ == Kind::euclidean) {
    Points sub(m, points_.cols());
    for (Eigen::Index i = 0; i < m; ++i) sub.row(i) = points_.row(vertices[i]);
    return euclidean(std::move(sub));
  }
  Eigen::MatrixXd sub(m, m);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < m; ++j) sub(i, j) = matrix_(vertices[i], vertices[j]);
  return from_matrix(std::move(sub));
}

double WeightedPointSet::total_weight() const { return std::accumulate(weights.begin(), weights.end(), 0.0); }

std::vector<VertexId> all_vertices(const MetricSpace& space) {
  std::vector<VertexId> v(space.size());
  std::iota(v.begin(), v.end(), VertexId{0});
  return v;
}

std::size_t triangle_violations(const MetricSpace& space, std::size_t samples, std::uint64_t seed, double tol) {
  const std::size_t n = space.size();
  std::size_t bad = 0;
  auto check = [&](VertexId a, VertexId b, VertexId c) {
    const double ab = space.distance(a, b), bc = space.distance(b, c), ac = space.distance(a, c);
    const double scale = std::max({ab, bc, ac, 1.0});
    if (ac > ab + bc + tol * scale) ++bad;
  };
  if (n * n * n <= samples) {
    for (VertexId a = 0; a < n; ++a)
      for (VertexId b = 0; b < n; ++b)
        for (VertexId c = 0; c < n; ++c) check(a, b, c);
    return bad;
  }
  auto rng = make_rng(seed, {0x7431});
  std::uniform_int_distribution<VertexId> pick(0, static_cast<VertexId>(n - 1));
  for (std::size_t i = 0; i < samples; ++i) check(pick(rng), pick(rng), pick(rng));
  return bad;
}

double distance_to_set(const MetricSpace& space, VertexId v, std::span<const VertexId> centers) {
  if (centers.empty()) throw Error("empty center set");
  double best = std::numeric_limits<double>::infinity();
  for (auto c : centers) best = std::min(best, space.distance(v, c));
  return best;
}

VertexId nearest_in(const MetricSpace& space, VertexId v, std::span<const VertexId> centers) {
  if (centers.empty()) throw Error("empty center set");
  VertexId arg = centers.front();
  double best = std::numeric_limits<double>::infinity();
  for (auto c : centers) {
    const double d = space.distance(v, c);
    if (d < best) {
      best = d;
      arg = c;
    }
  }
  return arg;
}

double clustering_cost(const MetricSpace& space, std::span<const VertexId> centers, std::span<const VertexId> points,
                       int p) {
  double total = 0.0;
  for (auto w : points) total += pow_p(distance_to_set(space, w, centers), p);
  return total;
}

double clustering_cost(const MetricSpace& space, std::span<const VertexId> centers, const WeightedPointSet& points,
                       int p) {
  double total = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i)
    total += points.weights[i] * pow_p(distance_to_set(space, points.points[i], centers), p);
  return total;
}

double mapping_cost(const MetricSpace& space, std::span<const VertexId> mapping, std::span<const VertexId> points,
                    int p) {
  if (mapping.size() != space.size()) throw Error("mapping must cover every vertex");
  double total = 0.0;
  for (auto w : points) total += pow_p(space.distance(w, mapping[w]), p);
  return total;
}

std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t r = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    const std::uint64_t num = n - k + i;
    if (r > std::numeric_limits<std::uint64_t>::max() / num) return std::numeric_limits<std::uint64_t>::max();
    r = r * num / i;
  }
  return r;
}

namespace {

OptResult exhaustive(const MetricSpace& space, std::vector<VertexId> candidates, std::span<const VertexId> points,
                     std::span<const double> weights, std::size_t k, int p, std::uint64_t cap) {
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
  const std::size_t m = candidates.size();
  if (k == 0 || k > m) throw Error("k must be in [1, |W|]");
  if (binomial(m, k) > cap) throw Error("brute-force enumeration exceeds cap");

  // cost[j][i] = w_i * d(points_i, candidate_j)^p
  std::vector<std::vector<double>> cost(m, std::vector<double>(points.size()));
  for (std::size_t j = 0; j < m; ++j)
    for (std::size_t i = 0; i < points.size(); ++i)
      cost[j][i] = weights[i] * pow_p(space.distance(points[i], candidates[j]), p);

  std::vector<std::size_t> idx(k);
  std::iota(idx.begin(), idx.end(), 0);
  OptResult best;
  best.cost = std::numeric_limits<double>::infinity();
  std::vector<double> row(points.size());
  while (true) {
    std::fill(row.begin(), row.end(), std::numeric_limits<double>::infinity());
    for (auto j : idx)
      for (std::size_t i = 0; i < points.size(); ++i) row[i] = std::min(row[i], cost[j][i]);
    const double c = std::accumulate(row.begin(), row.end(), 0.0);
    if (c < best.cost) {
      best.cost = c;
      best.centers.clear();
      for (auto j : idx) best.centers.push_back(candidates[j]);
    }
    // next combination in lexicographic order
    std::size_t pos = k;
    while (pos > 0 && idx[pos - 1] == m - k + pos - 1) --pos;
    if (pos == 0) break;
    ++idx[pos - 1];
    for (std::size_t t = pos; t < k; ++t) idx[t] = idx[t - 1] + 1;
  }
  return best;
}

}  // namespace

OptResult brute_force_opt(const MetricSpace& space, std::span<const VertexId> points, std::size_t k, int p,
                          std::uint64_t cap) {
  std::vector<double> ones(points.size(), 1.0);
  return exhaustive(space, {points.begin(), points.end()}, points, ones, k, p, cap);
}

OptResult brute_force_opt(const MetricSpace& space, const WeightedPointSet& points, std::size_t k, int p,
                          std::uint64_t cap) {
  return exhaustive(space, points.points, points.points, points.weights, k, p, cap);
}

}  // namespace quadcore
