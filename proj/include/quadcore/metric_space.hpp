#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "quadcore/types.hpp"

namespace quadcore {

template <typename Scalar>
using PointMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

using Points = PointMatrix<double>;

// Finite metric over vertices 0..n-1, either Euclidean rows or an explicit matrix.
class MetricSpace {
 public:
  enum class Kind { euclidean, explicit_matrix };

  MetricSpace() = default;

  static MetricSpace euclidean(Points points);
  // Validates symmetry, zero diagonal and non-negativity.
  static MetricSpace from_matrix(Eigen::MatrixXd matrix);

  Kind kind() const { return kind_; }
  std::size_t size() const { return n_; }
  std::size_t dim() const { return kind_ == Kind::euclidean ? static_cast<std::size_t>(points_.cols()) : n_; }

  const Points& points() const { return points_; }
  const Eigen::MatrixXd& matrix() const { return matrix_; }

  double distance(VertexId a, VertexId b) const {
    check(a);
    check(b);
    return raw_distance(a, b);
  }
  double distance(const Edge& e) const { return distance(e.u(), e.v()); }

  // Strict total order on edges: by distance, then by canonical key.
  bool shorter(const Edge& a, const Edge& b) const {
    const double da = distance(a);
    const double db = distance(b);
    if (da != db) return da < db;
    return a.key() < b.key();
  }

  MetricSpace subspace(std::span<const VertexId> vertices) const;

  void check(VertexId a) const {
    if (a >= n_) throw Error("vertex id " + std::to_string(a) + " outside space of size " + std::to_string(n_));
  }

 private:
  double raw_distance(VertexId a, VertexId b) const {
    if (kind_ == Kind::euclidean) return (points_.row(a) - points_.row(b)).norm();
    return matrix_(a, b);
  }

  Kind kind_ = Kind::euclidean;
  std::size_t n_ = 0;
  Points points_;
  Eigen::MatrixXd matrix_;
};

// Multiset of vertices with positive weights.
struct WeightedPointSet {
  std::vector<VertexId> points;
  std::vector<double> weights;

  std::size_t size() const { return points.size(); }
  double total_weight() const;
};

std::vector<VertexId> all_vertices(const MetricSpace& space);

// Checks up to `samples` random triples and returns the number of violations.
std::size_t triangle_violations(const MetricSpace& space, std::size_t samples, std::uint64_t seed, double tol = 1e-9);

double distance_to_set(const MetricSpace& space, VertexId v, std::span<const VertexId> centers);
VertexId nearest_in(const MetricSpace& space, VertexId v, std::span<const VertexId> centers);

// sum_{w in W} d(w, C)^p
double clustering_cost(const MetricSpace& space, std::span<const VertexId> centers, std::span<const VertexId> points, int p);
double clustering_cost(const MetricSpace& space, std::span<const VertexId> centers, const WeightedPointSet& points, int p);

// sum_{w in W} d(w, mapping[w])^p where mapping is indexed by vertex id.
double mapping_cost(const MetricSpace& space, std::span<const VertexId> mapping, std::span<const VertexId> points, int p);

struct OptResult {
  double cost = 0.0;
  std::vector<VertexId> centers;
};

// Exhaustive k-subset search; throws if C(|W|, k) exceeds the cap.
OptResult brute_force_opt(const MetricSpace& space, std::span<const VertexId> points, std::size_t k, int p,
                          std::uint64_t cap = 1'000'000);
OptResult brute_force_opt(const MetricSpace& space, const WeightedPointSet& points, std::size_t k, int p,
                          std::uint64_t cap = 1'000'000);

std::uint64_t binomial(std::uint64_t n, std::uint64_t k);

inline double pow_p(double d, int p) {
  if (p == 1) return d;
  if (p == 2) return d * d;
  double r = 1.0;
  for (int i = 0; i < p; ++i) r *= d;
  return r;
}

}  // namespace quadcore
