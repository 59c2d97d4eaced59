#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "quadcore/coreset_plus.hpp"
#include "quadcore/metric_space.hpp"
#include "quadcore/oracle.hpp"

namespace quadcore {

// weight(c) = |{v : M(v) = c}|
WeightedPointSet to_weighted(const CoresetPlus& cp);

struct Clustering {
  std::vector<VertexId> centers;
  double cost = 0.0;
};

struct KMeansParams {
  std::size_t restarts = 10;
  std::size_t max_iterations = 30;
  std::size_t pool = 128;  // candidate members per medoid update
};

// Discrete k-means++ over items 0..m-1 with weights: D^p seeding, then medoid updates
// with candidates drawn from each cluster. Returns item indices.
struct DiscreteClustering {
  std::vector<std::size_t> centers;
  double cost = 0.0;
};
using ItemDistance = std::function<double(std::size_t, std::size_t)>;
// Optional extra candidate per cluster (e.g. the member nearest the mean).
using ExtraCandidate = std::function<std::optional<std::size_t>(std::span<const std::size_t> members)>;
DiscreteClustering discrete_kmeans(std::size_t m, std::span<const double> weights, const ItemDistance& dist,
                                   std::size_t k, int p, std::uint64_t seed, const KMeansParams& params = {},
                                   const ExtraCandidate& extra = {});

// Weighted clustering of the coreset; every distance comes from session.strong_distance.
Clustering weighted_kmeanspp(OracleSession& session, const WeightedPointSet& wc, std::size_t k, int p,
                             std::uint64_t seed, const KMeansParams& params = {});

// Ground-truth reference: best of `restarts` k-means++ runs on all of V.
Clustering reference_clustering(const MetricSpace& space, std::size_t k, int p, std::uint64_t seed,
                                const KMeansParams& params = {});

struct PipelineReport {
  std::size_t coreset_size = 0;
  double mapping_cost = 0.0;
  double downstream_cost = 0.0;
  double reference_cost = 0.0;
  std::uint64_t quad_total = 0;
  std::uint64_t strong_total = 0;
  std::vector<VertexId> final_centers;
};

// Clusters the weighted coreset, then charges every v the distance to the center its
// mapped point was assigned to: sum_v d(v, A(M(v)))^p.
PipelineReport evaluate_pipeline(OracleSession& session, const CoresetPlus& cp, std::size_t k, int p,
                                 std::uint64_t seed, double reference_cost, const KMeansParams& params = {});

struct ReportRow {
  std::string dataset;
  std::size_t n = 0;
  std::size_t k = 0;
  int p = 1;
  double phi = 0.0;
  std::string method;
  PipelineReport report;
  std::uint64_t seed = 0;
};

void write_report_header(std::ostream& out);
void write_report_row(std::ostream& out, const ReportRow& row);

}  // namespace quadcore
