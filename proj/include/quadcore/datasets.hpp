#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "quadcore/metric_space.hpp"

namespace quadcore {

struct GaussianMixture {
  MetricSpace space;
  std::vector<std::uint32_t> labels;  // cluster index per vertex
  Points centers;                     // k x dim
};

// k isotropic blobs with ~n/k points each; centers are at least `separation` apart
// (default 12 * stddev). Row order is shuffled.
GaussianMixture synth_gaussian_mixture(std::size_t k, std::size_t n, std::size_t dim, double stddev, std::uint64_t seed,
                                       double separation = 0.0);
MetricSpace synth_gaussians(std::size_t k, std::size_t n, std::size_t dim, double stddev, std::uint64_t seed);

struct TabularData {
  MetricSpace space;
  std::size_t rows_read = 0;
  std::size_t rows_dropped = 0;  // missing or non-numeric values in a selected column
};

// Comma-separated file with a header row. Selected columns are parsed as numbers and,
// if `normalize`, min-max scaled to [0,1] per column (constant columns map to 0).
TabularData load_tabular(const std::string& path, const std::vector<std::string>& columns, bool normalize = true);

// Sequential Meyerson-style sampling; returns the chosen vertex ids in acceptance order.
std::vector<VertexId> meyerson_select(const MetricSpace& space, std::size_t m, std::uint64_t seed);
MetricSpace meyerson_sample(const MetricSpace& space, std::size_t m, std::uint64_t seed);

struct LowerBoundInstance {
  MetricSpace space;
  // 0 for U, 1 for Y, h in [2, k] for group X_h.
  std::vector<std::uint32_t> group;
};

LowerBoundInstance lower_bound_instance(std::size_t n, std::size_t k, double zeta);

void write_instance(std::ostream& out, const MetricSpace& space);
MetricSpace read_instance(std::istream& in);
void save_instance(const std::string& path, const MetricSpace& space);
MetricSpace load_instance(const std::string& path);

}  // namespace quadcore
