#include "quadcore/datasets.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numeric>
#include <sstream>

#include "quadcore/rng.hpp"

namespace quadcore {

GaussianMixture synth_gaussian_mixture(std::size_t k, std::size_t n, std::size_t dim, double stddev,
                                       std::uint64_t seed, double separation) {
  if (k == 0 || n < k) throw Error("synth_gaussians needs 1 <= k <= n");
  if (dim == 0 || !(stddev > 0.0)) throw Error("synth_gaussians needs dim >= 1 and stddev > 0");
  if (separation <= 0.0) separation = 12.0 * stddev;

  auto rng = make_rng(seed, {0x6761});
  const double side = separation * std::ceil(std::pow(static_cast<double>(k), 1.0 / static_cast<double>(dim)));
  std::uniform_real_distribution<double> box(-side, side);

  GaussianMixture out;
  out.centers.resize(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(dim));
  std::size_t placed = 0, attempts = 0;
  double half = side;
  while (placed < k) {
    Eigen::RowVectorXd c(dim);
    for (std::size_t j = 0; j < dim; ++j) c(j) = box(rng) * (half / side);
    bool ok = true;
    for (std::size_t i = 0; i < placed && ok; ++i) ok = (out.centers.row(i) - c).norm() >= separation;
    if (ok) {
      out.centers.row(placed++) = c;
    } else if (++attempts % 1000 == 0) {
      half *= 1.5;  // box too crowded for this separation
    }
  }

  std::vector<std::uint32_t> labels(n);
  for (std::size_t i = 0; i < n; ++i) labels[i] = static_cast<std::uint32_t>(i % k);
  std::shuffle(labels.begin(), labels.end(), rng);

  std::normal_distribution<double> noise(0.0, stddev);
  Points pts(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(dim));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < dim; ++j) pts(i, j) = out.centers(labels[i], j) + noise(rng);

  out.space = MetricSpace::euclidean(std::move(pts));
  out.labels = std::move(labels);
  return out;
}

MetricSpace synth_gaussians(std::size_t k, std::size_t n, std::size_t dim, double stddev, std::uint64_t seed) {
  return synth_gaussian_mixture(k, n, dim, stddev, seed).space;
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '"')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '"' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  bool quoted = false;
  for (std::size_t i = 0; i <= line.size(); ++i) {
    if (i < line.size() && line[i] == '"') quoted = !quoted;
    if (i == line.size() || (line[i] == ',' && !quoted)) {
      out.push_back(trim(line.substr(start, i - start)));
      start = i + 1;
    }
  }
  return out;
}

bool parse_number(std::string_view s, double& out) {
  if (s.empty()) return false;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
  return res.ec == std::errc() && res.ptr == s.data() + s.size() && std::isfinite(out);
}

}  // namespace

TabularData load_tabular(const std::string& path, const std::vector<std::string>& columns, bool normalize) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  if (columns.empty()) throw Error("no columns selected");
  std::string line;
  if (!std::getline(in, line)) throw Error("missing header row in " + path);
  const auto header = split_csv(line);
  std::vector<std::size_t> idx;
  for (const auto& name : columns) {
    auto it = std::find(header.begin(), header.end(), std::string_view(name));
    if (it == header.end()) throw Error("column '" + name + "' not found in " + path);
    idx.push_back(static_cast<std::size_t>(it - header.begin()));
  }

  TabularData data;
  std::vector<double> values;
  std::vector<double> row(idx.size());
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    ++data.rows_read;
    const auto fields = split_csv(line);
    bool ok = true;
    for (std::size_t j = 0; j < idx.size() && ok; ++j) ok = idx[j] < fields.size() && parse_number(fields[idx[j]], row[j]);
    if (!ok) {
      ++data.rows_dropped;
      continue;
    }
    values.insert(values.end(), row.begin(), row.end());
  }
  const auto d = static_cast<Eigen::Index>(idx.size());
  const Eigen::Index n = static_cast<Eigen::Index>(values.size()) / d;
  if (n == 0) throw Error("no usable rows in " + path);
  Points pts = Eigen::Map<Points>(values.data(), n, d);
  if (normalize) {
    for (Eigen::Index j = 0; j < d; ++j) {
      const double lo = pts.col(j).minCoeff(), hi = pts.col(j).maxCoeff();
      if (hi > lo)
        pts.col(j) = (pts.col(j).array() - lo) / (hi - lo);
      else
        pts.col(j).setZero();
    }
  }
  data.space = MetricSpace::euclidean(std::move(pts));
  return data;
}

std::vector<VertexId> meyerson_select(const MetricSpace& space, std::size_t m, std::uint64_t seed) {
  const std::size_t n = space.size();
  if (m > n) throw Error("meyerson_sample needs m <= n");
  if (m == 0) return {};
  auto rng = make_rng(seed, {0x6d65});
  std::vector<VertexId> order = all_vertices(space);
  std::shuffle(order.begin(), order.end(), rng);
  if (m == n) {
    std::sort(order.begin(), order.end());
    return order;
  }

  std::vector<VertexId> chosen{order.front()};
  std::vector<char> taken(n, 0);
  taken[order.front()] = 1;

  // Until two points are accepted there are no pairs; bootstrap the scale with the
  // mean distance from the first point.
  double scale = 0.0;
  for (auto v : order) scale += space.distance(order.front(), v);
  scale /= static_cast<double>(n - 1);
  double pair_sum = 0.0;

  std::uniform_real_distribution<double> coin(0.0, 1.0);
  for (std::size_t t = 1; t < n && chosen.size() < m; ++t) {
    const VertexId x = order[t];
    double dmin = std::numeric_limits<double>::infinity(), dsum = 0.0;
    for (auto s : chosen) {
      const double d = space.distance(x, s);
      dmin = std::min(dmin, d);
      dsum += d;
    }
    const double tau = scale / static_cast<double>(m);
    const double prob = tau > 0.0 ? std::min(1.0, dmin / tau) : (dmin > 0.0 ? 1.0 : 0.0);
    if (coin(rng) < prob) {
      pair_sum += dsum;
      chosen.push_back(x);
      taken[x] = 1;
      const double pairs = 0.5 * static_cast<double>(chosen.size()) * static_cast<double>(chosen.size() - 1);
      scale = pair_sum / pairs;
    }
  }

  if (chosen.size() < m) {
    // Top up with farthest-first picks among the remaining points.
    std::vector<double> dist(n, std::numeric_limits<double>::infinity());
    for (VertexId x = 0; x < n; ++x)
      if (!taken[x])
        for (auto s : chosen) dist[x] = std::min(dist[x], space.distance(x, s));
    while (chosen.size() < m) {
      VertexId far = 0;
      double best = -1.0;
      for (VertexId x = 0; x < n; ++x)
        if (!taken[x] && dist[x] > best) {
          best = dist[x];
          far = x;
        }
      chosen.push_back(far);
      taken[far] = 1;
      for (VertexId x = 0; x < n; ++x)
        if (!taken[x]) dist[x] = std::min(dist[x], space.distance(x, far));
    }
  }
  return chosen;
}

MetricSpace meyerson_sample(const MetricSpace& space, std::size_t m, std::uint64_t seed) {
  const auto ids = meyerson_select(space, m, seed);
  return space.subspace(ids);
}

LowerBoundInstance lower_bound_instance(std::size_t n, std::size_t k, double zeta) {
  if (k < 2 || static_cast<double>(k) > std::sqrt(static_cast<double>(n)) / 2.0)
    throw Error("lower_bound_instance needs 2 <= k <= sqrt(n)/2");
  if (n % k != 0) throw Error("lower_bound_instance needs k | n");
  if (!(zeta > 1.0)) throw Error("lower_bound_instance needs zeta > 1");

  const std::size_t g = n / k;
  LowerBoundInstance inst;
  inst.group.reserve(n);
  for (std::size_t i = 0; i + 1 < k; ++i) inst.group.push_back(0);
  for (std::size_t i = 0; i < g; ++i) inst.group.push_back(1);
  for (std::size_t h = 2; h <= k; ++h)
    for (std::size_t i = 0; i + 1 < g; ++i) inst.group.push_back(static_cast<std::uint32_t>(h));

  const auto N = static_cast<Eigen::Index>(n);
  Eigen::MatrixXd d(N, N);
  for (Eigen::Index a = 0; a < N; ++a)
    for (Eigen::Index b = 0; b < N; ++b) {
      const auto ga = inst.group[a], gb = inst.group[b];
      if (a == b)
        d(a, b) = 0.0;
      else if (ga == 0 || gb == 0)
        d(a, b) = zeta;
      else
        d(a, b) = ga == gb ? 0.0 : 1.0;
    }
  inst.space = MetricSpace::from_matrix(std::move(d));
  return inst;
}

void write_instance(std::ostream& out, const MetricSpace& space) {
  const bool euclid = space.kind() == MetricSpace::Kind::euclidean;
  out << "metric v1 " << (euclid ? "euclidean" : "explicit") << ' ' << space.size() << ' ' << space.dim() << '\n';
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  const auto rows = static_cast<Eigen::Index>(space.size());
  for (Eigen::Index i = 0; i < rows; ++i) {
    const auto cols = static_cast<Eigen::Index>(space.dim());
    for (Eigen::Index j = 0; j < cols; ++j) {
      if (j) out << ' ';
      out << (euclid ? space.points()(i, j) : space.matrix()(i, j));
    }
    out << '\n';
  }
}

MetricSpace read_instance(std::istream& in) {
  std::string magic, version, kind;
  std::size_t n = 0, dim = 0;
  if (!(in >> magic >> version >> kind >> n >> dim) || magic != "metric") throw Error("not a metric instance file");
  if (version != "v1") throw Error("unsupported instance version " + version);
  if (kind == "euclidean") {
    Points pts(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(dim));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < dim; ++j)
        if (!(in >> pts(i, j))) throw Error("truncated instance file");
    return MetricSpace::euclidean(std::move(pts));
  }
  if (kind == "explicit") {
    if (dim != n) throw Error("explicit instance must be n x n");
    Eigen::MatrixXd mat(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (!(in >> mat(i, j))) throw Error("truncated instance file");
    return MetricSpace::from_matrix(std::move(mat));
  }
  throw Error("unknown instance kind " + kind);
}

void save_instance(const std::string& path, const MetricSpace& space) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  write_instance(out, space);
}

MetricSpace load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  return read_instance(in);
}

}  // namespace quadcore
