#include "quadcore/coreset_eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>

#include "quadcore/rng.hpp"

namespace quadcore {

WeightedPointSet to_weighted(const CoresetPlus& cp) {
  WeightedPointSet wc;
  wc.points = cp.centers;
  std::vector<double> count(cp.n, 0.0);
  for (VertexId v = 0; v < cp.n; ++v) count[cp.mapping[v]] += 1.0;
  for (auto c : cp.centers) wc.weights.push_back(count[c]);
  return wc;
}

namespace {

struct Assignment {
  std::vector<std::size_t> owner;  // index into centers
  double cost = 0.0;
};

Assignment assign(std::size_t m, std::span<const double> w, const ItemDistance& dist, const std::vector<std::size_t>& centers,
                  int p) {
  Assignment a;
  a.owner.assign(m, 0);
  for (std::size_t i = 0; i < m; ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < centers.size(); ++j) {
      const double d = dist(i, centers[j]);
      if (d < best) {
        best = d;
        a.owner[i] = j;
      }
    }
    a.cost += w[i] * pow_p(best, p);
  }
  return a;
}

std::vector<std::size_t> seed_centers(std::size_t m, std::span<const double> w, const ItemDistance& dist, std::size_t k,
                                      int p, Rng& rng) {
  std::vector<std::size_t> centers;
  std::discrete_distribution<std::size_t> first(w.begin(), w.end());
  centers.push_back(first(rng));
  std::vector<double> dp(m);
  for (std::size_t i = 0; i < m; ++i) dp[i] = pow_p(dist(i, centers[0]), p);
  while (centers.size() < k) {
    std::vector<double> mass(m);
    double total = 0.0;
    for (std::size_t i = 0; i < m; ++i) total += (mass[i] = w[i] * dp[i]);
    std::size_t next;
    if (total > 0.0) {
      std::discrete_distribution<std::size_t> pick(mass.begin(), mass.end());
      next = pick(rng);
    } else {
      // every point coincides with a center; take any unused item
      next = 0;
      while (std::find(centers.begin(), centers.end(), next) != centers.end()) ++next;
    }
    centers.push_back(next);
    for (std::size_t i = 0; i < m; ++i) dp[i] = std::min(dp[i], pow_p(dist(i, next), p));
  }
  return centers;
}

}  // namespace

DiscreteClustering discrete_kmeans(std::size_t m, std::span<const double> weights, const ItemDistance& dist,
                                   std::size_t k, int p, std::uint64_t seed, const KMeansParams& params,
                                   const ExtraCandidate& extra) {
  if (k == 0) throw Error("k must be at least 1");
  if (m < k) throw Error("fewer items than centers");
  if (weights.size() != m) throw Error("one weight per item");
  DiscreteClustering best;
  best.cost = std::numeric_limits<double>::infinity();
  for (std::size_t r = 0; r < std::max<std::size_t>(1, params.restarts); ++r) {
    auto rng = make_rng(seed, {0x6b6d, r});
    auto centers = seed_centers(m, weights, dist, k, p, rng);
    auto a = assign(m, weights, dist, centers, p);
    for (std::size_t it = 0; it < params.max_iterations; ++it) {
      std::vector<std::vector<std::size_t>> members(k);
      for (std::size_t i = 0; i < m; ++i) members[a.owner[i]].push_back(i);
      bool changed = false;
      for (std::size_t j = 0; j < k; ++j) {
        auto& mem = members[j];
        if (mem.empty()) continue;
        std::vector<std::size_t> pool = mem;
        if (pool.size() > params.pool) {
          std::shuffle(pool.begin(), pool.end(), rng);
          pool.resize(params.pool);
        }
        if (extra)
          if (auto e = extra(mem)) pool.push_back(*e);
        pool.push_back(centers[j]);
        std::size_t arg = centers[j];
        double low = std::numeric_limits<double>::infinity();
        for (auto cand : pool) {
          double s = 0.0;
          for (auto i : mem) s += weights[i] * pow_p(dist(i, cand), p);
          if (s < low || (s == low && cand == centers[j])) {
            low = s;
            arg = cand;
          }
        }
        if (arg != centers[j] && std::find(centers.begin(), centers.end(), arg) == centers.end()) {
          centers[j] = arg;
          changed = true;
        }
      }
      if (!changed) break;
      a = assign(m, weights, dist, centers, p);
    }
    if (a.cost < best.cost) {
      best.cost = a.cost;
      best.centers = centers;
    }
  }
  return best;
}

Clustering weighted_kmeanspp(OracleSession& session, const WeightedPointSet& wc, std::size_t k, int p,
                             std::uint64_t seed, const KMeansParams& params) {
  const std::size_t m = wc.size();
  if (m < k) throw Error("coreset smaller than k");
  // each pair asked once
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i + 1; j < m; ++j) {
      const auto a = static_cast<Eigen::Index>(i), b = static_cast<Eigen::Index>(j);
      d(a, b) = d(b, a) = session.strong_distance(wc.points[i], wc.points[j]);
    }
  auto dist = [&](std::size_t i, std::size_t j) { return d(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)); };
  const auto res = discrete_kmeans(m, wc.weights, dist, k, p, seed, params);
  Clustering out;
  out.cost = res.cost;
  for (auto i : res.centers) out.centers.push_back(wc.points[i]);
  return out;
}

Clustering reference_clustering(const MetricSpace& space, std::size_t k, int p, std::uint64_t seed,
                                const KMeansParams& params) {
  const std::size_t n = space.size();
  std::vector<double> w(n, 1.0);
  auto dist = [&](std::size_t i, std::size_t j) {
    return space.distance(static_cast<VertexId>(i), static_cast<VertexId>(j));
  };
  ExtraCandidate extra;
  if (space.kind() == MetricSpace::Kind::euclidean) {
    extra = [&](std::span<const std::size_t> mem) -> std::optional<std::size_t> {
      Eigen::RowVectorXd mean = Eigen::RowVectorXd::Zero(space.points().cols());
      for (auto i : mem) mean += space.points().row(static_cast<Eigen::Index>(i));
      mean /= static_cast<double>(mem.size());
      std::size_t arg = mem[0];
      double low = std::numeric_limits<double>::infinity();
      for (auto i : mem) {
        const double d = (space.points().row(static_cast<Eigen::Index>(i)) - mean).squaredNorm();
        if (d < low) {
          low = d;
          arg = i;
        }
      }
      return arg;
    };
  }
  const auto res = discrete_kmeans(n, w, dist, k, p, seed, params, extra);
  Clustering out;
  out.cost = res.cost;
  for (auto i : res.centers) out.centers.push_back(static_cast<VertexId>(i));
  std::sort(out.centers.begin(), out.centers.end());
  return out;
}

PipelineReport evaluate_pipeline(OracleSession& session, const CoresetPlus& cp, std::size_t k, int p,
                                 std::uint64_t seed, double reference_cost, const KMeansParams& params) {
  PipelineReport r;
  r.coreset_size = cp.centers.size();
  r.reference_cost = reference_cost;
  const MetricSpace& space = session.space();
  const auto wc = to_weighted(cp);
  const std::string previous = session.stage();
  session.set_stage("downstream");
  const auto kk = std::min(k, wc.size());
  const auto clustering = weighted_kmeanspp(session, wc, kk, p, seed, params);
  session.set_stage(previous);
  r.final_centers = clustering.centers;

  // A(c): the chosen center nearest to c; ground truth from here on.
  std::vector<VertexId> owner(cp.n, 0);
  for (auto c : cp.centers) owner[c] = nearest_in(space, c, clustering.centers);
  for (VertexId v = 0; v < cp.n; ++v) {
    r.mapping_cost += pow_p(space.distance(v, cp.mapping[v]), p);
    r.downstream_cost += pow_p(space.distance(v, owner[cp.mapping[v]]), p);
  }
  const auto t = session.totals();
  r.quad_total = t.quad_total;
  r.strong_total = t.strong_total;
  return r;
}

void write_report_header(std::ostream& out) {
  out << "dataset,n,k,p,phi,method,coreset_size,mapping_cost,downstream_cost,reference_cost,quad_total,strong_total,seed\n";
}

void write_report_row(std::ostream& out, const ReportRow& row) {
  const auto& r = row.report;
  const auto precision = out.precision(10);
  out << row.dataset << ',' << row.n << ',' << row.k << ',' << row.p << ',' << row.phi << ',' << row.method << ','
      << r.coreset_size << ',' << r.mapping_cost << ',' << r.downstream_cost << ',' << r.reference_cost << ','
      << r.quad_total << ',' << r.strong_total << ',' << row.seed << '\n';
  out.precision(precision);
}

}  // namespace quadcore
