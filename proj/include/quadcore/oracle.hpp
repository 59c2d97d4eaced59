#pragma once

#include <atomic>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "quadcore/metric_space.hpp"
#include "quadcore/types.hpp"

namespace quadcore {

struct NoiseModel {
  enum class Kind { perfect, probabilistic, adversarial };
  // Answer used inside the adversarial ambiguity band.
  enum class Policy { constant_no, constant_yes, key_parity };

  Kind kind = Kind::perfect;
  double phi = 0.0;
  double mu = 0.0;
  Policy policy = Policy::constant_no;

  static NoiseModel perfect() { return {}; }
  static NoiseModel probabilistic(double phi);
  static NoiseModel adversarial(double mu, Policy policy = Policy::constant_no);

  std::string describe() const;
};

struct StageCounts {
  std::uint64_t quad_total = 0;
  std::uint64_t quad_distinct = 0;
  std::uint64_t strong_total = 0;
};

// Persistent quadruplet oracle plus exact distance oracle over a hidden metric.
// YES to quad(e1, e2) means "d(e1) <= d(e2)". The space must outlive the session.
class OracleSession {
 public:
  OracleSession(const MetricSpace& space, NoiseModel noise, std::uint64_t seed, bool track_keys = true);
  ~OracleSession();
  OracleSession(const OracleSession&) = delete;
  OracleSession& operator=(const OracleSession&) = delete;

  std::size_t n() const { return space_->size(); }
  // Ground truth, for evaluation and audits only.
  const MetricSpace& space() const { return *space_; }
  const NoiseModel& noise() const { return noise_; }
  std::uint64_t seed() const { return seed_; }

  Answer quad(const Edge& e1, const Edge& e2);
  double strong_distance(VertexId u, VertexId v);

  void set_stage(const std::string& stage);
  std::string stage() const;

  StageCounts stage_counts(const std::string& stage) const;
  StageCounts totals() const;
  // Sum of quad_total over all stages, without the distinct-key pass.
  std::uint64_t quad_count() const;
  std::vector<std::string> stages() const;
  // Sorted distinct pair-of-edges keys seen in a stage (empty when tracking is off).
  std::vector<std::uint64_t> stage_keys(const std::string& stage) const;
  bool tracks_keys() const { return track_keys_; }

  // `stage,quad_total,quad_distinct,strong_total`, one record per stage.
  void write_ledger(std::ostream& out) const;

  // Fraction of `trials` random queries with distinct true answers that come back wrong.
  // Uses ground truth; recorded under the stage "diagnostic".
  double empirical_error_rate(std::size_t trials, std::uint64_t seed);

  static std::uint64_t pair_key(const Edge& a, const Edge& b);

 private:
  struct Stage;
  Stage& stage_for(const std::string& name) const;
  Answer canonical_answer(const Edge& lo, const Edge& hi) const;
  bool in_band(double d1, double d2) const;

  const MetricSpace* space_;
  NoiseModel noise_;
  std::uint64_t seed_;
  std::uint64_t threshold_ = 0;
  bool track_keys_;

  mutable std::mutex mutex_;
  mutable std::map<std::string, std::unique_ptr<Stage>> stages_;
  std::atomic<Stage*> current_{nullptr};
};

// Switches the session stage for the lifetime of the guard.
class StageGuard {
 public:
  StageGuard(OracleSession& session, const std::string& stage) : session_(session), previous_(session.stage()) {
    session_.set_stage(stage);
  }
  ~StageGuard() { session_.set_stage(previous_); }
  StageGuard(const StageGuard&) = delete;
  StageGuard& operator=(const StageGuard&) = delete;

 private:
  OracleSession& session_;
  std::string previous_;
};

// Number of keys two sorted key lists have in common.
std::size_t key_overlap(const std::vector<std::uint64_t>& a, const std::vector<std::uint64_t>& b);

}  // namespace quadcore
