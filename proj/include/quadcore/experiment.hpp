#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "quadcore/alg_g.hpp"
#include "quadcore/coreset_eval.hpp"

namespace quadcore {

inline constexpr int kConfigVersion = 1;

struct ExperimentConfig {
  std::string name = "experiment";
  // synthetic | tabular | instance
  std::string dataset = "synthetic";
  // synthetic
  std::size_t n = 2000;
  std::size_t clusters = 5;
  std::size_t dim = 2;
  double stddev = 1.0;
  // tabular and instance
  std::string path;
  std::vector<std::string> columns;
  std::size_t meyerson_m = 0;  // 0 keeps every row

  std::vector<std::string> methods{"alg_g", "baseline"};
  std::vector<std::size_t> k{5};
  std::vector<double> phi{0.15};
  int p = 2;
  std::size_t seeds = 1;
  std::uint64_t seed_base = 0;
  AlgoConstants constants;
  std::map<std::string, double> audit_thresholds;  // overrides per check
  std::string output = "results";

  // Relative paths in the config resolve against this directory.
  std::string base_dir;

  void validate() const;
  std::string resolved_path() const;
};

// `key = value` lines, `#` comments, comma-separated lists. `version` is required;
// unknown or repeated keys are errors.
ExperimentConfig parse_config(std::istream& in, const std::string& base_dir = "");
ExperimentConfig load_config(const std::string& path);
// Canonical form; parse_config(write_config(c)) == c.
void write_config(std::ostream& out, const ExperimentConfig& c);

// Pass counts for one audit check. A check fails when pass/total < threshold.
struct AuditTally {
  std::size_t pass = 0;
  std::size_t total = 0;
  void add(bool ok) {
    pass += ok;
    ++total;
  }
};

using AuditTallies = std::map<std::string, AuditTally>;

double default_threshold(const std::string& check);

// Ground-truth checks on every round of a run; hook it into RunOptions before the run.
class RoundAuditor {
 public:
  RoundAuditor(const MetricSpace& space, const std::string& algo);
  void attach(RunOptions& opts);
  // Sort and query stages of each round share no keys; refinement keys are new.
  void check_ledgers(const OracleSession& session, std::size_t rounds);
  void check_refinement(const OracleSession& session);
  const AuditTallies& tallies() const { return tallies_; }
  AuditTallies& tallies() { return tallies_; }

 private:
  const MetricSpace& space_;
  std::string algo_;
  AuditTallies tallies_;
};

struct CellResult {
  ReportRow row;
  std::string ledger;
  AuditTallies audit;
};

struct ExperimentResult {
  std::vector<CellResult> cells;  // seed-major, then k, phi, method
  AuditTallies audit;
  bool audit_ok = true;
};

ExperimentResult run_experiment(const ExperimentConfig& c, std::size_t jobs = 1);

void write_results(std::ostream& out, const ExperimentResult& r);
// Median over seeds per (dataset, method, k, phi); the seed column reads `median`.
void write_medians(std::ostream& out, const ExperimentResult& r);
// `check,pass_count,total,threshold`
void write_audit(std::ostream& out, const AuditTallies& audit, const ExperimentConfig& c);
bool audit_passes(const AuditTallies& audit, const ExperimentConfig& c);

// Writes config.txt, results.csv, medians.csv, audit.csv and ledgers/ under `dir`.
void save_run(const std::string& dir, const ExperimentConfig& c, const ExperimentResult& r);

struct ReplayReport {
  AuditTallies audit;
  bool ok = true;
};
// Re-runs the stored config and compares the regenerated tables with the stored ones.
ReplayReport replay_audit(const std::string& dir, std::size_t jobs = 1);

}  // namespace quadcore
