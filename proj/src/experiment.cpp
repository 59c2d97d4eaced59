#include "quadcore/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

#include "quadcore/alg_d.hpp"
#include "quadcore/alg_di.hpp"
#include "quadcore/datasets.hpp"
#include "quadcore/noisy_sort.hpp"

namespace quadcore {

namespace fs = std::filesystem;

namespace {

struct ConstantField {
  const char* key;
  std::function<double&(AlgoConstants&)> ref;
};

const std::vector<ConstantField>& constant_fields() {
  static const std::vector<ConstantField> fields{
      {"c_s1", [](AlgoConstants& c) -> double& { return c.c_s1; }},
      {"c_s2", [](AlgoConstants& c) -> double& { return c.c_s2; }},
      {"c_win", [](AlgoConstants& c) -> double& { return c.c_win; }},
      {"c_D", [](AlgoConstants& c) -> double& { return c.c_D; }},
      {"c_r", [](AlgoConstants& c) -> double& { return c.c_r; }},
      {"c_term", [](AlgoConstants& c) -> double& { return c.c_term; }},
      {"c_term_samples", [](AlgoConstants& c) -> double& { return c.c_term_samples; }},
      {"c_IMP", [](AlgoConstants& c) -> double& { return c.c_IMP; }},
      {"c_F", [](AlgoConstants& c) -> double& { return c.c_F; }},
      {"safe_fraction", [](AlgoConstants& c) -> double& { return c.safe_fraction; }},
      {"filter_threshold_fraction", [](AlgoConstants& c) -> double& { return c.filter_threshold_fraction; }},
      {"sample_clamp", [](AlgoConstants& c) -> double& { return c.sample_clamp; }},
      {"probsort.c_R", [](AlgoConstants& c) -> double& { return c.probsort.c_R; }},
      {"probsort.c_W", [](AlgoConstants& c) -> double& { return c.probsort.c_W; }},
      {"probsort.c_D", [](AlgoConstants& c) -> double& { return c.probsort.c_D; }},
  };
  return fields;
}

const std::vector<std::string> kMethods{"alg_g", "alg_d", "alg_di", "baseline"};

const std::map<std::string, double> kThresholds{
    {"kernel_separation", 0.9}, {"survivor_fraction", 0.0}, {"safe_fraction", 0.9}, {"dislocation", 0.9},
    {"alpha_sorted", 0.9},      {"tester_band", 0.99},      {"ledger_isolation", 1.0}, {"mapping_valid", 1.0},
    {"replay_identical", 1.0},
};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) throw Error("empty list item in '" + v + "'");
    out.push_back(item);
  }
  return out;
}

double to_double(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  double x = 0;
  try {
    x = std::stod(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != v.size() || !std::isfinite(x)) throw Error("'" + key + "': not a number: " + v);
  return x;
}

std::uint64_t to_uint(const std::string& key, const std::string& v) {
  if (v.empty() || v.find_first_not_of("0123456789") != std::string::npos)
    throw Error("'" + key + "': not a non-negative integer: " + v);
  return std::stoull(v);
}

template <typename T, typename F>
std::string join(const std::vector<T>& xs, F f) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) out += (i ? "," : "") + f(xs[i]);
  return out;
}

std::string num(double x) {
  std::ostringstream o;
  o.precision(17);
  o << x;
  return o.str();
}

void parallel_for(std::size_t count, std::size_t jobs, const std::function<void(std::size_t)>& fn) {
  jobs = std::max<std::size_t>(1, std::min(jobs, count));
  if (jobs == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < jobs; ++t)
    pool.emplace_back([&] {
      for (std::size_t i; (i = next++) < count;) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

// `algo/rNN/step` -> (NN, step)
bool parse_stage(const std::string& stage, const std::string& algo, std::size_t& round, std::string& step) {
  const std::string prefix = algo + "/r";
  if (stage.rfind(prefix, 0) != 0) return false;
  const auto slash = stage.find('/', prefix.size());
  if (slash == std::string::npos) return false;
  round = std::stoul(stage.substr(prefix.size(), slash - prefix.size()));
  step = stage.substr(slash + 1);
  return true;
}

std::vector<std::uint64_t> merged_keys(const OracleSession& s, const std::vector<std::string>& stages) {
  std::vector<std::uint64_t> out;
  for (const auto& st : stages) {
    auto k = s.stage_keys(st);
    out.insert(out.end(), k.begin(), k.end());
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

double median(std::vector<double> xs) {
  std::sort(xs.begin(), xs.end());
  const auto m = xs.size();
  if (m == 0) return 0.0;
  return m % 2 ? xs[m / 2] : 0.5 * (xs[m / 2 - 1] + xs[m / 2]);
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error("cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& p, const std::string& body) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw Error("cannot write " + p.string());
  out << body;
}

std::string cell_name(const CellResult& c, std::size_t phi_index) {
  return c.row.method + "_k" + std::to_string(c.row.k) + "_phi" + std::to_string(phi_index) + "_s" +
         std::to_string(c.row.seed);
}

}  // namespace

void ExperimentConfig::validate() const {
  if (dataset != "synthetic" && dataset != "tabular" && dataset != "instance")
    throw Error("dataset must be synthetic, tabular or instance");
  if (dataset == "synthetic" && (n < 2 || clusters == 0 || dim == 0 || !(stddev > 0)))
    throw Error("synthetic dataset needs n >= 2, clusters >= 1, dim >= 1, stddev > 0");
  if (dataset == "tabular" && (path.empty() || columns.empty())) throw Error("tabular dataset needs path and columns");
  if (dataset == "instance" && path.empty()) throw Error("instance dataset needs path");
  if (methods.empty() || k.empty() || phi.empty()) throw Error("methods, k and phi must be non-empty");
  for (const auto& m : methods)
    if (std::find(kMethods.begin(), kMethods.end(), m) == kMethods.end()) throw Error("unknown method " + m);
  for (auto kk : k)
    if (kk == 0) throw Error("k must be positive");
  for (auto f : phi)
    if (f < 0 || f > 0.25) throw Error("phi must lie in [0, 1/4]");
  if (p != 1 && p != 2) throw Error("p must be 1 or 2");
  if (p != 1 && std::find(methods.begin(), methods.end(), "alg_di") != methods.end())
    throw Error("alg_di needs p = 1");
  if (seeds == 0) throw Error("seeds must be positive");
  for (const auto& [check, t] : audit_thresholds) {
    if (!kThresholds.count(check)) throw Error("unknown audit check " + check);
    if (t < 0 || t > 1) throw Error("audit threshold must lie in [0, 1]");
  }
  constants.validate();
}

std::string ExperimentConfig::resolved_path() const {
  if (path.empty()) return path;
  fs::path p(path);
  if (p.is_relative() && !base_dir.empty()) p = fs::path(base_dir) / p;
  return p.lexically_normal().string();
}

ExperimentConfig parse_config(std::istream& in, const std::string& base_dir) {
  ExperimentConfig c;
  c.base_dir = base_dir;
  std::map<std::string, std::string> kv;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw Error("line " + std::to_string(lineno) + ": expected key = value");
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    if (key.empty()) throw Error("line " + std::to_string(lineno) + ": empty key");
    if (!kv.emplace(key, value).second) throw Error("repeated key " + key);
  }
  if (!kv.count("version")) throw Error("config has no version");
  if (to_uint("version", kv["version"]) != kConfigVersion)
    throw Error("unsupported config version " + kv["version"]);

  for (const auto& [key, v] : kv) {
    if (key == "version") continue;
    if (key == "name") c.name = v;
    else if (key == "dataset") c.dataset = v;
    else if (key == "n") c.n = to_uint(key, v);
    else if (key == "clusters") c.clusters = to_uint(key, v);
    else if (key == "dim") c.dim = to_uint(key, v);
    else if (key == "stddev") c.stddev = to_double(key, v);
    else if (key == "path") c.path = v;
    else if (key == "columns") c.columns = split_list(v);
    else if (key == "meyerson_m") c.meyerson_m = to_uint(key, v);
    else if (key == "methods") c.methods = split_list(v);
    else if (key == "k") {
      c.k.clear();
      for (const auto& x : split_list(v)) c.k.push_back(to_uint(key, x));
    } else if (key == "phi") {
      c.phi.clear();
      for (const auto& x : split_list(v)) c.phi.push_back(to_double(key, x));
    } else if (key == "p") c.p = static_cast<int>(to_uint(key, v));
    else if (key == "seeds") c.seeds = to_uint(key, v);
    else if (key == "seed_base") c.seed_base = to_uint(key, v);
    else if (key == "output") c.output = v;
    else if (key == "const.fanout") c.constants.fanout = to_uint(key, v);
    else if (key.rfind("const.", 0) == 0) {
      const auto name = key.substr(6);
      const auto& fields = constant_fields();
      auto it = std::find_if(fields.begin(), fields.end(), [&](const auto& f) { return name == f.key; });
      if (it == fields.end()) throw Error("unknown key " + key);
      it->ref(c.constants) = to_double(key, v);
    } else if (key.rfind("audit.", 0) == 0) {
      c.audit_thresholds[key.substr(6)] = to_double(key, v);
    } else {
      throw Error("unknown key " + key);
    }
  }
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read config " + path);
  return parse_config(in, fs::absolute(path).parent_path().string());
}

void write_config(std::ostream& out, const ExperimentConfig& c) {
  out << "version = " << kConfigVersion << '\n';
  out << "name = " << c.name << '\n';
  out << "dataset = " << c.dataset << '\n';
  if (c.dataset == "synthetic") {
    out << "n = " << c.n << '\n';
    out << "clusters = " << c.clusters << '\n';
    out << "dim = " << c.dim << '\n';
    out << "stddev = " << num(c.stddev) << '\n';
  } else {
    out << "path = " << c.resolved_path() << '\n';
    if (!c.columns.empty()) out << "columns = " << join(c.columns, [](const auto& s) { return s; }) << '\n';
    out << "meyerson_m = " << c.meyerson_m << '\n';
  }
  out << "methods = " << join(c.methods, [](const auto& s) { return s; }) << '\n';
  out << "k = " << join(c.k, [](auto x) { return std::to_string(x); }) << '\n';
  out << "phi = " << join(c.phi, [](auto x) { return num(x); }) << '\n';
  out << "p = " << c.p << '\n';
  out << "seeds = " << c.seeds << '\n';
  out << "seed_base = " << c.seed_base << '\n';
  out << "output = " << c.output << '\n';
  AlgoConstants copy = c.constants;
  for (const auto& f : constant_fields()) out << "const." << f.key << " = " << num(f.ref(copy)) << '\n';
  out << "const.fanout = " << c.constants.fanout << '\n';
  for (const auto& [check, t] : c.audit_thresholds) out << "audit." << check << " = " << num(t) << '\n';
}

double default_threshold(const std::string& check) {
  auto it = kThresholds.find(check);
  return it == kThresholds.end() ? 1.0 : it->second;
}

RoundAuditor::RoundAuditor(const MetricSpace& space, const std::string& algo) : space_(space), algo_(algo) {}

void RoundAuditor::attach(RunOptions& opts) {
  opts.observer = [this](const RoundView& rv) {
    const auto& st = rv.state;
    bool separated = true;
    for (std::size_t i = 0; i < st.s1.size(); ++i) {
      double kmax = 0, gmin = std::numeric_limits<double>::infinity();
      for (auto w : st.kernel[i]) kmax = std::max(kmax, space_.distance(st.s1[i], w));
      for (auto g : st.guard[i]) gmin = std::min(gmin, space_.distance(st.s1[i], g));
      separated &= kmax < gmin;
    }
    tallies_["kernel_separation"].add(separated);
    const std::size_t active = rv.active.size();
    tallies_["survivor_fraction"].add(5 * rv.filter.survivors.size() >= 3 * active);
    tallies_["safe_fraction"].add(rv.outcome.safe.size() >= active / 4);
    tallies_["dislocation"].add(static_cast<double>(measure_dislocation(space_, st.pi_x)) <= st.pi_x.quality().bound);
    std::vector<Edge> safe;
    safe.reserve(rv.outcome.safe.size());
    for (auto [v, c] : rv.outcome.safe) safe.emplace_back(v, c);
    tallies_["alpha_sorted"].add(measure_alpha(space_, OrderedEdgeSequence(safe, {})) <= 4.0);
  };
  opts.tester_hook = [this](OrientedEdge a, OrientedEdge b, Answer ans) {
    const double d1 = space_.distance(a.edge()), d2 = space_.distance(b.edge());
    if (d1 <= 2 * d2 && d2 <= 2 * d1) return;
    tallies_["tester_band"].add((ans == Answer::yes) == (d1 < d2));
  };
}

void RoundAuditor::check_ledgers(const OracleSession& session, std::size_t) {
  // Per round: keys of the noisy sort of E(S1, S2) against every later stage of the round.
  // Tester-driven stages may repeat each other's queries.
  std::map<std::size_t, std::pair<std::vector<std::string>, std::vector<std::string>>> rounds;
  for (const auto& stage : session.stages()) {
    std::size_t r = 0;
    std::string step;
    if (!parse_stage(stage, algo_, r, step)) continue;
    auto& [sorts, queries] = rounds[r];
    (step == "kernel" ? sorts : queries).push_back(stage);
  }
  for (const auto& [r, groups] : rounds)
    tallies_["ledger_isolation"].add(key_overlap(merged_keys(session, groups.first),
                                                 merged_keys(session, groups.second)) == 0);
}

void RoundAuditor::check_refinement(const OracleSession& session) {
  std::vector<std::string> earlier;
  for (const auto& st : session.stages())
    if (st != "alg_di/zsort" && st != "downstream") earlier.push_back(st);
  tallies_["ledger_isolation"].add(
      key_overlap(merged_keys(session, earlier), merged_keys(session, {"alg_di/zsort"})) == 0);
}

ExperimentResult run_experiment(const ExperimentConfig& c, std::size_t jobs) {
  c.validate();
  const std::size_t S = c.seeds, K = c.k.size(), F = c.phi.size(), M = c.methods.size();

  // Datasets: one instance per seed.
  TabularData table;
  if (c.dataset == "tabular") table = load_tabular(c.resolved_path(), c.columns);
  MetricSpace loaded;
  if (c.dataset == "instance") loaded = load_instance(c.resolved_path());
  std::vector<MetricSpace> spaces(S);
  parallel_for(S, jobs, [&](std::size_t i) {
    const std::uint64_t seed = c.seed_base + i;
    const auto ds = derive_seed(seed, {0x6473});
    if (c.dataset == "synthetic") {
      spaces[i] = synth_gaussian_mixture(c.clusters, c.n, c.dim, c.stddev, ds).space;
    } else {
      const MetricSpace& base = c.dataset == "tabular" ? table.space : loaded;
      spaces[i] = c.meyerson_m > 0 && c.meyerson_m < base.size() ? meyerson_sample(base, c.meyerson_m, ds) : base;
    }
    if (spaces[i].size() < 2) throw Error("dataset has fewer than two points");
  });

  std::vector<double> reference(S * K);
  parallel_for(S * K, jobs, [&](std::size_t i) {
    const std::size_t si = i / K, ki = i % K;
    const std::size_t kk = std::min(c.k[ki], spaces[si].size());
    reference[i] = reference_clustering(spaces[si], kk, c.p, derive_seed(c.seed_base + si, {0x7265, c.k[ki]})).cost;
  });

  const std::string dataset_label =
      c.dataset == "synthetic" ? "synthetic" : fs::path(c.path).stem().string();

  ExperimentResult out;
  out.cells.resize(S * K * F * M);
  parallel_for(out.cells.size(), jobs, [&](std::size_t idx) {
    const std::size_t mi = idx % M, fi = (idx / M) % F, ki = (idx / (M * F)) % K, si = idx / (M * F * K);
    const std::uint64_t seed = c.seed_base + si;
    const std::size_t k = c.k[ki];
    const double phi = c.phi[fi];
    const std::string& method = c.methods[mi];
    const MetricSpace& space = spaces[si];
    // Every method of a (seed, k, phi) cell faces the same oracle.
    OracleSession session(space, NoiseModel::probabilistic(phi), derive_seed(seed, {0x6f72, k, fi}));
    const std::uint64_t aseed = derive_seed(seed, {0x616c, k, fi});

    CellResult& cell = out.cells[idx];
    const std::string algo = method == "alg_di" ? "alg_d" : method;
    RoundAuditor auditor(space, algo);
    RunOptions opts;
    opts.constants = c.constants;
    auditor.attach(opts);

    CoresetPlus cp;
    if (method == "alg_g") {
      cp = alg_g(session, k, c.p, opts, aseed);
    } else if (method == "alg_d" || method == "alg_di") {
      cp = alg_d(session, k, c.p, opts, aseed);
      if (method == "alg_di") {
        cp = refine(session, cp, c.constants, derive_seed(aseed, {0x7266})).coreset;
        auditor.check_refinement(session);
      }
    } else {
      cp = baseline_generic(session, k, c.p, c.constants, aseed);
    }
    bool valid = true;
    try {
      cp.validate();
    } catch (const Error&) {
      valid = false;
    }
    if (method != "baseline") auditor.check_ledgers(session, cp.rounds.size());
    auditor.tallies()["mapping_valid"].add(valid);

    cell.row.dataset = dataset_label;
    cell.row.n = space.size();
    cell.row.k = k;
    cell.row.p = c.p;
    cell.row.phi = phi;
    cell.row.method = method;
    cell.row.seed = seed;
    cell.row.report = evaluate_pipeline(session, cp, k, c.p, derive_seed(aseed, {0x6576}), reference[si * K + ki]);
    std::ostringstream ledger;
    session.write_ledger(ledger);
    cell.ledger = ledger.str();
    cell.audit = auditor.tallies();
  });

  for (const auto& cell : out.cells)
    for (const auto& [check, t] : cell.audit) {
      out.audit[check].pass += t.pass;
      out.audit[check].total += t.total;
    }
  out.audit_ok = audit_passes(out.audit, c);
  return out;
}

void write_results(std::ostream& out, const ExperimentResult& r) {
  write_report_header(out);
  for (const auto& cell : r.cells) write_report_row(out, cell.row);
}

void write_medians(std::ostream& out, const ExperimentResult& r) {
  write_report_header(out);
  std::vector<std::string> order;
  std::map<std::string, std::vector<const ReportRow*>> groups;
  for (const auto& cell : r.cells) {
    std::ostringstream key;
    key.precision(17);
    key << cell.row.method << '|' << cell.row.k << '|' << cell.row.phi;
    if (!groups.count(key.str())) order.push_back(key.str());
    groups[key.str()].push_back(&cell.row);
  }
  std::sort(order.begin(), order.end(), [&](const std::string& a, const std::string& b) {
    const auto *x = groups[a].front(), *y = groups[b].front();
    return std::tie(x->k, x->phi, x->method) < std::tie(y->k, y->phi, y->method);
  });
  const auto precision = out.precision(10);
  for (const auto& key : order) {
    const auto& rows = groups[key];
    auto med = [&](auto field) {
      std::vector<double> xs;
      for (const auto* row : rows) xs.push_back(static_cast<double>(field(*row)));
      return median(xs);
    };
    const auto& f = *rows.front();
    out << f.dataset << ',' << med([](const ReportRow& x) { return x.n; }) << ',' << f.k << ',' << f.p << ','
        << f.phi << ',' << f.method << ',' << med([](const ReportRow& x) { return x.report.coreset_size; }) << ','
        << med([](const ReportRow& x) { return x.report.mapping_cost; }) << ','
        << med([](const ReportRow& x) { return x.report.downstream_cost; }) << ','
        << med([](const ReportRow& x) { return x.report.reference_cost; }) << ','
        << med([](const ReportRow& x) { return x.report.quad_total; }) << ','
        << med([](const ReportRow& x) { return x.report.strong_total; }) << ",median\n";
  }
  out.precision(precision);
}

static double threshold_for(const std::string& check, const ExperimentConfig& c) {
  auto it = c.audit_thresholds.find(check);
  return it != c.audit_thresholds.end() ? it->second : default_threshold(check);
}

bool audit_passes(const AuditTallies& audit, const ExperimentConfig& c) {
  for (const auto& [check, t] : audit)
    if (t.total > 0 && static_cast<double>(t.pass) < threshold_for(check, c) * static_cast<double>(t.total))
      return false;
  return true;
}

void write_audit(std::ostream& out, const AuditTallies& audit, const ExperimentConfig& c) {
  out << "check,pass_count,total,threshold\n";
  for (const auto& [check, t] : audit) out << check << ',' << t.pass << ',' << t.total << ',' << threshold_for(check, c) << '\n';
}

void save_run(const std::string& dir, const ExperimentConfig& c, const ExperimentResult& r) {
  const fs::path root(dir);
  fs::create_directories(root / "ledgers");
  std::ostringstream cfg, results, medians, audit;
  write_config(cfg, c);
  write_results(results, r);
  write_medians(medians, r);
  write_audit(audit, r.audit, c);
  write_file(root / "config.txt", cfg.str());
  write_file(root / "results.csv", results.str());
  write_file(root / "medians.csv", medians.str());
  write_file(root / "audit.csv", audit.str());
  for (const auto& cell : r.cells) {
    const auto fi = static_cast<std::size_t>(std::find(c.phi.begin(), c.phi.end(), cell.row.phi) - c.phi.begin());
    write_file(root / "ledgers" / (cell_name(cell, fi) + ".csv"), cell.ledger);
  }
}

ReplayReport replay_audit(const std::string& dir, std::size_t jobs) {
  const fs::path root(dir);
  const auto c = load_config((root / "config.txt").string());
  const auto r = run_experiment(c, jobs);
  std::ostringstream results, medians;
  write_results(results, r);
  write_medians(medians, r);
  ReplayReport rep;
  rep.audit = r.audit;
  auto& replay = rep.audit["replay_identical"];
  replay.add(results.str() == read_file(root / "results.csv"));
  replay.add(medians.str() == read_file(root / "medians.csv"));
  for (const auto& cell : r.cells) {
    const auto fi = static_cast<std::size_t>(std::find(c.phi.begin(), c.phi.end(), cell.row.phi) - c.phi.begin());
    const auto path = root / "ledgers" / (cell_name(cell, fi) + ".csv");
    replay.add(fs::exists(path) && read_file(path) == cell.ledger);
  }
  rep.ok = audit_passes(rep.audit, c);
  return rep;
}

}  // namespace quadcore
