// quadcore run <config> | quadcore audit <dir>
#include <filesystem>
#include <iostream>

#include "CLI11.hpp"
#include "quadcore/experiment.hpp"

int main(int argc, char** argv) {
  using namespace quadcore;
  CLI::App app{"Coreset experiments over a noisy quadruplet oracle"};
  app.require_subcommand(1);
  app.fallthrough();
  bool strict = false;
  std::size_t jobs = 1;
  app.add_flag("--strict", strict, "exit nonzero when an audit check fails");
  app.add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);

  auto* run = app.add_subcommand("run", "run an experiment config");
  std::string config_path;
  std::optional<std::uint64_t> seed_base;
  std::string out_dir;
  run->add_option("config", config_path, "config file")->required()->check(CLI::ExistingFile);
  run->add_option("--seed-base", seed_base, "first seed (overrides the config)");
  run->add_option("--out", out_dir, "output directory (overrides the config)");

  auto* audit = app.add_subcommand("audit", "replay a stored run and audit it");
  std::string audit_dir;
  audit->add_option("dir", audit_dir, "run directory")->required()->check(CLI::ExistingDirectory);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      auto c = load_config(config_path);
      if (seed_base) c.seed_base = *seed_base;
      std::string dir = out_dir.empty() ? c.output : out_dir;
      if (out_dir.empty() && std::filesystem::path(dir).is_relative())
        dir = (std::filesystem::path(c.base_dir) / dir).string();
      const auto r = run_experiment(c, jobs);
      save_run(dir, c, r);
      write_audit(std::cout, r.audit, c);
      std::cerr << r.cells.size() << " cells written to " << dir << '\n';
      return strict && !r.audit_ok ? 2 : 0;
    }
    const auto rep = replay_audit(audit_dir, jobs);
    const auto c = load_config((std::filesystem::path(audit_dir) / "config.txt").string());
    write_audit(std::cout, rep.audit, c);
    return strict && !rep.ok ? 2 : 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
