#include <CLI11.hpp>
#include <chrono>
#include <iostream>

#include "immp/errors.hpp"
#include "immp/harness/experiments.hpp"

int main(int argc, char** argv) {
  CLI::App app{"IMMP samplers: experiment drivers"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  int replicas = 0;
  unsigned threads = 0;
  bool check = false;

  for (const auto& name : immp::experiment_names()) {
    CLI::App* sub = app.add_subcommand(name, "run the " + name + " experiment");
    sub->add_option("--config", config_path, "INI run configuration")->check(CLI::ExistingFile);
    sub->add_option("--seed", seed, "override run.seed");
    sub->add_option("--out", out_dir, "output directory (overrides run.output)");
    sub->add_option("--replicas", replicas, "override run.replicas");
    sub->add_option("--threads", threads, "worker threads (overrides run.threads)");
    sub->add_flag("--check", check, "exit nonzero if any acceptance check fails");
  }
  CLI11_PARSE(app, argc, argv);

  const std::string name = app.get_subcommands().front()->get_name();
  try {
    immp::RunConfig cfg = config_path.empty() ? immp::RunConfig{} : immp::RunConfig::load(config_path);
    if (cfg.has("run", "experiment") && cfg.experiment() != name)
      throw immp::ConfigError("config is for experiment '" + cfg.experiment() + "', not '" + name + "'");
    cfg.set("run", "experiment", name);
    if (app.get_subcommands().front()->count("--seed")) cfg.set("run", "seed", std::to_string(seed));
    if (replicas > 0) cfg.set("run", "replicas", std::to_string(replicas));
    if (threads > 0) cfg.set("run", "threads", std::to_string(threads));
    if (!out_dir.empty()) cfg.set("run", "output", out_dir);

    const auto t0 = std::chrono::steady_clock::now();
    const immp::ExperimentResult res = immp::run_experiment(name, cfg);
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    immp::write_outputs(res, cfg, cfg.output(), wall);

    for (const auto& c : res.checks)
      std::cout << (c.passed ? "PASS " : "FAIL ") << c.name << (c.detail.empty() ? "" : "  [" + c.detail + "]") << "\n";
    std::cout << "wrote " << cfg.output() << "/" << res.experiment << ".{csv,json} in " << wall << " s\n";
    if (check && !res.all_passed()) return 2;
  } catch (const immp::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
