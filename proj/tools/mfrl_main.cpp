// Command-line front end: train single runs, re-evaluate stored runs,
// compare run directories, or sweep every method over the configured seeds.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mfrl/harness.hpp"
#include "mfrl/version.hpp"

namespace fs = std::filesystem;

namespace {

mfrl::ExperimentConfig load_or_default(const std::string& config_path) {
  if (config_path.empty()) return mfrl::desk_profile();
  return mfrl::load_config(config_path);
}

int cmd_train(const std::string& config_path, const std::string& method_name,
              std::uint64_t seed, const std::string& out_dir, int jobs) {
  mfrl::ExperimentConfig cfg = load_or_default(config_path);
  const auto method = mfrl::parse_method(method_name);
  if (!method) {
    std::cerr << "unknown method '" << method_name << "'\n";
    return 2;
  }
  cfg.method = *method;
  cfg.seeds = {seed};
  if (!out_dir.empty()) cfg.output_dir = out_dir;

  const int failures = mfrl::run_experiment(cfg, jobs);
  if (failures == 0) {
    std::cout << "run written to " << mfrl::run_dir_for(cfg, seed).string()
              << '\n';
  }
  return failures == 0 ? 0 : 1;
}

int cmd_evaluate(const std::string& run_dir) {
  mfrl::evaluate_run(run_dir);
  std::cout << "quality.csv rewritten in " << run_dir << '\n';
  return 0;
}

int cmd_compare(const std::vector<std::string>& run_paths,
                const std::string& out_csv) {
  std::vector<fs::path> paths(run_paths.begin(), run_paths.end());
  const std::vector<mfrl::SummaryRow> rows = mfrl::summarize(paths);
  if (rows.empty()) {
    std::cerr << "no runs found under the given paths\n";
    return 1;
  }

  std::ofstream out(out_csv, std::ios::binary);
  if (!out) {
    std::cerr << "cannot open " << out_csv << " for writing\n";
    return 1;
  }
  mfrl::write_summary_csv(rows, out);

  bool incomplete = false;
  for (const auto& row : rows) {
    std::cout << row.method << ": runs=" << row.runs
              << " mean_final_q=" << row.mean_final_q
              << " std_final_q(pooled)=" << row.std_final_q
              << " between_run_std=" << row.between_run_std
              << " within_run_std=" << row.mean_within_run_std
              << " total_cost_s=" << row.total_cost_s
              << (row.complete ? "" : "  [INCOMPLETE]") << '\n';
    incomplete = incomplete || !row.complete;
  }
  std::cout << "summary written to " << out_csv << '\n';
  return incomplete ? 1 : 0;
}

int cmd_sweep(const std::string& config_path, int jobs, bool full) {
  mfrl::ExperimentConfig cfg =
      config_path.empty()
          ? (full ? mfrl::full_profile() : mfrl::desk_profile())
          : mfrl::load_config(config_path);
  if (full && !config_path.empty()) {
    cfg.adaptive.episode_count = 1200;
    cfg.eval_seed_count = 1200;
  }

  int failures = 0;
  for (mfrl::Method method : mfrl::kAllMethods) {
    cfg.method = method;
    std::cout << "sweep: " << mfrl::name_of(method) << " (" << cfg.seeds.size()
              << " seeds)\n";
    failures += mfrl::run_experiment(cfg, jobs);
  }
  if (failures > 0) {
    std::cerr << failures << " run(s) failed\n";
    return 1;
  }
  std::cout << "sweep complete under " << cfg.output_dir << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"multi-fidelity design-optimization RL toolkit"};
  app.set_version_flag("--version", std::string(mfrl::kToolkitVersion));
  app.require_subcommand(1);

  std::string config_path;
  std::string method_name;
  std::uint64_t seed = 0;
  std::string out_dir;
  std::string run_dir;
  std::vector<std::string> run_paths;
  std::string out_csv = "summary.csv";
  int jobs = 1;
  bool full = false;

  auto* train = app.add_subcommand("train", "train one method at one seed");
  train->add_option("--method", method_name, "method name")->required();
  train->add_option("--config", config_path, "key=value config file");
  train->add_option("--seed", seed, "run seed")->required();
  train->add_option("--out", out_dir, "override output directory");
  train->add_option("--jobs", jobs, "worker threads");

  auto* evaluate =
      app.add_subcommand("evaluate", "re-evaluate a stored run directory");
  evaluate->add_option("--run", run_dir, "run directory")->required();

  auto* compare =
      app.add_subcommand("compare", "summarize run directories into a CSV");
  compare->add_option("--runs", run_paths, "run directories or parents")
      ->required()
      ->expected(-1);
  compare->add_option("--out", out_csv, "output summary CSV");

  auto* sweep =
      app.add_subcommand("sweep", "train all methods over all config seeds");
  sweep->add_option("--config", config_path, "key=value config file");
  sweep->add_option("--jobs", jobs, "worker threads");
  sweep->add_flag("--full", full, "full-scale profile (1200/1200)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand(train)) {
      return cmd_train(config_path, method_name, seed, out_dir, jobs);
    }
    if (app.got_subcommand(evaluate)) {
      return cmd_evaluate(run_dir);
    }
    if (app.got_subcommand(compare)) {
      return cmd_compare(run_paths, out_csv);
    }
    if (app.got_subcommand(sweep)) {
      return cmd_sweep(config_path, jobs, full);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
