#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mfrl/adaptive.hpp"
#include "mfrl/baselines.hpp"

namespace mfrl {

enum class Method {
  Adaptive,
  Hierarchical1,
  Hierarchical2,
  SingleHf,
  SingleLf1,
  SingleLf2,
};

inline constexpr std::array<Method, 6> kAllMethods{
    Method::Adaptive,   Method::Hierarchical1, Method::Hierarchical2,
    Method::SingleHf,   Method::SingleLf1,     Method::SingleLf2};

std::string_view name_of(Method m);
std::optional<Method> parse_method(std::string_view name);

/// Everything one experiment needs: the method, the per-run seeds, and every
/// training/environment parameter. Loadable from a flat key=value file.
struct ExperimentConfig {
  Method method = Method::Adaptive;
  std::vector<std::uint64_t> seeds;
  AdaptiveConfig adaptive;
  PpoConfig ppo;
  EnvConfig env;
  AgentArch arch;
  int eval_seed_count = 200;
  std::string output_dir = "runs";
};

/// Desk-scale defaults: 300 training episodes, 200 evaluation seeds, 10
/// independent runs per method.
ExperimentConfig desk_profile();

/// Full-scale profile: 1200 episodes and 1200 evaluation seeds.
ExperimentConfig full_profile();

/// Parses a flat key=value config file (``#`` comments, blank lines ignored)
/// on top of the desk-profile defaults. Unknown keys are an error.
ExperimentConfig load_config(const std::filesystem::path& path);

/// Applies one key=value override.
void apply_config_entry(ExperimentConfig& cfg, std::string_view key,
                        std::string_view value);

/// Canonical sorted key=value rendering of the scientific parameters (seeds,
/// method and output_dir excluded); the basis for config hashing.
std::string canonical_config_text(const ExperimentConfig& cfg);

/// FNV-1a 64 over the canonical text, as fixed-width hex.
std::string config_hash(const ExperimentConfig& cfg);

/// Evaluation seed designs: the same stream that generates training episode
/// seeds for this run seed, so evaluation replays the training seed designs.
std::vector<DesignVector> make_eval_seeds(std::uint64_t run_seed, int count);

/// Deterministic rollout of the policy mean (action = a_max*tanh(mean), no
/// sampling); records the high-fidelity objective after every applied
/// action. Result is quality[seed_index][iteration-1] over episode_length
/// iterations.
std::vector<std::vector<double>> evaluate_policy(
    const GaussianPolicy& policy, std::span<const DesignVector> seeds,
    int episode_length, const FidelityModel& hf);

/// Near-equal three-way split of the episode, low-fidelity models in the given
/// order (7/7/6 steps at episode length 20).
HierarchicalSchedule make_thirds_schedule(FidelityId first, FidelityId second,
                                         int episode_length);

/// One training run of the configured method at the given seed.
TrainResult train_method(const ExperimentConfig& cfg, std::uint64_t seed);

/// Trains and evaluates every configured seed, writing one run directory
/// each (manifest.json, usage.csv, cost.csv, quality.csv, parameter
/// snapshots) plus an experiment-level manifest. Per-seed failures are
/// isolated; returns the number of failed seeds.
int run_experiment(const ExperimentConfig& cfg, int jobs = 1);

/// Re-runs the evaluation phase of a stored run directory from its manifest
/// and parameter snapshots, rewriting quality.csv.
void evaluate_run(const std::filesystem::path& run_dir);

struct SummaryRow {
  std::string method;
  int runs = 0;
  double mean_final_q = 0.0;
  double std_final_q = 0.0;  // pooled across runs and evaluation seeds
  double total_cost_s = 0.0;
  bool complete = false;
  // Spread decomposition (reported on stdout, not part of summary.csv):
  // dispersion of per-run means vs the average within-run dispersion.
  double between_run_std = 0.0;
  double mean_within_run_std = 0.0;
};

/// Pools final-iteration quality across evaluation seeds and runs per
/// method and totals training cost. The given paths are searched recursively
/// for run manifests. Methods with missing data yield an incomplete row.
std::vector<SummaryRow> summarize(
    const std::vector<std::filesystem::path>& paths);

void write_summary_csv(const std::vector<SummaryRow>& rows, std::ostream& out);

void write_usage_csv(const RunMetrics& metrics, std::ostream& out);
void write_quality_csv(const RunMetrics& metrics, std::ostream& out);
void write_cost_csv(const RunMetrics& metrics, std::ostream& out);

/// Directory of one (method, seed) run under the experiment output root.
std::filesystem::path run_dir_for(const ExperimentConfig& cfg,
                                  std::uint64_t seed);

}  // namespace mfrl
