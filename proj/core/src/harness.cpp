#include "mfrl/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "mfrl/rng.hpp"
#include "mfrl/version.hpp"

namespace mfrl {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

std::string fmt_double(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string trim(std::string_view s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string_view::npos) return {};
  const auto end = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(begin, end - begin + 1));
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> parts;
  std::size_t pos = 0;
  while (pos <= s.size()) {
    const std::size_t next = s.find(sep, pos);
    if (next == std::string_view::npos) {
      parts.push_back(std::string(s.substr(pos)));
      break;
    }
    parts.push_back(std::string(s.substr(pos, next - pos)));
    pos = next + 1;
  }
  return parts;
}

double parse_double(std::string_view key, std::string_view value) {
  try {
    std::size_t used = 0;
    const std::string v(trim(value));
    const double out = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument("trailing characters");
    return out;
  } catch (const std::exception&) {
    throw std::invalid_argument("config key '" + std::string(key) +
                                "': bad numeric value '" + std::string(value) +
                                "'");
  }
}

long long parse_int(std::string_view key, std::string_view value) {
  try {
    std::size_t used = 0;
    const std::string v(trim(value));
    const long long out = std::stoll(v, &used);
    if (used != v.size()) throw std::invalid_argument("trailing characters");
    return out;
  } catch (const std::exception&) {
    throw std::invalid_argument("config key '" + std::string(key) +
                                "': bad integer value '" + std::string(value) +
                                "'");
  }
}

std::vector<int> parse_int_list(std::string_view key, std::string_view value) {
  std::vector<int> out;
  for (const auto& part : split(value, ',')) {
    if (trim(part).empty()) continue;
    out.push_back(static_cast<int>(parse_int(key, part)));
  }
  return out;
}

std::string join_ints(std::span<const int> v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(v[i]);
  }
  return out;
}

std::vector<FidelityId> trained_models_of(Method m) {
  switch (m) {
    case Method::SingleHf: return {FidelityId::HF};
    case Method::SingleLf1: return {FidelityId::LF1};
    case Method::SingleLf2: return {FidelityId::LF2};
    default:
      return {FidelityId::LF1, FidelityId::LF2, FidelityId::HF};
  }
}

}  // namespace

std::string_view name_of(Method m) {
  switch (m) {
    case Method::Adaptive: return "adaptive";
    case Method::Hierarchical1: return "hierarchical_1";
    case Method::Hierarchical2: return "hierarchical_2";
    case Method::SingleHf: return "single_hf";
    case Method::SingleLf1: return "single_lf1";
    case Method::SingleLf2: return "single_lf2";
  }
  return "?";
}

std::optional<Method> parse_method(std::string_view name) {
  for (Method m : kAllMethods) {
    if (name == name_of(m)) return m;
  }
  return std::nullopt;
}

ExperimentConfig desk_profile() {
  ExperimentConfig cfg;
  cfg.adaptive.episode_count = 300;
  cfg.eval_seed_count = 200;
  cfg.seeds = {0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
  // Desk-calibrated training intensity: small batches give every agent
  // frequent updates within the short run, and the entropy bonus keeps the
  // action spread off its floor so updates never freeze.
  cfg.adaptive.batch_size = 100;
  cfg.arch.learning_rate = 1e-3;
  cfg.ppo.entropy_coeff = 0.01;
  return cfg;
}

ExperimentConfig full_profile() {
  ExperimentConfig cfg = desk_profile();
  cfg.adaptive.episode_count = 1200;
  cfg.eval_seed_count = 1200;
  cfg.adaptive.batch_size = 400;
  cfg.arch.learning_rate = 3e-4;
  return cfg;
}

void apply_config_entry(ExperimentConfig& cfg, std::string_view key,
                        std::string_view value) {
  const std::string k = trim(key);
  if (k == "episode_count") {
    cfg.adaptive.episode_count = static_cast<int>(parse_int(k, value));
  } else if (k == "episode_length") {
    cfg.adaptive.episode_length = static_cast<int>(parse_int(k, value));
  } else if (k == "epsilon") {
    cfg.adaptive.epsilon = parse_double(k, value);
  } else if (k == "batch_size") {
    cfg.adaptive.batch_size = static_cast<int>(parse_int(k, value));
  } else if (k == "align_norm_tol") {
    cfg.adaptive.align_norm_tol = parse_double(k, value);
  } else if (k == "theta_tail_mode") {
    const std::string v = trim(value);
    if (v == "strict") {
      cfg.adaptive.theta_tail_mode = ThetaTailMode::Strict;
    } else if (v == "printed") {
      cfg.adaptive.theta_tail_mode = ThetaTailMode::Printed;
    } else {
      throw std::invalid_argument(
          "theta_tail_mode must be 'strict' or 'printed'");
    }
  } else if (k == "assembly_log_probs") {
    const std::string v = trim(value);
    if (v == "reevaluate") {
      cfg.adaptive.reevaluate_old_log_probs = true;
    } else if (v == "collected") {
      cfg.adaptive.reevaluate_old_log_probs = false;
    } else {
      throw std::invalid_argument(
          "assembly_log_probs must be 'reevaluate' or 'collected'");
    }
  } else if (k == "clip_ratio") {
    cfg.ppo.clip_ratio = parse_double(k, value);
  } else if (k == "gamma") {
    cfg.ppo.gamma = parse_double(k, value);
  } else if (k == "gae_lambda") {
    cfg.ppo.gae_lambda = parse_double(k, value);
  } else if (k == "ppo_epochs") {
    cfg.ppo.epochs = static_cast<int>(parse_int(k, value));
  } else if (k == "minibatch") {
    cfg.ppo.minibatch = static_cast<int>(parse_int(k, value));
  } else if (k == "value_coeff") {
    cfg.ppo.value_coeff = parse_double(k, value);
  } else if (k == "entropy_coeff") {
    cfg.ppo.entropy_coeff = parse_double(k, value);
  } else if (k == "a_max") {
    cfg.arch.a_max = parse_double(k, value);
  } else if (k == "hidden_sizes") {
    cfg.arch.hidden_sizes = parse_int_list(k, value);
    if (cfg.arch.hidden_sizes.empty()) {
      throw std::invalid_argument("hidden_sizes must not be empty");
    }
  } else if (k == "learning_rate") {
    cfg.arch.learning_rate = parse_double(k, value);
  } else if (k == "init_log_std") {
    cfg.arch.init_log_std = parse_double(k, value);
  } else if (k == "bias_magnitude") {
    cfg.env.bias_magnitude = parse_double(k, value);
  } else if (k == "validity_threshold") {
    cfg.env.validity_threshold = parse_double(k, value);
  } else if (k == "hf_cost") {
    cfg.env.hf_cost = parse_double(k, value);
  } else if (k == "lf_cost") {
    cfg.env.lf_cost = parse_double(k, value);
  } else if (k == "invalid_penalty") {
    cfg.env.invalid_penalty = parse_double(k, value);
  } else if (k == "arm_lo") {
    cfg.env.arm_range.lo = parse_double(k, value);
  } else if (k == "arm_hi") {
    cfg.env.arm_range.hi = parse_double(k, value);
  } else if (k == "catalog_sizes") {
    const auto sizes = parse_int_list(k, value);
    if (sizes.size() != 3) {
      throw std::invalid_argument("catalog_sizes needs exactly 3 entries");
    }
    std::copy_n(sizes.begin(), 3, cfg.env.catalog_sizes.begin());
  } else if (k == "eval_seed_count") {
    cfg.eval_seed_count = static_cast<int>(parse_int(k, value));
  } else if (k == "seeds") {
    cfg.seeds.clear();
    for (const auto& part : split(value, ',')) {
      if (trim(part).empty()) continue;
      cfg.seeds.push_back(static_cast<std::uint64_t>(parse_int(k, part)));
    }
  } else if (k == "output_dir") {
    cfg.output_dir = trim(value);
  } else {
    throw std::invalid_argument("unknown config key '" + k + "'");
  }
}

ExperimentConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open config file: " + path.string());
  }
  ExperimentConfig cfg = desk_profile();
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string stripped = trim(line.substr(0, line.find('#')));
    if (stripped.empty()) continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos) {
      throw std::runtime_error(path.string() + ":" + std::to_string(line_no) +
                               ": expected 'key = value'");
    }
    apply_config_entry(cfg, stripped.substr(0, eq), stripped.substr(eq + 1));
  }
  return cfg;
}

std::string canonical_config_text(const ExperimentConfig& cfg) {
  std::map<std::string, std::string> kv;
  kv["a_max"] = fmt_double(cfg.arch.a_max);
  kv["align_norm_tol"] = fmt_double(cfg.adaptive.align_norm_tol);
  kv["arm_hi"] = fmt_double(cfg.env.arm_range.hi);
  kv["arm_lo"] = fmt_double(cfg.env.arm_range.lo);
  kv["assembly_log_probs"] =
      cfg.adaptive.reevaluate_old_log_probs ? "reevaluate" : "collected";
  kv["batch_size"] = std::to_string(cfg.adaptive.batch_size);
  kv["bias_magnitude"] = fmt_double(cfg.env.bias_magnitude);
  kv["catalog_sizes"] = join_ints(cfg.env.catalog_sizes);
  kv["clip_ratio"] = fmt_double(cfg.ppo.clip_ratio);
  kv["entropy_coeff"] = fmt_double(cfg.ppo.entropy_coeff);
  kv["episode_count"] = std::to_string(cfg.adaptive.episode_count);
  kv["episode_length"] = std::to_string(cfg.adaptive.episode_length);
  kv["epsilon"] = fmt_double(cfg.adaptive.epsilon);
  kv["eval_seed_count"] = std::to_string(cfg.eval_seed_count);
  kv["gae_lambda"] = fmt_double(cfg.ppo.gae_lambda);
  kv["gamma"] = fmt_double(cfg.ppo.gamma);
  kv["hf_cost"] = fmt_double(cfg.env.hf_cost);
  kv["hidden_sizes"] = join_ints(cfg.arch.hidden_sizes);
  kv["init_log_std"] = fmt_double(cfg.arch.init_log_std);
  kv["invalid_penalty"] = fmt_double(cfg.env.invalid_penalty);
  kv["learning_rate"] = fmt_double(cfg.arch.learning_rate);
  kv["lf_cost"] = fmt_double(cfg.env.lf_cost);
  kv["minibatch"] = std::to_string(cfg.ppo.minibatch);
  kv["ppo_epochs"] = std::to_string(cfg.ppo.epochs);
  kv["theta_tail_mode"] =
      cfg.adaptive.theta_tail_mode == ThetaTailMode::Strict ? "strict"
                                                            : "printed";
  kv["validity_threshold"] = fmt_double(cfg.env.validity_threshold);
  kv["value_coeff"] = fmt_double(cfg.ppo.value_coeff);

  std::string out;
  for (const auto& [k, v] : kv) {
    out += k;
    out += '=';
    out += v;
    out += '\n';
  }
  return out;
}

std::string config_hash(const ExperimentConfig& cfg) {
  const std::string text = canonical_config_text(cfg);
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(hash));
  return buf;
}

std::vector<DesignVector> make_eval_seeds(std::uint64_t run_seed, int count) {
  std::mt19937_64 rng = make_rng(run_seed, RngStream::SeedDesigns);
  std::vector<DesignVector> seeds;
  seeds.reserve(static_cast<std::size_t>(std::max(count, 0)));
  for (int i = 0; i < count; ++i) seeds.push_back(sample_seed_design(rng));
  return seeds;
}

std::vector<std::vector<double>> evaluate_policy(
    const GaussianPolicy& policy, std::span<const DesignVector> seeds,
    int episode_length, const FidelityModel& hf) {
  std::vector<std::vector<double>> quality;
  quality.reserve(seeds.size());
  for (const DesignVector& seed : seeds) {
    std::vector<double> row;
    row.reserve(static_cast<std::size_t>(episode_length));
    DesignVector s = seed;
    for (int iter = 0; iter < episode_length; ++iter) {
      const auto mean = policy_mean(policy, s);
      Action a;
      for (std::size_t i = 0; i < kDesignDim; ++i) {
        a.delta[i] = policy.a_max * std::tanh(mean[i]);
      }
      s = apply_action(s, a);
      row.push_back(hf.evaluate(s).q);
    }
    quality.push_back(std::move(row));
  }
  return quality;
}

HierarchicalSchedule make_thirds_schedule(FidelityId first, FidelityId second,
                                         int episode_length) {
  const int n1 = static_cast<int>(std::lround(0.35 * episode_length));
  const int n2 = static_cast<int>(std::lround(0.35 * episode_length));
  const int n3 = episode_length - n1 - n2;
  return HierarchicalSchedule(
      {{first, n1}, {second, n2}, {FidelityId::HF, n3}}, episode_length);
}

TrainResult train_method(const ExperimentConfig& cfg, std::uint64_t seed) {
  const MultiFidelityEnv env = make_analytic_env(cfg.env);
  switch (cfg.method) {
    case Method::Adaptive:
      return run_adaptive_training(env, cfg.adaptive, cfg.ppo, cfg.arch, seed);
    case Method::Hierarchical1:
      return run_hierarchical_training(
          env,
          make_thirds_schedule(FidelityId::LF1, FidelityId::LF2,
                              cfg.adaptive.episode_length),
          cfg.adaptive, cfg.ppo, cfg.arch, seed);
    case Method::Hierarchical2:
      return run_hierarchical_training(
          env,
          make_thirds_schedule(FidelityId::LF2, FidelityId::LF1,
                              cfg.adaptive.episode_length),
          cfg.adaptive, cfg.ppo, cfg.arch, seed);
    case Method::SingleHf:
      return run_single_fidelity_training(env, FidelityId::HF, cfg.adaptive,
                                          cfg.ppo, cfg.arch, seed);
    case Method::SingleLf1:
      return run_single_fidelity_training(env, FidelityId::LF1, cfg.adaptive,
                                          cfg.ppo, cfg.arch, seed);
    case Method::SingleLf2:
      return run_single_fidelity_training(env, FidelityId::LF2, cfg.adaptive,
                                          cfg.ppo, cfg.arch, seed);
  }
  throw std::logic_error("unhandled method");
}

void write_usage_csv(const RunMetrics& metrics, std::ostream& out) {
  out << "episode,lf1_steps,lf2_steps,hf_steps,theta\n";
  for (const EpisodeStats& e : metrics.episodes) {
    out << e.episode << ',' << e.steps[index_of(FidelityId::LF1)] << ','
        << e.steps[index_of(FidelityId::LF2)] << ','
        << e.steps[index_of(FidelityId::HF)] << ',' << fmt_double(e.theta)
        << '\n';
  }
}

void write_quality_csv(const RunMetrics& metrics, std::ostream& out) {
  out << "seed,iteration,q\n";
  for (std::size_t s = 0; s < metrics.quality.size(); ++s) {
    for (std::size_t i = 0; i < metrics.quality[s].size(); ++i) {
      out << s << ',' << (i + 1) << ',' << fmt_double(metrics.quality[s][i])
          << '\n';
    }
  }
}

void write_cost_csv(const RunMetrics& metrics, std::ostream& out) {
  out << "episode,lf1_evals,lf2_evals,hf_evals,cumulative_cost_s\n";
  for (const EpisodeStats& e : metrics.episodes) {
    out << e.episode << ',' << e.eval_counts[index_of(FidelityId::LF1)] << ','
        << e.eval_counts[index_of(FidelityId::LF2)] << ','
        << e.eval_counts[index_of(FidelityId::HF)] << ','
        << fmt_double(e.cumulative_cost) << '\n';
  }
}

void write_summary_csv(const std::vector<SummaryRow>& rows,
                       std::ostream& out) {
  out << "method,runs,mean_final_q,std_final_q,total_cost_s\n";
  for (const SummaryRow& r : rows) {
    out << r.method << ',' << r.runs << ',' << fmt_double(r.mean_final_q)
        << ',' << fmt_double(r.std_final_q) << ','
        << fmt_double(r.total_cost_s) << '\n';
  }
}

fs::path run_dir_for(const ExperimentConfig& cfg, std::uint64_t seed) {
  return fs::path(cfg.output_dir) / std::string(name_of(cfg.method)) /
         ("seed" + std::to_string(seed));
}

namespace {

json config_json(const ExperimentConfig& cfg) {
  json j = json::object();
  std::istringstream text(canonical_config_text(cfg));
  std::string line;
  while (std::getline(text, line)) {
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    j[line.substr(0, eq)] = line.substr(eq + 1);
  }
  return j;
}

void write_text_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  out << content;
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

void save_policy_file(const fs::path& path, const GaussianPolicy& policy) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  save_mlp(policy.mean_net, out);
  out.write(reinterpret_cast<const char*>(policy.log_std.data()),
            sizeof(double) * policy.log_std.size());
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

void load_policy_file(const fs::path& path, GaussianPolicy& policy) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open snapshot: " + path.string());
  load_mlp(policy.mean_net, in);
  in.read(reinterpret_cast<char*>(policy.log_std.data()),
          sizeof(double) * policy.log_std.size());
  if (!in) throw std::runtime_error("truncated policy snapshot: " + path.string());
}

void save_value_file(const fs::path& path, const ValueFunction& value) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  save_mlp(value.net, out);
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

void write_run_dir(const ExperimentConfig& cfg, std::uint64_t seed,
                   const TrainResult& result) {
  const fs::path dir = run_dir_for(cfg, seed);
  fs::create_directories(dir);

  json manifest;
  manifest["schema"] = "run";
  manifest["method"] = std::string(name_of(cfg.method));
  manifest["seed"] = seed;
  manifest["artifact"] = std::string(name_of(result.artifact));
  manifest["config_hash"] = config_hash(cfg);
  manifest["version"] = std::string(kToolkitVersion);
  manifest["config"] = config_json(cfg);
  if (!result.metrics.warnings.empty()) {
    manifest["warnings"] = result.metrics.warnings;
  }
  write_text_file(dir / "manifest.json", manifest.dump(2) + "\n");

  {
    std::ofstream out(dir / "usage.csv", std::ios::binary);
    write_usage_csv(result.metrics, out);
  }
  {
    std::ofstream out(dir / "cost.csv", std::ios::binary);
    write_cost_csv(result.metrics, out);
  }
  {
    std::ofstream out(dir / "quality.csv", std::ios::binary);
    write_quality_csv(result.metrics, out);
  }
  for (FidelityId model : trained_models_of(cfg.method)) {
    const Agent& agent = result.agents[index_of(model)];
    save_policy_file(
        dir / ("policy_" + std::string(name_of(model)) + ".bin"),
        agent.policy);
    save_value_file(dir / ("value_" + std::string(name_of(model)) + ".bin"),
                    agent.value);
  }
}

std::mutex g_log_mutex;

}  // namespace

int run_experiment(const ExperimentConfig& cfg, int jobs) {
  const fs::path method_dir =
      fs::path(cfg.output_dir) / std::string(name_of(cfg.method));
  fs::create_directories(method_dir);

  json experiment;
  experiment["schema"] = "experiment";
  experiment["method"] = std::string(name_of(cfg.method));
  experiment["seeds"] = cfg.seeds;
  experiment["config_hash"] = config_hash(cfg);
  experiment["version"] = std::string(kToolkitVersion);
  experiment["config"] = config_json(cfg);
  write_text_file(method_dir / "experiment.json", experiment.dump(2) + "\n");

  if (cfg.seeds.empty()) return 0;

  std::atomic<std::size_t> next{0};
  std::atomic<int> failures{0};
  auto worker = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= cfg.seeds.size()) break;
      const std::uint64_t seed = cfg.seeds[i];
      try {
        TrainResult result = train_method(cfg, seed);
        const MultiFidelityEnv env = make_analytic_env(cfg.env);
        const std::vector<DesignVector> eval_seeds =
            make_eval_seeds(seed, cfg.eval_seed_count);
        result.metrics.quality = evaluate_policy(
            result.agents[index_of(result.artifact)].policy, eval_seeds,
            cfg.adaptive.episode_length, env.model(FidelityId::HF));
        write_run_dir(cfg, seed, result);
      } catch (const std::exception& e) {
        failures.fetch_add(1);
        const fs::path dir = run_dir_for(cfg, seed);
        std::error_code ec;
        fs::create_directories(dir, ec);
        if (!ec) {
          std::ofstream out(dir / "error.txt", std::ios::binary);
          out << e.what() << '\n';
        }
        std::lock_guard<std::mutex> lock(g_log_mutex);
        std::cerr << "run failed (" << name_of(cfg.method) << ", seed " << seed
                  << "): " << e.what() << '\n';
      }
    }
  };

  const int thread_count = std::clamp<int>(
      jobs, 1, static_cast<int>(cfg.seeds.size()));
  if (thread_count <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(thread_count));
    for (int t = 0; t < thread_count; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  return failures.load();
}

namespace {

json read_json_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open: " + path.string());
  json j;
  in >> j;
  return j;
}

ExperimentConfig config_from_manifest(const json& manifest) {
  ExperimentConfig cfg = desk_profile();
  cfg.seeds.clear();
  for (const auto& [key, value] : manifest.at("config").items()) {
    apply_config_entry(cfg, key, value.get<std::string>());
  }
  const auto method = parse_method(manifest.at("method").get<std::string>());
  if (!method) throw std::runtime_error("manifest has unknown method");
  cfg.method = *method;
  return cfg;
}

}  // namespace

void evaluate_run(const fs::path& run_dir) {
  const json manifest = read_json_file(run_dir / "manifest.json");
  if (manifest.value("schema", "") != "run") {
    throw std::runtime_error(run_dir.string() + " is not a run directory");
  }
  const ExperimentConfig cfg = config_from_manifest(manifest);
  const std::uint64_t seed = manifest.at("seed").get<std::uint64_t>();
  const std::string artifact_name = manifest.at("artifact").get<std::string>();

  std::mt19937_64 scratch_rng = make_rng(0, RngStream::AgentInit);
  Agent agent = make_agent(cfg.arch.hidden_sizes, cfg.arch.a_max,
                           cfg.arch.learning_rate, scratch_rng,
                           cfg.arch.init_log_std);
  load_policy_file(run_dir / ("policy_" + artifact_name + ".bin"),
                   agent.policy);

  const MultiFidelityEnv env = make_analytic_env(cfg.env);
  RunMetrics metrics;
  metrics.quality = evaluate_policy(
      agent.policy, make_eval_seeds(seed, cfg.eval_seed_count),
      cfg.adaptive.episode_length, env.model(FidelityId::HF));

  std::ofstream out(run_dir / "quality.csv", std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot rewrite quality.csv in " +
                             run_dir.string());
  }
  write_quality_csv(metrics, out);
}

namespace {

struct RunData {
  std::string method;
  std::vector<double> final_quality;
  double total_cost = 0.0;
  bool complete = false;
};

// quality.csv -> final-iteration q values (one per evaluation seed).
bool read_quality_final(const fs::path& path, std::vector<double>& out) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return false;
  std::string line;
  if (!std::getline(in, line) || trim(line) != "seed,iteration,q") return false;
  long long max_iter = -1;
  std::vector<std::pair<long long, double>> rows;  // (iteration, q)
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    const auto parts = split(line, ',');
    if (parts.size() != 3) return false;
    try {
      const long long iter = std::stoll(parts[1]);
      const double q = std::stod(parts[2]);
      rows.emplace_back(iter, q);
      max_iter = std::max(max_iter, iter);
    } catch (const std::exception&) {
      return false;
    }
  }
  if (rows.empty()) return false;
  for (const auto& [iter, q] : rows) {
    if (iter == max_iter) out.push_back(q);
  }
  return !out.empty();
}

bool read_cost_total(const fs::path& path, double& out) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return false;
  std::string line;
  if (!std::getline(in, line) ||
      trim(line) != "episode,lf1_evals,lf2_evals,hf_evals,cumulative_cost_s") {
    return false;
  }
  bool any = false;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    const auto parts = split(line, ',');
    if (parts.size() != 5) return false;
    try {
      out = std::stod(parts[4]);
      any = true;
    } catch (const std::exception&) {
      return false;
    }
  }
  // A run with zero episodes legitimately has no cost rows.
  if (!any) out = 0.0;
  return true;
}

void collect_run_dirs(const fs::path& path, int depth,
                      std::vector<fs::path>& out) {
  std::error_code ec;
  if (fs::exists(path / "manifest.json", ec)) {
    out.push_back(path);
    return;
  }
  if (depth <= 0 || !fs::is_directory(path, ec)) return;
  std::vector<fs::path> children;
  for (const auto& entry : fs::directory_iterator(path, ec)) {
    if (entry.is_directory()) children.push_back(entry.path());
  }
  std::sort(children.begin(), children.end());
  for (const auto& child : children) collect_run_dirs(child, depth - 1, out);
}

}  // namespace

std::vector<SummaryRow> summarize(const std::vector<fs::path>& paths) {
  std::vector<fs::path> run_dirs;
  for (const auto& path : paths) collect_run_dirs(path, 4, run_dirs);
  std::sort(run_dirs.begin(), run_dirs.end());
  run_dirs.erase(std::unique(run_dirs.begin(), run_dirs.end()),
                 run_dirs.end());

  std::map<std::string, std::vector<RunData>> by_method;
  for (const auto& dir : run_dirs) {
    json manifest;
    try {
      manifest = read_json_file(dir / "manifest.json");
    } catch (const std::exception&) {
      continue;
    }
    if (manifest.value("schema", "") != "run") continue;
    RunData run;
    run.method = manifest.value("method", "unknown");
    const bool quality_ok =
        read_quality_final(dir / "quality.csv", run.final_quality);
    const bool cost_ok = read_cost_total(dir / "cost.csv", run.total_cost);
    run.complete = quality_ok && cost_ok;
    if (!run.complete) {
      std::cerr << "summarize: incomplete run data in " << dir.string()
                << '\n';
    }
    by_method[run.method].push_back(std::move(run));
  }

  std::vector<SummaryRow> rows;
  for (const auto& [method, runs] : by_method) {
    SummaryRow row;
    row.method = method;
    row.complete = true;
    std::vector<double> pooled;
    std::vector<double> run_means;
    std::vector<double> run_stds;
    for (const RunData& run : runs) {
      if (!run.complete) {
        row.complete = false;
        continue;
      }
      row.runs += 1;
      row.total_cost_s += run.total_cost;
      pooled.insert(pooled.end(), run.final_quality.begin(),
                    run.final_quality.end());
      double m = 0.0;
      for (double q : run.final_quality) m += q;
      m /= static_cast<double>(run.final_quality.size());
      double sq = 0.0;
      for (double q : run.final_quality) sq += (q - m) * (q - m);
      run_means.push_back(m);
      run_stds.push_back(
          run.final_quality.size() > 1
              ? std::sqrt(sq / static_cast<double>(run.final_quality.size() - 1))
              : 0.0);
    }
    if (!run_means.empty()) {
      double m = 0.0;
      for (double v : run_means) m += v;
      m /= static_cast<double>(run_means.size());
      double sq = 0.0;
      for (double v : run_means) sq += (v - m) * (v - m);
      row.between_run_std =
          run_means.size() > 1
              ? std::sqrt(sq / static_cast<double>(run_means.size() - 1))
              : 0.0;
      double ws = 0.0;
      for (double v : run_stds) ws += v;
      row.mean_within_run_std = ws / static_cast<double>(run_stds.size());
    }
    if (pooled.empty()) {
      row.complete = false;
      row.mean_final_q = std::numeric_limits<double>::quiet_NaN();
      row.std_final_q = std::numeric_limits<double>::quiet_NaN();
    } else {
      // Deviations from the first sample keep identical inputs at exactly
      // zero variance.
      const double base = pooled.front();
      double mean_dev = 0.0;
      for (double q : pooled) mean_dev += q - base;
      mean_dev /= static_cast<double>(pooled.size());
      double sq = 0.0;
      for (double q : pooled) {
        const double d = (q - base) - mean_dev;
        sq += d * d;
      }
      row.mean_final_q = base + mean_dev;
      row.std_final_q =
          pooled.size() > 1
              ? std::sqrt(sq / static_cast<double>(pooled.size() - 1))
              : 0.0;
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace mfrl
