#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <random>

#include "mfrl/design.hpp"
#include "mfrl/fidelity.hpp"

namespace mfrl {

/// Objective evaluation. valid == false always comes with q == 0 (the
/// analog of a design that violates a hard constraint).
struct EvaluationResult {
  double q = 0.0;
  bool valid = true;
};

/// One analysis model: a pure, total evaluator over the design space plus
/// its simulated per-evaluation cost in seconds.
struct FidelityModel {
  FidelityId id = FidelityId::HF;
  std::function<EvaluationResult(const DesignVector&)> evaluate;
  double unit_cost = 0.0;
};

struct EnvConfig {
  double bias_magnitude = 0.6;      // low-fidelity error size outside the home region
  double validity_threshold = 1.6;  // x1 + x2 above this is not buildable
  double hf_cost = 1.78;            // seconds per high-fidelity evaluation
  double lf_cost = 2.08e-4;         // seconds per low-fidelity evaluation
  double invalid_penalty = 0.2;
  Interval arm_range{0.2, 0.8};
  std::array<int, 3> catalog_sizes{10, 10, 10};
};

/// Evaluation counts per fidelity. The total is always reconstructed from
/// counts and unit costs, so it cannot drift from the counts.
struct CostLedger {
  std::array<long long, kFidelityCount> counts{0, 0, 0};
  std::array<double, kFidelityCount> unit_costs{0.0, 0.0, 0.0};

  double total_cost() const {
    double total = 0.0;
    for (std::size_t i = 0; i < kFidelityCount; ++i) {
      total += static_cast<double>(counts[i]) * unit_costs[i];
    }
    return total;
  }
};

CostLedger make_ledger(const EnvConfig& cfg);

inline void charge(CostLedger& ledger, FidelityId model) {
  ledger.counts[index_of(model)] += 1;
}

/// High-fidelity objective: three multiplicative factors (trajectory
/// fraction, normalized speed, one minus normalized error) with a hard
/// invalid region where the objective is zero.
EvaluationResult hf_evaluate(const DesignVector& x, const EnvConfig& cfg = {});

/// Low-fidelity objectives: exact copies of the high-fidelity objective
/// (ignoring validity, which surrogates cannot see) plus a one-sided bias
/// outside each model's home region. LF1 is exact for x0 <= 0.5, LF2 for
/// x0 >= 0.5.
EvaluationResult lf_evaluate(int which, const DesignVector& x,
                             const EnvConfig& cfg = {});

/// r = q - q_prev, minus a flat penalty when the design is invalid.
double step_reward(double q_prev, const EvaluationResult& result,
                   double invalid_penalty = 0.2);

/// Uniform draw over the design space.
DesignVector sample_seed_design(std::mt19937_64& rng);

struct MultiFidelityEnv {
  EnvConfig config;
  std::array<FidelityModel, kFidelityCount> models;

  const FidelityModel& model(FidelityId id) const {
    return models[index_of(id)];
  }
};

MultiFidelityEnv make_analytic_env(const EnvConfig& cfg = {});

using RegionPredicate = std::function<bool(const DesignVector&)>;

/// Samples the region (rejection sampling from the unit cube), labels with
/// the high-fidelity objective, and fits a small ReLU regressor
/// (4-64-32-1). The returned model clamps predictions to [0,1] and reports
/// every design as valid. Throws if rejection sampling exceeds
/// 100 * n_samples attempts.
FidelityModel fit_regional_surrogate(const RegionPredicate& region,
                                     int n_samples, std::mt19937_64& rng,
                                     FidelityId id = FidelityId::LF1,
                                     const EnvConfig& cfg = {});

}  // namespace mfrl
