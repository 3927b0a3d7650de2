#pragma once

#include <array>
#include <cstddef>

#include "mfrl/fidelity.hpp"

namespace mfrl {

inline constexpr std::size_t kDesignDim = 4;

/// Point in the normalized design space. Components are kept in [0,1];
/// construction and updates clamp, so a DesignVector is always valid.
struct DesignVector {
  std::array<double, kDesignDim> x{0.0, 0.0, 0.0, 0.0};

  double operator[](std::size_t i) const { return x[i]; }
  double& operator[](std::size_t i) { return x[i]; }
  bool operator==(const DesignVector&) const = default;
};

/// Builds a DesignVector, clamping every component into [0,1]. Non-finite
/// inputs are rejected.
DesignVector make_design(const std::array<double, kDesignDim>& raw);

/// Decoded engineering meaning of a DesignVector: a continuous arm length
/// plus one ordinal catalog index per component slot.
struct DesignState {
  double arm_length = 0.0;
  int battery_idx = 0;
  int motor_idx = 0;
  int prop_idx = 0;

  bool operator==(const DesignState&) const = default;
};

struct Interval {
  double lo = 0.0;
  double hi = 1.0;
};

/// Bounded perturbation of a DesignVector. Components stay within
/// [-a_max, +a_max]; the bound is configuration (default 0.1) and is
/// guaranteed by the sampling path rather than by this type.
struct Action {
  std::array<double, kDesignDim> delta{0.0, 0.0, 0.0, 0.0};

  double operator[](std::size_t i) const { return delta[i]; }
  double& operator[](std::size_t i) { return delta[i]; }
  bool operator==(const Action&) const = default;
};

/// arm_length = lo + x0 * (hi - lo); ordinal_i = floor(x_i * size_i) clamped
/// to size_i - 1. Requires catalog sizes >= 1 and a non-degenerate arm range.
DesignState decode_design(const DesignVector& x,
                          const std::array<int, 3>& catalog_sizes,
                          const Interval& arm_range);

/// Component-wise x + delta, clamped back into [0,1].
DesignVector apply_action(const DesignVector& x, const Action& a);

/// One environment interaction, tagged with the fidelity model that produced
/// the reward and the alignment flag assigned at collection time.
struct Transition {
  DesignVector s;
  Action a;
  double r = 0.0;
  DesignVector s_next;
  bool aligned = false;
  FidelityId model = FidelityId::HF;
  /// Log density of `a` under the policy that sampled it, at collection time.
  double log_prob = 0.0;

  bool operator==(const Transition&) const = default;
};

}  // namespace mfrl
