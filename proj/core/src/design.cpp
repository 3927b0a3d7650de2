#include "mfrl/design.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mfrl {

DesignVector make_design(const std::array<double, kDesignDim>& raw) {
  DesignVector out;
  for (std::size_t i = 0; i < kDesignDim; ++i) {
    if (!std::isfinite(raw[i])) {
      throw std::invalid_argument("design component is not finite");
    }
    out.x[i] = std::clamp(raw[i], 0.0, 1.0);
  }
  return out;
}

DesignState decode_design(const DesignVector& x,
                          const std::array<int, 3>& catalog_sizes,
                          const Interval& arm_range) {
  for (int size : catalog_sizes) {
    if (size < 1) throw std::invalid_argument("catalog size must be >= 1");
  }
  if (!(arm_range.hi > arm_range.lo)) {
    throw std::invalid_argument("arm range must be non-degenerate");
  }

  auto ordinal = [](double xi, int size) {
    int idx = static_cast<int>(std::floor(xi * size));
    return std::clamp(idx, 0, size - 1);
  };

  DesignState out;
  out.arm_length = arm_range.lo + x[0] * (arm_range.hi - arm_range.lo);
  out.battery_idx = ordinal(x[1], catalog_sizes[0]);
  out.motor_idx = ordinal(x[2], catalog_sizes[1]);
  out.prop_idx = ordinal(x[3], catalog_sizes[2]);
  return out;
}

DesignVector apply_action(const DesignVector& x, const Action& a) {
  DesignVector out;
  for (std::size_t i = 0; i < kDesignDim; ++i) {
    out.x[i] = std::clamp(x[i] + a[i], 0.0, 1.0);
  }
  return out;
}

}  // namespace mfrl
