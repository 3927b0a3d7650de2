#pragma once

#include <array>
#include <cstddef>
#include <string_view>

namespace mfrl {

/// Accuracy/cost tier of an analysis model. Index order matches the
/// probability tuples used in model choice: (LF1, LF2, HF).
enum class FidelityId : int { LF1 = 0, LF2 = 1, HF = 2 };

inline constexpr std::size_t kFidelityCount = 3;
inline constexpr std::array<FidelityId, kFidelityCount> kAllFidelities{
    FidelityId::LF1, FidelityId::LF2, FidelityId::HF};

constexpr std::size_t index_of(FidelityId id) noexcept {
  return static_cast<std::size_t>(id);
}

constexpr std::string_view name_of(FidelityId id) noexcept {
  switch (id) {
    case FidelityId::LF1: return "lf1";
    case FidelityId::LF2: return "lf2";
    case FidelityId::HF: return "hf";
  }
  return "?";
}

}  // namespace mfrl
