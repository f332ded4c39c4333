#pragma once

#include <string>
#include <vector>

#include "biasaudit/types.hpp"

namespace biasaudit {

// Canonical report row order: gender, race, profession, religion first, then
// the remaining categories alphabetically.
std::vector<BiasCategory> canonical_category_order(const std::vector<BiasCategory>& present);

// Human-readable row label: "gender" -> "Gender", "age" -> "Age Status",
// "physical-appearance" -> "Physical Appearance", ...
std::string display_name(const BiasCategory& category);

}  // namespace biasaudit
