#pragma once

#include <json.hpp>

#include "nnrepair/rational.hpp"

namespace nnrepair {

/// Accepts "0.25", "-7/2" or a plain JSON number.
Rational rational_from_json(const nlohmann::json& value);

}  // namespace nnrepair
