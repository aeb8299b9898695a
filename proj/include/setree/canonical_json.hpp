#pragma once

#include <string>

#include "json.hpp"

namespace setree {

/// Compact JSON with keys in sorted order and every floating-point number
/// printed with 12 significant digits ("1.0", "1.69951385032"). Equal
/// documents always render to identical bytes.
std::string canonical_json(const nlohmann::json& doc);

/// Same layout rules, indented by two spaces for files meant to be read.
std::string canonical_json_pretty(const nlohmann::json& doc);

/// The 12-significant-digit rendering used above.
std::string format_real(double value);

} // namespace setree
