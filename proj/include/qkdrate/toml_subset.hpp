#pragma once

// Reader for the small TOML subset used by sweep configs: [table] and
// [[array-of-tables]] headers, bare or quoted keys, basic strings, integers,
// floats (including inf/nan), booleans, and single-line arrays of those.

#include <string_view>

#include "json.hpp"

namespace qkdrate {

/// Throws ConfigError with a line number on anything outside the subset.
nlohmann::json parse_toml_subset(std::string_view text);

}  // namespace qkdrate
