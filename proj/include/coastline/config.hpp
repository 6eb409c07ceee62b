#pragma once

#include "coastline/raster.hpp"

#include "json.hpp"

namespace coastline {

/// Parse a TOML subset into a JSON tree: comments, [table] and [[array of
/// tables]] headers with dotted names, and `key = value` pairs where value is
/// a quoted string, integer, float, boolean, or a single-line array of
/// scalars. Errors carry the file name and line number.
nlohmann::json parse_toml_file(const std::string& path);
nlohmann::json parse_toml(const std::string& text, const std::string& origin = "config");

} // namespace coastline
