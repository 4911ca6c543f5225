#pragma once

#include <filesystem>
#include <string_view>

#include <json.hpp>

namespace germlab {

/// Reads the TOML subset used by the data files into a JSON tree: tables,
/// arrays of tables, dotted-free bare keys, strings, integers, booleans and
/// (nested) arrays. Anything else is a parse error with a line number.
nlohmann::json parse_toml(std::string_view text);
nlohmann::json load_toml(const std::filesystem::path& path);

}  // namespace germlab
