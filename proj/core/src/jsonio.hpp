#pragma once

// Internal JSON and file helpers shared by adapters and the store.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace engage::detail {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

/// Reads a text file split on '\n'. Throws IoFailure.
std::string read_file(const std::string& path);
std::vector<std::string> read_lines(const std::string& path);

/// Writes through a temporary file and rename. Throws IoFailure.
void write_file_atomic(const std::string& path, std::string_view content);

/// Throws MalformedInput naming `context`.
json parse_json(std::string_view text, std::string_view context);

std::uint64_t get_count(const json& obj, const char* key, std::string_view context);
std::uint64_t get_count_or(const json& obj, const char* key, std::uint64_t fallback);

/// Reads a string or numeric field as a string; nullopt when absent or null.
std::optional<std::string> get_optional_string(const json& obj, const char* key);

std::string dump_compact(const ordered_json& value);

}  // namespace engage::detail
