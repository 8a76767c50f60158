#include "jsonio.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "engage/error.hpp"

namespace engage::detail {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoFailure("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoFailure("read failed: " + path);
  return buf.str();
}

std::vector<std::string> read_lines(const std::string& path) {
  std::string content = read_file(path);
  std::vector<std::string> lines;
  std::size_t pos = 0;
  while (pos < content.size()) {
    auto nl = content.find('\n', pos);
    if (nl == std::string::npos) {
      lines.push_back(content.substr(pos));
      break;
    }
    lines.push_back(content.substr(pos, nl - pos));
    pos = nl + 1;
  }
  return lines;
}

void write_file_atomic(const std::string& path, std::string_view content) {
  std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoFailure("cannot write " + tmp);
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw IoFailure("write failed: " + tmp);
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoFailure("rename " + tmp + " -> " + path + ": " + ec.message());
}

json parse_json(std::string_view text, std::string_view context) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw MalformedInput(std::string(context) + ": " + e.what());
  }
}

std::uint64_t get_count(const json& obj, const char* key, std::string_view context) {
  auto it = obj.find(key);
  if (it != obj.end()) {
    if (it->is_number_unsigned()) return it->get<std::uint64_t>();
    if (it->is_number_integer() && it->get<std::int64_t>() >= 0) {
      return static_cast<std::uint64_t>(it->get<std::int64_t>());
    }
  }
  throw MalformedInput(std::string(context) + ": field '" + key +
                       "' must be a non-negative integer");
}

std::uint64_t get_count_or(const json& obj, const char* key, std::uint64_t fallback) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return fallback;
  return get_count(obj, key, "count field");
}

std::optional<std::string> get_optional_string(const json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return std::nullopt;
  if (it->is_string()) {
    auto s = it->get<std::string>();
    if (s.empty()) return std::nullopt;
    return s;
  }
  if (it->is_number_integer()) return std::to_string(it->get<std::int64_t>());
  throw MalformedInput(std::string("field '") + key + "' must be a string");
}

std::string dump_compact(const ordered_json& value) {
  return value.dump(-1, ' ', false, json::error_handler_t::strict);
}

}  // namespace engage::detail
