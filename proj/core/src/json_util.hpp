// Internal helpers shared by the model persistence code. Not installed.
#ifndef CMPOS_SRC_JSON_UTIL_HPP
#define CMPOS_SRC_JSON_UTIL_HPP

#include <string>

#include "cmpos/error.hpp"
#include "cmpos/io.hpp"
#include <json.hpp>

namespace cmpos::detail {

inline void check_format(const nlohmann::json& j, const std::string& expected,
                         int version = 1) {
  if (!j.is_object() || !j.contains("format") || !j.contains("version"))
    throw VersionError("missing format/version tags (expected " + expected + ")");
  if (j["format"] != expected)
    throw VersionError("format is " + j["format"].dump() + ", expected " +
                       expected);
  if (j["version"] != version)
    throw VersionError("unsupported " + expected + " version " +
                       j["version"].dump());
}

inline nlohmann::json parse_json_file(const std::string& path) {
  auto text = read_file(path);
  nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
  if (j.is_discarded()) throw FormatError(path + ": invalid JSON");
  return j;
}

}  // namespace cmpos::detail

#endif  // CMPOS_SRC_JSON_UTIL_HPP
