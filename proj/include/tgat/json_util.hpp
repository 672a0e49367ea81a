#pragma once

#include <algorithm>
#include <initializer_list>
#include <string>
#include <string_view>

#include "json.hpp"
#include "tgat/error.hpp"

namespace tgat::json_util {

using nlohmann::json;

inline void require_object(const json& j, std::string_view section) {
  if (!j.is_object()) throw ConfigError(std::string(section) + ": expected a JSON object");
}

inline void reject_unknown(const json& j, std::initializer_list<std::string_view> known, std::string_view section) {
  require_object(j, section);
  for (auto it = j.begin(); it != j.end(); ++it)
    if (std::find(known.begin(), known.end(), it.key()) == known.end())
      throw ConfigError(std::string(section) + ": unknown key '" + it.key() + "'");
}

/// Overwrites `out` with j[key] when present; type mismatches become ConfigError.
template <typename T>
void read(const json& j, std::string_view key, T& out, std::string_view section) {
  auto it = j.find(std::string(key));
  if (it == j.end()) return;
  try {
    out = it->template get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string(section) + "." + std::string(key) + ": " + e.what());
  }
}

}  // namespace tgat::json_util
