#pragma once

// Typed field access for YAML documents with file:line error messages.

#include <yaml-cpp/yaml.h>

#include <filesystem>
#include <string>

#include "flightline/service/config.hpp"

namespace flightline::service::detail {

inline std::string where(const std::filesystem::path& file, const YAML::Node& node) {
  const auto m = node.Mark();
  if (m.line < 0) return file.string();
  return file.string() + ":" + std::to_string(m.line + 1);
}

inline YAML::Node load_yaml(const std::filesystem::path& path) {
  try {
    return YAML::LoadFile(path.string());
  } catch (const YAML::BadFile&) {
    throw ConfigError(path.string() + ": cannot read file");
  } catch (const YAML::ParserException& e) {
    throw ConfigError(path.string() + ":" + std::to_string(e.mark.line + 1) + ": " + e.msg);
  }
}

template <typename T>
T as(const std::filesystem::path& file, const YAML::Node& node, const std::string& what) {
  try {
    return node.as<T>();
  } catch (const YAML::Exception&) {
    throw ConfigError(where(file, node) + ": bad value for '" + what + "'");
  }
}

inline YAML::Node need(const std::filesystem::path& file, const YAML::Node& parent, const std::string& key) {
  const auto n = parent[key];
  if (!n) throw ConfigError(where(file, parent) + ": missing '" + key + "'");
  return n;
}

template <typename T>
T field(const std::filesystem::path& file, const YAML::Node& parent, const std::string& key) {
  return as<T>(file, need(file, parent, key), key);
}

template <typename T>
T field_or(const std::filesystem::path& file, const YAML::Node& parent, const std::string& key, T fallback) {
  const auto n = parent[key];
  return n ? as<T>(file, n, key) : fallback;
}

}  // namespace flightline::service::detail
