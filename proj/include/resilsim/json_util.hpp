#pragma once

// Path-tracking accessors for config documents.

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "resilsim/error.hpp"

namespace resilsim {

using Json = nlohmann::ordered_json;

namespace json_util {

inline std::string join(const std::string& path, const std::string& key) { return path + "/" + key; }
inline std::string join(const std::string& path, std::size_t i) { return path + "/" + std::to_string(i); }

inline const Json& require(const Json& obj, const std::string& key, const std::string& path) {
  if (!obj.is_object()) throw SchemaError(path, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) throw SchemaError(join(path, key), "missing required field");
  return *it;
}

inline const Json* optional(const Json& obj, const std::string& key, const std::string& path) {
  if (!obj.is_object()) throw SchemaError(path, "expected an object");
  auto it = obj.find(key);
  return it == obj.end() || it->is_null() ? nullptr : &*it;
}

inline double number(const Json& v, const std::string& path) {
  if (!v.is_number()) throw SchemaError(path, "expected a number");
  return v.get<double>();
}

inline double number_or(const Json& obj, const std::string& key, const std::string& path, double fallback) {
  const Json* v = optional(obj, key, path);
  return v ? number(*v, join(path, key)) : fallback;
}

inline std::string string(const Json& v, const std::string& path) {
  if (!v.is_string()) throw SchemaError(path, "expected a string");
  return v.get<std::string>();
}

inline std::string string_or(const Json& obj, const std::string& key, const std::string& path,
                             const std::string& fallback) {
  const Json* v = optional(obj, key, path);
  return v ? string(*v, join(path, key)) : fallback;
}

inline bool boolean_or(const Json& obj, const std::string& key, const std::string& path, bool fallback) {
  const Json* v = optional(obj, key, path);
  if (!v) return fallback;
  if (!v->is_boolean()) throw SchemaError(join(path, key), "expected a boolean");
  return v->get<bool>();
}

inline const Json& array(const Json& v, const std::string& path) {
  if (!v.is_array()) throw SchemaError(path, "expected an array");
  return v;
}

inline std::vector<std::string> strings(const Json& v, const std::string& path) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < array(v, path).size(); ++i) out.push_back(string(v[i], join(path, i)));
  return out;
}

/// Rejects keys outside `allowed` so that typos surface as schema errors.
inline void only_keys(const Json& obj, std::initializer_list<const char*> allowed, const std::string& path) {
  if (!obj.is_object()) throw SchemaError(path, "expected an object");
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || it.key() == a;
    if (!ok) throw SchemaError(join(path, it.key()), "unknown field");
  }
}

template <typename E, std::size_t N>
E enum_field(const Json& v, const std::string& path) {
  const auto text = string(v, path);
  for (std::size_t i = 0; i < N; ++i) {
    if (to_string(static_cast<E>(i)) == text) return static_cast<E>(i);
  }
  throw SchemaError(path, "unknown value '" + text + "'");
}

}  // namespace json_util
}  // namespace resilsim
