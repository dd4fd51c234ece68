/*
 Copyright 2026 The resilo Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/
// Validator for the JSON Schema subset used by schemas/: type, enum,
// required, properties, additionalProperties (boolean) and items.
#ifndef RESILO_TESTS_SCHEMA_HPP
#define RESILO_TESTS_SCHEMA_HPP

#include <json.hpp>

#include <fstream>
#include <string>

namespace resilo::testing {

inline bool json_has_type(const nlohmann::json &v, const std::string &t) {
  if (t == "object") return v.is_object();
  if (t == "array") return v.is_array();
  if (t == "string") return v.is_string();
  if (t == "number") return v.is_number();
  if (t == "integer") return v.is_number_integer();
  if (t == "boolean") return v.is_boolean();
  if (t == "null") return v.is_null();
  return false;
}

/// Empty string when valid, else the path of the first violation.
inline std::string schema_error(const nlohmann::json &schema,
                                const nlohmann::json &v,
                                const std::string &path = "$") {
  if (auto t = schema.find("type"); t != schema.end()) {
    bool ok = false;
    if (t->is_string())
      ok = json_has_type(v, *t);
    else
      for (const auto &alt : *t)
        ok = ok || json_has_type(v, alt);
    if (!ok)
      return path + ": wrong type";
  }
  if (auto e = schema.find("enum"); e != schema.end()) {
    bool ok = false;
    for (const auto &c : *e)
      ok = ok || c == v;
    if (!ok)
      return path + ": not in enum";
  }
  if (v.is_object()) {
    if (auto r = schema.find("required"); r != schema.end())
      for (const auto &key : *r)
        if (!v.contains(key.get<std::string>()))
          return path + ": missing " + key.get<std::string>();
    const auto props = schema.find("properties");
    const bool closed = schema.value("additionalProperties", true) == false;
    for (const auto &[key, child] : v.items()) {
      if (props != schema.end() && props->contains(key)) {
        auto err = schema_error((*props)[key], child, path + "." + key);
        if (!err.empty())
          return err;
      } else if (closed) {
        return path + ": unexpected " + key;
      }
    }
  }
  if (v.is_array())
    if (auto items = schema.find("items"); items != schema.end())
      for (std::size_t i = 0; i < v.size(); ++i) {
        auto err = schema_error(*items, v[i], path + "[" + std::to_string(i) + "]");
        if (!err.empty())
          return err;
      }
  return {};
}

inline nlohmann::json read_json_file(const std::string &path) {
  std::ifstream in(path);
  return nlohmann::json::parse(in);
}

} // namespace resilo::testing

#endif // RESILO_TESTS_SCHEMA_HPP
