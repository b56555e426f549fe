/* Copyright 2026 The algaeval Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#ifndef ALGAEVAL_SRC_JSON_UTIL_H_
#define ALGAEVAL_SRC_JSON_UTIL_H_

#include <json.hpp>

#include <string>
#include <string_view>

#include "algaeval/errors.h"

namespace algaeval::internal {

using Json = nlohmann::json;
using OrderedJson = nlohmann::ordered_json;

inline Json ParseJsonText(std::string_view text, std::string_view source) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ParseError(std::string(source) + ": " + e.what());
  }
}

inline const Json& RequireField(const Json& obj, std::string_view key,
                                const std::string& ctx) {
  if (!obj.is_object()) throw ParseError(ctx + ": expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) {
    throw ParseError(ctx + ": missing field \"" + std::string(key) + "\"");
  }
  return *it;
}

inline double RequireNumber(const Json& obj, std::string_view key,
                            const std::string& ctx) {
  const Json& v = RequireField(obj, key, ctx);
  if (!v.is_number()) {
    throw ParseError(ctx + "." + std::string(key) + ": expected a number");
  }
  return v.get<double>();
}

inline long long RequireInteger(const Json& obj, std::string_view key,
                                const std::string& ctx) {
  const Json& v = RequireField(obj, key, ctx);
  if (!v.is_number_integer()) {
    throw ParseError(ctx + "." + std::string(key) + ": expected an integer");
  }
  return v.get<long long>();
}

inline std::string RequireString(const Json& obj, std::string_view key,
                                 const std::string& ctx) {
  const Json& v = RequireField(obj, key, ctx);
  if (!v.is_string()) {
    throw ParseError(ctx + "." + std::string(key) + ": expected a string");
  }
  return v.get<std::string>();
}

inline const Json& RequireArray(const Json& obj, std::string_view key,
                                const std::string& ctx) {
  const Json& v = RequireField(obj, key, ctx);
  if (!v.is_array()) {
    throw ParseError(ctx + "." + std::string(key) + ": expected an array");
  }
  return v;
}

inline std::string Dump(const OrderedJson& j) { return j.dump(2) + "\n"; }

}  // namespace algaeval::internal

#endif  // ALGAEVAL_SRC_JSON_UTIL_H_
