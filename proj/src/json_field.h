// Copyright (c) 2026 The ATS Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef ATS_SRC_JSON_FIELD_H_
#define ATS_SRC_JSON_FIELD_H_

#include <string>

#include "json.hpp"
#include "ats/errors.h"

namespace ats {

// Reads j[key] into field when present; type errors become ConfigError.
template <typename T>
void ReadField(const nlohmann::json& j, const char* key, T& field) {
  if (!j.contains(key)) return;
  try {
    field = j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("invalid config value for '") + key +
                      "': " + e.what());
  }
}

}  // namespace ats

#endif  // ATS_SRC_JSON_FIELD_H_
