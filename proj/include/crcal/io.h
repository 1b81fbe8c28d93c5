// Copyright 2026 The crcal Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef CRCAL_IO_H
#define CRCAL_IO_H

#include <cstdint>
#include <string>

#include "json.hpp"

namespace crcal {

/// All numeric output uses 9 significant digits.
std::string fmt9(double v);
double round9(double v);

/// Copy of `j` with every floating-point number rounded to 9 significant digits.
nlohmann::json rounded(const nlohmann::json &j);

/// FNV-1a 64 of a string, as 16 hex digits. Stable across platforms.
std::string fnv1a_hex(const std::string &s);

/// Hash of the canonical (sorted-key, compact) serialization of a JSON value.
std::string config_hash(const nlohmann::json &config);

void write_text_file(const std::string &path, const std::string &content);
std::string read_text_file(const std::string &path);

/// Pretty JSON with rounded numbers and a trailing newline.
std::string dump_json(const nlohmann::json &j);

}  // namespace crcal

#endif
