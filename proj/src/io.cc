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

#include "crcal/io.h"

#include <fmt/format.h>

#include <cmath>
#include <fstream>
#include <sstream>

#include "crcal/errors.h"

namespace crcal {

std::string fmt9(double v) {
    if (v == 0) {
        return "0";
    }
    return fmt::format("{:.9g}", v);
}

double round9(double v) {
    if (!std::isfinite(v) || v == 0) {
        return v;
    }
    return std::stod(fmt::format("{:.9g}", v));
}

nlohmann::json rounded(const nlohmann::json &j) {
    if (j.is_number_float()) {
        return round9(j.get<double>());
    }
    if (j.is_array()) {
        nlohmann::json out = nlohmann::json::array();
        for (const auto &v : j) {
            out.push_back(rounded(v));
        }
        return out;
    }
    if (j.is_object()) {
        nlohmann::json out = nlohmann::json::object();
        for (const auto &[k, v] : j.items()) {
            out[k] = rounded(v);
        }
        return out;
    }
    return j;
}

std::string fnv1a_hex(const std::string &s) {
    uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return fmt::format("{:016x}", h);
}

std::string config_hash(const nlohmann::json &config) {
    return fnv1a_hex(rounded(config).dump());
}

void write_text_file(const std::string &path, const std::string &content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw ValidationError("cannot write '" + path + "'");
    }
    out << content;
}

std::string read_text_file(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ValidationError("cannot read '" + path + "'");
    }
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string dump_json(const nlohmann::json &j) {
    return rounded(j).dump(2) + "\n";
}

}  // namespace crcal
