// Copyright 2026 The fluxtrans Authors
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

#pragma once

#include <Eigen/Core>
#include <boost/version.hpp>

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include "fluxtrans/error.hpp"

namespace fluxtrans {

inline constexpr const char* version = "1.0.0";

/// 64-bit FNV-1a hash, printed as 16 hex digits.
inline std::string fnv1a_hex(const std::string& data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

inline std::string library_versions() {
  return std::string("fluxtrans ") + version + "; eigen " + std::to_string(EIGEN_WORLD_VERSION) + "." +
         std::to_string(EIGEN_MAJOR_VERSION) + "." + std::to_string(EIGEN_MINOR_VERSION) + "; boost " +
         std::to_string(BOOST_VERSION / 100000) + "." + std::to_string(BOOST_VERSION / 100 % 1000) + "." +
         std::to_string(BOOST_VERSION % 100);
}

/// Shortest round-trip-safe decimal form of a double.
inline std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

/// Delimiter-separated table preceded by "# key: value" metadata lines.
class DsvTable {
 public:
  explicit DsvTable(std::vector<std::string> columns, char delimiter = ',')
      : columns_(std::move(columns)), delimiter_(delimiter) {}

  void meta(const std::string& key, const std::string& value) { meta_.emplace_back(key, value); }
  void meta(const std::string& key, double value) { meta_.emplace_back(key, format_number(value)); }

  /// Appends a row; numbers and strings may be mixed through `cell`.
  void row(std::vector<std::string> cells) {
    if (cells.size() != columns_.size()) throw Error(ErrorCode::InvalidSpec, "row width does not match the header");
    rows_.push_back(std::move(cells));
  }
  static std::string cell(double v) { return format_number(v); }
  static std::string cell(long v) { return std::to_string(v); }
  static std::string cell(int v) { return std::to_string(v); }
  static std::string cell(std::size_t v) { return std::to_string(v); }
  static std::string cell(const std::string& s) { return s; }
  static std::string cell(const char* s) { return s; }

  std::size_t size() const { return rows_.size(); }

  std::string str() const {
    std::string out;
    for (const auto& [k, v] : meta_) out += "# " + k + ": " + v + "\n";
    out += join(columns_);
    for (const auto& r : rows_) out += join(r);
    return out;
  }

  void write(const std::filesystem::path& path) const {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::Config, "cannot write " + path.string());
    out << str();
    if (!out) throw Error(ErrorCode::Config, "write failed for " + path.string());
  }

 private:
  std::string join(const std::vector<std::string>& cells) const {
    std::string line;
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) line += delimiter_;
      line += cells[i];
    }
    return line + "\n";
  }

  std::vector<std::string> columns_;
  char delimiter_;
  std::vector<std::pair<std::string, std::string>> meta_;
  std::vector<std::vector<std::string>> rows_;
};

}  // namespace fluxtrans
