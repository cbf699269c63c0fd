/*
 Copyright 2026 The spinoc Authors

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
#pragma once

#include "spinoc/common.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace spinoc {

/// 64-bit FNV-1a.
std::uint64_t fnv1a64(std::string_view bytes);
std::string hex64(std::uint64_t v);

/// Shortest round-trip-safe text: 17 significant digits, '.' decimal.
std::string format_number(double v);

/// Column-oriented CSV built in memory, written once.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header);
  void add_row(const std::vector<double>& row);
  std::string str() const;
  std::size_t rows() const { return rows_.size(); }

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<double>> rows_;
};

/// Owns an output directory; every artifact goes through it so the manifest
/// lists sizes and checksums of everything written.
class ArtifactWriter {
 public:
  ArtifactWriter(std::filesystem::path dir, std::uint64_t fingerprint);

  const std::filesystem::path& dir() const { return dir_; }
  std::uint64_t fingerprint() const { return fingerprint_; }

  void text(const std::string& name, const std::string& content, const std::string& kind);
  void csv(const std::string& name, const CsvTable& table) { text(name, table.str(), "csv"); }
  /// JSON summary; the config fingerprint is embedded under "config_fingerprint".
  void json(const std::string& name, nlohmann::json content);
  void binary(const std::string& name, const std::string& bytes);
  /// Registers a file that was produced by another writer (e.g. write_binary).
  void adopt(const std::string& name, const std::string& kind);

  /// Writes manifest.json (listing every artifact) and returns its path.
  std::filesystem::path finish(const nlohmann::json& extra = nlohmann::json::object());

 private:
  void record(const std::string& name, const std::string& kind, const std::string& bytes);

  std::filesystem::path dir_;
  std::uint64_t fingerprint_;
  nlohmann::json entries_ = nlohmann::json::array();
};

std::string read_file(const std::filesystem::path& path);

}  // namespace spinoc
