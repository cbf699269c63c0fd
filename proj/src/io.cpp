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
#include "spinoc/io.hpp"

#include <cstdio>
#include <fstream>
#include <iterator>
#include <sstream>

namespace spinoc {

namespace fs = std::filesystem;

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {
  if (header_.empty()) throw ConfigError("CSV table needs a header");
}

void CsvTable::add_row(const std::vector<double>& row) {
  if (row.size() != header_.size()) throw ConfigError("CSV row width does not match the header");
  rows_.push_back(row);
}

std::string CsvTable::str() const {
  std::string out;
  for (std::size_t i = 0; i < header_.size(); ++i) out += (i ? "," : "") + header_[i];
  out += '\n';
  for (const auto& r : rows_) {
    for (std::size_t i = 0; i < r.size(); ++i) {
      if (i) out += ',';
      out += format_number(r[i]);
    }
    out += '\n';
  }
  return out;
}

ArtifactWriter::ArtifactWriter(fs::path dir, std::uint64_t fingerprint)
    : dir_(std::move(dir)), fingerprint_(fingerprint) {
  std::error_code ec;
  fs::create_directories(dir_, ec);
  if (ec) throw ConfigError("cannot create output directory " + dir_.string() + ": " + ec.message());
}

void ArtifactWriter::record(const std::string& name, const std::string& kind, const std::string& bytes) {
  entries_.push_back({{"path", name}, {"kind", kind}, {"bytes", bytes.size()}, {"fnv1a64", hex64(fnv1a64(bytes))}});
}

void ArtifactWriter::text(const std::string& name, const std::string& content, const std::string& kind) {
  std::ofstream os(dir_ / name, std::ios::binary);
  if (!os) throw ConfigError("cannot write " + (dir_ / name).string());
  os << content;
  record(name, kind, content);
}

void ArtifactWriter::json(const std::string& name, nlohmann::json content) {
  content["config_fingerprint"] = hex64(fingerprint_);
  text(name, content.dump(2) + "\n", "json");
}

void ArtifactWriter::binary(const std::string& name, const std::string& bytes) { text(name, bytes, "binary"); }

void ArtifactWriter::adopt(const std::string& name, const std::string& kind) {
  record(name, kind, read_file(dir_ / name));
}

fs::path ArtifactWriter::finish(const nlohmann::json& extra) {
  nlohmann::json m = extra;
  m["config_fingerprint"] = hex64(fingerprint_);
  m["artifacts"] = entries_;
  const fs::path path = dir_ / "manifest.json";
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ConfigError("cannot write " + path.string());
  os << m.dump(2) << "\n";
  return path;
}

std::string read_file(const fs::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ConfigError("cannot read " + path.string());
  return std::string(std::istreambuf_iterator<char>(is), {});
}

}  // namespace spinoc
