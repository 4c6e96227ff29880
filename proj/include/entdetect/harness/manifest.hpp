// Copyright 2026 The entdetect Authors
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

/**
 * @file    manifest.hpp
 * @brief   Run manifests and result-file bookkeeping.
 *
 * Every results file `<stem>.csv` is paired with `<stem>.manifest.json`:
 *
 *   {"config": {...}, "version": "...", "started_at": "...", "finished_at": "...",
 *    "cells": [{"d1":..,"d2":..,"k":..,"n":..,"n_npt":..}, ...],
 *    "results": "<stem>.csv", "checksum": "sha256:<hex of the csv bytes>"}
 *
 * Both files are written through a temporary file and a rename, results
 * first, so a manifest only ever describes a complete results file.
 */

#pragma once

#include <algorithm>
#include <array>
#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include <nlohmann/json.hpp>
#include <openssl/evp.h>

#include "entdetect/analytics.hpp"
#include "entdetect/errors.hpp"
#include "entdetect/harness/config.hpp"
#include "entdetect/version.hpp"

namespace entdetect::harness {

inline std::string sha256_hex(std::string_view data) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest.data(), &len, EVP_sha256(), nullptr) != 1) {
    throw ConfigError("sha256 computation failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(kHex[digest[i] >> 4]);
    out.push_back(kHex[digest[i] & 0xf]);
  }
  return out;
}

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + p.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

/// Writes `content` to a sibling temporary file, then renames it over `p`.
inline void write_atomic(const std::filesystem::path& p, std::string_view content) {
  std::error_code ec;
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path(), ec);
  if (ec) throw ConfigError("cannot create directory " + p.parent_path().string() + ": " + ec.message());
  std::filesystem::path tmp = p;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw ConfigError("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, p, ec);
  if (ec) throw ConfigError("cannot rename " + tmp.string() + " to " + p.string() + ": " + ec.message());
}

inline std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

inline std::filesystem::path manifest_path_for(const std::filesystem::path& results) {
  std::filesystem::path m = results;
  m.replace_extension(".manifest.json");
  return m;
}

inline nlohmann::json make_manifest(const SweepConfig& config, const std::vector<SweepStats>& stats,
                                    const std::string& started_at, const std::string& finished_at,
                                    const std::filesystem::path& results, std::string_view results_content) {
  nlohmann::json cells = nlohmann::json::array();
  for (const SweepStats& s : stats) {
    cells.push_back({{"d1", s.d1}, {"d2", s.d2}, {"k", s.k}, {"n", s.n_total}, {"n_npt", s.n_npt}});
  }
  return {{"config", to_json(config)},
          {"version", kVersion},
          {"started_at", started_at},
          {"finished_at", finished_at},
          {"cells", cells},
          {"results", results.filename().string()},
          {"checksum", "sha256:" + sha256_hex(results_content)}};
}

enum class OutputState {
  Absent,            // nothing on disk
  Complete,          // manifest matches the config and the results checksum
  Orphan,            // results without a manifest
  ChecksumMismatch,  // results differ from what the manifest recorded
  ConfigChanged,     // manifest exists for a different configuration
  ManifestOnly,      // manifest without results
};

inline std::string_view describe(OutputState s) {
  switch (s) {
    case OutputState::Absent: return "absent";
    case OutputState::Complete: return "complete";
    case OutputState::Orphan: return "corrupt: results file has no manifest";
    case OutputState::ChecksumMismatch: return "corrupt: results checksum does not match manifest";
    case OutputState::ConfigChanged: return "stale: manifest was written for a different configuration";
    case OutputState::ManifestOnly: return "corrupt: manifest without results file";
  }
  return "?";
}

inline bool is_corrupt(OutputState s) {
  return s == OutputState::Orphan || s == OutputState::ChecksumMismatch || s == OutputState::ManifestOnly;
}

/// Classifies the pair (results, manifest) against the configuration about to run.
inline OutputState inspect_output(const std::filesystem::path& results, const SweepConfig& config) {
  const auto manifest = manifest_path_for(results);
  const bool has_results = std::filesystem::exists(results);
  const bool has_manifest = std::filesystem::exists(manifest);
  if (!has_results && !has_manifest) return OutputState::Absent;
  if (!has_manifest) return OutputState::Orphan;
  if (!has_results) return OutputState::ManifestOnly;
  nlohmann::json m;
  try {
    m = nlohmann::json::parse(read_file(manifest));
  } catch (const nlohmann::json::exception&) {
    return OutputState::ChecksumMismatch;
  }
  if (!m.contains("checksum") || !m["checksum"].is_string()) return OutputState::ChecksumMismatch;
  if (m["checksum"].get<std::string>() != "sha256:" + sha256_hex(read_file(results))) {
    return OutputState::ChecksumMismatch;
  }
  if (!m.contains("config")) return OutputState::ConfigChanged;
  nlohmann::json stored = m["config"];
  stored.erase("workers");
  stored.erase("output_dir");
  if (stored != result_identity(config)) return OutputState::ConfigChanged;
  return OutputState::Complete;
}

/// Scans a directory for result files and reports every pair that is not complete.
inline std::vector<std::pair<std::filesystem::path, std::string>> audit_directory(const std::filesystem::path& dir) {
  std::vector<std::pair<std::filesystem::path, std::string>> problems;
  if (!std::filesystem::is_directory(dir)) return problems;
  std::vector<std::filesystem::path> entries;
  for (const auto& e : std::filesystem::directory_iterator(dir)) entries.push_back(e.path());
  std::sort(entries.begin(), entries.end());
  for (const auto& p : entries) {
    const std::string name = p.filename().string();
    const std::string_view suffix = ".manifest.json";
    if (p.extension() == ".csv") {
      const auto manifest = manifest_path_for(p);
      if (!std::filesystem::exists(manifest)) {
        problems.emplace_back(p, std::string(describe(OutputState::Orphan)));
        continue;
      }
      try {
        const auto m = nlohmann::json::parse(read_file(manifest));
        if (m.value("checksum", std::string()) != "sha256:" + sha256_hex(read_file(p))) {
          problems.emplace_back(p, std::string(describe(OutputState::ChecksumMismatch)));
        }
      } catch (const nlohmann::json::exception&) {
        problems.emplace_back(p, "corrupt: manifest is not valid JSON");
      }
    } else if (name.size() > suffix.size() && name.ends_with(suffix)) {
      const std::filesystem::path results = dir / (name.substr(0, name.size() - suffix.size()) + ".csv");
      if (!std::filesystem::exists(results)) {
        problems.emplace_back(p, std::string(describe(OutputState::ManifestOnly)));
      }
    }
  }
  return problems;
}

}  // namespace entdetect::harness
