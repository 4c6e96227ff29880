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

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "entdetect/criteria.hpp"
#include "entdetect/errors.hpp"

namespace entdetect::harness {

/// A block of ranks [k_min, k_max] on d1 (x) d2.
struct GridCell {
  int d1 = 2;
  int d2 = 2;
  int k_min = 2;
  int k_max = 2;

  friend bool operator==(const GridCell&, const GridCell&) = default;
};

/// One (d1, d2, k) cell after expanding the grid.
struct CellSpec {
  int d1 = 2;
  int d2 = 2;
  int k = 2;
};

struct SweepConfig {
  std::vector<GridCell> grid;
  std::int64_t samples_per_cell = 10000;
  std::uint64_t master_seed = 42;
  double eps = kDefaultEps;
  std::filesystem::path output_dir = "runs";
  std::vector<Criterion> criteria{kAllCriteria.begin(), kAllCriteria.end()};
  int workers = 0;  // 0 = auto
  bool allow_rank_one = false;

  void validate() const {
    if (grid.empty()) throw ConfigError("sweep grid is empty");
    for (const GridCell& g : grid) {
      if (g.d1 < 2 || g.d2 < 2) throw ConfigError("grid dimensions must be at least 2");
      const int lo = allow_rank_one ? 1 : 2;
      if (g.k_min < lo || g.k_max > g.d1 * g.d2 || g.k_min > g.k_max) {
        throw ConfigError("invalid rank range " + std::to_string(g.k_min) + ".." + std::to_string(g.k_max) +
                          " for " + std::to_string(g.d1) + "x" + std::to_string(g.d2) +
                          " (ranks must lie in [" + std::to_string(lo) + ", d1*d2])");
      }
    }
    if (samples_per_cell < 100) throw ConfigError("samples per cell must be at least 100");
    if (!(eps > 0.0)) throw ConfigError("eps must be positive");
    if (criteria.empty()) throw ConfigError("criteria selection is empty");
    if (workers < 0) throw ConfigError("workers must be positive or 0 for auto");
  }

  /// Grid expanded to cells in declaration order, ranks ascending.
  [[nodiscard]] std::vector<CellSpec> cells() const {
    std::vector<CellSpec> out;
    for (const GridCell& g : grid)
      for (int k = g.k_min; k <= g.k_max; ++k) out.push_back({g.d1, g.d2, k});
    return out;
  }

  [[nodiscard]] bool selected(Criterion c) const {
    for (Criterion s : criteria)
      if (s == c) return true;
    return false;
  }
};

/// Parses "a..b" or "a" into an inclusive integer range.
inline std::pair<int, int> parse_range(std::string_view text) {
  auto to_int = [&](std::string_view s) {
    if (s.empty()) throw ConfigError("empty range bound in '" + std::string(text) + "'");
    int v = 0;
    for (char c : s) {
      if (c < '0' || c > '9') throw ConfigError("invalid range '" + std::string(text) + "'");
      v = v * 10 + (c - '0');
      if (v > 1000000) throw ConfigError("range bound too large in '" + std::string(text) + "'");
    }
    return v;
  };
  const auto dots = text.find("..");
  if (dots == std::string_view::npos) {
    const int v = to_int(text);
    return {v, v};
  }
  const int lo = to_int(text.substr(0, dots));
  const int hi = to_int(text.substr(dots + 2));
  if (lo > hi) throw ConfigError("empty range '" + std::string(text) + "'");
  return {lo, hi};
}

inline std::vector<Criterion> parse_criteria(const std::vector<std::string>& names) {
  std::vector<Criterion> out;
  for (const auto& n : names) {
    const auto c = parse_criterion(n);
    if (!c) throw ConfigError("unknown criterion '" + n + "'");
    out.push_back(*c);
  }
  return out;
}

inline nlohmann::json to_json(const SweepConfig& c) {
  nlohmann::json grid = nlohmann::json::array();
  for (const GridCell& g : c.grid) grid.push_back({{"d1", g.d1}, {"d2", g.d2}, {"k_min", g.k_min}, {"k_max", g.k_max}});
  nlohmann::json crit = nlohmann::json::array();
  for (Criterion k : c.criteria) crit.push_back(std::string(criterion_name(k)));
  return {{"grid", grid},
          {"samples_per_cell", c.samples_per_cell},
          {"master_seed", c.master_seed},
          {"eps", c.eps},
          {"output_dir", c.output_dir.string()},
          {"criteria", crit},
          {"workers", c.workers},
          {"allow_rank_one", c.allow_rank_one}};
}

/// The parts of a configuration that determine the numbers in a results file.
inline nlohmann::json result_identity(const SweepConfig& c) {
  nlohmann::json j = to_json(c);
  j.erase("workers");
  j.erase("output_dir");
  return j;
}

}  // namespace entdetect::harness
