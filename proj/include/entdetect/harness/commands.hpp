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
 * @file    commands.hpp
 * @brief   The table-producing subcommands and the bounds report.
 *
 * Command-line flags and config-file keys share one vocabulary:
 *
 *   d1, d2, k, d12, samples, seed, eps, out, workers, criteria, allow_rank_one
 *
 * A config file is a JSON object with any of these keys; explicit flags win.
 * `k` and (for scan-dim) `d2` accept either an integer or a range "a..b".
 */

#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "entdetect/analytics.hpp"
#include "entdetect/harness/config.hpp"
#include "entdetect/harness/csv.hpp"
#include "entdetect/harness/manifest.hpp"
#include "entdetect/harness/runner.hpp"

namespace entdetect::harness {

struct CommandOptions {
  std::optional<int> d1;
  std::optional<std::string> d2;
  std::optional<std::string> k;
  std::optional<int> d12;
  std::optional<std::int64_t> samples;  // table default 10000, verify default 1000
  std::uint64_t seed = 42;
  double eps = kDefaultEps;
  std::string out = "runs";
  std::string workers = "auto";
  std::vector<std::string> criteria;
  bool allow_rank_one = false;
};

namespace detail {
inline std::string scalar_to_string(const nlohmann::json& v, const char* key) {
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  if (v.is_string()) return v.get<std::string>();
  throw ConfigError(std::string("config key '") + key + "' must be an integer or a range string");
}
}  // namespace detail

/// Fills `opts` from a config-file object. Unknown keys are rejected.
inline void apply_config_file(const nlohmann::json& j, CommandOptions& opts) {
  if (!j.is_object()) throw ConfigError("config file must contain a JSON object");
  try {
    for (const auto& [key, v] : j.items()) {
      if (key == "d1") opts.d1 = v.get<int>();
      else if (key == "d2") opts.d2 = detail::scalar_to_string(v, "d2");
      else if (key == "k") opts.k = detail::scalar_to_string(v, "k");
      else if (key == "d12") opts.d12 = v.get<int>();
      else if (key == "samples") opts.samples = v.get<std::int64_t>();
      else if (key == "seed") opts.seed = v.get<std::uint64_t>();
      else if (key == "eps") opts.eps = v.get<double>();
      else if (key == "out") opts.out = v.get<std::string>();
      else if (key == "workers") opts.workers = v.is_string() ? v.get<std::string>() : std::to_string(v.get<int>());
      else if (key == "criteria") opts.criteria = v.get<std::vector<std::string>>();
      else if (key == "allow_rank_one") opts.allow_rank_one = v.get<bool>();
      else throw ConfigError("unknown config key '" + key + "'");
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad config value: ") + e.what());
  }
}

/// "auto" -> 0, otherwise a positive integer.
inline int parse_workers(const std::string& w) {
  if (w == "auto") return 0;
  const auto [lo, hi] = parse_range(w);
  if (lo != hi || lo < 1) throw ConfigError("workers must be a positive integer or 'auto'");
  return lo;
}

namespace detail {
inline SweepConfig base_config(const CommandOptions& o) {
  SweepConfig c;
  c.samples_per_cell = o.samples.value_or(10000);
  c.master_seed = o.seed;
  c.eps = o.eps;
  c.output_dir = o.out;
  if (!o.criteria.empty()) c.criteria = parse_criteria(o.criteria);
  c.workers = parse_workers(o.workers);
  c.allow_rank_one = o.allow_rank_one;
  return c;
}

inline int single_int(const std::optional<std::string>& v, const char* name) {
  if (!v) throw ConfigError(std::string("--") + name + " is required");
  const auto [lo, hi] = parse_range(*v);
  if (lo != hi) throw ConfigError(std::string("--") + name + " must be a single value here");
  return lo;
}
}  // namespace detail

/// Fixed d1 (x) d2, ranks from --k (default 2..d1*d2).
inline SweepConfig build_scan_rank(const CommandOptions& o) {
  if (!o.d1) throw ConfigError("--d1 is required");
  SweepConfig c = detail::base_config(o);
  const int d1 = *o.d1;
  const int d2 = detail::single_int(o.d2, "d2");
  const auto [kmin, kmax] = o.k ? parse_range(*o.k) : std::pair{2, d1 * d2};
  c.grid.push_back({d1, d2, kmin, kmax});
  c.validate();
  return c;
}

/// Fixed d1 and k, d2 over a range.
inline SweepConfig build_scan_dim(const CommandOptions& o) {
  if (!o.d1) throw ConfigError("--d1 is required");
  if (!o.d2) throw ConfigError("--d2 range is required");
  SweepConfig c = detail::base_config(o);
  const int k = detail::single_int(o.k, "k");
  const auto [lo, hi] = parse_range(*o.d2);
  for (int d2 = lo; d2 <= hi; ++d2) c.grid.push_back({*o.d1, d2, k, k});
  c.validate();
  return c;
}

/// Factor pairs d1 <= d2 of d12 with both factors >= 2.
inline std::vector<std::pair<int, int>> factorizations(int d12) {
  std::vector<std::pair<int, int>> out;
  for (int a = 2; a * a <= d12; ++a)
    if (d12 % a == 0) out.emplace_back(a, d12 / a);
  return out;
}

/// Every factorization of --d12, at k = 2 and k = d12.
inline SweepConfig build_asymmetry(const CommandOptions& o) {
  if (!o.d12) throw ConfigError("--d12 is required");
  const int d12 = *o.d12;
  const auto pairs = factorizations(d12);
  if (pairs.empty()) throw ConfigError("d12=" + std::to_string(d12) + " is prime or too small to factor");
  if (pairs.size() < 2) {
    throw ConfigError("d12=" + std::to_string(d12) + " admits a single factorization; need at least two");
  }
  SweepConfig c = detail::base_config(o);
  for (const auto& [a, b] : pairs) {
    c.grid.push_back({a, b, 2, 2});
    c.grid.push_back({a, b, d12, d12});
  }
  c.validate();
  return c;
}

enum class TableKind { ScanRank, ScanDim, Asymmetry };

inline std::string results_stem(TableKind kind, const SweepConfig& c) {
  const GridCell& g = c.grid.front();
  switch (kind) {
    case TableKind::ScanRank:
      return "scan_rank_" + std::to_string(g.d1) + "x" + std::to_string(g.d2);
    case TableKind::ScanDim:
      return "scan_dim_" + std::to_string(g.d1) + "x" + std::to_string(g.d2) + "-" +
             std::to_string(c.grid.back().d2) + "_k" + std::to_string(g.k_min);
    case TableKind::Asymmetry:
      return "asymmetry_d12_" + std::to_string(g.d1 * g.d2);
  }
  return "results";
}

struct TableRun {
  std::filesystem::path results;
  OutputState prior = OutputState::Absent;
  bool reused = false;
  std::vector<SweepStats> stats;  // empty when reused
  std::string csv;
};

/// Runs a table command unless an identical, checksum-verified result already
/// exists (then it is a no-op). Corrupt or stale outputs are reported on `log`
/// and regenerated.
inline TableRun run_table(TableKind kind, const SweepConfig& config, int workers, bool force, std::ostream& log) {
  TableRun run;
  run.results = config.output_dir / (results_stem(kind, config) + ".csv");
  run.prior = inspect_output(run.results, config);
  if (run.prior == OutputState::Complete && !force) {
    run.reused = true;
    run.csv = read_file(run.results);
    log << "up to date: " << run.results.string() << " (manifest checksum verified)\n";
    return run;
  }
  if (run.prior != OutputState::Absent && run.prior != OutputState::Complete) {
    log << run.results.string() << ": " << describe(run.prior) << "; regenerating\n";
  }
  const std::string started = utc_timestamp();
  run.stats = run_sweep(config, workers);
  const std::string finished = utc_timestamp();
  run.csv = format_csv(run.stats, config, kind == TableKind::Asymmetry);
  write_atomic(run.results, run.csv);
  const auto manifest = make_manifest(config, run.stats, started, finished, run.results, run.csv);
  write_atomic(manifest_path_for(run.results), manifest.dump(2) + "\n");
  log << "wrote " << run.results.string() << " and " << manifest_path_for(run.results).string() << "\n";
  return run;
}

/// Closed-form thresholds and Haar averages for d1 (x) d2.
inline std::string bounds_report(int d1, int d2) {
  const int lo = std::min(d1, d2);
  const int hi = std::max(d1, d2);
  std::ostringstream os;
  os << "system " << d1 << "x" << d2 << "\n";
  os << "entropy_rank_threshold " << entropy_rank_threshold(d1, d2)
     << "  (average-case entropy detection fails for k above this)\n";
  const double bound = realignment_rank_bound(lo, hi);
  os << "realignment_rank_bound ";
  if (std::isinf(bound)) {
    os << "vacuous (equal dimensions)\n";
  } else {
    os << format_number(bound) << "  (realignment ineffective for k >= this)";
    if (bound > d1 * d2) os << "  [exceeds d1*d2, never binding]";
    os << "\n";
  }
  os << "ppt_rank_sufficient " << ppt_rank_sufficient(d1, d2) << "\n";
  os << "k,s1_avg,s2_avg,s12_avg,purity_avg\n";
  for (int k = 1; k <= d1 * d2; ++k) {
    const PageEntropies e = page_entropies(d1, d2, k);
    os << k << ',' << format_number(e.s1) << ',' << format_number(e.s2) << ',' << format_number(e.s12) << ','
       << format_number(average_purity(d1, d2, k)) << "\n";
  }
  return os.str();
}

}  // namespace entdetect::harness
