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

// entdetect: batch driver for the sweep tables, the bounds report and the
// invariant checks.
//
//   entdetect scan-rank --d1 2 --d2 5 --k 2..10 --samples 10000 --seed 42 --out runs/
//   entdetect scan-dim  --d1 3 --k 8 --d2 3..10
//   entdetect asymmetry --d12 12
//   entdetect bounds    --d1 2 --d2 5
//   entdetect verify    [--samples 1000]
//
// Every flag may also come from --config file.json; flags override the file.
// ENTDETECT_WORKERS overrides the worker count from either source.

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "entdetect/entdetect.hpp"
#include "entdetect/harness/commands.hpp"
#include "entdetect/harness/manifest.hpp"
#include "entdetect/harness/verify.hpp"

namespace {

using entdetect::harness::CommandOptions;

// Raw flag values; merged over the config file after parsing.
struct Flags {
  std::string config;
  int d1 = 0;
  std::string d2;
  std::string k;
  int d12 = 0;
  std::int64_t samples = 0;
  std::uint64_t seed = 0;
  double eps = 0.0;
  std::string out;
  std::string workers;
  std::vector<std::string> criteria;
  bool allow_rank_one = false;
  bool force = false;
};

struct Registered {
  CLI::Option* d1 = nullptr;
  CLI::Option* d2 = nullptr;
  CLI::Option* k = nullptr;
  CLI::Option* d12 = nullptr;
  CLI::Option* samples = nullptr;
  CLI::Option* seed = nullptr;
  CLI::Option* eps = nullptr;
  CLI::Option* out = nullptr;
  CLI::Option* workers = nullptr;
  CLI::Option* criteria = nullptr;
  CLI::Option* allow_rank_one = nullptr;
};

bool given(const CLI::Option* o) { return o != nullptr && o->count() > 0; }

CommandOptions merge(const Flags& f, const Registered& r) {
  CommandOptions opts;
  if (!f.config.empty()) {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(entdetect::harness::read_file(f.config));
    } catch (const nlohmann::json::exception& e) {
      throw entdetect::ConfigError("cannot parse " + f.config + ": " + e.what());
    }
    entdetect::harness::apply_config_file(j, opts);
  }
  if (given(r.d1)) opts.d1 = f.d1;
  if (given(r.d2)) opts.d2 = f.d2;
  if (given(r.k)) opts.k = f.k;
  if (given(r.d12)) opts.d12 = f.d12;
  if (given(r.samples)) opts.samples = f.samples;
  if (given(r.seed)) opts.seed = f.seed;
  if (given(r.eps)) opts.eps = f.eps;
  if (given(r.out)) opts.out = f.out;
  if (given(r.workers)) opts.workers = f.workers;
  if (given(r.criteria)) opts.criteria = f.criteria;
  if (given(r.allow_rank_one)) opts.allow_rank_one = f.allow_rank_one;
  return opts;
}

void add_common(CLI::App* app, Flags& f, Registered& r) {
  app->add_option("--config", f.config, "JSON file with any of the flags below as keys");
  r.seed = app->add_option("--seed", f.seed, "master seed (default 42)");
  r.eps = app->add_option("--eps", f.eps, "NPT threshold on the minimum PT eigenvalue (default 1e-10)");
  r.samples = app->add_option("--samples", f.samples, "samples per cell");
  r.workers = app->add_option("--workers", f.workers, "worker threads or 'auto'");
}

void add_table(CLI::App* app, Flags& f, Registered& r) {
  add_common(app, f, r);
  r.out = app->add_option("--out", f.out, "output directory (default runs)");
  r.criteria = app->add_option("--criteria", f.criteria, "subset of pt,reduction,majorization,entropy,realignment")
                   ->delimiter(',');
  r.allow_rank_one = app->add_flag("--allow-rank-one", f.allow_rank_one, "permit k = 1 (calibration runs)");
  app->add_flag("--force", f.force, "recompute even when a verified result exists");
}

int run_table(entdetect::harness::TableKind kind, const Flags& f, const Registered& r) {
  using namespace entdetect::harness;
  const CommandOptions opts = merge(f, r);
  SweepConfig config;
  switch (kind) {
    case TableKind::ScanRank: config = build_scan_rank(opts); break;
    case TableKind::ScanDim: config = build_scan_dim(opts); break;
    case TableKind::Asymmetry: config = build_asymmetry(opts); break;
  }
  for (const auto& [path, problem] : audit_directory(config.output_dir)) {
    std::cerr << path.string() << ": " << problem << "\n";
  }
  const int workers = resolve_workers(config.workers);
  const TableRun run = entdetect::harness::run_table(kind, config, workers, f.force, std::cerr);
  std::cout << run.csv;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Entanglement detection sweeps over Haar-random mixed states"};
  app.set_version_flag("--version", std::string(entdetect::kVersion));
  app.require_subcommand(1);

  Flags f;
  Registered rank_r, dim_r, asym_r, verify_r;

  auto* scan_rank = app.add_subcommand("scan-rank", "one row per rank k for a fixed d1 x d2");
  rank_r.d1 = scan_rank->add_option("--d1", f.d1, "first subsystem dimension");
  rank_r.d2 = scan_rank->add_option("--d2", f.d2, "second subsystem dimension");
  rank_r.k = scan_rank->add_option("--k", f.k, "rank or range a..b (default 2..d1*d2)");
  add_table(scan_rank, f, rank_r);

  auto* scan_dim = app.add_subcommand("scan-dim", "one row per d2 for fixed d1 and k");
  dim_r.d1 = scan_dim->add_option("--d1", f.d1, "first subsystem dimension");
  dim_r.d2 = scan_dim->add_option("--d2", f.d2, "range a..b");
  dim_r.k = scan_dim->add_option("--k", f.k, "fixed rank");
  add_table(scan_dim, f, dim_r);

  auto* asymmetry = app.add_subcommand("asymmetry", "every factorization of d12 at k = 2 and k = d12");
  asym_r.d12 = asymmetry->add_option("--d12", f.d12, "total dimension d1*d2 to factor");
  add_table(asymmetry, f, asym_r);

  int bd1 = 0;
  int bd2 = 0;
  auto* bounds = app.add_subcommand("bounds", "closed-form thresholds and Haar averages");
  bounds->add_option("--d1", bd1, "first subsystem dimension")->required()->check(CLI::Range(1, 1 << 12));
  bounds->add_option("--d2", bd2, "second subsystem dimension")->required()->check(CLI::Range(1, 1 << 12));

  auto* verify = app.add_subcommand("verify", "run the invariant suites");
  add_common(verify, f, verify_r);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    using entdetect::harness::TableKind;
    if (*scan_rank) return run_table(TableKind::ScanRank, f, rank_r);
    if (*scan_dim) return run_table(TableKind::ScanDim, f, dim_r);
    if (*asymmetry) return run_table(TableKind::Asymmetry, f, asym_r);
    if (*bounds) {
      std::cout << entdetect::harness::bounds_report(bd1, bd2);
      return 0;
    }
    if (*verify) {
      const CommandOptions opts = merge(f, verify_r);
      entdetect::harness::VerifyOptions vo;
      vo.samples = opts.samples.value_or(1000);
      vo.seed = opts.seed;
      vo.eps = opts.eps;
      vo.workers = entdetect::harness::resolve_workers(entdetect::harness::parse_workers(opts.workers));
      const auto report = entdetect::harness::run_verify(vo);
      std::cout << report.to_text();
      return report.all_passed() ? 0 : 1;
    }
  } catch (const std::exception& e) {
    std::cerr << "entdetect: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
