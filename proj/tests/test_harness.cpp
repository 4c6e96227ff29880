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

#include <gtest/gtest.h>
#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

#include "entdetect/harness/commands.hpp"
#include "entdetect/harness/verify.hpp"

namespace {

using namespace entdetect;
using namespace entdetect::harness;
namespace fs = std::filesystem;

class TempDir {
 public:
  TempDir() {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    path_ = fs::temp_directory_path() / ("entdetect_" + std::string(info->name()) + "_" + std::to_string(::getpid()));
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

SweepConfig small_config(const fs::path& out) {
  CommandOptions o;
  o.d1 = 2;
  o.d2 = "3";
  o.k = "2..4";
  o.samples = 300;
  o.out = out.string();
  return build_scan_rank(o);
}

TEST(ParseRange, AcceptsSingleValuesAndRanges) {
  EXPECT_EQ(parse_range("7"), (std::pair{7, 7}));
  EXPECT_EQ(parse_range("2..10"), (std::pair{2, 10}));
  EXPECT_THROW(parse_range("5..2"), ConfigError);
  EXPECT_THROW(parse_range("a..3"), ConfigError);
  EXPECT_THROW(parse_range(".."), ConfigError);
}

TEST(Config, ValidatesRanksAndSamples) {
  SweepConfig c;
  c.grid = {{2, 5, 2, 10}};
  EXPECT_NO_THROW(c.validate());
  c.grid = {{2, 5, 1, 10}};
  EXPECT_THROW(c.validate(), ConfigError);
  c.allow_rank_one = true;
  EXPECT_NO_THROW(c.validate());
  c.grid = {{2, 5, 2, 11}};
  EXPECT_THROW(c.validate(), ConfigError);
  c.grid = {{2, 5, 2, 10}};
  c.samples_per_cell = 99;
  EXPECT_THROW(c.validate(), ConfigError);
  c.samples_per_cell = 100;
  c.eps = 0.0;
  EXPECT_THROW(c.validate(), ConfigError);
}

TEST(Config, CellsFollowGridOrder) {
  SweepConfig c;
  c.grid = {{2, 5, 3, 4}, {3, 3, 2, 2}};
  const auto cells = c.cells();
  ASSERT_EQ(cells.size(), 3u);
  EXPECT_EQ(cells[0].k, 3);
  EXPECT_EQ(cells[1].k, 4);
  EXPECT_EQ(cells[2].d1, 3);
}

TEST(Commands, ScanRankDefaultsToFullRankRange) {
  CommandOptions o;
  o.d1 = 2;
  o.d2 = "5";
  const SweepConfig c = build_scan_rank(o);
  ASSERT_EQ(c.grid.size(), 1u);
  EXPECT_EQ(c.grid[0].k_min, 2);
  EXPECT_EQ(c.grid[0].k_max, 10);
  EXPECT_EQ(c.samples_per_cell, 10000);
  EXPECT_EQ(c.master_seed, 42u);
  EXPECT_EQ(c.eps, 1e-10);
  EXPECT_EQ(results_stem(TableKind::ScanRank, c), "scan_rank_2x5");
  o.k = "2..11";
  EXPECT_THROW(build_scan_rank(o), ConfigError);
}

TEST(Commands, ScanDimBuildsOneCellPerD2) {
  CommandOptions o;
  o.d1 = 3;
  o.d2 = "3..10";
  o.k = "8";
  const SweepConfig c = build_scan_dim(o);
  ASSERT_EQ(c.grid.size(), 8u);
  EXPECT_EQ(c.grid.back().d2, 10);
  EXPECT_EQ(results_stem(TableKind::ScanDim, c), "scan_dim_3x3-10_k8");
  o.k = "5..8";
  EXPECT_THROW(build_scan_dim(o), ConfigError);
}

TEST(Commands, AsymmetryNeedsTwoFactorizations) {
  EXPECT_EQ(factorizations(12), (std::vector<std::pair<int, int>>{{2, 6}, {3, 4}}));
  EXPECT_EQ(factorizations(36).size(), 4u);
  CommandOptions o;
  o.d12 = 12;
  const SweepConfig c = build_asymmetry(o);
  ASSERT_EQ(c.cells().size(), 4u);
  EXPECT_EQ(c.cells()[1].k, 12);
  EXPECT_EQ(results_stem(TableKind::Asymmetry, c), "asymmetry_d12_12");
  o.d12 = 13;
  EXPECT_THROW(build_asymmetry(o), ConfigError);  // prime
  o.d12 = 6;
  EXPECT_THROW(build_asymmetry(o), ConfigError);  // only 2 x 3
}

TEST(ConfigFile, KeysMirrorFlags) {
  CommandOptions o;
  apply_config_file(nlohmann::json::parse(R"({"d1": 2, "d2": 5, "k": "2..4", "samples": 500, "seed": 9,
                                              "eps": 1e-8, "out": "x", "workers": 3,
                                              "criteria": ["pt", "entropy"], "allow_rank_one": true})"),
                    o);
  EXPECT_EQ(o.d1, 2);
  EXPECT_EQ(o.d2, "5");
  EXPECT_EQ(o.k, "2..4");
  EXPECT_EQ(o.samples, 500);
  EXPECT_EQ(o.seed, 9u);
  EXPECT_EQ(o.eps, 1e-8);
  EXPECT_EQ(o.workers, "3");
  EXPECT_TRUE(o.allow_rank_one);
  const SweepConfig c = build_scan_rank(o);
  EXPECT_TRUE(c.selected(Criterion::Entropy));
  EXPECT_FALSE(c.selected(Criterion::Realignment));
  EXPECT_EQ(c.workers, 3);
  EXPECT_THROW(apply_config_file(nlohmann::json::parse(R"({"sample": 5})"), o), ConfigError);
  EXPECT_THROW(apply_config_file(nlohmann::json::parse(R"({"d1": "two"})"), o), ConfigError);
  EXPECT_THROW(apply_config_file(nlohmann::json::parse("[1]"), o), ConfigError);
}

TEST(Workers, EnvironmentOverridesEverything) {
  ::unsetenv("ENTDETECT_WORKERS");
  EXPECT_EQ(resolve_workers(3), 3);
  EXPECT_GE(resolve_workers(0), 1);
  ::setenv("ENTDETECT_WORKERS", "5", 1);
  EXPECT_EQ(resolve_workers(3), 5);
  ::setenv("ENTDETECT_WORKERS", "zero", 1);
  EXPECT_THROW(resolve_workers(3), ConfigError);
  ::unsetenv("ENTDETECT_WORKERS");
  EXPECT_EQ(parse_workers("auto"), 0);
  EXPECT_EQ(parse_workers("4"), 4);
  EXPECT_THROW(parse_workers("0"), ConfigError);
}

TEST(ParallelFor, RunsEveryTaskOnceAndRethrows) {
  std::vector<std::atomic<int>> hits(1000);
  parallel_for(hits.size(), 4, [&](std::size_t i) { hits[i]++; });
  for (const auto& h : hits) EXPECT_EQ(h.load(), 1);
  EXPECT_THROW(parallel_for(100, 4,
                            [](std::size_t i) {
                              if (i == 37) throw std::runtime_error("boom");
                            }),
               std::runtime_error);
}

TEST(Csv, HeaderAndNullConvention) {
  const std::string h = csv_header(false);
  EXPECT_EQ(h.substr(0, 38), "d1,d2,k,n,n_npt,F_pt,F_stderr_pt,M_pt,");
  EXPECT_NE(h.find(",m_realignment"), std::string::npos);
  EXPECT_EQ(std::count(h.begin(), h.end(), ','), 24);
  EXPECT_EQ(csv_header(true).substr(0, 4), "d12,");

  SweepStats s;
  s.d1 = 2;
  s.d2 = 5;
  s.k = 9;
  s.n_total = 100;
  s.n_npt = 100;
  s.n_population = 100;
  s.criteria[index_of(Criterion::PT)] = {100, 1.0, 0.0, 0.1234567, 0.01};
  s.criteria[index_of(Criterion::Entropy)] = {0, 0.0, 0.0, std::nullopt, std::nullopt};
  SweepConfig c;
  c.criteria = {Criterion::PT, Criterion::Entropy};
  const std::string row = csv_row(s, c, false);
  EXPECT_EQ(row, "2,5,9,100,100,1,0,0.123457,0.01,,,,,,,,,0,0,,,,,,");
  EXPECT_EQ(format_number(0.0001), "0.0001");
  EXPECT_EQ(format_number(1.0 / 3.0), "0.333333");
}

TEST(Sweep, OutputIsIndependentOfWorkerCount) {
  SweepConfig c = small_config("unused");
  const std::string one = format_csv(run_sweep(c, 1), c, false);
  const std::string four = format_csv(run_sweep(c, 4), c, false);
  EXPECT_EQ(one, four);
  c.master_seed = 43;
  EXPECT_NE(format_csv(run_sweep(c, 1), c, false), one);
}

TEST(Sweep, BlocksMatchPerRecordAggregation) {
  SweepConfig c = small_config("unused");
  c.grid = {{2, 3, 3, 3}};
  const auto stats = run_sweep(c, 2);
  std::vector<StateRecord> recs;
  for (std::uint64_t t = 0; t < 300; ++t) recs.push_back(sample_and_evaluate({2, 3, 3, c.master_seed, t}));
  const SweepStats direct = aggregate(recs);
  ASSERT_EQ(stats.size(), 1u);
  EXPECT_EQ(csv_row(stats[0], c, false), csv_row(direct, c, false));
}

// d12 = 12 at k = 2. For 2 (x) 6 the LN means compare directly; for 3 (x) 4
// the reference mean is on the LN / log2(3) scale.
TEST(Sweep, AsymmetryRankTwoReferenceValues) {
  CommandOptions o;
  o.d12 = 12;
  o.samples = 2000;
  SweepConfig c = build_asymmetry(o);
  c.grid = {{2, 6, 2, 2}, {3, 4, 2, 2}};
  const auto stats = run_sweep(c, 1);
  ASSERT_EQ(stats.size(), 2u);
  EXPECT_NEAR(*stats[0][Criterion::PT].mean_ln, 0.803, 0.02);
  EXPECT_NEAR(*stats[1][Criterion::PT].mean_ln / std::log2(3.0), 0.625, 0.02);
  for (const SweepStats& s : stats)
    for (Criterion crit : kAllCriteria) {
      EXPECT_EQ(s[crit].fraction, 1.0);
      EXPECT_EQ(s[crit].mean_ln, s[Criterion::PT].mean_ln);
    }
}

TEST(Sha256, KnownVector) {
  EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(Manifest, WriteResumeAndCorruption) {
  TempDir dir;
  const SweepConfig c = small_config(dir.path());
  std::ostringstream log;
  const TableRun first = run_table(TableKind::ScanRank, c, 1, false, log);
  EXPECT_FALSE(first.reused);
  const fs::path csv = dir.path() / "scan_rank_2x3.csv";
  const fs::path manifest = dir.path() / "scan_rank_2x3.manifest.json";
  ASSERT_TRUE(fs::exists(csv));
  ASSERT_TRUE(fs::exists(manifest));
  EXPECT_FALSE(fs::exists(dir.path() / "scan_rank_2x3.csv.tmp"));

  const auto m = nlohmann::json::parse(read_file(manifest));
  for (const char* key : {"config", "version", "started_at", "finished_at", "cells", "checksum"})
    EXPECT_TRUE(m.contains(key)) << key;
  EXPECT_EQ(m["checksum"], "sha256:" + sha256_hex(read_file(csv)));
  ASSERT_EQ(m["cells"].size(), 3u);
  EXPECT_EQ(m["cells"][0]["n"], 300);
  EXPECT_EQ(inspect_output(csv, c), OutputState::Complete);

  // Re-running is a no-op, and the worker count is not part of the identity.
  SweepConfig more_workers = c;
  more_workers.workers = 8;
  const auto before = fs::last_write_time(csv);
  const TableRun again = run_table(TableKind::ScanRank, more_workers, 8, false, log);
  EXPECT_TRUE(again.reused);
  EXPECT_EQ(again.csv, first.csv);
  EXPECT_EQ(fs::last_write_time(csv), before);

  // A different seed invalidates the stored result.
  SweepConfig reseeded = c;
  reseeded.master_seed = 7;
  EXPECT_EQ(inspect_output(csv, reseeded), OutputState::ConfigChanged);

  // Tampering is caught by the checksum.
  { std::ofstream(csv, std::ios::app) << "tampered\n"; }
  EXPECT_EQ(inspect_output(csv, c), OutputState::ChecksumMismatch);
  EXPECT_TRUE(is_corrupt(OutputState::ChecksumMismatch));
  const TableRun repaired = run_table(TableKind::ScanRank, c, 1, false, log);
  EXPECT_FALSE(repaired.reused);
  EXPECT_EQ(repaired.csv, first.csv);
  EXPECT_NE(log.str().find("checksum does not match"), std::string::npos);

  // A results file without a manifest is an orphan.
  fs::remove(manifest);
  EXPECT_EQ(inspect_output(csv, c), OutputState::Orphan);
  const auto problems = audit_directory(dir.path());
  ASSERT_EQ(problems.size(), 1u);
  EXPECT_NE(problems[0].second.find("corrupt"), std::string::npos);
}

TEST(Manifest, ManifestWithoutResultsIsCorrupt) {
  TempDir dir;
  const SweepConfig c = small_config(dir.path());
  std::ostringstream log;
  run_table(TableKind::ScanRank, c, 1, false, log);
  fs::remove(dir.path() / "scan_rank_2x3.csv");
  EXPECT_EQ(inspect_output(dir.path() / "scan_rank_2x3.csv", c), OutputState::ManifestOnly);
  EXPECT_EQ(audit_directory(dir.path()).size(), 1u);
}

TEST(Bounds, ReportListsThresholds) {
  const std::string r = bounds_report(2, 5);
  EXPECT_NE(r.find("entropy_rank_threshold 5"), std::string::npos);
  EXPECT_NE(r.find("realignment_rank_bound 6.5"), std::string::npos);
  EXPECT_NE(r.find("ppt_rank_sufficient 89"), std::string::npos);
  EXPECT_NE(r.find("\n10,"), std::string::npos);
  EXPECT_NE(bounds_report(3, 3).find("vacuous (equal dimensions)"), std::string::npos);
  EXPECT_NE(bounds_report(2, 2).find("ppt_rank_sufficient 11"), std::string::npos);
}

TEST(Verify, SmallRunPassesAndReportsMargins) {
  VerifyOptions o;
  o.samples = 40;
  o.workers = 2;
  const VerifyReport r = run_verify(o);
  EXPECT_TRUE(r.all_passed()) << r.to_text();
  const InvariantResult* prop3 = r.find("prop3_reduction_pt_spectra");
  ASSERT_NE(prop3, nullptr);
  EXPECT_EQ(prop3->checked, 9 * 40);
  EXPECT_LT(prop3->worst, 1e-9);
  EXPECT_NE(r.to_text().find("margin="), std::string::npos);
}

}  // namespace
