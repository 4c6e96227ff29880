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

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "entdetect/entdetect.hpp"
#include "entdetect/harness/csv.hpp"

namespace {

using namespace entdetect;

StateRecord make_record(double ln, std::array<bool, kCriterionCount> det, int k = 3) {
  StateRecord r;
  r.spec = {2, 5, k, 0, 0};
  r.ln = ln;
  for (std::size_t i = 0; i < kCriterionCount; ++i) r.verdicts[i] = {kAllCriteria[i], det[i], 0.0};
  return r;
}

std::vector<StateRecord> synthetic(int n, std::uint64_t seed) {
  std::mt19937_64 eng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<StateRecord> out;
  for (int i = 0; i < n; ++i) {
    const bool pt = u(eng) < 0.9;
    const double ln = pt ? u(eng) : 0.0;
    out.push_back(make_record(ln, {pt, pt && u(eng) < 0.8, pt && u(eng) < 0.5, pt && u(eng) < 0.1, pt && u(eng) < 0.3}));
  }
  return out;
}

// Direct recomputation over the records, without the accumulator.
struct Brute {
  std::int64_t pop = 0;
  std::array<std::int64_t, kCriterionCount> n{};
  std::array<double, kCriterionCount> sum{}, min{};
};

Brute rescan(const std::vector<StateRecord>& recs, double eps) {
  Brute b;
  b.min.fill(std::numeric_limits<double>::infinity());
  for (const auto& r : recs) {
    if (!r.detected(Criterion::PT) || !(r.ln > ln_threshold(eps))) continue;
    ++b.pop;
    for (std::size_t i = 0; i < kCriterionCount; ++i) {
      if (!r.verdicts[i].detected) continue;
      ++b.n[i];
      b.sum[i] += r.ln;
      b.min[i] = std::min(b.min[i], r.ln);
    }
  }
  return b;
}

TEST(CompensatedSum, RecoversCancelledTerms) {
  CompensatedSum s;
  s.add(1e16);
  s.add(1.0);
  s.add(-1e16);
  EXPECT_EQ(s.value(), 1.0);
  CompensatedSum t;
  for (int i = 0; i < 1000000; ++i) t.add(0.1);
  EXPECT_NEAR(t.value(), 100000.0, 1e-9);
}

TEST(Aggregate, MatchesBruteForceRescan) {
  const auto recs = synthetic(5000, 1);
  const SweepStats s = aggregate(recs);
  const Brute b = rescan(recs, kDefaultEps);
  EXPECT_EQ(s.n_total, 5000);
  EXPECT_EQ(s.n_population, b.pop);
  for (std::size_t i = 0; i < kCriterionCount; ++i) {
    const CriterionStats& c = s.criteria[i];
    EXPECT_EQ(c.n_detected, b.n[i]);
    ASSERT_TRUE(c.fraction);
    const double f = double(b.n[i]) / b.pop;
    EXPECT_DOUBLE_EQ(*c.fraction, f);
    EXPECT_DOUBLE_EQ(*c.fraction_stderr, std::sqrt(f * (1 - f) / b.pop));
    EXPECT_NEAR(*c.mean_ln, b.sum[i] / b.n[i], 1e-12);
    EXPECT_EQ(*c.min_ln, b.min[i]);
  }
  EXPECT_EQ(*s[Criterion::PT].fraction, 1.0);
}

TEST(Aggregate, PopulationExcludesPptAndTinyNegativity) {
  std::vector<StateRecord> recs = {
      make_record(0.5, {true, true, true, true, true}),
      make_record(0.0, {false, false, false, false, false}),        // PPT
      make_record(ln_threshold(1e-10) / 2, {true, true, false, false, false}),  // LN below eps_ln
      make_record(0.2, {true, false, true, false, false}),
  };
  const SweepStats s = aggregate(recs);
  EXPECT_EQ(s.n_total, 4);
  EXPECT_EQ(s.n_npt, 3);
  EXPECT_EQ(s.n_population, 2);
  EXPECT_EQ(*s[Criterion::Reduction].fraction, 0.5);
  EXPECT_EQ(*s[Criterion::Majorization].mean_ln, 0.35);
  EXPECT_EQ(*s[Criterion::Majorization].min_ln, 0.2);
}

TEST(Aggregate, UndefinedFieldsAreNull) {
  std::vector<StateRecord> recs = {make_record(0.4, {true, true, false, false, false}),
                                   make_record(0.3, {true, true, false, false, false})};
  const SweepStats s = aggregate(recs);
  EXPECT_EQ(*s[Criterion::Entropy].fraction, 0.0);
  EXPECT_FALSE(s[Criterion::Entropy].mean_ln.has_value());
  EXPECT_FALSE(s[Criterion::Entropy].min_ln.has_value());

  std::vector<StateRecord> ppt = {make_record(0.0, {false, false, false, false, false})};
  const SweepStats none = aggregate(ppt);
  EXPECT_EQ(none.n_population, 0);
  for (Criterion c : kAllCriteria) {
    EXPECT_FALSE(none[c].fraction.has_value());
    EXPECT_FALSE(none[c].fraction_stderr.has_value());
    EXPECT_FALSE(none[c].mean_ln.has_value());
  }
}

TEST(Aggregate, AllDetectedGivesUnitFraction) {
  std::vector<StateRecord> recs(10, make_record(0.7, {true, true, true, true, true}));
  const SweepStats s = aggregate(recs);
  for (Criterion c : kAllCriteria) {
    EXPECT_EQ(*s[c].fraction, 1.0);
    EXPECT_EQ(*s[c].fraction_stderr, 0.0);
  }
}

TEST(Aggregate, RejectsEmptyAndMixedCells) {
  EXPECT_THROW(aggregate(std::vector<StateRecord>{}), PreconditionError);
  std::vector<StateRecord> mixed = {make_record(0.1, {true, true, true, true, true}, 2),
                                    make_record(0.1, {true, true, true, true, true}, 3)};
  EXPECT_THROW(aggregate(mixed), PreconditionError);
}

// Emitted digits must not depend on record order or shard grouping.
TEST(Aggregate, OrderAndShardingDoNotChangeOutput) {
  auto recs = synthetic(3000, 2);
  const SweepStats base = aggregate(recs);
  std::mt19937_64 eng(3);
  for (int rep = 0; rep < 5; ++rep) {
    std::shuffle(recs.begin(), recs.end(), eng);
    SweepAccumulator a, b, c;
    for (std::size_t i = 0; i < recs.size(); ++i) (i % 3 == 0 ? a : i % 3 == 1 ? b : c).add(recs[i]);
    SweepAccumulator merged;
    merged.merge(c);
    merged.merge(a);
    merged.merge(b);
    const SweepStats s = merged.finish();
    for (Criterion x : kAllCriteria) {
      EXPECT_EQ(s[x].n_detected, base[x].n_detected);
      EXPECT_EQ(*s[x].fraction, *base[x].fraction);
      EXPECT_EQ(*s[x].min_ln, *base[x].min_ln);
      EXPECT_EQ(harness::format_number(*s[x].mean_ln), harness::format_number(*base[x].mean_ln));
    }
  }
}

TEST(Hierarchy, SortsDescendingWithTiesAndNullsLast) {
  SweepStats s;
  s.criteria[index_of(Criterion::PT)].fraction = 1.0;
  s.criteria[index_of(Criterion::Reduction)].fraction = 1.0;
  s.criteria[index_of(Criterion::Majorization)].fraction = 0.51;
  s.criteria[index_of(Criterion::Entropy)].fraction = std::nullopt;
  s.criteria[index_of(Criterion::Realignment)].fraction = 0.145;
  const auto order = hierarchy_order(s);
  ASSERT_EQ(order.size(), 5u);
  EXPECT_EQ(order[0].criterion, Criterion::PT);
  EXPECT_EQ(order[1].criterion, Criterion::Reduction);
  EXPECT_TRUE(order[1].tied_with_previous);
  EXPECT_EQ(order[2].criterion, Criterion::Majorization);
  EXPECT_FALSE(order[2].tied_with_previous);
  EXPECT_EQ(order[3].criterion, Criterion::Realignment);
  EXPECT_EQ(order[4].criterion, Criterion::Entropy);
}

TEST(Theory, PageEntropies) {
  const PageEntropies e = page_entropies(2, 5, 10);
  EXPECT_NEAR(e.s12, std::log(10.0) - 0.5, 1e-14);
  EXPECT_NEAR(e.s1, std::log(2.0) - 0.02, 1e-14);
  EXPECT_NEAR(e.s2, std::log(5.0) - 5.0 / 40, 1e-14);
  for (int k = 1; k <= 9; ++k) {
    const PageEntropies s = page_entropies(3, 3, k);
    EXPECT_DOUBLE_EQ(s.s1, s.s2);
  }
  EXPECT_THROW(page_entropies(2, 5, 11), PreconditionError);
}

// Entropy-threshold facts: S12 - S2 vanishes at k = d2 and grows after it;
// S2 - S1 is non-decreasing in k for d2 >= d1 and non-negative from k = d2 on.
TEST(Theory, PageEntropyPropertiesOnGrid) {
  for (int d1 = 2; d1 <= 6; ++d1)
    for (int d2 = d1; d2 <= 8; ++d2) {
      const PageEntropies at = page_entropies(d1, d2, d2);
      EXPECT_NEAR(at.s12 - at.s2, 0.0, 1e-12);
      for (int k = d2; k < d1 * d2; ++k) {
        const PageEntropies a = page_entropies(d1, d2, k), b = page_entropies(d1, d2, k + 1);
        EXPECT_GT(b.s12 - b.s2, a.s12 - a.s2);
      }
      for (int k = 1; k < d1 * d2; ++k) {
        const PageEntropies a = page_entropies(d1, d2, k), b = page_entropies(d1, d2, k + 1);
        EXPECT_GE(b.s2 - b.s1, a.s2 - a.s1 - 1e-12);
        if (k >= d2) {
          EXPECT_GE(a.s2 - a.s1, -1e-12);
        }
      }
    }
}

TEST(Theory, RankThresholds) {
  EXPECT_EQ(entropy_rank_threshold(2, 5), 5);
  EXPECT_EQ(entropy_rank_threshold(3, 3), 3);
  EXPECT_EQ(entropy_rank_threshold(4, 9), 9);
  EXPECT_EQ(ppt_rank_sufficient(2, 2), 11);
  EXPECT_EQ(ppt_rank_sufficient(2, 5), 89);
  for (int d1 = 2; d1 <= 5; ++d1)
    for (int d2 = 2; d2 <= 5; ++d2) EXPECT_GT(ppt_rank_sufficient(d1, d2), d1 * d2);
}

// k0 solves d1^2 * purity(k0) = 1 with purity(k) = (n + k)/(n k + 1).
TEST(Theory, RealignmentBoundSolvesPurityEquation) {
  EXPECT_DOUBLE_EQ(realignment_rank_bound(2, 5), 6.5);
  EXPECT_NEAR(realignment_rank_bound(3, 4), 107.0 / 3.0, 1e-12);
  EXPECT_TRUE(std::isinf(realignment_rank_bound(3, 3)));
  EXPECT_THROW(realignment_rank_bound(4, 3), PreconditionError);
  for (auto [d1, d2] : {std::pair{2, 3}, {2, 5}, {3, 4}, {3, 7}, {4, 9}}) {
    const double n = d1 * d2;
    // Bisection on f(k) = d1^2 (n + k)/(n k + 1) - 1, decreasing in k.
    double lo = 1, hi = 1e6;
    for (int i = 0; i < 200; ++i) {
      const double mid = 0.5 * (lo + hi);
      (d1 * d1 * (n + mid) / (n * mid + 1) > 1 ? lo : hi) = mid;
    }
    EXPECT_NEAR(realignment_rank_bound(d1, d2), 0.5 * (lo + hi), 1e-9 * hi) << d1 << "x" << d2;
  }
}

TEST(Theory, AveragePurity) {
  EXPECT_DOUBLE_EQ(average_purity(2, 6, 2), 0.56);
  EXPECT_DOUBLE_EQ(average_purity(2, 5, 4), 14.0 / 41.0);
  for (int k = 1; k <= 12; ++k) {
    const double p = average_purity(3, 4, k);
    EXPECT_GT(p, 0.0);
    EXPECT_LE(p, 1.0);
  }
  EXPECT_DOUBLE_EQ(average_purity(3, 4, 1), 1.0);
}

TEST(Theory, PredictSwapsDimsForRealignment) {
  const TheoryPrediction a = predict(5, 2, 4);
  const TheoryPrediction b = predict(2, 5, 4);
  EXPECT_DOUBLE_EQ(a.realignment_rank_bound, 6.5);
  EXPECT_DOUBLE_EQ(a.realignment_rank_bound, b.realignment_rank_bound);
  EXPECT_DOUBLE_EQ(a.purity, 14.0 / 41.0);
}

}  // namespace
