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
 * @file    analytics.hpp
 * @brief   Figures of merit over sampled states, and closed-form predictors.
 *
 * The population for every figure of merit is the set of NPT records with
 * LN > log2(1 + 2 eps). Over that population, for each criterion:
 *   F = (#detected) / (#population),
 *   M = mean LN over detected records,
 *   m = min LN over detected records.
 * Quantities with an empty denominator are std::nullopt, never 0.
 */

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "entdetect/criteria.hpp"
#include "entdetect/errors.hpp"

namespace entdetect {

/// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  void merge(const CompensatedSum& other) {
    add(other.sum_);
    add(other.comp_);
  }
  [[nodiscard]] double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

struct CriterionStats {
  std::int64_t n_detected = 0;
  std::optional<double> fraction;         // F
  std::optional<double> fraction_stderr;  // sqrt(F (1 - F) / population)
  std::optional<double> mean_ln;          // M
  std::optional<double> min_ln;           // m
};

struct SweepStats {
  int d1 = 0;
  int d2 = 0;
  int k = 0;
  std::int64_t n_total = 0;
  std::int64_t n_npt = 0;
  std::int64_t n_population = 0;
  std::array<CriterionStats, kCriterionCount> criteria{};

  [[nodiscard]] const CriterionStats& operator[](Criterion c) const { return criteria[index_of(c)]; }
};

/// Associative accumulator behind aggregate(); shards can be merged in any grouping.
class SweepAccumulator {
 public:
  explicit SweepAccumulator(double eps = kDefaultEps) : ln_cut_(ln_threshold(eps)) {}

  void add(const StateRecord& rec) {
    adopt_cell(rec.spec.d1, rec.spec.d2, rec.spec.k);
    ++n_total_;
    const bool npt = rec.detected(Criterion::PT);
    if (npt) ++n_npt_;
    if (!npt || !(rec.ln > ln_cut_)) return;
    ++n_population_;
    for (Criterion c : kAllCriteria) {
      if (!rec.detected(c)) continue;
      Slot& s = slots_[index_of(c)];
      ++s.n_detected;
      s.ln_sum.add(rec.ln);
      s.ln_min = std::min(s.ln_min, rec.ln);
    }
  }

  void merge(const SweepAccumulator& other) {
    if (other.n_total_ == 0) return;
    adopt_cell(other.d1_, other.d2_, other.k_);
    n_total_ += other.n_total_;
    n_npt_ += other.n_npt_;
    n_population_ += other.n_population_;
    for (std::size_t i = 0; i < kCriterionCount; ++i) {
      slots_[i].n_detected += other.slots_[i].n_detected;
      slots_[i].ln_sum.merge(other.slots_[i].ln_sum);
      slots_[i].ln_min = std::min(slots_[i].ln_min, other.slots_[i].ln_min);
    }
  }

  [[nodiscard]] std::int64_t n_total() const { return n_total_; }

  [[nodiscard]] SweepStats finish() const {
    if (n_total_ == 0) throw PreconditionError("aggregate: no records");
    SweepStats out;
    out.d1 = d1_;
    out.d2 = d2_;
    out.k = k_;
    out.n_total = n_total_;
    out.n_npt = n_npt_;
    out.n_population = n_population_;
    for (std::size_t i = 0; i < kCriterionCount; ++i) {
      const Slot& s = slots_[i];
      CriterionStats& cs = out.criteria[i];
      cs.n_detected = s.n_detected;
      if (n_population_ > 0) {
        const double n = static_cast<double>(n_population_);
        const double f = static_cast<double>(s.n_detected) / n;
        cs.fraction = f;
        cs.fraction_stderr = std::sqrt(f * (1.0 - f) / n);
      }
      if (s.n_detected > 0) {
        cs.mean_ln = s.ln_sum.value() / static_cast<double>(s.n_detected);
        cs.min_ln = s.ln_min;
      }
    }
    return out;
  }

 private:
  struct Slot {
    std::int64_t n_detected = 0;
    CompensatedSum ln_sum;
    double ln_min = std::numeric_limits<double>::infinity();
  };

  void adopt_cell(int d1, int d2, int k) {
    if (n_total_ == 0 && d1_ == 0) {
      d1_ = d1;
      d2_ = d2;
      k_ = k;
    } else if (d1 != d1_ || d2 != d2_ || k != k_) {
      throw PreconditionError("aggregate: records from different (d1, d2, k) cells");
    }
  }

  double ln_cut_;
  int d1_ = 0;
  int d2_ = 0;
  int k_ = 0;
  std::int64_t n_total_ = 0;
  std::int64_t n_npt_ = 0;
  std::int64_t n_population_ = 0;
  std::array<Slot, kCriterionCount> slots_{};
};

/// Figures of merit for one (d1, d2, k) cell. Throws on an empty or mixed list.
inline SweepStats aggregate(std::span<const StateRecord> records, double eps = kDefaultEps) {
  if (records.empty()) throw PreconditionError("aggregate: no records");
  SweepAccumulator acc(eps);
  for (const StateRecord& r : records) acc.add(r);
  return acc.finish();
}

struct HierarchyEntry {
  Criterion criterion;
  std::optional<double> fraction;
  bool tied_with_previous = false;
};

/// Criteria by F descending; ties keep enum order and are flagged. Undefined F sorts last.
inline std::vector<HierarchyEntry> hierarchy_order(const SweepStats& stats) {
  std::vector<HierarchyEntry> out;
  for (Criterion c : kAllCriteria) out.push_back({c, stats[c].fraction, false});
  auto key = [](const HierarchyEntry& e) { return e.fraction.value_or(-1.0); };
  std::stable_sort(out.begin(), out.end(),
                   [&](const HierarchyEntry& a, const HierarchyEntry& b) { return key(a) > key(b); });
  for (std::size_t i = 1; i < out.size(); ++i) {
    out[i].tied_with_previous = std::abs(key(out[i]) - key(out[i - 1])) <= 1e-12;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Closed-form predictors. Entropies are in natural log.

struct PageEntropies {
  double s1 = 0.0;
  double s2 = 0.0;
  double s12 = 0.0;
};

namespace detail {
inline void require_dims(int d1, int d2, const char* who) {
  if (d1 < 2 || d2 < 2) throw PreconditionError(std::string(who) + ": d1 and d2 must be at least 2");
}
inline void require_rank(int d1, int d2, int k, const char* who) {
  require_dims(d1, d2, who);
  if (k < 1 || k > d1 * d2) throw PreconditionError(std::string(who) + ": rank outside [1, d1*d2]");
}
}  // namespace detail

/// Haar-average entropies of rho1, rho2 and rho12 for rank-k states on d1 (x) d2.
inline PageEntropies page_entropies(int d1, int d2, int k) {
  detail::require_rank(d1, d2, k, "page_entropies");
  const double a = d1;
  const double b = d2;
  const double r = k;
  return {std::log(a) - a / (2.0 * b * r), std::log(b) - b / (2.0 * a * r),
          std::log(r) - r / (2.0 * a * b)};
}

/// Above this rank the average conditional entropies are non-negative.
inline int entropy_rank_threshold(int d1, int d2) {
  detail::require_dims(d1, d2, "entropy_rank_threshold");
  return std::max(d1, d2);
}

/// k0 = (d1^3 d2 - 1) / (d1 (d2 - d1)); at or above it the realignment sum cannot
/// exceed 1 on average. Requires d1 <= d2; +infinity when d1 == d2.
inline double realignment_rank_bound(int d1, int d2) {
  detail::require_dims(d1, d2, "realignment_rank_bound");
  if (d1 > d2) throw PreconditionError("realignment_rank_bound: requires d1 <= d2");
  if (d1 == d2) return std::numeric_limits<double>::infinity();
  const double a = d1;
  const double b = d2;
  return (a * a * a * b - 1.0) / (a * (b - a));
}

/// Rank at which a random state is guaranteed PPT: d1 d2 (d1 d2 - 1) - 1.
inline std::int64_t ppt_rank_sufficient(int d1, int d2) {
  detail::require_dims(d1, d2, "ppt_rank_sufficient");
  const std::int64_t n = static_cast<std::int64_t>(d1) * d2;
  return n * (n - 1) - 1;
}

/// Haar-average purity (d1 d2 + k) / (d1 d2 k + 1).
inline double average_purity(int d1, int d2, int k) {
  detail::require_rank(d1, d2, k, "average_purity");
  const double n = static_cast<double>(d1) * d2;
  return (n + k) / (n * k + 1.0);
}

struct TheoryPrediction {
  PageEntropies entropies;
  double purity = 0.0;
  int entropy_rank_threshold = 0;
  double realignment_rank_bound = 0.0;
  std::int64_t ppt_rank_sufficient = 0;
};

/// All predictors for one cell; the realignment bound is evaluated with the
/// smaller dimension first.
inline TheoryPrediction predict(int d1, int d2, int k) {
  TheoryPrediction t;
  t.entropies = page_entropies(d1, d2, k);
  t.purity = average_purity(d1, d2, k);
  t.entropy_rank_threshold = entropy_rank_threshold(d1, d2);
  t.realignment_rank_bound = realignment_rank_bound(std::min(d1, d2), std::max(d1, d2));
  t.ppt_rank_sufficient = ppt_rank_sufficient(d1, d2);
  return t;
}

}  // namespace entdetect
