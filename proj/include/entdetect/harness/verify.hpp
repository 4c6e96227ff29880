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
 * @file    verify.hpp
 * @brief   Executable invariant suites over random and reference states.
 *
 * Each invariant reports how many states were checked, how many violated it,
 * and the worst measured value next to its limit. Implications are counted
 * as violations only; tolerance checks also carry the worst deviation.
 */

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "entdetect/criteria.hpp"
#include "entdetect/harness/csv.hpp"
#include "entdetect/harness/parallel.hpp"
#include "entdetect/sampling.hpp"
#include "entdetect/states.hpp"

namespace entdetect::harness {

struct VerifyOptions {
  std::int64_t samples = 1000;
  std::uint64_t seed = 42;
  double eps = kDefaultEps;
  int workers = 1;
  /// Every n-th sample also gets the (costlier) local-unitary check.
  int unitary_stride = 10;
};

struct InvariantResult {
  std::string name;
  std::int64_t checked = 0;
  std::int64_t violations = 0;
  double worst = -std::numeric_limits<double>::infinity();  // largest measured value (tolerance checks)
  double limit = 0.0;
  bool tolerance_check = false;

  [[nodiscard]] bool passed() const { return violations == 0 && checked > 0; }

  void record_bool(bool ok) {
    ++checked;
    if (!ok) ++violations;
  }
  void record_deviation(double deviation) {
    ++checked;
    worst = std::max(worst, deviation);
    if (!(deviation <= limit)) ++violations;
  }
  void merge(const InvariantResult& o) {
    checked += o.checked;
    violations += o.violations;
    worst = std::max(worst, o.worst);
  }
};

struct VerifyReport {
  std::vector<InvariantResult> results;

  [[nodiscard]] bool all_passed() const {
    return std::all_of(results.begin(), results.end(), [](const InvariantResult& r) { return r.passed(); });
  }

  [[nodiscard]] const InvariantResult* find(const std::string& name) const {
    for (const auto& r : results)
      if (r.name == name) return &r;
    return nullptr;
  }

  [[nodiscard]] std::string to_text() const {
    std::ostringstream os;
    for (const auto& r : results) {
      os << (r.passed() ? "PASS " : "FAIL ") << r.name << "  checked=" << r.checked
         << " violations=" << r.violations;
      if (r.tolerance_check) {
        os << " worst=" << format_number(r.worst) << " limit=" << format_number(r.limit)
           << " margin=" << format_number(r.limit - r.worst);
      }
      os << "\n";
    }
    return os.str();
  }
};

namespace detail {

enum Slot : std::size_t {
  kProp3Agreement,
  kProp3Spectra,
  kEntropyImpliesMajorization,
  kReductionImpliesPt,
  kLnPtConsistency,
  kRealignmentPurityBound,
  kPtInvolution,
  kPtTransposeSpectra,
  kRealignFrobenius,
  kMarginalNormalization,
  kRankCeiling,
  kLocalUnitaryInvariance,
  kSlotCount
};

inline std::array<InvariantResult, kSlotCount> empty_tally() {
  std::array<InvariantResult, kSlotCount> t;
  auto tol = [&](Slot s, const char* name, double limit) {
    t[s].name = name;
    t[s].limit = limit;
    t[s].tolerance_check = true;
  };
  t[kProp3Agreement].name = "prop3_reduction_pt_agreement";
  tol(kProp3Spectra, "prop3_reduction_pt_spectra", 1e-9);
  t[kEntropyImpliesMajorization].name = "entropy_implies_majorization";
  t[kReductionImpliesPt].name = "reduction_implies_pt";
  t[kLnPtConsistency].name = "ln_pt_consistency";
  tol(kRealignmentPurityBound, "realignment_purity_bound", 1e-9);
  tol(kPtInvolution, "pt_involution", 1e-14);
  tol(kPtTransposeSpectra, "pt_transpose_spectra", 1e-10);
  tol(kRealignFrobenius, "realign_frobenius", 1e-12);
  tol(kMarginalNormalization, "marginal_spectrum_sum", 1e-9);
  t[kRankCeiling].name = "rank_ceiling";
  tol(kLocalUnitaryInvariance, "local_unitary_invariance", 1e-9);
  return t;
}

inline double max_sorted_diff(const Spectrum& a, const Spectrum& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.count(); ++i) d = std::max(d, std::abs(a.eigenvalues[i] - b.eigenvalues[i]));
  return d;
}

inline void check_qubit_qudit(const DensityMatrix& rho, const StateRecord& rec,
                              std::array<InvariantResult, kSlotCount>& t) {
  t[kProp3Agreement].record_bool(rec.detected(Criterion::Reduction) == rec.detected(Criterion::PT));
  const Spectrum reduction = hermitian_spectrum(reduction_operator(rho, Subsystem::Second));
  const Spectrum pt = hermitian_spectrum(partial_transpose(rho, Subsystem::First));
  t[kProp3Spectra].record_deviation(max_sorted_diff(reduction, pt));
}

inline void check_general(const DensityMatrix& rho, const StateRecord& rec, const SampleSpec& spec, double eps,
                          bool with_unitary, std::array<InvariantResult, kSlotCount>& t) {
  const bool e = rec.detected(Criterion::Entropy);
  const bool m = rec.detected(Criterion::Majorization);
  t[kEntropyImpliesMajorization].record_bool(!e || m);
  t[kReductionImpliesPt].record_bool(!rec.detected(Criterion::Reduction) || rec.detected(Criterion::PT));
  t[kLnPtConsistency].record_bool((rec.ln > ln_threshold(eps)) == rec.detected(Criterion::PT));

  const ComplexMatrix realigned = realign(rho);
  const double dmin = std::min(rho.d1(), rho.d2());
  t[kRealignmentPurityBound].record_deviation(trace_norm(realigned) - dmin * std::sqrt(purity(rho)));
  t[kRealignFrobenius].record_deviation(std::abs(frobenius_norm(realigned) - frobenius_norm(rho.matrix())));

  const ComplexMatrix pt1 = partial_transpose(rho, Subsystem::First);
  const ComplexMatrix back = partial_transpose(pt1, rho.dims(), Subsystem::First);
  t[kPtInvolution].record_deviation((back - rho.matrix()).cwiseAbs().maxCoeff());
  t[kPtTransposeSpectra].record_deviation(
      max_sorted_diff(hermitian_spectrum(pt1), hermitian_spectrum(partial_transpose(rho, Subsystem::Second))));

  const double s1 = partial_trace(rho, Subsystem::Second).spectrum().sum();
  const double s2 = partial_trace(rho, Subsystem::First).spectrum().sum();
  t[kMarginalNormalization].record_deviation(std::max(std::abs(s1 - 1.0), std::abs(s2 - 1.0)));
  t[kRankCeiling].record_bool(numerical_rank(rho.spectrum()) <= spec.k);

  if (with_unitary) {
    RngStream rng(spec.master_seed, spec.trial_index, 7);
    const ComplexMatrix u1 = random_unitary(rho.d1(), rng);
    const ComplexMatrix u2 = random_unitary(rho.d2(), rng);
    const StateRecord rotated = evaluate_state(apply_local_unitary(rho, u1, u2), spec, eps);
    double dev = std::abs(rotated.ln - rec.ln);
    for (Criterion c : kAllCriteria) dev = std::max(dev, std::abs(rotated[c].witness - rec[c].witness));
    t[kLocalUnitaryInvariance].record_deviation(dev);
  }
}

struct VerifyCell {
  int d1;
  int d2;
  int k;
  bool qubit_qudit_suite;
};

}  // namespace detail

/// Cells of the default verification run.
inline std::vector<detail::VerifyCell> default_verify_cells() {
  std::vector<detail::VerifyCell> cells;
  for (int d2 : {3, 4, 6})
    for (int k : {2, 4, 2 * d2}) cells.push_back({2, d2, k, true});
  const std::array<std::pair<int, int>, 4> dims{{{2, 4}, {2, 5}, {3, 3}, {3, 5}}};
  for (const auto& [d1, d2] : dims) {
    const int n = d1 * d2;
    for (int k : {2, (n + 1) / 2, n}) cells.push_back({d1, d2, k, false});
  }
  return cells;
}

inline InvariantResult check_reference_states(double eps) {
  InvariantResult r;
  r.name = "reference_states";
  const StateRecord bell = evaluate_state(states::bell(), {2, 2, 1, 0, 0}, eps);
  bool ok = std::abs(bell.ln - 1.0) <= 1e-9 && std::abs(bell[Criterion::PT].witness + 0.5) <= 1e-9 &&
            std::abs(bell[Criterion::Realignment].witness - 1.0) <= 1e-9;
  for (Criterion c : kAllCriteria) ok = ok && bell.detected(c);
  r.record_bool(ok);
  for (const DensityMatrix& rho : {states::maximally_mixed({3, 4}), states::product_basis({2, 3}, 1, 2)}) {
    const StateRecord rec = evaluate_state(rho, {rho.d1(), rho.d2(), 1, 0, 0}, eps);
    bool none = rec.ln == 0.0;
    for (Criterion c : kAllCriteria) none = none && !rec.detected(c);
    r.record_bool(none);
  }
  const StateRecord werner = evaluate_state(states::werner(0.5), {2, 2, 1, 0, 0}, eps);
  r.record_bool(std::abs(werner[Criterion::PT].witness + 0.125) <= 1e-9 &&
                std::abs(werner.ln - std::log2(1.25)) <= 1e-9);
  return r;
}

inline VerifyReport run_verify(const VerifyOptions& opt, const std::vector<detail::VerifyCell>& cells) {
  if (opt.samples < 1) throw ConfigError("verify: samples must be positive");
  using Tally = std::array<InvariantResult, detail::kSlotCount>;
  const std::int64_t n = opt.samples;
  const std::int64_t blocks = (n + 255) / 256;
  const std::size_t n_tasks = cells.size() * static_cast<std::size_t>(blocks);
  std::vector<Tally> partial(n_tasks, detail::empty_tally());

  parallel_for(n_tasks, opt.workers, [&](std::size_t t) {
    const std::size_t c = t / static_cast<std::size_t>(blocks);
    const std::int64_t b = static_cast<std::int64_t>(t % static_cast<std::size_t>(blocks));
    const detail::VerifyCell& cell = cells[c];
    for (std::int64_t i = b * 256; i < std::min(n, (b + 1) * 256); ++i) {
      const SampleSpec spec{cell.d1, cell.d2, cell.k, opt.seed, static_cast<std::uint64_t>(c) * n + i};
      const DensityMatrix rho = sample_reduced_state(spec);
      const StateRecord rec = evaluate_state(rho, spec, opt.eps);
      if (cell.qubit_qudit_suite) {
        detail::check_qubit_qudit(rho, rec, partial[t]);
      } else {
        const bool unitary = opt.unitary_stride > 0 && i % opt.unitary_stride == 0;
        detail::check_general(rho, rec, spec, opt.eps, unitary, partial[t]);
      }
    }
  });

  Tally total = detail::empty_tally();
  for (const Tally& p : partial)
    for (std::size_t s = 0; s < detail::kSlotCount; ++s) total[s].merge(p[s]);

  VerifyReport report;
  report.results.push_back(check_reference_states(opt.eps));
  for (auto& r : total) report.results.push_back(std::move(r));
  return report;
}

inline VerifyReport run_verify(const VerifyOptions& opt) { return run_verify(opt, default_verify_cells()); }

}  // namespace entdetect::harness
