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
 * @file    criteria.hpp
 * @brief   Entanglement detection criteria and logarithmic negativity.
 *
 * Every detector returns a Verdict carrying the continuous quantity that
 * decided it. All thresholds are strict: a witness sitting exactly on the
 * separable boundary is reported as not detected.
 *
 *  criterion     witness                                         detected iff
 *  -----------   ---------------------------------------------   ------------
 *  PT            lambda_min(rho^{T1})                            w < -eps
 *  Reduction     min(lambda_min(rho1 x I - rho),
 *                    lambda_min(I x rho2 - rho))                 w < -eps
 *  Majorization  max_l max_marginal (prefix_l(rho) - prefix_l(marginal))
 *                                                                w > eps
 *  Entropy       min(S12 - S1, S12 - S2), natural log            w < -eps
 *  Realignment   ||realign(rho)||_1 - 1                          w > eps
 */

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string_view>

#include "entdetect/qmat.hpp"
#include "entdetect/sampling.hpp"

namespace entdetect {

enum class Criterion { PT = 0, Reduction, Majorization, Entropy, Realignment };

inline constexpr std::size_t kCriterionCount = 5;
inline constexpr std::array<Criterion, kCriterionCount> kAllCriteria = {
    Criterion::PT, Criterion::Reduction, Criterion::Majorization, Criterion::Entropy,
    Criterion::Realignment};

constexpr std::size_t index_of(Criterion c) { return static_cast<std::size_t>(c); }

constexpr std::string_view criterion_name(Criterion c) {
  switch (c) {
    case Criterion::PT: return "pt";
    case Criterion::Reduction: return "reduction";
    case Criterion::Majorization: return "majorization";
    case Criterion::Entropy: return "entropy";
    case Criterion::Realignment: return "realignment";
  }
  return "?";
}

inline std::optional<Criterion> parse_criterion(std::string_view name) {
  for (Criterion c : kAllCriteria)
    if (criterion_name(c) == name) return c;
  return std::nullopt;
}

struct Verdict {
  Criterion criterion = Criterion::PT;
  bool detected = false;
  double witness = 0.0;
};

/// LN threshold matching a PT eigenvalue threshold eps: log2(1 + 2 eps).
inline double ln_threshold(double eps) { return std::log2(1.0 + 2.0 * eps); }

inline Verdict detect_pt(const DensityMatrix& rho, double eps = kDefaultEps) {
  const double w = hermitian_spectrum(partial_transpose(rho, Subsystem::First)).min();
  return {Criterion::PT, w < -eps, w};
}

/// rho1 (x) I2 - rho for Subsystem::First, I1 (x) rho2 - rho for Subsystem::Second.
inline ComplexMatrix reduction_operator(const DensityMatrix& rho, Subsystem kept) {
  const int d1 = rho.d1();
  const int d2 = rho.d2();
  if (kept == Subsystem::First) {
    const DensityMatrix rho1 = partial_trace(rho, Subsystem::Second);
    return kron(rho1.matrix(), ComplexMatrix::Identity(d2, d2)) - rho.matrix();
  }
  const DensityMatrix rho2 = partial_trace(rho, Subsystem::First);
  return kron(ComplexMatrix::Identity(d1, d1), rho2.matrix()) - rho.matrix();
}

namespace detail {

// The marginals are computed once per state and shared by the criteria that need them.
struct Marginals {
  DensityMatrix first;   // rho1 = Tr_2 rho
  DensityMatrix second;  // rho2 = Tr_1 rho

  explicit Marginals(const DensityMatrix& rho)
      : first(partial_trace(rho, Subsystem::Second)), second(partial_trace(rho, Subsystem::First)) {}
};

inline Verdict reduction_verdict(const DensityMatrix& rho, const Marginals& mg, double eps) {
  const int d1 = rho.d1();
  const int d2 = rho.d2();
  const ComplexMatrix r1 = kron(mg.first.matrix(), ComplexMatrix::Identity(d2, d2)) - rho.matrix();
  const ComplexMatrix r2 = kron(ComplexMatrix::Identity(d1, d1), mg.second.matrix()) - rho.matrix();
  const double w = std::min(hermitian_spectrum(r1).min(), hermitian_spectrum(r2).min());
  return {Criterion::Reduction, w < -eps, w};
}

// Largest excess of a descending prefix sum of `global` over the zero-padded `marginal`.
inline double majorization_excess(const Spectrum& global, const Spectrum& marginal) {
  const std::size_t n = std::max(global.count(), marginal.count());
  double excess = -std::numeric_limits<double>::infinity();
  double sum_global = 0.0;
  double sum_marginal = 0.0;
  for (std::size_t l = 0; l < n; ++l) {
    sum_global += l < global.count() ? global.eigenvalues[l] : 0.0;
    sum_marginal += l < marginal.count() ? marginal.eigenvalues[l] : 0.0;
    excess = std::max(excess, sum_global - sum_marginal);
  }
  return excess;
}

inline Verdict majorization_verdict(const DensityMatrix& rho, const Marginals& mg, double eps) {
  const double w = std::max(majorization_excess(rho.spectrum(), mg.first.spectrum()),
                            majorization_excess(rho.spectrum(), mg.second.spectrum()));
  return {Criterion::Majorization, w > eps, w};
}

inline Verdict entropy_verdict(const DensityMatrix& rho, const Marginals& mg, double eps) {
  const double s12 = von_neumann_entropy(rho.spectrum());
  const double s1 = von_neumann_entropy(mg.first.spectrum());
  const double s2 = von_neumann_entropy(mg.second.spectrum());
  const double w = std::min(s12 - s1, s12 - s2);
  return {Criterion::Entropy, w < -eps, w};
}

}  // namespace detail

inline Verdict detect_reduction(const DensityMatrix& rho, double eps = kDefaultEps) {
  return detail::reduction_verdict(rho, detail::Marginals(rho), eps);
}

inline Verdict detect_majorization(const DensityMatrix& rho, double eps = kDefaultEps) {
  return detail::majorization_verdict(rho, detail::Marginals(rho), eps);
}

inline Verdict detect_entropy(const DensityMatrix& rho, double eps = kDefaultEps) {
  return detail::entropy_verdict(rho, detail::Marginals(rho), eps);
}

inline Verdict detect_realignment(const DensityMatrix& rho, double eps = kDefaultEps) {
  const double w = trace_norm(realign(rho)) - 1.0;
  return {Criterion::Realignment, w > eps, w};
}

/// LN = log2 ||rho^{T2}||_1, reported as exactly 0 when the trace norm is
/// within 1e-12 of 1.
inline double log_negativity(const DensityMatrix& rho) {
  const double norm = hermitian_trace_norm(partial_transpose(rho, Subsystem::Second));
  if (norm <= 1.0 + 1e-12) return 0.0;
  return std::log2(norm);
}

/// One sampled state's verdicts and LN.
struct StateRecord {
  SampleSpec spec;
  double ln = 0.0;
  std::array<Verdict, kCriterionCount> verdicts{};

  [[nodiscard]] const Verdict& operator[](Criterion c) const { return verdicts[index_of(c)]; }
  [[nodiscard]] bool detected(Criterion c) const { return (*this)[c].detected; }
};

inline StateRecord evaluate_state(const DensityMatrix& rho, const SampleSpec& spec,
                                  double eps = kDefaultEps) {
  const detail::Marginals marginals(rho);
  StateRecord rec;
  rec.spec = spec;
  rec.ln = log_negativity(rho);
  rec.verdicts[index_of(Criterion::PT)] = detect_pt(rho, eps);
  rec.verdicts[index_of(Criterion::Reduction)] = detail::reduction_verdict(rho, marginals, eps);
  rec.verdicts[index_of(Criterion::Majorization)] = detail::majorization_verdict(rho, marginals, eps);
  rec.verdicts[index_of(Criterion::Entropy)] = detail::entropy_verdict(rho, marginals, eps);
  rec.verdicts[index_of(Criterion::Realignment)] = detect_realignment(rho, eps);
  return rec;
}

/// Sample the state described by spec and evaluate it.
inline StateRecord sample_and_evaluate(const SampleSpec& spec, double eps = kDefaultEps) {
  return evaluate_state(sample_reduced_state(spec), spec, eps);
}

}  // namespace entdetect
