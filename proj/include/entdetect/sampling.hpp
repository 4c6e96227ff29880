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
 * @file    sampling.hpp
 * @brief   Haar-random rank-k bipartite states.
 *
 * A rank-k state on d1 (x) d2 is the marginal of a Haar-random pure state on
 * d1 (x) d2 (x) k. The pure state has i.i.d. complex Gaussian amplitudes
 * a + ib with a, b ~ N(0,1), normalized; tracing out the k-dimensional factor
 * gives rho = A A^dagger with A the (d1 d2) x k amplitude matrix.
 */

#pragma once

#include <cmath>
#include <cstdint>
#include <string>

#include "entdetect/errors.hpp"
#include "entdetect/qmat.hpp"
#include "entdetect/rng.hpp"

namespace entdetect {

/// Rank tolerance for counting nonzero eigenvalues.
inline constexpr double kRankTol = 1e-10;

struct SampleSpec {
  int d1 = 2;
  int d2 = 2;
  int k = 1;
  std::uint64_t master_seed = 0;
  std::uint64_t trial_index = 0;

  [[nodiscard]] Dims dims() const { return {d1, d2}; }

  void validate() const {
    if (d1 < 2 || d2 < 2) throw PreconditionError("SampleSpec: d1 and d2 must be at least 2");
    if (k < 1 || k > d1 * d2) {
      throw PreconditionError("SampleSpec: rank k=" + std::to_string(k) + " outside [1, d1*d2]");
    }
  }

  friend bool operator==(const SampleSpec&, const SampleSpec&) = default;
};

namespace detail {

inline ComplexVector draw_gaussian_vector(RngStream& rng, Eigen::Index n) {
  ComplexVector v(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto [re, im] = rng.gaussian_pair();
    v(i) = Complex(re, im);
  }
  return v;
}

}  // namespace detail

/// Haar-random unit vector of length d1*d2*k, amplitude index (l*d2 + m)*k + e.
/// A numerically zero draw is retried once on a derived sub-stream.
inline ComplexVector sample_tripartite_pure(const SampleSpec& spec) {
  spec.validate();
  const Eigen::Index n = static_cast<Eigen::Index>(spec.d1) * spec.d2 * spec.k;
  for (std::uint64_t attempt = 0; attempt < 2; ++attempt) {
    RngStream rng(spec.master_seed, spec.trial_index, attempt);
    ComplexVector psi = detail::draw_gaussian_vector(rng, n);
    const double norm = psi.norm();
    if (norm > 1e-150 && std::isfinite(norm)) return psi / norm;
  }
  throw NumericalError("sample_tripartite_pure: zero-norm draw on retry");
}

/// Tr_3 |psi><psi| for psi from sample_tripartite_pure().
inline DensityMatrix reduce_tripartite(const ComplexVector& psi, Dims dims, int k) {
  const Eigen::Index rows = dims.total();
  if (psi.size() != rows * k) throw PreconditionError("reduce_tripartite: length mismatch");
  ComplexMatrix amplitudes(rows, k);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index e = 0; e < k; ++e) amplitudes(r, e) = psi(r * k + e);
  ComplexMatrix rho = amplitudes * amplitudes.adjoint();
  return DensityMatrix::from_matrix(dims, std::move(rho));
}

inline DensityMatrix sample_reduced_state(const SampleSpec& spec) {
  return reduce_tripartite(sample_tripartite_pure(spec), spec.dims(), spec.k);
}

/// Number of eigenvalues above kRankTol.
inline int numerical_rank(const Spectrum& s, double tol = kRankTol) {
  int r = 0;
  for (double l : s.eigenvalues) r += l > tol ? 1 : 0;
  return r;
}

/// True iff lambda_min(rho^{T1}) < -eps.
inline bool is_npt(const DensityMatrix& rho, double eps = kDefaultEps) {
  return hermitian_spectrum(partial_transpose(rho, Subsystem::First)).min() < -eps;
}

/// Haar-random d x d unitary: QR of a Ginibre matrix with R's diagonal phases
/// moved into Q.
inline ComplexMatrix random_unitary(int d, RngStream& rng) {
  if (d < 1) throw PreconditionError("random_unitary: dimension must be positive");
  ComplexMatrix z(d, d);
  for (int c = 0; c < d; ++c) z.col(c) = detail::draw_gaussian_vector(rng, d);
  Eigen::HouseholderQR<ComplexMatrix> qr(z);
  ComplexMatrix q = qr.householderQ() * ComplexMatrix::Identity(d, d);
  const ComplexMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int i = 0; i < d; ++i) {
    const Complex rii = r(i, i);
    const double mag = std::abs(rii);
    if (mag > 0.0) q.col(i) *= rii / mag;
  }
  return q;
}

/// (U1 (x) U2) rho (U1 (x) U2)^dagger.
inline DensityMatrix apply_local_unitary(const DensityMatrix& rho, const ComplexMatrix& u1,
                                         const ComplexMatrix& u2) {
  const ComplexMatrix u = kron(u1, u2);
  return DensityMatrix::from_matrix(rho.dims(), u * rho.matrix() * u.adjoint());
}

}  // namespace entdetect
