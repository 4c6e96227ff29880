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
 * @file    qmat.hpp
 * @brief   Dense complex linear algebra for bipartite density matrices.
 *
 * Basis convention: the product basis vector |i mu> (i in [0,d1), mu in [0,d2))
 * sits at flat index i*d2 + mu, i.e. subsystem 1 is the major index. The
 * realigned matrix has row index (i,j) -> i*d1 + j and column index
 * (mu,nu) -> mu*d2 + nu, with entry <i mu|rho|j nu>.
 */

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>

#include "entdetect/errors.hpp"

namespace entdetect {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

/// Hermiticity tolerance at DensityMatrix construction, relative to the max-abs entry.
inline constexpr double kDensityHermitianTol = 1e-12;
/// Hermiticity tolerance for hermitian_spectrum(), relative to the max-abs entry.
inline constexpr double kHermitianTol = 1e-10;
inline constexpr double kTraceTol = 1e-10;
/// Eigenvalues in [-kPsdTol, 0) are clipped to zero; anything lower is not PSD.
inline constexpr double kPsdTol = 1e-10;
/// Eigenvalues at or below this contribute nothing to an entropy.
inline constexpr double kEntropyCutoff = 1e-14;
/// Default detection threshold shared by the criteria and the NPT filter.
inline constexpr double kDefaultEps = 1e-10;

enum class Subsystem { First = 1, Second = 2 };
enum class LogBase { Two, E };

/// Local dimensions of a bipartite system.
struct Dims {
  int d1 = 0;
  int d2 = 0;

  [[nodiscard]] int total() const { return d1 * d2; }
  friend bool operator==(const Dims&, const Dims&) = default;
};

/// Real eigenvalues, sorted non-increasing.
struct Spectrum {
  std::vector<double> eigenvalues;

  [[nodiscard]] std::size_t count() const { return eigenvalues.size(); }
  [[nodiscard]] double max() const { return eigenvalues.front(); }
  [[nodiscard]] double min() const { return eigenvalues.back(); }
  [[nodiscard]] double sum() const {
    return std::accumulate(eigenvalues.begin(), eigenvalues.end(), 0.0);
  }
};

namespace detail {

inline double max_abs(const ComplexMatrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

inline double hermiticity_defect(const ComplexMatrix& m) {
  return m.size() == 0 ? 0.0 : (m - m.adjoint()).cwiseAbs().maxCoeff();
}

inline bool all_finite(const ComplexMatrix& m) { return m.allFinite(); }

inline void require_square(const ComplexMatrix& m, const char* who) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw PreconditionError(std::string(who) + ": matrix must be square and non-empty");
  }
}

inline void require_hermitian(const ComplexMatrix& m, double rel_tol, const char* who) {
  require_square(m, who);
  if (!all_finite(m)) throw PreconditionError(std::string(who) + ": non-finite entries");
  const double scale = max_abs(m);
  if (hermiticity_defect(m) > rel_tol * scale) {
    throw PreconditionError(std::string(who) + ": matrix is not Hermitian");
  }
}

inline Spectrum sorted_descending(const Eigen::VectorXd& values) {
  Spectrum s;
  s.eigenvalues.assign(values.data(), values.data() + values.size());
  std::sort(s.eigenvalues.begin(), s.eigenvalues.end(), std::greater<>());
  return s;
}

// Eigenvalues of a matrix already known to be Hermitian; no checks.
inline Spectrum eigenvalues_unchecked(const ComplexMatrix& m) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(m, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw NumericalError("Hermitian eigensolver did not converge");
  }
  return sorted_descending(solver.eigenvalues());
}

inline double clip_probability(double lambda) {
  if (lambda < -kPsdTol) {
    throw PreconditionError("eigenvalue " + std::to_string(lambda) + " below PSD tolerance");
  }
  return std::clamp(lambda, 0.0, 1.0);
}

}  // namespace detail

/// Eigenvalues of a Hermitian matrix, sorted descending.
/// Throws PreconditionError when m is not Hermitian within 1e-10 relative tolerance.
inline Spectrum hermitian_spectrum(const ComplexMatrix& m) {
  detail::require_hermitian(m, kHermitianTol, "hermitian_spectrum");
  return detail::eigenvalues_unchecked(m);
}

/// Full eigendecomposition: m = V diag(spectrum) V^dagger, columns of V ordered
/// like spectrum.eigenvalues.
struct HermitianDecomposition {
  Spectrum spectrum;
  ComplexMatrix vectors;
};

inline HermitianDecomposition hermitian_decomposition(const ComplexMatrix& m) {
  detail::require_hermitian(m, kHermitianTol, "hermitian_decomposition");
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(m);
  if (solver.info() != Eigen::Success) {
    throw NumericalError("Hermitian eigensolver did not converge");
  }
  // Eigen returns ascending order.
  const Eigen::Index n = m.rows();
  HermitianDecomposition out;
  out.vectors.resize(n, n);
  out.spectrum.eigenvalues.resize(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    out.spectrum.eigenvalues[static_cast<std::size_t>(i)] = solver.eigenvalues()(n - 1 - i);
    out.vectors.col(i) = solver.eigenvectors().col(n - 1 - i);
  }
  return out;
}

/// Hermitian, unit-trace, positive-semidefinite matrix on C^d1 (x) C^d2.
///
/// Construction symmetrizes the input as (M + M^dagger)/2 after checking it is
/// Hermitian to 1e-12 relative precision, then checks the trace and the
/// spectrum. The spectrum is kept, so criteria never re-diagonalize rho itself.
class DensityMatrix {
 public:
  static DensityMatrix from_matrix(Dims dims, ComplexMatrix m) {
    if (dims.d1 < 1 || dims.d2 < 1) throw PreconditionError("DensityMatrix: dimensions must be positive");
    if (m.rows() != dims.total() || m.cols() != dims.total()) {
      throw PreconditionError("DensityMatrix: matrix size does not match d1*d2");
    }
    detail::require_hermitian(m, kDensityHermitianTol, "DensityMatrix");
    ComplexMatrix sym = (m + m.adjoint()) * 0.5;
    const double trace = sym.trace().real();
    if (std::abs(trace - 1.0) > kTraceTol) {
      throw PreconditionError("DensityMatrix: trace " + std::to_string(trace) + " is not 1");
    }
    Spectrum spectrum = detail::eigenvalues_unchecked(sym);
    if (spectrum.min() < -kPsdTol) {
      throw PreconditionError("DensityMatrix: not positive semidefinite (lambda_min = " +
                              std::to_string(spectrum.min()) + ")");
    }
    return DensityMatrix(dims, std::move(sym), std::move(spectrum));
  }

  /// Single-system state; stored with d2 = 1.
  static DensityMatrix single_system(ComplexMatrix m) {
    const int d = static_cast<int>(m.rows());
    return from_matrix({d, 1}, std::move(m));
  }

  /// |psi><psi| for a unit vector psi.
  static DensityMatrix from_pure(Dims dims, const ComplexVector& psi) {
    const double norm = psi.norm();
    if (!(std::abs(norm - 1.0) <= 1e-10)) throw PreconditionError("from_pure: vector is not normalized");
    return from_matrix(dims, psi * psi.adjoint());
  }

  [[nodiscard]] int d1() const { return dims_.d1; }
  [[nodiscard]] int d2() const { return dims_.d2; }
  [[nodiscard]] Dims dims() const { return dims_; }
  [[nodiscard]] int dim() const { return dims_.total(); }
  [[nodiscard]] const ComplexMatrix& matrix() const { return mat_; }
  [[nodiscard]] const Spectrum& spectrum() const { return spectrum_; }

 private:
  DensityMatrix(Dims dims, ComplexMatrix m, Spectrum s)
      : dims_(dims), mat_(std::move(m)), spectrum_(std::move(s)) {}

  Dims dims_;
  ComplexMatrix mat_;
  Spectrum spectrum_;
};

inline ComplexMatrix partial_transpose(const ComplexMatrix& m, Dims dims, Subsystem which) {
  const int d1 = dims.d1;
  const int d2 = dims.d2;
  if (m.rows() != dims.total() || m.cols() != dims.total()) {
    throw PreconditionError("partial_transpose: matrix size does not match d1*d2");
  }
  ComplexMatrix out(m.rows(), m.cols());
  for (int i = 0; i < d1; ++i) {
    for (int mu = 0; mu < d2; ++mu) {
      for (int j = 0; j < d1; ++j) {
        for (int nu = 0; nu < d2; ++nu) {
          const int row = i * d2 + mu;
          const int col = j * d2 + nu;
          out(row, col) = which == Subsystem::First ? m(j * d2 + mu, i * d2 + nu)
                                                    : m(i * d2 + nu, j * d2 + mu);
        }
      }
    }
  }
  return out;
}

/// Partial transpose on the chosen subsystem. Hermitian with unit trace, not necessarily PSD.
inline ComplexMatrix partial_transpose(const DensityMatrix& rho, Subsystem which) {
  return partial_transpose(rho.matrix(), rho.dims(), which);
}

/// Reduced state after tracing out `traced`, returned as a single-system DensityMatrix.
inline DensityMatrix partial_trace(const DensityMatrix& rho, Subsystem traced) {
  const int d1 = rho.d1();
  const int d2 = rho.d2();
  const ComplexMatrix& m = rho.matrix();
  if (traced == Subsystem::Second) {
    ComplexMatrix out = ComplexMatrix::Zero(d1, d1);
    for (int i = 0; i < d1; ++i)
      for (int j = 0; j < d1; ++j)
        for (int mu = 0; mu < d2; ++mu) out(i, j) += m(i * d2 + mu, j * d2 + mu);
    return DensityMatrix::single_system(std::move(out));
  }
  ComplexMatrix out = ComplexMatrix::Zero(d2, d2);
  for (int mu = 0; mu < d2; ++mu)
    for (int nu = 0; nu < d2; ++nu)
      for (int i = 0; i < d1; ++i) out(mu, nu) += m(i * d2 + mu, i * d2 + nu);
  return DensityMatrix::single_system(std::move(out));
}

/// Realigned matrix G with G[(i,j),(mu,nu)] = <i mu|rho|j nu>, shape d1^2 x d2^2.
inline ComplexMatrix realign(const DensityMatrix& rho) {
  const int d1 = rho.d1();
  const int d2 = rho.d2();
  const ComplexMatrix& m = rho.matrix();
  ComplexMatrix out(d1 * d1, d2 * d2);
  for (int i = 0; i < d1; ++i)
    for (int j = 0; j < d1; ++j)
      for (int mu = 0; mu < d2; ++mu)
        for (int nu = 0; nu < d2; ++nu) out(i * d1 + j, mu * d2 + nu) = m(i * d2 + mu, j * d2 + nu);
  return out;
}

/// Singular values, descending.
inline std::vector<double> singular_values(const ComplexMatrix& m) {
  if (m.size() == 0) throw PreconditionError("singular_values: empty matrix");
  if (!detail::all_finite(m)) throw PreconditionError("singular_values: non-finite entries");
  Eigen::JacobiSVD<ComplexMatrix> svd(m);
  const Eigen::VectorXd& sv = svd.singularValues();
  if (!sv.allFinite()) throw NumericalError("SVD produced non-finite singular values");
  return {sv.data(), sv.data() + sv.size()};
}

/// ||m||_1 = Tr sqrt(m^dagger m), the sum of singular values.
inline double trace_norm(const ComplexMatrix& m) {
  const auto sv = singular_values(m);
  return std::accumulate(sv.begin(), sv.end(), 0.0);
}

/// Trace norm of a Hermitian matrix as the sum of |eigenvalue|.
inline double hermitian_trace_norm(const ComplexMatrix& m) {
  const Spectrum s = hermitian_spectrum(m);
  double total = 0.0;
  for (double l : s.eigenvalues) total += std::abs(l);
  return total;
}

inline double frobenius_norm(const ComplexMatrix& m) { return m.norm(); }

/// S = -sum lambda log(lambda) over a density-matrix spectrum.
inline double von_neumann_entropy(const Spectrum& spectrum, LogBase base = LogBase::E) {
  double s = 0.0;
  for (double raw : spectrum.eigenvalues) {
    if (raw > 1.0 + kPsdTol) throw PreconditionError("von_neumann_entropy: eigenvalue above 1");
    const double p = detail::clip_probability(raw);
    if (p > kEntropyCutoff) s -= p * std::log(p);
  }
  s = std::max(s, 0.0);
  return base == LogBase::Two ? s / std::log(2.0) : s;
}

/// Tr rho^2, from the clipped spectrum.
inline double purity(const DensityMatrix& rho) {
  double p = 0.0;
  for (double raw : rho.spectrum().eigenvalues) {
    const double l = detail::clip_probability(raw);
    p += l * l;
  }
  return p;
}

inline ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  return Eigen::kroneckerProduct(a, b).eval();
}

/// rho_A (x) rho_B as a bipartite state.
inline DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b) {
  return DensityMatrix::from_matrix({a.dim(), b.dim()}, kron(a.matrix(), b.matrix()));
}

}  // namespace entdetect
