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

// Named reference states used by the verification suite and the tests.

#pragma once

#include <cmath>

#include "entdetect/qmat.hpp"

namespace entdetect::states {

/// |Phi+> = (|00> + |11>)/sqrt(2) on 2 (x) 2.
inline DensityMatrix bell() {
  ComplexVector psi = ComplexVector::Zero(4);
  psi(0) = psi(3) = 1.0 / std::sqrt(2.0);
  return DensityMatrix::from_pure({2, 2}, psi);
}

/// I / (d1 d2).
inline DensityMatrix maximally_mixed(Dims dims) {
  const int n = dims.total();
  return DensityMatrix::from_matrix(dims, ComplexMatrix::Identity(n, n) / static_cast<double>(n));
}

/// |a>|b> with computational basis vectors a < d1, b < d2.
inline DensityMatrix product_basis(Dims dims, int a, int b) {
  ComplexVector psi = ComplexVector::Zero(dims.total());
  psi(a * dims.d2 + b) = 1.0;
  return DensityMatrix::from_pure(dims, psi);
}

/// p |Phi+><Phi+| + (1 - p) I/4.
inline DensityMatrix werner(double p) {
  const ComplexMatrix m = p * bell().matrix() + (1.0 - p) * ComplexMatrix::Identity(4, 4) / 4.0;
  return DensityMatrix::from_matrix({2, 2}, m);
}

}  // namespace entdetect::states
