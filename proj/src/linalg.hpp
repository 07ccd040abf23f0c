/*
 * Copyright 2026 The mprobe Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 *
 */

#ifndef MPROBE_LINALG_HPP
#define MPROBE_LINALG_HPP

#include <Eigen/Dense>

namespace mprobe {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Eigenpairs of a symmetric matrix, eigenvalues nonincreasing.
struct SymEigen {
  Vector values;
  Matrix vectors;  // column k pairs with values[k]; empty when values_only
};

// Throws EigenFailure when the solver does not converge.
SymEigen sym_eigen(const Matrix& s, bool values_only = false);

// Largest |a_ij - a_ji| divided by max(|a_ij|); 0 for the zero matrix.
double relative_asymmetry(const Matrix& a);

}  // namespace mprobe

#endif  // MPROBE_LINALG_HPP
