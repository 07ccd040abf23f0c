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

#include "linalg.hpp"

#include "error.hpp"

namespace mprobe {

SymEigen sym_eigen(const Matrix& s, bool values_only) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(s, values_only ? Eigen::EigenvaluesOnly : Eigen::ComputeEigenvectors);
  if (es.info() != Eigen::Success) {
    throw Error(ErrorKind::EigenFailure, "symmetric eigensolver did not converge on a " + std::to_string(s.rows()) +
                                             "x" + std::to_string(s.cols()) + " matrix");
  }
  SymEigen out;
  out.values = es.eigenvalues().reverse();
  if (!values_only) out.vectors = es.eigenvectors().rowwise().reverse();
  return out;
}

double relative_asymmetry(const Matrix& a) {
  const double scale = a.cwiseAbs().maxCoeff();
  if (scale == 0.0) return 0.0;
  return (a - a.transpose()).cwiseAbs().maxCoeff() / scale;
}

}  // namespace mprobe
