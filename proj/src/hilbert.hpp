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

#ifndef MPROBE_HILBERT_HPP
#define MPROBE_HILBERT_HPP

#include <string>
#include <vector>

#include "linalg.hpp"
#include "spsd_geometry.hpp"

namespace mprobe {

inline constexpr double kDefaultDimThreshold = 1e-3;

struct PointId {
  std::string group_id;
  std::size_t tensor_index = 0;
};

struct KernelGram {
  Matrix k;                          // N x N, exactly symmetric
  std::vector<PointId> point_index;  // row/column labels
  MetricParams params;

  Eigen::Index size() const noexcept { return k.rows(); }
  std::vector<Eigen::Index> group_indices(const std::string& group_id) const;  // throws UnknownGroup
};

struct VirtualFeatures {
  Matrix vf;          // N x N, column j embeds point j
  Vector eigenvalues;  // nonincreasing, clamped at 0
};

struct SubspaceBasis {
  Matrix q;  // N x d, orthonormal columns
  std::string group_id;
  int d = 0;
};

struct PrincipalAngleReport {
  std::string group_id;
  std::vector<double> angles;  // radians, nondecreasing, in [0, pi/2]
};

// K[a][b] = kernel(p_a, p_b). Every point must share (n_i, r_i) per mode, else
// HeterogeneousPoints. When point_index is empty, points are labelled ("", a).
KernelGram gram_matrix(const std::vector<PMPoint>& points, const MetricParams& params,
                       std::vector<PointId> point_index = {});

// Gram from precomputed kernel_features rows (one row per point).
KernelGram gram_from_features(const Matrix& features, std::vector<PointId> point_index, const MetricParams& params);

// K = W diag(lambda) W^T, VF = diag(sqrt(lambda)) W^T. Eigenvalues within
// -1e-8 * lambda_max are clamped to zero; anything more negative is NotPSD.
VirtualFeatures virtual_features(const KernelGram& gram);
VirtualFeatures virtual_features(const Matrix& k);

// Smallest i such that ||K - K_i||_F / ||K||_F < threshold, K_i the best
// rank-i approximation. Returns 0 for the zero matrix.
int subspace_dimension(const Matrix& k, double threshold = kDefaultDimThreshold);

// d from the group's principal submatrix of K, Q from the top-d left singular
// vectors of the group's VF columns. Throws ZeroMatrix when d would be 0.
SubspaceBasis group_basis(const VirtualFeatures& vf, const KernelGram& gram, const std::string& group_id,
                          double threshold = kDefaultDimThreshold);

// min(d1, d2) principal angles between span(Q1) and span(Q2), both with
// orthonormal columns. Throws DimensionMismatch when the row counts differ.
std::vector<double> principal_angles(const Matrix& q1, const Matrix& q2);

// The report is labelled with b2's group.
PrincipalAngleReport principal_angles(const SubspaceBasis& b1, const SubspaceBasis& b2);

// sqrt(K_aa + K_bb - 2 K_ab), clamped at zero.
double kernel_distance(const KernelGram& gram, Eigen::Index a, Eigen::Index b);

}  // namespace mprobe

#endif  // MPROBE_HILBERT_HPP
