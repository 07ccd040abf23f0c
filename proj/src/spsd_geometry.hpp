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

#ifndef MPROBE_SPSD_GEOMETRY_HPP
#define MPROBE_SPSD_GEOMETRY_HPP

#include <array>

#include "linalg.hpp"
#include "tensor.hpp"
#include "unfold_cov.hpp"

namespace mprobe {

// Fixed-rank SPSD matrix S = U R^2 U^T in canonical form: U has orthonormal
// columns, R is diagonal with a positive, nonincreasing diagonal.
struct SPSDFactor {
  Matrix u;       // n x r
  Vector r_diag;  // length r

  Eigen::Index n() const noexcept { return u.rows(); }
  Eigen::Index rank() const noexcept { return u.cols(); }
  Matrix reconstruct() const { return u * r_diag.array().square().matrix().asDiagonal() * u.transpose(); }
};

// Weights w_i and log-term scales lambda_i per mode, plus the relative floor
// used when regularising zero eigenvalues.
struct MetricParams {
  std::array<double, 3> weights{1.0, 1.0, 1.0};
  std::array<double, 3> lambdas{1.0, 1.0, 1.0};
  double eps_reg = 1e-6;

  void validate() const;  // throws InvalidArgument unless all strictly positive
};

// One latent tensor as a point on the product of three fixed-rank SPSD manifolds.
struct PMPoint {
  std::array<SPSDFactor, 3> factors;
  RankTuple ranks;  // numerical ranks before regularisation
};

// Keeps the r largest eigenpairs of S, lifts eigenvalues <= eps_reg * max(lambda_max, 1)
// to that floor, and returns U (eigenvectors, largest-magnitude entry positive)
// with R = diag(sqrt(lambda)). Throws RankOutOfRange unless 1 <= r <= n.
SPSDFactor regularize_and_decompose(const Matrix& s, int target_rank, double eps_reg);

PMPoint pm_point(const Tensor3& t, const std::array<int, 3>& target_ranks, const MetricParams& params,
                 double tol_rel = kDefaultRankTol);

// Elementwise log of a positive diagonal; throws NonPositiveDiagonal.
Vector log_spd(const Vector& r_diag);

double geodesic_distance_squared(const PMPoint& p, const PMPoint& q, const MetricParams& params);
double geodesic_distance(const PMPoint& p, const PMPoint& q, const MetricParams& params);

// Positive definite linear kernel:
//   k = sum_i w_i ( ||U_p^T U_q||_F^2 + lambda_i tr(log R_p log R_q) )
double kernel(const PMPoint& p, const PMPoint& q, const MetricParams& params);

// Throws FactorShapeMismatch unless (n_i, r_i) agree for every mode.
void check_compatible(const PMPoint& p, const PMPoint& q);

// Explicit finite-dimensional feature map phi with <phi(p), phi(q)> = kernel(p, q).
// Per mode: sqrt(w) * packed upper triangle of U U^T (off-diagonals scaled by
// sqrt 2), followed by sqrt(w * lambda) * log diag(R).
Vector kernel_features(const PMPoint& p, const MetricParams& params);
Eigen::Index kernel_feature_size(const PMPoint& p);

}  // namespace mprobe

#endif  // MPROBE_SPSD_GEOMETRY_HPP
