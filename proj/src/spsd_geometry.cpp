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

#include "spsd_geometry.hpp"

#include <cmath>

#include "error.hpp"

namespace mprobe {

void MetricParams::validate() const {
  for (int i = 0; i < 3; ++i) {
    if (!(weights[i] > 0.0) || !std::isfinite(weights[i])) {
      throw Error(ErrorKind::InvalidArgument, "weights must be positive");
    }
    if (!(lambdas[i] > 0.0) || !std::isfinite(lambdas[i])) {
      throw Error(ErrorKind::InvalidArgument, "lambdas must be positive");
    }
  }
  if (!(eps_reg > 0.0) || !std::isfinite(eps_reg)) throw Error(ErrorKind::InvalidArgument, "eps_reg must be positive");
}

SPSDFactor regularize_and_decompose(const Matrix& s, int target_rank, double eps_reg) {
  if (s.rows() != s.cols()) throw Error(ErrorKind::FactorShapeMismatch, "covariance descriptor is not square");
  if (target_rank < 1 || target_rank > s.rows()) {
    throw Error(ErrorKind::RankOutOfRange, "target rank " + std::to_string(target_rank) + " outside [1, " +
                                               std::to_string(s.rows()) + "]");
  }
  const SymEigen eig = sym_eigen(s);
  const double eps_abs = eps_reg * std::max(eig.values(0), 1.0);

  SPSDFactor f;
  f.u = eig.vectors.leftCols(target_rank);
  f.r_diag.resize(target_rank);
  for (int k = 0; k < target_rank; ++k) {
    const double lambda = eig.values(k) <= eps_abs ? eps_abs : eig.values(k);
    f.r_diag(k) = std::sqrt(lambda);
    Eigen::Index at = 0;
    f.u.col(k).cwiseAbs().maxCoeff(&at);
    if (f.u(at, k) < 0.0) f.u.col(k) *= -1.0;
  }
  return f;
}

PMPoint pm_point(const Tensor3& t, const std::array<int, 3>& target_ranks, const MetricParams& params,
                 double tol_rel) {
  params.validate();
  PMPoint p;
  const auto s = covariance_triple(t);
  int ranks[3];
  for (int i = 0; i < 3; ++i) {
    ranks[i] = numerical_rank(s[i], tol_rel);
    p.factors[i] = regularize_and_decompose(s[i], target_ranks[i], params.eps_reg);
  }
  p.ranks = {ranks[0], ranks[1], ranks[2], tol_rel};
  return p;
}

Vector log_spd(const Vector& r_diag) {
  if ((r_diag.array() <= 0.0).any()) throw Error(ErrorKind::NonPositiveDiagonal, "log of a non-positive diagonal");
  return r_diag.array().log().matrix();
}

void check_compatible(const PMPoint& p, const PMPoint& q) {
  for (int i = 0; i < 3; ++i) {
    const auto& a = p.factors[i];
    const auto& b = q.factors[i];
    if (a.n() != b.n() || a.rank() != b.rank() || a.r_diag.size() != a.rank() || b.r_diag.size() != b.rank()) {
      throw Error(ErrorKind::FactorShapeMismatch,
                  "mode " + std::to_string(i + 1) + ": (" + std::to_string(a.n()) + "," + std::to_string(a.rank()) +
                      ") vs (" + std::to_string(b.n()) + "," + std::to_string(b.rank()) + ")");
    }
  }
}

double geodesic_distance_squared(const PMPoint& p, const PMPoint& q, const MetricParams& params) {
  check_compatible(p, q);
  double d2 = 0.0;
  for (int i = 0; i < 3; ++i) {
    const auto& a = p.factors[i];
    const auto& b = q.factors[i];
    const double proj = 0.5 * (a.u * a.u.transpose() - b.u * b.u.transpose()).squaredNorm();
    const double logs = (log_spd(a.r_diag) - log_spd(b.r_diag)).squaredNorm();
    d2 += params.weights[i] * (proj + params.lambdas[i] * logs);
  }
  return d2;
}

double geodesic_distance(const PMPoint& p, const PMPoint& q, const MetricParams& params) {
  return std::sqrt(std::max(0.0, geodesic_distance_squared(p, q, params)));
}

double kernel(const PMPoint& p, const PMPoint& q, const MetricParams& params) {
  check_compatible(p, q);
  double k = 0.0;
  for (int i = 0; i < 3; ++i) {
    const auto& a = p.factors[i];
    const auto& b = q.factors[i];
    const double span = (a.u.transpose() * b.u).squaredNorm();
    const double logs = log_spd(a.r_diag).dot(log_spd(b.r_diag));
    k += params.weights[i] * (span + params.lambdas[i] * logs);
  }
  return k;
}

Eigen::Index kernel_feature_size(const PMPoint& p) {
  Eigen::Index size = 0;
  for (const auto& f : p.factors) size += f.n() * (f.n() + 1) / 2 + f.rank();
  return size;
}

Vector kernel_features(const PMPoint& p, const MetricParams& params) {
  Vector phi(kernel_feature_size(p));
  const double root2 = std::sqrt(2.0);
  Eigen::Index at = 0;
  for (int i = 0; i < 3; ++i) {
    const auto& f = p.factors[i];
    const double sw = std::sqrt(params.weights[i]);
    const Matrix proj = f.u * f.u.transpose();
    for (Eigen::Index c = 0; c < f.n(); ++c) {
      phi(at++) = sw * proj(c, c);
      for (Eigen::Index r = 0; r < c; ++r) phi(at++) = sw * root2 * proj(r, c);
    }
    phi.segment(at, f.rank()) = std::sqrt(params.weights[i] * params.lambdas[i]) * log_spd(f.r_diag);
    at += f.rank();
  }
  return phi;
}

}  // namespace mprobe
