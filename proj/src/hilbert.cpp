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

#include "hilbert.hpp"

#include <algorithm>
#include <cmath>

#include "error.hpp"

namespace mprobe {

std::vector<Eigen::Index> KernelGram::group_indices(const std::string& group_id) const {
  std::vector<Eigen::Index> idx;
  for (std::size_t a = 0; a < point_index.size(); ++a) {
    if (point_index[a].group_id == group_id) idx.push_back(static_cast<Eigen::Index>(a));
  }
  if (idx.empty()) throw Error(ErrorKind::UnknownGroup, "no points labelled '" + group_id + "' in the Gram matrix");
  return idx;
}

KernelGram gram_matrix(const std::vector<PMPoint>& points, const MetricParams& params,
                       std::vector<PointId> point_index) {
  params.validate();
  if (points.empty()) throw Error(ErrorKind::InvalidArgument, "Gram matrix of zero points");
  if (point_index.empty()) {
    for (std::size_t a = 0; a < points.size(); ++a) point_index.push_back({"", a});
  }
  if (point_index.size() != points.size()) {
    throw Error(ErrorKind::InvalidArgument, "point_index length differs from the number of points");
  }
  for (std::size_t a = 1; a < points.size(); ++a) {
    try {
      check_compatible(points[0], points[a]);
    } catch (const Error& e) {
      throw Error(ErrorKind::HeterogeneousPoints, "point " + std::to_string(a) + ": " + e.what());
    }
  }

  const auto n = static_cast<Eigen::Index>(points.size());
  Matrix features(n, kernel_feature_size(points[0]));
  for (Eigen::Index a = 0; a < n; ++a) features.row(a) = kernel_features(points[a], params).transpose();
  return gram_from_features(features, std::move(point_index), params);
}

KernelGram gram_from_features(const Matrix& features, std::vector<PointId> point_index, const MetricParams& params) {
  const auto n = features.rows();
  if (static_cast<std::size_t>(n) != point_index.size()) {
    throw Error(ErrorKind::InvalidArgument, "point_index length differs from the number of feature rows");
  }
  KernelGram g;
  g.k = Matrix::Zero(n, n);
  // Lower triangle only; mirroring makes K exactly symmetric.
  g.k.selfadjointView<Eigen::Lower>().rankUpdate(features);
  const Matrix full = g.k.selfadjointView<Eigen::Lower>();
  g.k = full;
  g.point_index = std::move(point_index);
  g.params = params;
  return g;
}

VirtualFeatures virtual_features(const Matrix& k) {
  if (k.rows() != k.cols() || k.size() == 0) throw Error(ErrorKind::InvalidArgument, "Gram matrix must be square");
  if (relative_asymmetry(k) > 1e-10) throw Error(ErrorKind::NonSymmetric, "Gram matrix asymmetry exceeds 1e-10");
  const SymEigen eig = sym_eigen(k);
  const double lmax = std::max(eig.values(0), 0.0);
  const double lmin = eig.values(eig.values.size() - 1);
  if (lmin < -1e-8 * lmax || (lmax == 0.0 && lmin < 0.0)) {
    throw Error(ErrorKind::NotPSD, "Gram eigenvalue " + std::to_string(lmin) + " below -1e-8 * lambda_max");
  }
  VirtualFeatures out;
  out.eigenvalues = eig.values.cwiseMax(0.0);
  out.vf = out.eigenvalues.cwiseSqrt().asDiagonal() * eig.vectors.transpose();
  return out;
}

VirtualFeatures virtual_features(const KernelGram& gram) { return virtual_features(gram.k); }

int subspace_dimension(const Matrix& k, double threshold) {
  if (!(threshold > 0.0 && threshold < 1.0)) throw Error(ErrorKind::InvalidArgument, "threshold must lie in (0, 1)");
  if (k.rows() != k.cols()) throw Error(ErrorKind::InvalidArgument, "matrix must be square");
  if (k.size() == 0) return 0;
  const Vector ev = sym_eigen(k, true).values;
  const double lmax = std::max(ev(0), 0.0);
  if (ev(ev.size() - 1) < -1e-8 * lmax || (lmax == 0.0 && ev(ev.size() - 1) < 0.0)) {
    throw Error(ErrorKind::NotPSD, "matrix is not positive semi-definite within tolerance");
  }
  if (lmax == 0.0) return 0;
  const Vector lam = ev.cwiseMax(0.0);
  const auto n = lam.size();
  // tail[i] = sum_{k >= i} lambda_k^2, accumulated from the small end.
  std::vector<double> tail(static_cast<std::size_t>(n) + 1, 0.0);
  for (Eigen::Index i = n - 1; i >= 0; --i) tail[i] = tail[i + 1] + lam(i) * lam(i);
  const double total = std::sqrt(tail[0]);
  for (Eigen::Index i = 1; i <= n; ++i) {
    if (std::sqrt(tail[i]) / total < threshold) return static_cast<int>(i);
  }
  return static_cast<int>(n);
}

SubspaceBasis group_basis(const VirtualFeatures& vf, const KernelGram& gram, const std::string& group_id,
                          double threshold) {
  if (vf.vf.cols() != gram.size()) throw Error(ErrorKind::DimensionMismatch, "virtual features do not match Gram");
  const auto idx = gram.group_indices(group_id);
  const Matrix sub = gram.k(idx, idx);
  const int d = subspace_dimension(sub, threshold);
  if (d == 0) throw Error(ErrorKind::ZeroMatrix, "group '" + group_id + "' has an all-zero kernel block");
  const Matrix cols = vf.vf(Eigen::all, idx);
  Eigen::BDCSVD<Matrix> svd(cols, Eigen::ComputeThinU);
  if (svd.info() != Eigen::Success) throw Error(ErrorKind::EigenFailure, "SVD failed for group '" + group_id + "'");
  SubspaceBasis b;
  b.q = svd.matrixU().leftCols(d);
  b.group_id = group_id;
  b.d = d;
  return b;
}

std::vector<double> principal_angles(const Matrix& q1, const Matrix& q2) {
  if (q1.rows() != q2.rows()) {
    throw Error(ErrorKind::DimensionMismatch, "bases live in R^" + std::to_string(q1.rows()) + " and R^" +
                                                  std::to_string(q2.rows()));
  }
  // Orient so that `small` has m = min(d1, d2) columns.
  const Matrix& big = q1.cols() >= q2.cols() ? q1 : q2;
  const Matrix& small = q1.cols() >= q2.cols() ? q2 : q1;
  const Eigen::Index m = small.cols();
  if (m == 0) return {};

  // Cosines resolve large angles well, sines resolve small ones.
  const Matrix c = big.transpose() * small;
  Eigen::JacobiSVD<Matrix> cos_svd(c);
  const Matrix residual = small - big * c;
  Eigen::JacobiSVD<Matrix> sin_svd(residual);
  const Vector cosines = cos_svd.singularValues();                      // descending
  const Vector sines = sin_svd.singularValues().head(m).reverse();      // ascending

  std::vector<double> angles(static_cast<std::size_t>(m));
  for (Eigen::Index k = 0; k < m; ++k) {
    const double ck = std::clamp(cosines(k), 0.0, 1.0);
    const double sk = std::clamp(sines(k), 0.0, 1.0);
    angles[static_cast<std::size_t>(k)] = ck * ck < 0.5 ? std::acos(ck) : std::asin(sk);
  }
  std::sort(angles.begin(), angles.end());
  return angles;
}

PrincipalAngleReport principal_angles(const SubspaceBasis& b1, const SubspaceBasis& b2) {
  return {b2.group_id, principal_angles(b1.q, b2.q)};
}

double kernel_distance(const KernelGram& gram, Eigen::Index a, Eigen::Index b) {
  const auto n = gram.size();
  if (a < 0 || b < 0 || a >= n || b >= n) {
    throw Error(ErrorKind::IndexOutOfRange, "index outside [0, " + std::to_string(n) + ")");
  }
  return std::sqrt(std::max(0.0, gram.k(a, a) + gram.k(b, b) - 2.0 * gram.k(a, b)));
}

}  // namespace mprobe
