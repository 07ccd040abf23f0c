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

#include "unfold_cov.hpp"

#include "error.hpp"

namespace mprobe {

Matrix unfold(const Tensor3& t, int mode) {
  const auto [n1, n2, n3] = t.shape();
  Matrix m;
  switch (mode) {
    case 1:
      m.resize(static_cast<Eigen::Index>(n1), static_cast<Eigen::Index>(n2 * n3));
      for (std::size_t i = 0; i < n1; ++i)
        for (std::size_t j = 0; j < n2; ++j)
          for (std::size_t k = 0; k < n3; ++k) m(i, j * n3 + k) = t(i, j, k);
      break;
    case 2:
      m.resize(static_cast<Eigen::Index>(n2), static_cast<Eigen::Index>(n3 * n1));
      for (std::size_t i = 0; i < n1; ++i)
        for (std::size_t j = 0; j < n2; ++j)
          for (std::size_t k = 0; k < n3; ++k) m(j, i * n3 + k) = t(i, j, k);
      break;
    case 3:
      m.resize(static_cast<Eigen::Index>(n3), static_cast<Eigen::Index>(n1 * n2));
      for (std::size_t i = 0; i < n1; ++i)
        for (std::size_t j = 0; j < n2; ++j)
          for (std::size_t k = 0; k < n3; ++k) m(k, i * n2 + j) = t(i, j, k);
      break;
    default:
      throw Error(ErrorKind::InvalidMode, "mode must be 1, 2 or 3, got " + std::to_string(mode));
  }
  return m;
}

Matrix covariance(const Matrix& m) {
  if (m.cols() < 2) {
    throw Error(ErrorKind::TooFewObservations,
                "covariance needs at least 2 observation columns, got " + std::to_string(m.cols()));
  }
  const Vector mean = m.rowwise().mean();
  const Matrix centered = m.colwise() - mean;
  Matrix s = (centered * centered.transpose()) / static_cast<double>(m.cols() - 1);
  return (s + s.transpose()) * 0.5;
}

int numerical_rank(const Matrix& s, double tol_rel) {
  if (s.rows() != s.cols()) throw Error(ErrorKind::NonSymmetric, "matrix is not square");
  if (!(tol_rel > 0.0)) throw Error(ErrorKind::InvalidArgument, "tol_rel must be positive");
  if (relative_asymmetry(s) > 1e-12) throw Error(ErrorKind::NonSymmetric, "asymmetry exceeds 1e-12 relative");
  if (s.size() == 0) return 0;
  const Vector ev = sym_eigen(s, true).values;
  const double lmax = ev(0);
  if (lmax <= 0.0) {
    if (ev(ev.size() - 1) < 0.0) throw Error(ErrorKind::NotPSD, "matrix is negative semi-definite");
    return 0;
  }
  if (ev(ev.size() - 1) < -1e-8 * lmax) {
    throw Error(ErrorKind::NotPSD, "minimum eigenvalue " + std::to_string(ev(ev.size() - 1)) +
                                       " below -1e-8 * lambda_max");
  }
  return static_cast<int>((ev.array() > tol_rel * lmax).count());
}

std::array<Matrix, 3> covariance_triple(const Tensor3& t) {
  return {covariance(unfold(t, 1)), covariance(unfold(t, 2)), covariance(unfold(t, 3))};
}

RankTuple rank_tuple(const Tensor3& t, double tol_rel) {
  const auto s = covariance_triple(t);
  return {numerical_rank(s[0], tol_rel), numerical_rank(s[1], tol_rel), numerical_rank(s[2], tol_rel), tol_rel};
}

std::vector<RankTuple> rank_tuples(const LatentBatch& batch, double tol_rel) {
  std::vector<RankTuple> out;
  out.reserve(batch.size());
  for (const auto& t : batch.tensors) out.push_back(rank_tuple(t, tol_rel));
  return out;
}

StrataHistogram strata_histogram(const std::string& group_id, const std::vector<RankTuple>& ranks) {
  if (ranks.empty()) throw Error(ErrorKind::InvalidArgument, "strata histogram of an empty batch");
  StrataHistogram h;
  h.group_id = group_id;
  for (const auto& r : ranks) {
    for (int mode = 1; mode <= 3; ++mode) ++h.counts[mode - 1][r[mode]];
  }
  return h;
}

StrataHistogram strata_histogram(const LatentBatch& batch, double tol_rel) {
  return strata_histogram(batch.group_id, rank_tuples(batch, tol_rel));
}

}  // namespace mprobe
