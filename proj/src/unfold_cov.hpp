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

#ifndef MPROBE_UNFOLD_COV_HPP
#define MPROBE_UNFOLD_COV_HPP

#include <array>
#include <map>
#include <string>
#include <vector>

#include "linalg.hpp"
#include "tensor.hpp"

namespace mprobe {

inline constexpr double kDefaultRankTol = 1e-7;

struct RankTuple {
  int r1 = 0;
  int r2 = 0;
  int r3 = 0;
  double tol = kDefaultRankTol;  // relative threshold actually used

  int operator[](int mode) const noexcept { return mode == 1 ? r1 : mode == 2 ? r2 : r3; }
  friend bool operator==(const RankTuple& a, const RankTuple& b) noexcept {
    return a.r1 == b.r1 && a.r2 == b.r2 && a.r3 == b.r3;
  }
};

// Mode-i unfolding. Rows are indexed by axis i; columns run over the two
// remaining axes in C order (lower-numbered axis slowest):
//   mode 1: n1 x (n2*n3), column j*n3 + k
//   mode 2: n2 x (n3*n1), column i*n3 + k
//   mode 3: n3 x (n1*n2), column i*n2 + j
// Throws InvalidMode for modes outside {1, 2, 3}.
Matrix unfold(const Tensor3& t, int mode);

// Sample covariance across columns: each column is one observation, rows are
// mean-centred, normalised by 1/(m-1) and symmetrised. Needs m >= 2.
Matrix covariance(const Matrix& m);

// Number of eigenvalues above tol_rel * lambda_max; 0 for the zero matrix.
// Throws NonSymmetric (asymmetry > 1e-12 relative) or NotPSD
// (an eigenvalue below -1e-8 * lambda_max).
int numerical_rank(const Matrix& s, double tol_rel = kDefaultRankTol);

std::array<Matrix, 3> covariance_triple(const Tensor3& t);

RankTuple rank_tuple(const Tensor3& t, double tol_rel = kDefaultRankTol);

std::vector<RankTuple> rank_tuples(const LatentBatch& batch, double tol_rel = kDefaultRankTol);

struct StrataHistogram {
  std::string group_id;
  std::array<std::map<int, std::size_t>, 3> counts;  // per mode: rank -> occurrences
};

StrataHistogram strata_histogram(const LatentBatch& batch, double tol_rel = kDefaultRankTol);
StrataHistogram strata_histogram(const std::string& group_id, const std::vector<RankTuple>& ranks);

}  // namespace mprobe

#endif  // MPROBE_UNFOLD_COV_HPP
