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

#ifndef MPROBE_SYNTH_HPP
#define MPROBE_SYNTH_HPP

// Seeded generators for oracle datasets: Tucker tensors with planted
// multilinear ranks, and PMPoint sets whose kernel embeddings realise
// planted subspace dimensions and principal angles.

#include <array>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "hilbert.hpp"
#include "linalg.hpp"
#include "npy.hpp"
#include "spsd_geometry.hpp"
#include "tensor.hpp"

namespace mprobe {

// mt19937_64 (fully specified by the standard) with hand-rolled uniform and
// Box-Muller normal draws, so streams are identical on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);
  double uniform();  // [0, 1), 53-bit resolution
  double normal();   // standard normal
  std::uint64_t next_u64();

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

// splitmix64 finaliser; derives independent sub-seeds.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) noexcept;

Matrix random_gaussian(Eigen::Index rows, Eigen::Index cols, Rng& rng);
// n x r with orthonormal columns (Householder QR of a Gaussian draw).
Matrix random_orthonormal(Eigen::Index n, Eigen::Index r, Rng& rng);

struct TuckerSpec {
  Shape3 shape;
  std::array<int, 3> ranks{1, 1, 1};
  std::uint64_t seed = 0;

  // 1 <= r_i <= n_i and r_i <= r_j * r_k; throws InfeasibleRanks.
  void validate() const;
};

// Gaussian r1 x r2 x r3 core multiplied along each mode by a random n_i x r_i
// orthonormal factor. Deterministic per seed.
Tensor3 tucker_random(const TuckerSpec& spec);

// Rank tuple expected from rank_tuple() for a generic Tucker tensor:
// min(r_i, m_i - 1) where m_i is the number of covariance observations.
std::array<int, 3> expected_covariance_ranks(const TuckerSpec& spec);

// Tensor k uses rank_cycle[k % size] and seed mix_seed(seed, k).
LatentBatch tucker_batch(const std::string& group_id, const Shape3& shape,
                         const std::vector<std::array<int, 3>>& rank_cycle, std::size_t count, std::uint64_t seed);

struct SynthGroup {
  std::string group_id;
  double noise_level = 0.0;
  std::size_t count = 1;
  std::vector<std::array<int, 3>> rank_cycle;
};

// Writes <dir>/<group_id>.npy per group and <dir>/manifest.json; returns the manifest path.
std::filesystem::path write_tucker_dataset(const std::filesystem::path& dir, const std::string& model_id,
                                           const Shape3& shape, const std::vector<SynthGroup>& groups,
                                           std::uint64_t seed, DType dtype);

struct PlantedGroup {
  std::string group_id;
  int dim = 1;
  // Principal angles against the first (reference) group, min(dim, ref dim)
  // entries in [0, pi/2]. Ignored for the reference group itself.
  std::vector<double> angles;
};

struct PlantedDataset {
  std::vector<PMPoint> points;
  std::vector<PointId> point_index;
};

// Every group is built from `dim` mutually orthogonal rank-1 "atoms" (R = 1);
// point k of a group reuses atom k % dim. Atom j of a non-reference group is
// the reference atom j rotated in a fresh plane by phi_j with
// cos^2(phi_j) = cos(theta_j), which makes the kernel-space principal angle
// exactly theta_j. Throws InfeasibleSpec for bad dims, angle counts or ranges.
PlantedDataset planted_subspace_dataset(std::size_t n_per_group, const std::vector<PlantedGroup>& groups,
                                        std::uint64_t seed);

}  // namespace mprobe

#endif  // MPROBE_SYNTH_HPP
