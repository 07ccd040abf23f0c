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

#include "synth.hpp"

#include <cmath>
#include <numbers>

#include "error.hpp"
#include "tensor_store.hpp"

namespace mprobe {

Rng::Rng(std::uint64_t seed) : engine_(seed) {}

std::uint64_t Rng::next_u64() { return engine_(); }

double Rng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = 1.0 - uniform();  // (0, 1]
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_ = radius * std::sin(angle);
  has_spare_ = true;
  return radius * std::cos(angle);
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) noexcept {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

Matrix random_gaussian(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  Matrix m(rows, cols);
  // Row-major fill order keeps the stream layout independent of Eigen's storage.
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = rng.normal();
  return m;
}

Matrix random_orthonormal(Eigen::Index n, Eigen::Index r, Rng& rng) {
  const Matrix g = random_gaussian(n, r, rng);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ() * Matrix::Identity(n, r);
  const Matrix upper = qr.matrixQR().topRows(r).triangularView<Eigen::Upper>();
  for (Eigen::Index k = 0; k < r; ++k) {
    if (upper(k, k) < 0.0) q.col(k) *= -1.0;
  }
  return q;
}

void TuckerSpec::validate() const {
  const std::size_t n[3] = {shape.n1, shape.n2, shape.n3};
  for (int i = 0; i < 3; ++i) {
    if (ranks[i] < 1 || static_cast<std::size_t>(ranks[i]) > n[i]) {
      throw Error(ErrorKind::InfeasibleRanks, "rank " + std::to_string(ranks[i]) + " outside [1, " +
                                                  std::to_string(n[i]) + "] for mode " + std::to_string(i + 1));
    }
  }
  for (int i = 0; i < 3; ++i) {
    const int j = (i + 1) % 3;
    const int k = (i + 2) % 3;
    if (ranks[i] > ranks[j] * ranks[k]) {
      throw Error(ErrorKind::InfeasibleRanks, "multilinear rank r" + std::to_string(i + 1) + " = " +
                                                  std::to_string(ranks[i]) + " exceeds the product of the others");
    }
  }
}

Tensor3 tucker_random(const TuckerSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);
  const auto [r1, r2, r3] = spec.ranks;
  const auto [n1, n2, n3] = spec.shape;
  // core(a, b, c) stored at (a * r2 + b) * r3 + c
  std::vector<double> core(static_cast<std::size_t>(r1 * r2 * r3));
  for (double& x : core) x = rng.normal();
  const Matrix a = random_orthonormal(static_cast<Eigen::Index>(n1), r1, rng);
  const Matrix b = random_orthonormal(static_cast<Eigen::Index>(n2), r2, rng);
  const Matrix c = random_orthonormal(static_cast<Eigen::Index>(n3), r3, rng);

  // Contract mode 3: (r1*r2) x r3 times r3 x n3.
  const Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> core12_3(
      core.data(), r1 * r2, r3);
  const Matrix t3 = core12_3 * c.transpose();  // rows (a, b), cols k
  // Contract mode 2, then mode 1.
  Tensor3 out(spec.shape);
  std::vector<double> t23(static_cast<std::size_t>(r1) * n2 * n3, 0.0);  // (a, j, k)
  for (int ai = 0; ai < r1; ++ai)
    for (std::size_t j = 0; j < n2; ++j)
      for (int bi = 0; bi < r2; ++bi) {
        const double bj = b(static_cast<Eigen::Index>(j), bi);
        for (std::size_t k = 0; k < n3; ++k) {
          t23[(static_cast<std::size_t>(ai) * n2 + j) * n3 + k] += bj * t3(ai * r2 + bi, static_cast<Eigen::Index>(k));
        }
      }
  for (std::size_t i = 0; i < n1; ++i)
    for (int ai = 0; ai < r1; ++ai) {
      const double ai_coef = a(static_cast<Eigen::Index>(i), ai);
      for (std::size_t j = 0; j < n2; ++j)
        for (std::size_t k = 0; k < n3; ++k) out(i, j, k) += ai_coef * t23[(static_cast<std::size_t>(ai) * n2 + j) * n3 + k];
    }
  return out;
}

std::array<int, 3> expected_covariance_ranks(const TuckerSpec& spec) {
  const auto& s = spec.shape;
  const std::size_t obs[3] = {s.n2 * s.n3, s.n3 * s.n1, s.n1 * s.n2};
  std::array<int, 3> out{};
  for (int i = 0; i < 3; ++i) out[i] = std::min(spec.ranks[i], static_cast<int>(obs[i]) - 1);
  return out;
}

LatentBatch tucker_batch(const std::string& group_id, const Shape3& shape,
                         const std::vector<std::array<int, 3>>& rank_cycle, std::size_t count, std::uint64_t seed) {
  if (rank_cycle.empty()) throw Error(ErrorKind::InfeasibleRanks, "empty rank cycle");
  LatentBatch b;
  b.group_id = group_id;
  b.shape = shape;
  b.tensors.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    b.tensors.push_back(tucker_random({shape, rank_cycle[k % rank_cycle.size()], mix_seed(seed, k)}));
  }
  return b;
}

std::filesystem::path write_tucker_dataset(const std::filesystem::path& dir, const std::string& model_id,
                                           const Shape3& shape, const std::vector<SynthGroup>& groups,
                                           std::uint64_t seed, DType dtype) {
  std::filesystem::create_directories(dir);
  DatasetManifest m;
  m.model_id = model_id;
  m.latent_shape = shape;
  m.dtype = dtype;
  m.base_dir = dir;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    const auto& spec = groups[g];
    m.groups.push_back({spec.group_id, spec.noise_level, spec.group_id + ".npy", spec.count});
  }
  validate_manifest_fields(m);
  for (std::size_t g = 0; g < groups.size(); ++g) {
    const auto& spec = groups[g];
    const LatentBatch b = tucker_batch(spec.group_id, shape, spec.rank_cycle, spec.count, mix_seed(seed, 1000 + g));
    write_batch(dir / (spec.group_id + ".npy"), b, dtype);
  }
  const auto path = dir / "manifest.json";
  save_manifest(path, m);
  return path;
}

PlantedDataset planted_subspace_dataset(std::size_t n_per_group, const std::vector<PlantedGroup>& groups,
                                        std::uint64_t seed) {
  if (groups.empty()) throw Error(ErrorKind::InfeasibleSpec, "no groups");
  int total = 0;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    const auto& spec = groups[g];
    if (spec.dim < 1) throw Error(ErrorKind::InfeasibleSpec, spec.group_id + ": dim must be >= 1");
    if (n_per_group < static_cast<std::size_t>(spec.dim)) {
      throw Error(ErrorKind::InfeasibleSpec, spec.group_id + ": fewer points than dimensions");
    }
    if (g > 0) {
      const auto m = static_cast<std::size_t>(std::min(spec.dim, groups[0].dim));
      if (spec.angles.size() != m) {
        throw Error(ErrorKind::InfeasibleSpec, spec.group_id + ": expected " + std::to_string(m) + " angles");
      }
      for (double theta : spec.angles) {
        if (!(theta >= 0.0 && theta <= std::numbers::pi / 2)) {
          throw Error(ErrorKind::InfeasibleSpec, spec.group_id + ": angle outside [0, pi/2]");
        }
      }
    }
    total += spec.dim;
  }

  // Columns [0, d0) are reference directions; each later group takes `dim`
  // fresh columns for its rotation partners and extra atoms.
  Rng rng(seed);
  std::array<Matrix, 3> basis;
  for (auto& e : basis) e = random_orthonormal(total, total, rng);

  PlantedDataset out;
  const int d0 = groups[0].dim;
  int next_fresh = d0;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    const auto& spec = groups[g];
    std::vector<std::array<Vector, 3>> atoms;
    for (int j = 0; j < spec.dim; ++j) {
      std::array<Vector, 3> atom;
      for (int mode = 0; mode < 3; ++mode) {
        const Matrix& e = basis[mode];
        if (g == 0) {
          atom[mode] = e.col(j);
        } else if (j < d0) {
          const double cos_phi = std::sqrt(std::cos(spec.angles[static_cast<std::size_t>(j)]));
          const double sin_phi = std::sqrt(std::max(0.0, 1.0 - cos_phi * cos_phi));
          atom[mode] = cos_phi * e.col(j) + sin_phi * e.col(next_fresh + j);
        } else {
          atom[mode] = e.col(next_fresh + j);
        }
      }
      atoms.push_back(std::move(atom));
    }
    if (g > 0) next_fresh += spec.dim;

    for (std::size_t k = 0; k < n_per_group; ++k) {
      const auto& atom = atoms[k % atoms.size()];
      PMPoint p;
      for (int mode = 0; mode < 3; ++mode) {
        p.factors[mode].u = atom[mode];
        p.factors[mode].r_diag = Vector::Ones(1);
      }
      p.ranks = {1, 1, 1, kDefaultRankTol};
      out.points.push_back(std::move(p));
      out.point_index.push_back({spec.group_id, k});
    }
  }
  return out;
}

}  // namespace mprobe
