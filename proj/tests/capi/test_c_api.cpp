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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "mprobe/mprobe.h"

namespace fs = std::filesystem;

namespace {

std::vector<double> random_tensor(const size_t shape[3], unsigned seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> nd;
  std::vector<double> t(shape[0] * shape[1] * shape[2]);
  for (double& x : t) x = nd(gen);
  return t;
}

struct Scratch {
  fs::path path = fs::temp_directory_path() / ("mprobe-capi-" + std::to_string(std::random_device{}()));
  Scratch() { fs::create_directories(path); }
  ~Scratch() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
};

}  // namespace

TEST_CASE("version and defaults") {
  CHECK(std::string(mprobe_version()) == "1.0.0");
  mprobe_metric m;
  mprobe_metric_default(&m);
  CHECK(m.weights[2] == 1.0);
  CHECK(m.lambdas[0] == 1.0);
  CHECK(m.eps_reg == 1e-6);
}

TEST_CASE("rank tuple through the C API") {
  const size_t shape[3] = {7, 7, 128};
  const auto t = random_tensor(shape, 1);
  int32_t r[3];
  REQUIRE(mprobe_rank_tuple(t.data(), shape, 1e-7, r) == MPROBE_OK);
  CHECK(r[0] == 7);
  CHECK(r[1] == 7);
  CHECK(r[2] == 48);

  CHECK(mprobe_rank_tuple(nullptr, shape, 1e-7, r) == MPROBE_ERR_CONFIG);
  const size_t bad[3] = {0, 7, 7};
  CHECK(mprobe_rank_tuple(t.data(), bad, 1e-7, r) == MPROBE_ERR_DATA);
  CHECK(std::string(mprobe_last_error_kind()) == "ShapeMismatch");
  CHECK(std::string(mprobe_last_error()).size() > 0);
}

TEST_CASE("points, kernel, distance and Gram") {
  const size_t shape[3] = {5, 4, 10};
  const int32_t target[3] = {3, 3, 6};
  mprobe_metric m;
  mprobe_metric_default(&m);
  std::vector<mprobe_point*> pts(4, nullptr);
  for (unsigned i = 0; i < 4; ++i) {
    const auto t = random_tensor(shape, 10 + i);
    REQUIRE(mprobe_point_create(t.data(), shape, target, &m, 1e-7, &pts[i]) == MPROBE_OK);
  }
  int32_t r[3];
  REQUIRE(mprobe_point_ranks(pts[0], r) == MPROBE_OK);
  CHECK(r[2] == 10);

  double kpp = 0.0, kpq = 0.0, kqq = 0.0, d = 0.0, self = 1.0;
  REQUIRE(mprobe_kernel(pts[0], pts[0], &m, &kpp) == MPROBE_OK);
  REQUIRE(mprobe_kernel(pts[0], pts[1], &m, &kpq) == MPROBE_OK);
  REQUIRE(mprobe_kernel(pts[1], pts[1], &m, &kqq) == MPROBE_OK);
  REQUIRE(mprobe_geodesic_distance(pts[0], pts[0], &m, &self) == MPROBE_OK);
  CHECK(self == 0.0);
  mprobe_metric half = m;
  for (double& l : half.lambdas) l *= 0.5;
  REQUIRE(mprobe_geodesic_distance(pts[0], pts[1], &half, &d) == MPROBE_OK);
  CHECK(kpp + kqq - 2 * kpq == doctest::Approx(2 * d * d).epsilon(1e-9));

  std::vector<double> gram(16);
  REQUIRE(mprobe_gram_matrix(pts.data(), 4, &m, gram.data()) == MPROBE_OK);
  CHECK(gram[1] == doctest::Approx(kpq).epsilon(1e-12));
  CHECK(gram[1] == gram[4]);

  size_t dim = 0;
  REQUIRE(mprobe_subspace_dimension(gram.data(), 4, 1e-12, &dim) == MPROBE_OK);
  CHECK(dim == 4);

  // Incompatible target ranks.
  const int32_t other[3] = {2, 3, 6};
  mprobe_point* odd = nullptr;
  const auto t = random_tensor(shape, 99);
  REQUIRE(mprobe_point_create(t.data(), shape, other, &m, 1e-7, &odd) == MPROBE_OK);
  double out = 0.0;
  CHECK(mprobe_kernel(pts[0], odd, &m, &out) == MPROBE_ERR_DATA);
  CHECK(std::string(mprobe_last_error_kind()) == "FactorShapeMismatch");

  const int32_t too_big[3] = {6, 3, 6};
  mprobe_point* none = nullptr;
  CHECK(mprobe_point_create(t.data(), shape, too_big, &m, 1e-7, &none) == MPROBE_ERR_DATA);
  CHECK(none == nullptr);

  mprobe_point_destroy(odd);
  for (auto* p : pts) mprobe_point_destroy(p);
  mprobe_point_destroy(nullptr);
}

TEST_CASE("numerical errors map to status 4") {
  const double k[4] = {1.0, 0.0, 0.0, -1.0};
  size_t d = 0;
  CHECK(mprobe_subspace_dimension(k, 2, 1e-3, &d) == MPROBE_ERR_NUMERICAL);
  CHECK(std::string(mprobe_last_error_kind()) == "NotPSD");
}

TEST_CASE("principal angles through the C API") {
  const double t = 0.3;
  // Row-major 3 x 1 and 3 x 1.
  const double q1[3] = {1.0, 0.0, 0.0};
  const double q2[3] = {std::cos(t), std::sin(t), 0.0};
  double a = 0.0;
  REQUIRE(mprobe_principal_angles(q1, 3, 1, q2, 1, &a) == MPROBE_OK);
  CHECK(a == doctest::Approx(t).epsilon(1e-12));
}

TEST_CASE("stages on a synthetic dataset") {
  Scratch s;
  const size_t shape[3] = {4, 4, 9};
  const double noise[3] = {0.0, 0.05, 0.1};
  const int32_t ranks[6] = {2, 2, 3, 3, 3, 5};
  REQUIRE(mprobe_synth_tucker_dataset(s.path.c_str(), "capi", shape, noise, 3, 6, ranks, 2, 7, 0) == MPROBE_OK);

  mprobe_run_config* cfg = nullptr;
  REQUIRE(mprobe_run_config_create(&cfg) == MPROBE_OK);
  const std::string manifest = (s.path / "manifest.json").string();
  const std::string out = (s.path / "out").string();
  CHECK(mprobe_run_config_set_manifest(cfg, manifest.c_str()) == MPROBE_OK);
  CHECK(mprobe_run_config_set_out_dir(cfg, out.c_str()) == MPROBE_OK);
  CHECK(mprobe_run_config_set_dim_threshold(cfg, 1e-6) == MPROBE_OK);

  CHECK(mprobe_run_stage(cfg, MPROBE_STAGE_REPORT) == MPROBE_ERR_CONFIG);
  CHECK(std::string(mprobe_last_error_kind()) == "MissingStageOutput");
  for (auto st : {MPROBE_STAGE_RANKS, MPROBE_STAGE_EMBED, MPROBE_STAGE_ANGLES, MPROBE_STAGE_REPORT}) {
    CHECK(mprobe_run_stage(cfg, st) == MPROBE_OK);
  }
  CHECK(fs::exists(s.path / "out" / "report.json"));

  CHECK(mprobe_run_config_set_tol_rel(cfg, -1.0) == MPROBE_OK);
  CHECK(mprobe_run_stage(cfg, MPROBE_STAGE_RANKS) == MPROBE_ERR_CONFIG);
  CHECK(mprobe_run_config_set_manifest(cfg, nullptr) == MPROBE_ERR_CONFIG);
  mprobe_run_config_destroy(cfg);

  const int32_t infeasible[3] = {5, 1, 1};
  CHECK(mprobe_synth_tucker_dataset((s.path / "bad").c_str(), "x", shape, noise, 1, 2, infeasible, 1, 1, 0) ==
        MPROBE_ERR_DATA);
}
