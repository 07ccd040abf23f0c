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

// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "error.hpp"
#include "fileio.hpp"
#include "hilbert.hpp"
#include "pipeline.hpp"
#include "spsd_geometry.hpp"
#include "synth.hpp"
#include "unfold_cov.hpp"

using namespace mprobe;
namespace fs = std::filesystem;

namespace {

// Pinned tolerances and budgets.
constexpr double kRankOracleTol = 1e-10;
constexpr double kRankOracleBudgetS = 60.0;
constexpr double kCapBudgetS = 30.0;
constexpr double kPsdSlack = 1e-8;
constexpr double kIdentityRelTol = 1e-8;
constexpr double kTriangleSlack = 1e-10;
constexpr double kGrassmannTol = 1e-8;
constexpr double kVfReconTol = 1e-10;
constexpr double kVfDistTol = 1e-8;
constexpr double kAngleTol = 1e-6;
constexpr double kPipelineBudgetS = 600.0;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  bool pass = true;
  std::string detail;
};

int failures = 0;

void report(const char* name, const std::function<Outcome()>& body) {
  Outcome o;
  const auto t0 = Clock::now();
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  std::printf("%s  %-28s %s [%.1fs]\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str(), seconds_since(t0));
  std::fflush(stdout);
  if (!o.pass) ++failures;
}

std::string fmt(const char* f, double a, double b = 0.0) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

int uniform_int(Rng& rng, int lo, int hi) {
  return lo + static_cast<int>(rng.uniform() * (hi - lo + 1));
}

// Canonical random point with shape n and ranks r; R entries log-uniform in [e^-2, e^2].
PMPoint random_point(const std::array<int, 3>& n, const std::array<int, 3>& r, Rng& rng) {
  PMPoint p;
  for (int i = 0; i < 3; ++i) {
    p.factors[i].u = random_orthonormal(n[i], r[i], rng);
    p.factors[i].r_diag = Vector(r[i]);
    for (int k = 0; k < r[i]; ++k) p.factors[i].r_diag(k) = std::exp(4.0 * rng.uniform() - 2.0);
  }
  p.ranks = {r[0], r[1], r[2], kDefaultRankTol};
  return p;
}

MetricParams random_metric(Rng& rng) {
  MetricParams mp;
  for (int i = 0; i < 3; ++i) {
    mp.weights[i] = 0.25 + 1.75 * rng.uniform();
    mp.lambdas[i] = 0.1 + 2.9 * rng.uniform();
  }
  return mp;
}

Outcome rank_oracle() {
  Rng rng(101);
  int exact = 0, total = 0;
  std::string first_miss;
  const auto t0 = Clock::now();
  while (total < 200) {
    Shape3 shape;
    if (total < 2) {
      shape = {7, 7, 128};
    } else {
      shape = {static_cast<std::size_t>(uniform_int(rng, 2, 7)), static_cast<std::size_t>(uniform_int(rng, 2, 7)),
               static_cast<std::size_t>(uniform_int(rng, 2, 128))};
    }
    const std::array<int, 3> n{static_cast<int>(shape.n1), static_cast<int>(shape.n2), static_cast<int>(shape.n3)};
    // Planted ranks stay below the centring cap m_i - 1 so they are recoverable.
    std::array<int, 3> cap{};
    for (int i = 0; i < 3; ++i) cap[i] = std::min(n[i], n[(i + 1) % 3] * n[(i + 2) % 3] - 1);
    std::array<int, 3> r{};
    if (total == 0) {
      r = {7, 7, 48};
    } else {
      for (int i = 0; i < 3; ++i) r[i] = uniform_int(rng, 1, cap[i]);
    }
    TuckerSpec spec{shape, r, mix_seed(7, static_cast<std::uint64_t>(total))};
    if (r[0] > r[1] * r[2] || r[1] > r[0] * r[2] || r[2] > r[0] * r[1]) continue;
    const RankTuple got = rank_tuple(tucker_random(spec), kRankOracleTol);
    ++total;
    if (got == RankTuple{r[0], r[1], r[2]}) {
      ++exact;
    } else if (first_miss.empty()) {
      first_miss = " first miss at shape " + to_string(shape);
    }
  }
  const double t = seconds_since(t0);
  return {exact == total && t < kRankOracleBudgetS,
          std::to_string(exact) + "/" + std::to_string(total) + " exact, " + fmt("%.2fs (budget %.0fs)", t, kRankOracleBudgetS) +
              first_miss};
}

Outcome covariance_cap() {
  Rng rng(202);
  int max1 = 0, max2 = 0, max3 = 0;
  const auto t0 = Clock::now();
  for (int k = 0; k < 100; ++k) {
    const Matrix g = random_gaussian(7, 7 * 128, rng);
    const Tensor3 t({7, 7, 128}, std::vector<double>(g.data(), g.data() + g.size()));
    const RankTuple r = rank_tuple(t);
    max1 = std::max(max1, r.r1);
    max2 = std::max(max2, r.r2);
    max3 = std::max(max3, r.r3);
  }
  const double t = seconds_since(t0);
  return {max1 <= 7 && max2 <= 7 && max3 <= 48 && t < kCapBudgetS,
          "max ranks (" + std::to_string(max1) + "," + std::to_string(max2) + "," + std::to_string(max3) +
              "), caps (7,7,48), " + fmt("%.2fs (budget %.0fs)", t, kCapBudgetS)};
}

Outcome kernel_psd() {
  double worst = 1.0;  // smallest lambda_min / lambda_max seen
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(mix_seed(303, seed));
    const MetricParams mp = random_metric(rng);
    std::vector<PMPoint> pts;
    // Real tensors of mixed Tucker rank, regularised to a common target.
    for (int k = 0; k < 50; ++k) {
      const int r1 = uniform_int(rng, 3, 7), r2 = uniform_int(rng, 3, 7);
      const std::array<int, 3> rr{r1, r2, uniform_int(rng, std::max(r1, r2), std::min(48, r1 * r2))};
      const TuckerSpec spec{{7, 7, 128}, rr, rng.next_u64()};
      pts.push_back(pm_point(tucker_random(spec), {7, 7, 48}, mp));
    }
    const KernelGram g = gram_matrix(pts, mp);
    const Vector ev = Eigen::SelfAdjointEigenSolver<Matrix>(g.k, Eigen::EigenvaluesOnly).eigenvalues();
    worst = std::min(worst, ev.minCoeff() / ev.maxCoeff());
  }
  return {worst >= -kPsdSlack, fmt("worst lambda_min/lambda_max = %.3e (floor -%.0e)", worst, kPsdSlack)};
}

Outcome distance_identity() {
  Rng rng(404);
  double worst_rel = 0.0, worst_tri = -1e300;
  for (int k = 0; k < 1000; ++k) {
    const std::array<int, 3> n{uniform_int(rng, 2, 7), uniform_int(rng, 2, 7), uniform_int(rng, 2, 40)};
    const std::array<int, 3> r{uniform_int(rng, 1, n[0]), uniform_int(rng, 1, n[1]), uniform_int(rng, 1, n[2])};
    const MetricParams mp = random_metric(rng);
    const PMPoint p = random_point(n, r, rng), q = random_point(n, r, rng);
    const double lhs = kernel(p, p, mp) + kernel(q, q, mp) - 2.0 * kernel(p, q, mp);
    double rhs = 0.0;
    for (int i = 0; i < 3; ++i) {
      const auto& a = p.factors[i];
      const auto& b = q.factors[i];
      const Matrix dp = a.u * a.u.transpose() - b.u * b.u.transpose();
      const Vector dl = a.r_diag.array().log().matrix() - b.r_diag.array().log().matrix();
      rhs += mp.weights[i] * (dp.squaredNorm() + mp.lambdas[i] * dl.squaredNorm());
    }
    worst_rel = std::max(worst_rel, std::abs(lhs - rhs) / std::abs(rhs));

    const PMPoint s = random_point(n, r, rng);
    const double excess = geodesic_distance(p, s, mp) - geodesic_distance(p, q, mp) - geodesic_distance(q, s, mp);
    worst_tri = std::max(worst_tri, excess);
  }
  return {worst_rel <= kIdentityRelTol && worst_tri <= kTriangleSlack,
          fmt("max rel err %.2e, max triangle excess %.2e", worst_rel, worst_tri)};
}

Outcome grassmann() {
  Rng rng(505);
  double worst = 0.0;
  for (int k = 0; k < 200; ++k) {
    const int n = uniform_int(rng, 2, 128);
    const int r = uniform_int(rng, 1, std::min(n, 48));
    const Matrix u = random_orthonormal(n, r, rng), v = random_orthonormal(n, r, rng);
    const double proj = 0.5 * (u * u.transpose() - v * v.transpose()).squaredNorm();
    double sin2 = 0.0;
    for (double th : principal_angles(u, v)) sin2 += std::sin(th) * std::sin(th);
    worst = std::max(worst, std::abs(proj - sin2));
  }
  return {worst <= kGrassmannTol, fmt("max abs err %.2e over 200 pairs", worst)};
}

Outcome vf_isometry() {
  Rng rng(606);
  double worst_recon = 0.0, worst_dist = 0.0;
  for (int n_points : {2, 50, 200, 500}) {
    const MetricParams mp = random_metric(rng);
    std::vector<PMPoint> pts;
    for (int k = 0; k < n_points; ++k) pts.push_back(random_point({7, 7, 32}, {4, 5, 12}, rng));
    const KernelGram g = gram_matrix(pts, mp);
    const VirtualFeatures vf = virtual_features(g);
    worst_recon = std::max(worst_recon, (vf.vf.transpose() * vf.vf - g.k).norm() / g.k.norm());
    for (Eigen::Index a = 0; a < n_points; ++a) {
      for (Eigen::Index b = a + 1; b < n_points; ++b) {
        const double dv = (vf.vf.col(a) - vf.vf.col(b)).norm();
        worst_dist = std::max(worst_dist, std::abs(dv - kernel_distance(g, a, b)));
      }
    }
  }
  return {worst_recon <= kVfReconTol && worst_dist <= kVfDistTol,
          fmt("max rel recon err %.2e, max distance err %.2e (N up to 500)", worst_recon, worst_dist)};
}

Outcome planted_angles() {
  const double pi = std::numbers::pi;
  struct Case {
    std::vector<PlantedGroup> groups;
  };
  std::vector<Case> cases{
      {{{"ref", 2, {}}, {"other", 2, {10 * pi / 180, 30 * pi / 180}}}},
      {{{"ref", 4, {}}, {"other", 4, {0.0, 0.0, 0.0, 0.0}}}},
      {{{"ref", 3, {}}, {"other", 3, {pi / 2, pi / 2, pi / 2}}}},
      {{{"ref", 3, {}}, {"other", 5, {1e-3, 0.7, 1.4}}}},
      {{{"ref", 6, {}}, {"other", 2, {0.05, pi / 2}}}},
      {{{"ref", 5, {}}, {"other", 5, {0.1, 0.3, 0.6, 0.9, 1.2}}}},
  };
  double worst = 0.0;
  int n_cases = 0;
  bool dims_ok = true;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    for (const auto& c : cases) {
      const PlantedDataset ds = planted_subspace_dataset(30, c.groups, mix_seed(707, seed));
      const MetricParams mp;
      const KernelGram g = gram_matrix(ds.points, mp, ds.point_index);
      const VirtualFeatures vf = virtual_features(g);
      const SubspaceBasis ref = group_basis(vf, g, "ref", 1e-6);
      const SubspaceBasis other = group_basis(vf, g, "other", 1e-6);
      dims_ok = dims_ok && ref.d == c.groups[0].dim && other.d == c.groups[1].dim;
      const auto got = principal_angles(ref, other).angles;
      const auto& want = c.groups[1].angles;
      if (got.size() != want.size()) return {false, "angle count mismatch"};
      for (std::size_t i = 0; i < got.size(); ++i) worst = std::max(worst, std::abs(got[i] - want[i]));
      ++n_cases;
    }
  }
  return {worst <= kAngleTol && dims_ok,
          fmt("max abs err %.2e rad over %.0f datasets", worst, n_cases) + (dims_ok ? "" : ", dimension mismatch")};
}

Outcome pipeline_scale() {
  const fs::path root = fs::temp_directory_path() / ("mprobe-acceptance-" + std::to_string(std::random_device{}()));
  struct Cleanup {
    fs::path p;
    ~Cleanup() {
      std::error_code ec;
      fs::remove_all(p, ec);
    }
  } cleanup{root};

  // 11 groups x 300 tensors, float32 on disk; groups drift through lower Tucker ranks.
  const std::vector<std::array<int, 3>> tuples{{7, 7, 48}, {6, 7, 40}, {7, 5, 30}, {5, 5, 20}, {4, 6, 24}, {3, 4, 12}};
  std::vector<SynthGroup> groups;
  for (int g = 0; g < 11; ++g) {
    SynthGroup sg;
    sg.group_id = "g" + std::to_string(g);
    sg.noise_level = 0.01 * g;
    sg.count = 300;
    for (std::size_t t = 0; t < tuples.size(); ++t) sg.rank_cycle.push_back(tuples[(t + g) % tuples.size()]);
    groups.push_back(sg);
  }
  const auto t0 = Clock::now();
  RunConfig cfg;
  cfg.manifest = write_tucker_dataset(root / "data", "synthetic", {7, 7, 128}, groups, 808, DType::Float32);
  cfg.out_dir = root / "out";
  const double t_data = seconds_since(t0);
  for (Stage s : {Stage::Ranks, Stage::Embed, Stage::Angles, Stage::Report}) run_stage(s, cfg);
  const double t = seconds_since(t0);

  const auto report = nlohmann::json::parse(read_file(cfg.out_dir / files::kReport));
  std::size_t n_points = 0;
  const auto meta = nlohmann::json::parse(read_file(cfg.out_dir / files::kGramMeta));
  n_points = meta.at("n_points").get<std::size_t>();
  const bool complete = report.at("groups").size() == 11 && n_points == 3300;
  return {complete && t < kPipelineBudgetS,
          std::to_string(n_points) + " points, " + fmt("%.1fs end-to-end incl. %.1fs data generation", t, t_data) +
              fmt(" (budget %.0fs)", kPipelineBudgetS)};
}

}  // namespace

int main() {
  report("rank-oracle", rank_oracle);
  report("covariance-cap", covariance_cap);
  report("kernel-psd", kernel_psd);
  report("distance-kernel-identity", distance_identity);
  report("grassmann-cross-check", grassmann);
  report("vf-isometry", vf_isometry);
  report("principal-angle-recovery", planted_angles);
  report("gram-scale-pipeline", pipeline_scale);
  std::printf("%s: %d failing criteria\n", failures == 0 ? "ACCEPTED" : "REJECTED", failures);
  return failures == 0 ? 0 : 1;
}
