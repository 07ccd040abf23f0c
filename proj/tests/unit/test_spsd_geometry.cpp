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

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "error.hpp"
#include "oracles.hpp"
#include "spsd_geometry.hpp"

using namespace mprobe;

namespace {

bool orthonormal_columns(const Matrix& u, double tol) {
  return (u.transpose() * u - Matrix::Identity(u.cols(), u.cols())).norm() <= tol;
}

ErrorKind kind_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  return ErrorKind::InvalidArgument;
}

}  // namespace

TEST_CASE("regularize_and_decompose") {
  SUBCASE("identity") {
    const SPSDFactor f = regularize_and_decompose(Matrix::Identity(7, 7), 7, 1e-6);
    CHECK(orthonormal_columns(f.u, 1e-12));
    CHECK((f.r_diag - Vector::Ones(7)).norm() < 1e-14);
    CHECK((f.reconstruct() - Matrix::Identity(7, 7)).norm() < 1e-13);
  }
  SUBCASE("diag(4, 1, 0) floors the zero eigenvalue") {
    Matrix s = Matrix::Zero(3, 3);
    s.diagonal() << 4, 1, 0;
    const SPSDFactor f = regularize_and_decompose(s, 3, 1e-6);
    CHECK(f.r_diag(0) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(f.r_diag(1) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(f.r_diag(2) == doctest::Approx(std::sqrt(4e-6)).epsilon(1e-12));
    // Largest-magnitude entry of each eigenvector is positive.
    for (int k = 0; k < 3; ++k) {
      Eigen::Index at = 0;
      f.u.col(k).cwiseAbs().maxCoeff(&at);
      CHECK(f.u(at, k) > 0.0);
    }
  }
  SUBCASE("rank-30 PSD regularised to rank 48") {
    std::mt19937_64 gen(11);
    const Matrix s = oracle::random_psd(128, 30, gen);
    const SPSDFactor f = regularize_and_decompose(s, 48, 1e-6);
    CHECK(f.rank() == 48);
    CHECK(orthonormal_columns(f.u, 1e-10));
    Eigen::SelfAdjointEigenSolver<Matrix> es(s);
    const Matrix top = es.eigenvectors().rightCols(30);
    const Matrix rec = f.reconstruct();
    CHECK((top.transpose() * (rec - s) * top).norm() <= 1e-8 * s.norm());
    const double eps_abs = 1e-6 * std::max(es.eigenvalues().maxCoeff(), 1.0);
    for (int k = 30; k < 48; ++k) CHECK(f.r_diag(k) * f.r_diag(k) == doctest::Approx(eps_abs).epsilon(1e-12));
    for (int k = 1; k < 48; ++k) CHECK(f.r_diag(k) <= f.r_diag(k - 1));
  }
  SUBCASE("rank out of range") {
    CHECK(kind_of([] { regularize_and_decompose(Matrix::Identity(3, 3), 0, 1e-6); }) == ErrorKind::RankOutOfRange);
    CHECK(kind_of([] { regularize_and_decompose(Matrix::Identity(3, 3), 4, 1e-6); }) == ErrorKind::RankOutOfRange);
  }
}

TEST_CASE("pm_point of a zero tensor carries the eps-derived diagonal") {
  const MetricParams mp;
  const PMPoint p = pm_point(Tensor3({4, 3, 5}), {1, 1, 1}, mp);
  CHECK(p.ranks == RankTuple{0, 0, 0});
  for (const auto& f : p.factors) {
    REQUIRE(f.rank() == 1);
    CHECK(f.r_diag(0) == doctest::Approx(std::sqrt(1e-6)).epsilon(1e-12));
    CHECK(std::isfinite(log_spd(f.r_diag)(0)));
  }
  CHECK(kind_of([&] { pm_point(Tensor3({4, 3, 5}), {1, 4, 1}, mp); }) == ErrorKind::RankOutOfRange);
}

TEST_CASE("log_spd") {
  CHECK(log_spd(Vector::Ones(4)).isZero(0.0));
  Vector d(2);
  d << std::numbers::e, std::exp(2.0);
  const Vector l = log_spd(d);
  CHECK(l(0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(l(1) == doctest::Approx(2.0).epsilon(1e-15));
  Vector bad(2);
  bad << 1.0, 0.0;
  CHECK(kind_of([&] { log_spd(bad); }) == ErrorKind::NonPositiveDiagonal);
}

TEST_CASE("geodesic distance and kernel closed forms") {
  std::mt19937_64 gen(12);
  const std::array<int, 3> n{7, 7, 20}, r{3, 4, 6};
  const MetricParams mp;
  const PMPoint p = oracle::random_point(n, r, gen);
  CHECK(geodesic_distance(p, p, mp) == 0.0);

  // Same U, R_p = I, R_q = e I: d^2 = sum r_i.
  PMPoint a = p, b = p;
  for (int i = 0; i < 3; ++i) {
    a.factors[i].r_diag = Vector::Ones(r[i]);
    b.factors[i].r_diag = Vector::Constant(r[i], std::numbers::e);
  }
  CHECK(geodesic_distance_squared(a, b, mp) == doctest::Approx(3 + 4 + 6).epsilon(1e-13));

  // k(p, p) = sum w (r + lambda ||log R||^2).
  MetricParams weighted;
  weighted.weights = {0.5, 2.0, 1.5};
  weighted.lambdas = {3.0, 0.25, 1.0};
  double expected = 0.0;
  for (int i = 0; i < 3; ++i) {
    expected += weighted.weights[i] * (r[i] + weighted.lambdas[i] * log_spd(p.factors[i].r_diag).squaredNorm());
  }
  CHECK(kernel(p, p, weighted) == doctest::Approx(expected).epsilon(1e-13));

  // Orthogonal column spaces with R = I give k = 0.
  const Matrix q = oracle::orthonormal(20, 12, gen);
  PMPoint left, right;
  for (int i = 0; i < 3; ++i) {
    left.factors[i].u = q.block(0, 0, 20, 6);
    right.factors[i].u = q.block(0, 6, 20, 6);
    left.factors[i].r_diag = right.factors[i].r_diag = Vector::Ones(6);
  }
  CHECK(std::abs(kernel(left, right, mp)) < 1e-14);

  // Projection term identity for equal ranks: 1/2 ||dP||^2 = r - ||Up^T Uq||^2.
  const PMPoint x = oracle::random_point(n, r, gen), y = oracle::random_point(n, r, gen);
  for (int i = 0; i < 3; ++i) {
    const auto& fu = x.factors[i].u;
    const auto& gu = y.factors[i].u;
    const double half = 0.5 * (fu * fu.transpose() - gu * gu.transpose()).squaredNorm();
    CHECK(half == doctest::Approx(r[i] - (fu.transpose() * gu).squaredNorm()).epsilon(1e-12));
  }
}

TEST_CASE("mismatched factor shapes are rejected") {
  std::mt19937_64 gen(13);
  const MetricParams mp;
  const PMPoint p = oracle::random_point({5, 5, 9}, {2, 2, 3}, gen);
  const PMPoint q = oracle::random_point({5, 5, 9}, {2, 3, 3}, gen);
  CHECK(kind_of([&] { kernel(p, q, mp); }) == ErrorKind::FactorShapeMismatch);
  CHECK(kind_of([&] { geodesic_distance(p, q, mp); }) == ErrorKind::FactorShapeMismatch);
}

TEST_CASE("kernel matches the loop oracle and its feature map") {
  std::mt19937_64 gen(14);
  MetricParams mp;
  mp.weights = {1.0, 0.3, 2.0};
  mp.lambdas = {0.7, 1.0, 5.0};
  for (int trial = 0; trial < 10; ++trial) {
    const PMPoint p = oracle::random_point({6, 5, 16}, {3, 2, 7}, gen);
    const PMPoint q = oracle::random_point({6, 5, 16}, {3, 2, 7}, gen);
    const double k = kernel(p, q, mp);
    CHECK(k == doctest::Approx(oracle::kernel(p, q, mp)).epsilon(1e-12));
    CHECK(kernel_features(p, mp).dot(kernel_features(q, mp)) == doctest::Approx(k).epsilon(1e-12));
  }
}

TEST_CASE("metric properties on random points") {
  std::mt19937_64 gen(15);
  MetricParams mp;
  mp.weights = {0.8, 1.2, 1.0};
  mp.lambdas = {2.0, 0.5, 1.0};
  const std::array<int, 3> n{7, 7, 24}, r{4, 5, 9};
  for (int trial = 0; trial < 25; ++trial) {
    const PMPoint p = oracle::random_point(n, r, gen);
    const PMPoint q = oracle::random_point(n, r, gen);
    const PMPoint s = oracle::random_point(n, r, gen);

    // symmetry
    CHECK(std::abs(kernel(p, q, mp) - kernel(q, p, mp)) <= 1e-12 * std::abs(kernel(p, q, mp)));
    CHECK(std::abs(geodesic_distance(p, q, mp) - geodesic_distance(q, p, mp)) <= 1e-12);

    // gauge invariance under column sign flips of U
    PMPoint flipped = p;
    for (auto& f : flipped.factors)
      for (Eigen::Index c = 0; c < f.u.cols(); c += 2) f.u.col(c) *= -1.0;
    CHECK(kernel(flipped, q, mp) == doctest::Approx(kernel(p, q, mp)).epsilon(1e-10));
    CHECK(geodesic_distance(flipped, q, mp) == doctest::Approx(geodesic_distance(p, q, mp)).epsilon(1e-10));

    // triangle inequality
    CHECK(geodesic_distance(p, s, mp) <= geodesic_distance(p, q, mp) + geodesic_distance(q, s, mp) + 1e-10);

    // k(p,p) + k(q,q) - 2k(p,q) == 2 d^2 evaluated with halved lambdas
    MetricParams half = mp;
    for (auto& l : half.lambdas) l *= 0.5;
    const double lhs = kernel(p, p, mp) + kernel(q, q, mp) - 2.0 * kernel(p, q, mp);
    CHECK(lhs == doctest::Approx(2.0 * geodesic_distance_squared(p, q, half)).epsilon(1e-9));

    // Grassmann cross-check against long-double principal angles
    for (int i = 0; i < 3; ++i) {
      const auto& fu = p.factors[i].u;
      const auto& gu = q.factors[i].u;
      double sin2 = 0.0;
      for (double th : oracle::principal_angles(fu, gu)) sin2 += std::sin(th) * std::sin(th);
      CHECK(0.5 * (fu * fu.transpose() - gu * gu.transpose()).squaredNorm() == doctest::Approx(sin2).epsilon(1e-8));
    }
  }
}
