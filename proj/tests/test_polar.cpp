// Unit tests for the iterative polar factor.
//
// Copyright 2026 The matopt authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cmath>

#include "doctest.h"
#include "matopt/polar.hpp"
#include "matopt/rng.hpp"
#include "test_util.hpp"

using namespace matopt;
using namespace matopt::testutil;

namespace {

// Random square matrix with condition number at most kappa.
Matrix random_conditioned(Rng& rng, int n, double kappa) {
  std::vector<double> sigma(n);
  sigma[0] = 1.0;
  for (int i = 1; i < n - 1; ++i)
    sigma[i] = std::exp(rng.uniform(std::log(1.0 / kappa), 0.0));
  if (n > 1) sigma[n - 1] = 1.0 / kappa;
  return with_singular_values(rng, n, n, sigma);
}

}  // namespace

TEST_CASE("polar_exact: fixtures") {
  Rng rng(41);
  const Matrix q = random_orthogonal(rng, 4, 4);
  CHECK(frob_norm(polar_exact(q) - q) < 1e-12);

  CHECK(max_abs_diff(polar_exact(Matrix::diag({3.0, 0.5})), Matrix::identity(2)) < 1e-12);

  // G (G^T G)^{-1/2} for G = [[0,-3],[2,0]] is [[0,-1],[1,0]].
  const Matrix expected{{0.0, -1.0}, {1.0, 0.0}};
  CHECK(max_abs_diff(polar_exact(Matrix{{0.0, -3.0}, {2.0, 0.0}}), expected) < 1e-12);

  CHECK_THROWS_AS(polar_exact(Matrix(2, 2)), Error);
}

TEST_CASE("polar_iterate: orthogonal input is a fixed point of CubicNS") {
  Rng rng(43);
  const Matrix q = random_orthogonal(rng, 5, 5);
  PolarSchedule raw = PolarSchedule::cubic(10);
  raw.prenormalize = false;  // the raw map 1.5X - 0.5XX^TX fixes orthogonal X
  const auto res = polar_iterate(q, raw);
  CHECK(frob_norm(res.factor - q) < 1e-12);
  for (double r : res.residuals) CHECK(r < 1e-12);
  // With prenormalization the iteration still converges back to q.
  const auto res2 = polar_iterate(q, PolarSchedule::cubic(30));
  CHECK(frob_norm(res2.factor - q) < 1e-8);
}

TEST_CASE("polar_iterate: CubicNS matches polar_exact on well-conditioned 8x8") {
  Rng rng(47);
  for (int trial = 0; trial < 25; ++trial) {
    const Matrix g = random_conditioned(rng, 8, 10.0);
    const auto res = polar_iterate(g, PolarSchedule::cubic(30));
    CHECK(frob_norm(res.factor - polar_exact(g)) < 1e-6);
  }
}

TEST_CASE("polar_iterate: tall full-column-rank input gets orthonormal columns") {
  Rng rng(53);
  for (int trial = 0; trial < 10; ++trial) {
    const Matrix g = random_matrix(rng, 10, 3);
    const auto res = polar_iterate(g, PolarSchedule::cubic(40));
    CHECK(orthogonality_residual(res.factor) < 1e-6);
  }
}

TEST_CASE("polar_iterate: 100 random square matrices with condition <= 100 (CubicNS)") {
  Rng rng(59);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 3 + static_cast<int>(rng.uniform_index(4));
    const Matrix g = random_conditioned(rng, n, std::exp(rng.uniform(0.0, std::log(100.0))));
    const auto res = polar_iterate(g, PolarSchedule::cubic(30));
    CHECK(frob_norm(res.factor - polar_exact(g)) < 1e-5);
  }
}

TEST_CASE("polar_iterate: residual decreases monotonically (CubicNS, prenormalized)") {
  Rng rng(61);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix g = random_matrix(rng, 6, 6);
    const auto res = polar_iterate(g, PolarSchedule::cubic(25));
    for (size_t k = 1; k < res.residuals.size(); ++k)
      CHECK(res.residuals[k] <= res.residuals[k - 1] + 1e-13);
  }
}

TEST_CASE("polar: sign equivariance, both backends") {
  Rng rng(67);
  for (int trial = 0; trial < 10; ++trial) {
    const Matrix g = random_matrix(rng, 5, 4);
    CHECK(frob_norm(polar_exact(-g) + polar_exact(g)) < 1e-9);
    const auto a = polar_iterate(g, PolarSchedule::quintic_default());
    const auto b = polar_iterate(-g, PolarSchedule::quintic_default());
    CHECK(frob_norm(a.factor + b.factor) < 1e-9);
  }
}

TEST_CASE("polar: orthogonal invariance polar(P g Q) = P polar(g) Q") {
  Rng rng(71);
  for (int trial = 0; trial < 10; ++trial) {
    const Matrix g = random_matrix(rng, 5, 5);
    const Matrix p = random_orthogonal(rng, 5, 5);
    const Matrix q = random_orthogonal(rng, 5, 5);
    const Matrix lhs = polar_exact(matmul(matmul(p, g), q));
    const Matrix rhs = matmul(matmul(p, polar_exact(g)), q);
    CHECK(frob_norm(lhs - rhs) < 1e-8);
  }
}

TEST_CASE("polar_iterate: quintic default reaches its design accuracy") {
  Rng rng(73);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 3 + static_cast<int>(rng.uniform_index(4));
    const Matrix g = random_conditioned(rng, n, std::exp(rng.uniform(0.0, std::log(100.0))));
    const auto res = polar_iterate(g, PolarSchedule::quintic_default());
    CHECK(frob_norm(res.factor - polar_exact(g)) < 1e-2);
    CHECK(res.residual() < 1e-2);
  }
}

TEST_CASE("polar_iterate: muon-style quintic is coarse but bounded") {
  Rng rng(79);
  const Matrix g = random_conditioned(rng, 6, 5.0);
  const auto res = polar_iterate(g, PolarSchedule::quintic_muon());
  // Singular values land in roughly [0.7, 1.2]; far from exact, still sane.
  CHECK(frob_norm(res.factor - polar_exact(g)) < 1.5);
  CHECK(res.residual() < 1.5);
}

TEST_CASE("polar_iterate: divergence detection without prenormalization") {
  PolarSchedule sched = PolarSchedule::cubic(20);
  sched.prenormalize = false;
  // Spectral norm 3 > sqrt(3): the cubic map explodes.
  CHECK_THROWS_AS(polar_iterate(3.0 * Matrix::identity(3), sched), Error);
}

TEST_CASE("polar_iterate: rejects zero input and empty schedules") {
  CHECK_THROWS_AS(polar_iterate(Matrix(3, 3), PolarSchedule::cubic(5)), Error);
  PolarSchedule empty;
  empty.kind = PolarSchedule::Kind::QuinticPoly;
  empty.max_iters = 1;
  CHECK_THROWS_AS(polar_iterate(Matrix::identity(2), empty), Error);
}
