// Unit tests for data ingestion and the desk-scale losses.
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
#include "matopt/tasks.hpp"
#include "matopt/rng.hpp"
#include "test_util.hpp"

using namespace matopt;
using namespace matopt::testutil;

namespace {

Matrix fd_gradient(const LossFn& loss, const Matrix& w) {
  Matrix g(w.rows(), w.cols());
  for (int i = 0; i < w.rows(); ++i) {
    for (int j = 0; j < w.cols(); ++j) {
      const double h = 1e-6 * (1.0 + std::fabs(w(i, j)));
      Matrix wp = w, wm = w;
      wp(i, j) += h;
      wm(i, j) -= h;
      g(i, j) = (loss.eval(wp) - loss.eval(wm)) / (2.0 * h);
    }
  }
  return g;
}

double max_rel_gradient_error(const LossFn& loss, const Matrix& w) {
  const Matrix an = loss.grad(w);
  const Matrix fd = fd_gradient(loss, w);
  double worst = 0.0;
  for (size_t i = 0; i < an.data().size(); ++i)
    worst = std::max(worst,
                     std::fabs(an.data()[i] - fd.data()[i]) / (1.0 + std::fabs(an.data()[i])));
  return worst;
}

}  // namespace

TEST_CASE("parse_libsvm: direct parse with {1,2}-style labels") {
  const Dataset d = parse_libsvm("1 1:0.5 3:2.0\n");
  CHECK(d.samples() == 1);
  CHECK(d.features() == 3);
  CHECK(d.x(0, 0) == 0.5);
  CHECK(d.x(0, 1) == 0.0);
  CHECK(d.x(0, 2) == 2.0);
  CHECK(d.y[0] == 0.0);
}

TEST_CASE("parse_libsvm: +1/-1 labels and implicit zeros") {
  const Dataset d = parse_libsvm("+1 2:1\n-1 1:1\n");
  CHECK(d.samples() == 2);
  CHECK(d.features() == 2);
  CHECK(d.x(0, 0) == 0.0);
  CHECK(d.x(0, 1) == 1.0);
  CHECK(d.x(1, 0) == 1.0);
  CHECK(d.x(1, 1) == 0.0);
  CHECK(d.y[0] == 1.0);
  CHECK(d.y[1] == 0.0);
}

TEST_CASE("parse_libsvm: malformed input reports line and field") {
  try {
    parse_libsvm("2 1:a\n");
    FAIL("expected error");
  } catch (const Error& e) {
    const std::string msg = e.what();
    CHECK(msg.find("line 1") != std::string::npos);
    CHECK(msg.find("1:a") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_libsvm(""), Error);
  CHECK_THROWS_AS(parse_libsvm("1 2:1 1:3\n"), Error);   // non-ascending
  CHECK_THROWS_AS(parse_libsvm("7 1:1\n"), Error);       // unsupported label set
}

TEST_CASE("parse_libsvm / to_libsvm round-trip is lossless") {
  Rng rng(257);
  Dataset d;
  d.x = Matrix(6, 5);
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 5; ++j)
      d.x(i, j) = rng.uniform() < 0.4 ? 0.0 : rng.normal() * std::exp(rng.uniform(-8, 8));
  for (int i = 0; i < 6; ++i) d.y.push_back(i % 2);

  const Dataset r1 = parse_libsvm(to_libsvm(d));
  CHECK(r1.x == d.x);
  CHECK(r1.y == d.y);

  // And the serialized form is a fixed point.
  CHECK(to_libsvm(r1) == to_libsvm(d));
}

TEST_CASE("to_libsvm pins the feature count when the last column is empty") {
  Dataset d;
  d.x = Matrix(2, 4);
  d.x(0, 0) = 1.0;
  d.x(1, 1) = 2.0;  // column 4 entirely zero
  d.y = {0.0, 1.0};
  const Dataset r = parse_libsvm(to_libsvm(d));
  CHECK(r.features() == 4);
  CHECK(r.x == d.x);
}

TEST_CASE("assign_splits: disjoint, covering, deterministic") {
  Dataset d = synthetic_blobs(50, 4, 2.0, 5);
  assign_splits(d, 0.6, 0.2, 99);
  CHECK(d.train_idx.size() == 30);
  CHECK(d.val_idx.size() == 10);
  CHECK(d.test_idx.size() == 10);
  std::vector<bool> seen(50, false);
  for (const auto* split : {&d.train_idx, &d.val_idx, &d.test_idx})
    for (int i : *split) {
      CHECK_FALSE(seen[i]);
      seen[i] = true;
    }
  for (bool s : seen) CHECK(s);

  Dataset d2 = synthetic_blobs(50, 4, 2.0, 5);
  assign_splits(d2, 0.6, 0.2, 99);
  CHECK(d2.train_idx == d.train_idx);
}

TEST_CASE("scale_features: k = 0 is the identity, seeds are reproducible") {
  Dataset d = synthetic_blobs(20, 6, 2.0, 7);
  auto [same, e0] = scale_features(d, 0.0, 42);
  CHECK(same.x == d.x);
  for (double e : e0) CHECK(e == 1.0);

  auto [s1, e1] = scale_features(d, 10.0, 42);
  auto [s2, e2] = scale_features(d, 10.0, 42);
  CHECK(e1 == e2);
  CHECK(s1.x == s2.x);
  auto [s3, e3] = scale_features(d, 10.0, 43);
  CHECK(e1 != e3);
}

TEST_CASE("scale_features commutes with row subsampling") {
  Dataset d = synthetic_blobs(30, 5, 2.0, 11);
  auto [scaled, e] = scale_features(d, 4.0, 17);

  Dataset head = d;
  head.x = Matrix(10, 5);
  head.y.assign(d.y.begin(), d.y.begin() + 10);
  for (int i = 0; i < 10; ++i)
    for (int j = 0; j < 5; ++j) head.x(i, j) = d.x(i, j);
  auto [scaled_head, e_head] = scale_features(head, 4.0, 17);

  CHECK(e == e_head);
  for (int i = 0; i < 10; ++i)
    for (int j = 0; j < 5; ++j) CHECK(scaled_head.x(i, j) == scaled.x(i, j));
}

TEST_CASE("quadratic_loss: fixtures and gradient check") {
  Rng rng(263);
  const Matrix x = random_matrix(rng, 10, 4);
  const Matrix y = random_matrix(rng, 10, 2);
  const LossFn loss = quadratic_loss(x, y);

  CHECK(loss.eval(Matrix(4, 2)) == doctest::Approx(frob_inner(y, y)));

  // Normal equations: grad at the least-squares solution is ~0.
  const Matrix w_star = solve(matmul(x.transpose(), x), matmul(x.transpose(), y));
  CHECK(frob_norm(loss.grad(w_star)) < 1e-9);

  for (int trial = 0; trial < 5; ++trial)
    CHECK(max_rel_gradient_error(loss, random_matrix(rng, 4, 2)) < 1e-6);
}

TEST_CASE("mlp: zero first layer gives loss ln(2) for any output layer") {
  Dataset d = synthetic_blobs(40, 6, 2.5, 13);
  assign_splits(d, 0.6, 0.2, 1);
  const MlpTask task = mlp_loss(d, 16);
  for (uint64_t seed : {1ULL, 2ULL, 3ULL}) {
    const Matrix p = mlp_init_params(task.spec, seed);
    CHECK(task.loss.eval(p) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  }
}

TEST_CASE("mlp: scaled task starts at exactly the same ln(2) loss") {
  // Zero first layer makes the initial loss independent of feature scales,
  // so trajectory comparison is well-posed from step 0.
  Dataset d = synthetic_blobs(40, 6, 2.5, 13);
  assign_splits(d, 0.6, 0.2, 1);
  auto [scaled, e] = scale_features(d, 10.0, 55);
  const MlpTask orig = mlp_loss(d, 16);
  const MlpTask scal = mlp_loss(scaled, 16);
  const Matrix p = mlp_init_params(orig.spec, 18);
  CHECK(orig.loss.eval(p) == scal.loss.eval(p));
  CHECK(orig.loss.eval(p) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("mlp: gradients match finite differences at random probes") {
  Dataset d = synthetic_blobs(10, 4, 2.0, 17);
  assign_splits(d, 0.8, 0.0, 3);
  const MlpTask task = mlp_loss(d, 6);
  Rng rng(269);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix w = random_matrix(rng, task.spec.packed_rows(), task.spec.packed_cols(), 0.8);
    CHECK(max_rel_gradient_error(task.loss, w) < 1e-5);
  }
}

TEST_CASE("mlp: untrained accuracy is at chance level on balanced labels") {
  Dataset d = synthetic_blobs(60, 5, 2.0, 19);
  assign_splits(d, 0.5, 0.25, 7);
  const MlpTask task = mlp_loss(d, 12);
  const Matrix p0 = mlp_init_params(task.spec, 4);
  // Zero first layer: all logits are zero, argmax ties resolve to class 0,
  // and the balanced labels make that exactly chance level on average.
  const double acc = accuracy(task.spec, p0, d, d.test_idx);
  CHECK(acc > 0.25);
  CHECK(acc < 0.75);
}

TEST_CASE("mlp: separable blobs train to perfect accuracy") {
  Dataset d = synthetic_blobs(60, 4, 10.0, 23);  // far-apart blobs
  assign_splits(d, 0.6, 0.2, 11);
  const MlpTask task = mlp_loss(d, 10);
  HyperParams hp;
  hp.gamma = 0.05;
  Matrix w = mlp_init_params(task.spec, 5);
  OptimizerState state;
  for (int t = 0; t < 300; ++t) {
    auto [w_next, s] = step(OptimizerKind::Adam, std::move(state), w, task.loss.grad(w), hp);
    w = w_next;
    state = std::move(s);
  }
  CHECK(accuracy(task.spec, w, d, d.train_idx) == doctest::Approx(1.0));
  CHECK(accuracy(task.spec, w, d, d.test_idx) == doctest::Approx(1.0));
  CHECK(task.loss.eval(w) < 0.05);
}

TEST_CASE("accuracy: throws on an empty split") {
  Dataset d = synthetic_blobs(10, 3, 2.0, 29);
  assign_splits(d, 0.9, 0.1, 1);
  const MlpTask task = mlp_loss(d, 4);
  const Matrix p = mlp_init_params(task.spec, 1);
  std::vector<int> empty;
  CHECK_THROWS_AS(accuracy(task.spec, p, d, empty), Error);
}

TEST_CASE("scaled task equals the row-scaled original through the first layer") {
  // L~(W) = L(diag(e) W1 stacked with W2) exactly, which is what the
  // induced elementwise reparam encodes.
  Dataset d = synthetic_blobs(30, 5, 2.0, 31);
  assign_splits(d, 0.7, 0.1, 3);
  auto [scaled, e] = scale_features(d, 6.0, 41);

  const MlpTask orig = mlp_loss(d, 8);
  const MlpTask scal = mlp_loss(scaled, 8);
  const Reparam r = mlp_scale_reparam(orig.spec, e);

  Rng rng(271);
  for (int trial = 0; trial < 10; ++trial) {
    const Matrix w = random_matrix(rng, orig.spec.packed_rows(), orig.spec.packed_cols(), 0.7);
    const double direct = scal.loss.eval(w);
    const double via_reparam = orig.loss.eval(r.untransform_params(w));
    CHECK(direct == doctest::Approx(via_reparam).epsilon(1e-12));
  }
}
