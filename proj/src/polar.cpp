// matopt/polar.cpp
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

#include "matopt/polar.hpp"

#include <cmath>

namespace matopt {

PolarSchedule PolarSchedule::cubic(int iters) {
  PolarSchedule s;
  s.kind = Kind::CubicNS;
  s.max_iters = iters;
  return s;
}

PolarSchedule PolarSchedule::quintic_default() {
  PolarSchedule s;
  s.kind = Kind::QuinticPoly;
  s.coefficients = {{
      {{4.241239185486759, -12.507320735266488, 9.266081549799425}},
      {{4.189405135825070, -12.078838733887491, 8.889433598062420}},
      {{3.971551152433216, -10.385537705517351, 7.413986553084134}},
      {{3.206112842522337, -5.697599028745462, 3.491486186223124}},
      {{2.131579970582533, -1.814203975838699, 0.683897715056333}},
  }};
  s.max_iters = static_cast<int>(s.coefficients.size());
  return s;
}

PolarSchedule PolarSchedule::quintic_muon() {
  PolarSchedule s;
  s.kind = Kind::QuinticPoly;
  s.coefficients.assign(5, {{3.4445, -4.7750, 2.0315}});
  s.max_iters = 5;
  return s;
}

Matrix polar_exact(const Matrix& g) {
  MATOPT_CHECK(!g.is_zero(), "polar_exact: zero matrix");
  SpectralDecomposition d = svd(g);
  return matmul(d.u, d.v.transpose());
}

namespace {

// ||X^T X - I||_F on the smaller side.
double partial_isometry_residual(const Matrix& x) {
  const bool wide = x.rows() < x.cols();
  const Matrix gram = wide ? matmul(x, x.transpose()) : matmul(x.transpose(), x);
  const int r = gram.rows();
  double sum = 0.0;
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < r; ++j) {
      const double d = gram(i, j) - (i == j ? 1.0 : 0.0);
      sum += d * d;
    }
  return std::sqrt(sum);
}

// X * (a I + b M + c M^2) with M = X^T X, or the transposed variant when
// the matrix is wide so the Gram matrix stays on the small side.
Matrix quintic_step(const Matrix& x, double a, double b, double c) {
  if (x.rows() >= x.cols()) {
    const Matrix m = matmul(x.transpose(), x);
    Matrix poly = b * m + a * Matrix::identity(m.rows());
    if (c != 0.0) poly = poly + c * matmul(m, m);
    return matmul(x, poly);
  }
  const Matrix m = matmul(x, x.transpose());
  Matrix poly = b * m + a * Matrix::identity(m.rows());
  if (c != 0.0) poly = poly + c * matmul(m, m);
  return matmul(poly, x);
}

}  // namespace

PolarResult polar_iterate(const Matrix& g, const PolarSchedule& sched) {
  MATOPT_CHECK(!g.is_zero(), "polar_iterate: zero matrix");
  MATOPT_CHECK(g.all_finite(), "polar_iterate: non-finite input");
  MATOPT_CHECK(sched.iterations() >= 1, "polar_iterate: schedule has no iterations");
  if (sched.kind == PolarSchedule::Kind::QuinticPoly)
    MATOPT_CHECK(!sched.coefficients.empty(), "polar_iterate: quintic schedule needs coefficients");

  Matrix x = g;
  if (sched.prenormalize) x = (1.0 / frob_norm(g)) * x;

  PolarResult out;
  double prev = partial_isometry_residual(x);
  double min_seen = prev;
  int growth_streak = 0;
  const int iters = sched.iterations();
  for (int k = 0; k < iters; ++k) {
    if (sched.kind == PolarSchedule::Kind::CubicNS) {
      x = quintic_step(x, 1.5, -0.5, 0.0);
    } else {
      const auto& co = sched.coefficients[k];
      x = quintic_step(x, co[0], co[1], co[2]);
    }
    MATOPT_CHECK(x.all_finite(),
                 "polar_iterate: non-finite iterate at iteration " << k + 1);
    const double res = partial_isometry_residual(x);
    out.residuals.push_back(res);
    // Divergence: the residual grew for three consecutive iterations and
    // doubled over its best value. The doubling clause tolerates the
    // transient wiggle of equioscillating quintic schedules, whose middle
    // singular values legitimately dip before settling.
    if (res > prev * (1.0 + 1e-6) + 1e-14) {
      ++growth_streak;
      if (growth_streak >= 3 && res > 2.0 * std::max(min_seen, 1e-12))
        MATOPT_CHECK(false, "polar_iterate: diverging, residual grew for 3 iterations ("
                                << out.residuals[out.residuals.size() - 3] << " -> " << res
                                << " at iteration " << k + 1 << ")");
    } else {
      growth_streak = 0;
    }
    prev = res;
    min_seen = std::min(min_seen, res);
  }
  out.factor = std::move(x);
  out.iterations = iters;
  return out;
}

}  // namespace matopt
