// matopt/geometry.hpp
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

#ifndef MATOPT_GEOMETRY_HPP
#define MATOPT_GEOMETRY_HPP

#include <string>

#include "matopt/matrix.hpp"
#include "matopt/polar.hpp"

namespace matopt {

// The base matrix norm inside a preconditioned norm.
//  Frobenius  sqrt(sum g_ij^2)
//  Spectral   sigma_max; with rms_scaling it is the RMS->RMS operator norm
//             sqrt(rows/cols) * sigma_max (weights acting on the right)
//  MaxAbs     max |g_ij|, the l1->linf operator norm
//  ColNorm    max_j ||col_j||_2, with rms_scaling max_j ||col_j||_2/sqrt(rows)
//  RowNorm    max_i ||row_i||_2, with rms_scaling max_i ||row_i||_2*sqrt(cols)
enum class BaseNorm { Frobenius, Spectral, MaxAbs, ColNorm, RowNorm };

std::string to_string(BaseNorm b);

// Identity, two-sided (L, R) with invertible factors, or entrywise
// positive D.
class Preconditioner {
 public:
  enum class Kind { Identity, LeftRight, Elementwise };

  static Preconditioner identity();
  static Preconditioner left_right(Matrix l, Matrix r);  // checks invertibility
  static Preconditioner elementwise(Matrix d);           // checks positivity

  Kind kind() const { return kind_; }
  const Matrix& l() const { return l_; }
  const Matrix& r() const { return r_; }
  const Matrix& d() const { return d_; }

 private:
  Preconditioner() = default;
  Kind kind_ = Kind::Identity;
  Matrix l_, r_, d_;
};

enum class SpectralBackend { ExactSvd, NewtonSchulz };

struct LmoConfig {
  double rho = 1.0;  // trust-region radius
  SpectralBackend spectral_backend = SpectralBackend::ExactSvd;
  bool rms_scaling = false;
  PolarSchedule newton_schulz = PolarSchedule::quintic_default();
};

double eval_base_norm(const Matrix& g, BaseNorm base, bool rms_scaling = false);

// || L G R || or || D (.) G || in the chosen base norm.
double eval_precond_norm(const Matrix& g, const Preconditioner& p, BaseNorm base,
                         bool rms_scaling = false);

struct LmoResult {
  Matrix direction;
  bool degenerate = false;  // all-zero input: direction is the zero matrix
};

// argmax_{||T|| <= rho} <g, T> for the base norm.
LmoResult lmo_base(const Matrix& g, BaseNorm base, const LmoConfig& cfg);

// Preconditioned oracle: transform the gradient into the preconditioned
// space, apply the base LMO there, transform back:
//   (L,R):  L^{-1} lmo(L^{-T} G R^{-T}) R^{-1}
//   D:      D^{o-1} (.) lmo(D^{o-1} (.) G)
LmoResult lmo_precond(const Matrix& g, const Preconditioner& p, BaseNorm base,
                      const LmoConfig& cfg);

// Dual norm of g (the optimal value <g, lmo(g)> at rho = 1): Frobenius ->
// Frobenius, Spectral -> nuclear (sum of singular values), MaxAbs ->
// entrywise l1, ColNorm/RowNorm -> sums of column/row Euclidean norms.
double dual_norm(const Matrix& g, BaseNorm base, bool rms_scaling = false);

}  // namespace matopt

#endif  // MATOPT_GEOMETRY_HPP
