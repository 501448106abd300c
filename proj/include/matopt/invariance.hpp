// matopt/invariance.hpp
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

#ifndef MATOPT_INVARIANCE_HPP
#define MATOPT_INVARIANCE_HPP

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "matopt/geometry.hpp"
#include "matopt/matrix.hpp"
#include "matopt/optimizers.hpp"

namespace matopt {

// A differentiable loss over one (possibly packed) parameter matrix.
struct LossFn {
  std::function<double(const Matrix&)> eval;
  std::function<Matrix(const Matrix&)> grad;
  int rows = 0, cols = 0;
};

// Loss reparameterization: affine W -> A_L W A_R with invertible factors,
// or elementwise W -> A (.) W with a strictly positive A.
class Reparam {
 public:
  enum class Kind { AffineLR, ElementwiseScale };

  static Reparam affine(Matrix a_l, Matrix a_r);       // condition numbers <= 1e8
  static Reparam elementwise_scale(Matrix a);          // entries > 0
  static Reparam identity_scale(int rows, int cols);   // all-ones A

  Kind kind() const { return kind_; }
  const Matrix& a_l() const { return a_l_; }
  const Matrix& a_r() const { return a_r_; }
  const Matrix& a() const { return a_; }

  // Initial point of the reparametrized run: A_L^{-1} w A_R^{-1}, or
  // A^{o-1} (.) w.
  Matrix transform_params(const Matrix& w) const;
  // Maps reparametrized iterates back: A_L w' A_R, or A (.) w'.
  Matrix untransform_params(const Matrix& w_new) const;

 private:
  Reparam() = default;
  Kind kind_ = Kind::ElementwiseScale;
  Matrix a_l_, a_r_, a_;
  Matrix a_l_inv_, a_r_inv_;
};

// eval'(W) = eval(A_L W A_R) with grad'(W) = A_L^T grad(A_L W A_R) A_R^T
// (chain rule), and the elementwise analogue.
LossFn reparametrize(const LossFn& loss, const Reparam& r);

struct Trajectory {
  // Entry t holds the iterate and its loss before step t; one extra entry
  // for the final iterate. A run stops early if the loss exceeds 1e12 or
  // a step fails numerically (recorded, not raised).
  std::vector<double> losses;
  std::vector<Matrix> params;
  bool diverged = false;
  int steps() const { return static_cast<int>(losses.size()) - 1; }
};

using StepObserver = std::function<void(int step, const Matrix& w, double loss)>;

Trajectory run_trajectory(OptimizerKind kind, const LossFn& loss, Matrix w0,
                          const HyperParams& hp, int steps,
                          const StepObserver& observer = nullptr);

// Paired run of `kind` on the loss and on its reparametrization, from
// consistently transformed initial points, sharing hyperparameters.
std::pair<Trajectory, Trajectory> run_pair(OptimizerKind kind, const LossFn& loss,
                                           const Reparam& r, const Matrix& w0,
                                           const HyperParams& hp, int steps);

// Same, but with an externally supplied second loss (e.g. built from
// scaled data rather than by the chain rule).
std::pair<Trajectory, Trajectory> run_pair(OptimizerKind kind, const LossFn& loss,
                                           const LossFn& loss_new, const Reparam& r,
                                           const Matrix& w0, const HyperParams& hp,
                                           int steps);

struct InvarianceReport {
  double max_loss_gap = 0.0;   // max_t |loss_t - loss'_t|
  double max_param_gap = 0.0;  // max_t relative Frobenius gap of mapped-back iterates
  bool invariant = false;      // both gaps <= tolerance
  double tolerance = 1e-6;
};

InvarianceReport compare_pair(const Trajectory& original, const Trajectory& reparametrized,
                              const Reparam& r, double tolerance);

// The preconditioner transformation rule characterizing invariance:
// affine L' = L A_L and R' = A_R R, elementwise D' = A (.) D, within 1e-9
// relative Frobenius error. Throws when the preconditioner and reparam
// tags do not match.
bool check_theorem2_conditions(const Preconditioner& for_loss,
                               const Preconditioner& for_new, const Reparam& r);

// Vector-case reference suite on a strongly convex quadratic with
// A = diag(e^5, e^-5): Newton (affine invariant), SGD (not invariant),
// Adam with epsilon = 0 (not scale invariant), SANIA (scale invariant).
struct VectorCaseResult {
  std::string algorithm;
  double max_param_gap = 0.0;
  bool invariant = false;
  bool expected_invariant = false;
  bool as_expected() const { return invariant == expected_invariant; }
};

std::vector<VectorCaseResult> vector_reference_suite();

}  // namespace matopt

#endif  // MATOPT_INVARIANCE_HPP
