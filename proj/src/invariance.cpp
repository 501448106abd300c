// matopt/invariance.cpp
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

#include "matopt/invariance.hpp"

#include <cmath>
#include <limits>
#include <memory>

namespace matopt {

namespace {

constexpr double kDivergenceLoss = 1e12;

double condition_number(const Matrix& m) {
  SpectralDecomposition d = svd(m);
  return d.sigma.back() > 0.0 ? d.sigma.front() / d.sigma.back()
                              : std::numeric_limits<double>::infinity();
}

double relative_gap(const Matrix& got, const Matrix& want) {
  const double diff = frob_norm(got - want);
  if (diff == 0.0) return 0.0;
  return diff / std::max(frob_norm(want), 1e-12);
}

}  // namespace

Reparam Reparam::affine(Matrix a_l, Matrix a_r) {
  MATOPT_CHECK(a_l.rows() == a_l.cols() && a_r.rows() == a_r.cols(),
               "reparam: affine factors must be square");
  MATOPT_CHECK(condition_number(a_l) <= 1e8 && condition_number(a_r) <= 1e8,
               "reparam: affine factor condition number exceeds 1e8");
  Reparam r;
  r.kind_ = Kind::AffineLR;
  r.a_l_inv_ = inverse(a_l);
  r.a_r_inv_ = inverse(a_r);
  r.a_l_ = std::move(a_l);
  r.a_r_ = std::move(a_r);
  return r;
}

Reparam Reparam::elementwise_scale(Matrix a) {
  for (double x : a.data())
    MATOPT_CHECK(x > 0.0, "reparam: scale entry " << x << " is not positive");
  Reparam r;
  r.kind_ = Kind::ElementwiseScale;
  r.a_ = std::move(a);
  return r;
}

Reparam Reparam::identity_scale(int rows, int cols) {
  return elementwise_scale(Matrix::filled(rows, cols, 1.0));
}

Matrix Reparam::transform_params(const Matrix& w) const {
  if (kind_ == Kind::AffineLR) return matmul(matmul(a_l_inv_, w), a_r_inv_);
  return hadamard(hadamard_inv(a_), w);
}

Matrix Reparam::untransform_params(const Matrix& w_new) const {
  if (kind_ == Kind::AffineLR) return matmul(matmul(a_l_, w_new), a_r_);
  return hadamard(a_, w_new);
}

LossFn reparametrize(const LossFn& loss, const Reparam& r) {
  LossFn out;
  out.rows = loss.rows;
  out.cols = loss.cols;
  if (r.kind() == Reparam::Kind::AffineLR) {
    const Matrix al = r.a_l(), ar = r.a_r();
    auto inner_eval = loss.eval;
    auto inner_grad = loss.grad;
    out.eval = [al, ar, inner_eval](const Matrix& w) {
      return inner_eval(matmul(matmul(al, w), ar));
    };
    out.grad = [al, ar, inner_grad](const Matrix& w) {
      const Matrix g = inner_grad(matmul(matmul(al, w), ar));
      return matmul(matmul(al.transpose(), g), ar.transpose());
    };
  } else {
    const Matrix a = r.a();
    auto inner_eval = loss.eval;
    auto inner_grad = loss.grad;
    out.eval = [a, inner_eval](const Matrix& w) { return inner_eval(hadamard(a, w)); };
    out.grad = [a, inner_grad](const Matrix& w) {
      return hadamard(a, inner_grad(hadamard(a, w)));
    };
  }
  return out;
}

Trajectory run_trajectory(OptimizerKind kind, const LossFn& loss, Matrix w0,
                          const HyperParams& hp, int steps, const StepObserver& observer) {
  Trajectory traj;
  OptimizerState state;
  Matrix w = std::move(w0);
  for (int t = 0; t < steps; ++t) {
    double value;
    try {
      value = loss.eval(w);
    } catch (const Error&) {
      traj.diverged = true;
      break;
    }
    if (!std::isfinite(value) || value > kDivergenceLoss) {
      traj.diverged = true;
      traj.losses.push_back(value);
      traj.params.push_back(w);
      break;
    }
    traj.losses.push_back(value);
    traj.params.push_back(w);
    if (observer) observer(t, w, value);
    try {
      auto [w_next, state_next] = step(kind, std::move(state), w, loss.grad(w), hp);
      w = std::move(w_next);
      state = std::move(state_next);
    } catch (const Error&) {
      traj.diverged = true;
      break;
    }
  }
  if (!traj.diverged) {
    traj.losses.push_back(loss.eval(w));
    traj.params.push_back(w);
  }
  return traj;
}

std::pair<Trajectory, Trajectory> run_pair(OptimizerKind kind, const LossFn& loss,
                                           const Reparam& r, const Matrix& w0,
                                           const HyperParams& hp, int steps) {
  return run_pair(kind, loss, reparametrize(loss, r), r, w0, hp, steps);
}

std::pair<Trajectory, Trajectory> run_pair(OptimizerKind kind, const LossFn& loss,
                                           const LossFn& loss_new, const Reparam& r,
                                           const Matrix& w0, const HyperParams& hp,
                                           int steps) {
  Trajectory original = run_trajectory(kind, loss, w0, hp, steps);
  Trajectory transformed =
      run_trajectory(kind, loss_new, r.transform_params(w0), hp, steps);
  return {std::move(original), std::move(transformed)};
}

InvarianceReport compare_pair(const Trajectory& original, const Trajectory& reparametrized,
                              const Reparam& r, double tolerance) {
  InvarianceReport rep;
  rep.tolerance = tolerance;
  const size_t n = std::min(original.losses.size(), reparametrized.losses.size());
  for (size_t t = 0; t < n; ++t) {
    const double lg = std::fabs(original.losses[t] - reparametrized.losses[t]);
    rep.max_loss_gap = std::max(rep.max_loss_gap, std::isfinite(lg) ? lg : 1e300);
    const Matrix back = r.untransform_params(reparametrized.params[t]);
    rep.max_param_gap = std::max(rep.max_param_gap, relative_gap(back, original.params[t]));
  }
  if (original.diverged != reparametrized.diverged) rep.max_loss_gap = 1e300;
  rep.invariant = rep.max_loss_gap <= tolerance && rep.max_param_gap <= tolerance;
  return rep;
}

bool check_theorem2_conditions(const Preconditioner& for_loss,
                               const Preconditioner& for_new, const Reparam& r) {
  MATOPT_CHECK(for_loss.kind() == for_new.kind(),
               "check_theorem2_conditions: preconditioner tags differ");
  constexpr double kTol = 1e-9;
  if (for_loss.kind() == Preconditioner::Kind::LeftRight) {
    MATOPT_CHECK(r.kind() == Reparam::Kind::AffineLR,
                 "check_theorem2_conditions: (L,R) preconditioner needs an affine reparam");
    const Matrix l_want = matmul(for_loss.l(), r.a_l());
    const Matrix r_want = matmul(r.a_r(), for_loss.r());
    return relative_gap(for_new.l(), l_want) <= kTol &&
           relative_gap(for_new.r(), r_want) <= kTol;
  }
  if (for_loss.kind() == Preconditioner::Kind::Elementwise) {
    MATOPT_CHECK(r.kind() == Reparam::Kind::ElementwiseScale,
                 "check_theorem2_conditions: D preconditioner needs an elementwise reparam");
    return relative_gap(for_new.d(), hadamard(r.a(), for_loss.d())) <= kTol;
  }
  // Identity preconditioners carry no transformation rule to check.
  MATOPT_CHECK(false, "check_theorem2_conditions: identity preconditioners");
  return false;
}

namespace {

// Reference vector-case algorithms on f(w) = 0.5 w^T H w - b^T w, with
// parameters as n x 1 matrices. Each runs the original and the
// A-reparametrized problem and reports the worst mapped-back iterate gap.
struct QuadraticProblem {
  Matrix h, b;
  Matrix grad(const Matrix& w) const { return matmul(h, w) - b; }
};

using VectorStepFn = std::function<void(const QuadraticProblem&, Matrix&, long)>;

double paired_gap(const QuadraticProblem& prob, const Matrix& a, const VectorStepFn& make_step,
                  const VectorStepFn& make_step_new, int steps) {
  QuadraticProblem tr;  // f(Aw): H' = A^T H A, b' = A^T b
  tr.h = matmul(matmul(a.transpose(), prob.h), a);
  tr.b = matmul(a.transpose(), prob.b);
  const Matrix a_inv = inverse(a);

  Matrix w(prob.b.rows(), 1), w_new(prob.b.rows(), 1);  // both start at zero
  double worst = 0.0;
  try {
    for (long t = 0; t < steps; ++t) {
      make_step(prob, w, t);
      make_step_new(tr, w_new, t);
      worst = std::max(worst, relative_gap(w_new, matmul(a_inv, w)));
    }
  } catch (const Error&) {
    return 1e300;  // blew up on one side: maximally non-invariant
  }
  return worst;
}

}  // namespace

std::vector<VectorCaseResult> vector_reference_suite() {
  QuadraticProblem prob;
  prob.h = Matrix{{3.0, 1.0}, {1.0, 2.0}};
  prob.b = Matrix{{1.0}, {-1.0}};
  const Matrix a = Matrix::diag({std::exp(5.0), std::exp(-5.0)});
  constexpr int kSteps = 30;
  constexpr double kTol = 1e-10;

  std::vector<VectorCaseResult> out;

  auto newton = [](const QuadraticProblem& p, Matrix& w, long) {
    w = w - solve(p.h, p.grad(w));
  };
  out.push_back({"newton", paired_gap(prob, a, newton, newton, kSteps), false, true});

  auto sgd = [](const QuadraticProblem& p, Matrix& w, long) {
    w = w - 0.02 * p.grad(w);
  };
  out.push_back({"sgd", paired_gap(prob, a, sgd, sgd, kSteps), false, false});

  // Adam and SANIA need per-run EMA buffers.
  auto make_adaptive = [](bool sania) {
    auto m = std::make_shared<Matrix>();
    auto v = std::make_shared<Matrix>();
    return [m, v, sania](const QuadraticProblem& p, Matrix& w, long t) {
      const Matrix g = p.grad(w);
      if (t == 0) {
        *m = Matrix(g.rows(), g.cols());
        *v = Matrix(g.rows(), g.cols());
      }
      *m = 0.9 * (*m) + 0.1 * g;
      *v = 0.999 * (*v) + 0.001 * hadamard(g, g);
      const Matrix mhat = bias_corrected(*m, 0.9, t);
      const Matrix vhat = bias_corrected(*v, 0.999, t);
      Matrix delta = mhat;
      for (size_t i = 0; i < delta.data().size(); ++i) {
        const double denom = sania ? vhat.data()[i] : std::sqrt(vhat.data()[i]);
        delta.data()[i] /= denom;  // epsilon = 0
      }
      MATOPT_CHECK(delta.all_finite(), "vector suite: non-finite adaptive step");
      w = w - 0.05 * delta;
    };
  };
  out.push_back({"adam", paired_gap(prob, a, make_adaptive(false), make_adaptive(false), kSteps),
                 false, false});
  out.push_back({"sania", paired_gap(prob, a, make_adaptive(true), make_adaptive(true), kSteps),
                 false, true});

  for (auto& r : out) r.invariant = r.max_param_gap <= kTol;
  return out;
}

}  // namespace matopt
