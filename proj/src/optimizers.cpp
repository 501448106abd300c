// matopt/optimizers.cpp
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

#include "matopt/optimizers.hpp"

#include <cmath>

namespace matopt {

std::string to_string(OptimizerKind k) {
  switch (k) {
    case OptimizerKind::Sgd: return "sgd";
    case OptimizerKind::NormalizedSgd: return "normalized-sgd";
    case OptimizerKind::SignSgd: return "sign-sgd";
    case OptimizerKind::Muon: return "muon";
    case OptimizerKind::AdaGrad: return "adagrad";
    case OptimizerKind::Adam: return "adam";
    case OptimizerKind::AdamW: return "adamw";
    case OptimizerKind::Madgrad: return "madgrad";
    case OptimizerKind::AdamSania: return "adam-sania";
    case OptimizerKind::Shampoo: return "shampoo";
    case OptimizerKind::OneSidedShampoo: return "one-sided-shampoo";
    case OptimizerKind::Soap: return "soap";
    case OptimizerKind::Splus: return "splus";
    case OptimizerKind::MuAdam: return "muadam";
    case OptimizerKind::MuAdamSania: return "muadam-sania";
  }
  return "?";
}

std::optional<OptimizerKind> optimizer_from_string(const std::string& name) {
  for (OptimizerKind k : all_optimizers())
    if (to_string(k) == name) return k;
  return std::nullopt;
}

std::vector<OptimizerKind> all_optimizers() {
  return {OptimizerKind::Sgd,     OptimizerKind::NormalizedSgd,
          OptimizerKind::SignSgd, OptimizerKind::Muon,
          OptimizerKind::AdaGrad, OptimizerKind::Adam,
          OptimizerKind::AdamW,   OptimizerKind::Madgrad,
          OptimizerKind::AdamSania, OptimizerKind::Shampoo,
          OptimizerKind::OneSidedShampoo, OptimizerKind::Soap,
          OptimizerKind::Splus,   OptimizerKind::MuAdam,
          OptimizerKind::MuAdamSania};
}

void HyperParams::validate() const {
  MATOPT_CHECK(gamma > 0.0, "hyperparams: gamma must be positive");
  MATOPT_CHECK(beta1 >= 0.0 && beta1 < 1.0, "hyperparams: beta1 must be in [0, 1)");
  MATOPT_CHECK(beta2 > 0.0 && beta2 < 1.0, "hyperparams: beta2 must be in (0, 1)");
  MATOPT_CHECK(epsilon >= 0.0, "hyperparams: epsilon must be nonnegative");
  MATOPT_CHECK(p == 0.25 || p == 0.5, "hyperparams: p must be 1/4 or 1/2");
  MATOPT_CHECK(rho > 0.0, "hyperparams: rho must be positive");
  MATOPT_CHECK(weight_decay >= 0.0, "hyperparams: weight_decay must be nonnegative");
  MATOPT_CHECK(refresh_every >= 1, "hyperparams: refresh_every must be >= 1");
}

BaseNorm base_norm_for(OptimizerKind kind) {
  switch (kind) {
    case OptimizerKind::SignSgd:
    case OptimizerKind::Splus:
      return BaseNorm::MaxAbs;
    case OptimizerKind::Muon:
    case OptimizerKind::MuAdam:
    case OptimizerKind::MuAdamSania:
      return BaseNorm::Spectral;
    default:
      return BaseNorm::Frobenius;  // incl. SOAP, whose inner D-norm is Frobenius-based
  }
}

bool uses_momentum(OptimizerKind kind) {
  switch (kind) {
    case OptimizerKind::Muon:
    case OptimizerKind::Adam:
    case OptimizerKind::AdamW:
    case OptimizerKind::Madgrad:
    case OptimizerKind::AdamSania:
    case OptimizerKind::Soap:
    case OptimizerKind::Splus:
    case OptimizerKind::MuAdam:
    case OptimizerKind::MuAdamSania:
      return true;
    default:
      return false;
  }
}

Matrix bias_corrected(const Matrix& buf, double beta, long t) {
  const double corr = 1.0 - std::pow(beta, static_cast<double>(t + 1));
  MATOPT_CHECK(corr > 0.0, "bias correction: beta^(t+1) reached 1");
  return (1.0 / corr) * buf;
}

namespace {

Matrix zeros_like(const Matrix& g) { return Matrix(g.rows(), g.cols()); }

void ema_update(std::optional<Matrix>& buf, double beta, const Matrix& x) {
  if (!buf) buf = zeros_like(x);
  *buf = beta * (*buf) + (1.0 - beta) * x;
}

void sum_update(std::optional<Matrix>& buf, const Matrix& x) {
  if (!buf) buf = zeros_like(x);
  *buf = *buf + x;
}

Matrix elementwise_div(const Matrix& a, const Matrix& b) {
  Matrix r = a;
  for (size_t i = 0; i < r.data().size(); ++i) r.data()[i] /= b.data()[i];
  MATOPT_CHECK(r.all_finite(), "optimizer step: non-finite update (division)");
  return r;
}

Matrix elementwise_pow_plus(const Matrix& v, double p, double eps) {
  Matrix r = v;
  for (double& x : r.data()) {
    MATOPT_CHECK(x >= 0.0, "optimizer step: negative second-moment entry " << x);
    x = std::pow(x, p) + eps;
  }
  return r;
}

Matrix sign_of(const Matrix& g) {
  Matrix t = g;
  for (double& x : t.data()) x = (x > 0.0) - (x < 0.0);
  return t;
}

double rms_factor(const Matrix& g, const HyperParams& hp) {
  return hp.rms_scaling ? std::sqrt(double(g.cols()) / g.rows()) : 1.0;
}

Matrix polar_of(const Matrix& x, const HyperParams& hp) {
  if (hp.spectral_backend == SpectralBackend::ExactSvd) return polar_exact(x);
  return polar_iterate(x, hp.polar).factor;
}

// rho * D^{o-2} (.) x / ||D^{o-1} (.) x||_F - the Frobenius-base D-norm
// LMO written out directly. Returns zero for zero x.
Matrix dnorm_lmo_step(const Matrix& x, const Matrix& d, double rho) {
  if (x.is_zero()) return zeros_like(x);
  const Matrix xd = elementwise_div(x, d);
  return (rho / frob_norm(xd)) * elementwise_div(xd, d);
}

// Classic two-sided quasi-Newton update (L^T L)^{-1} g (R^T R)^{-1},
// computed by linear solves against the materialized factors.
Matrix two_sided_solve(const Matrix& l, const Matrix& r, const Matrix& g) {
  const Matrix ltl = matmul(l.transpose(), l);
  const Matrix rtr = matmul(r.transpose(), r);
  const Matrix left = solve(ltl, g);
  return solve(rtr, left.transpose()).transpose();
}

struct AdamExponents {
  double classic;  // denominator exponent of the conventional step
  double dnorm;    // exponent of the materialized D
};

AdamExponents exponents_for(OptimizerKind kind) {
  switch (kind) {
    case OptimizerKind::AdaGrad:
    case OptimizerKind::Adam:
    case OptimizerKind::AdamW:
    case OptimizerKind::Soap:
      return {0.5, 0.25};
    case OptimizerKind::Madgrad:
      return {1.0 / 3.0, 1.0 / 6.0};
    case OptimizerKind::AdamSania:
      return {1.0, 0.5};
    case OptimizerKind::MuAdam:
      return {0.5, 0.25};
    case OptimizerKind::MuAdamSania:
      return {1.0, 0.5};
    default:
      MATOPT_CHECK(false, "no entrywise exponents for " << to_string(kind));
      return {};
  }
}

void refresh_eigenbases(OptimizerState& state, const HyperParams& hp) {
  MATOPT_CHECK(state.hl && state.hr, "eigenbasis refresh without accumulators");
  const bool due = !state.ql || !state.qr || state.refresh_counter >= hp.refresh_every;
  if (due) {
    state.ql = sym_eig(*state.hl).q;
    state.qr = sym_eig(*state.hr).q;
    state.refresh_counter = 0;
  }
  ++state.refresh_counter;
}

}  // namespace

OptimizerState update_preconditioner(OptimizerKind kind, OptimizerState state,
                                     const Matrix& g, const HyperParams& hp) {
  MATOPT_CHECK((state.grad_rows == 0 && state.grad_cols == 0) ||
                   (state.grad_rows == g.rows() && state.grad_cols == g.cols()),
               "update_preconditioner: gradient shape changed from "
                   << state.grad_rows << "x" << state.grad_cols << " to " << g.shape_str());
  state.grad_rows = g.rows();
  state.grad_cols = g.cols();
  switch (kind) {
    case OptimizerKind::Sgd:
    case OptimizerKind::NormalizedSgd:
    case OptimizerKind::SignSgd:
      break;
    case OptimizerKind::Muon:
      ema_update(state.m, hp.beta1, g);
      break;
    case OptimizerKind::AdaGrad:
      sum_update(state.v, hadamard(g, g));
      break;
    case OptimizerKind::Adam:
    case OptimizerKind::AdamW:
    case OptimizerKind::Madgrad:
    case OptimizerKind::AdamSania:
    case OptimizerKind::MuAdam:
    case OptimizerKind::MuAdamSania:
      ema_update(state.m, hp.beta1, g);
      ema_update(state.v, hp.beta2, hadamard(g, g));
      break;
    case OptimizerKind::Shampoo:
      sum_update(state.hl, matmul(g, g.transpose()));
      sum_update(state.hr, matmul(g.transpose(), g));
      break;
    case OptimizerKind::OneSidedShampoo:
      sum_update(state.hl, matmul(g, g.transpose()));
      break;
    case OptimizerKind::Soap:
    case OptimizerKind::Splus:
      ema_update(state.hl, hp.beta2, matmul(g, g.transpose()));
      ema_update(state.hr, hp.beta2, matmul(g.transpose(), g));
      refresh_eigenbases(state, hp);
      break;
  }
  return state;
}

Preconditioner materialize_preconditioner(OptimizerKind kind, const OptimizerState& state,
                                          const HyperParams& hp) {
  switch (kind) {
    case OptimizerKind::Sgd:
    case OptimizerKind::NormalizedSgd:
    case OptimizerKind::SignSgd:
    case OptimizerKind::Muon:
      return Preconditioner::identity();
    case OptimizerKind::AdaGrad: {
      MATOPT_CHECK(state.v, "materialize: missing second-moment accumulator");
      return Preconditioner::elementwise(elementwise_pow_plus(*state.v, 0.25, hp.epsilon));
    }
    case OptimizerKind::Adam:
    case OptimizerKind::AdamW:
    case OptimizerKind::Madgrad:
    case OptimizerKind::AdamSania:
    case OptimizerKind::MuAdam:
    case OptimizerKind::MuAdamSania: {
      MATOPT_CHECK(state.v, "materialize: missing second-moment accumulator");
      const Matrix vhat = bias_corrected(*state.v, hp.beta2, state.step_count);
      return Preconditioner::elementwise(
          elementwise_pow_plus(vhat, exponents_for(kind).dnorm, hp.epsilon));
    }
    case OptimizerKind::Shampoo: {
      MATOPT_CHECK(state.hl && state.hr, "materialize: missing Kronecker accumulators");
      return Preconditioner::left_right(spd_power(*state.hl, 0.125),
                                        spd_power(*state.hr, 0.125));
    }
    case OptimizerKind::OneSidedShampoo: {
      MATOPT_CHECK(state.hl, "materialize: missing left accumulator");
      MATOPT_CHECK(state.grad_cols > 0, "materialize: gradient shape unknown");
      return Preconditioner::left_right(spd_power(*state.hl, 0.25),
                                        Matrix::identity(state.grad_cols));
    }
    case OptimizerKind::Soap:
    case OptimizerKind::Splus: {
      MATOPT_CHECK(state.ql && state.qr, "materialize: missing eigenbases");
      return Preconditioner::left_right(state.ql->transpose(), *state.qr);
    }
  }
  MATOPT_CHECK(false, "materialize: bad kind");
  return Preconditioner::identity();
}

namespace {

// Entrywise family (AdaGrad / Adam / AdamW / MADGRAD / Adam-SANIA):
// Classic is signal / (stat^q + eps); LmoNormalized is the exact D-norm
// LMO with D = stat^(q/2) + eps.
Matrix entrywise_delta(OptimizerKind kind, const Matrix& signal, const Matrix& stat,
                       const HyperParams& hp) {
  if (signal.is_zero()) return zeros_like(signal);
  const AdamExponents exps = exponents_for(kind);
  if (hp.mode == StepMode::Classic)
    return elementwise_div(signal, elementwise_pow_plus(stat, exps.classic, hp.epsilon));
  const Matrix d = elementwise_pow_plus(stat, exps.dnorm, hp.epsilon);
  return dnorm_lmo_step(signal, d, hp.rho);
}

Matrix compute_delta(OptimizerKind kind, OptimizerState& state, const Matrix& g,
                     const HyperParams& hp) {
  const long t = state.step_count;
  switch (kind) {
    case OptimizerKind::Sgd:
      return g;
    case OptimizerKind::NormalizedSgd: {
      if (g.is_zero()) return zeros_like(g);
      return (hp.rho / frob_norm(g)) * g;
    }
    case OptimizerKind::SignSgd:
      return hp.rho * sign_of(g);
    case OptimizerKind::Muon: {
      const Matrix mhat = bias_corrected(*state.m, hp.beta1, t);
      if (mhat.is_zero()) return zeros_like(g);
      return hp.rho * rms_factor(g, hp) * polar_of(mhat, hp);
    }
    case OptimizerKind::AdaGrad:
      return entrywise_delta(kind, g, *state.v, hp);
    case OptimizerKind::Adam:
    case OptimizerKind::AdamW:
    case OptimizerKind::Madgrad:
    case OptimizerKind::AdamSania: {
      const Matrix mhat = bias_corrected(*state.m, hp.beta1, t);
      const Matrix vhat = bias_corrected(*state.v, hp.beta2, t);
      return entrywise_delta(kind, mhat, vhat, hp);
    }
    case OptimizerKind::Shampoo: {
      const Matrix l = spd_power(*state.hl, 0.125);
      const Matrix r = spd_power(*state.hr, 0.125);
      if (hp.mode == StepMode::Classic) return two_sided_solve(l, r, g);
      const Matrix l_inv = spd_power(*state.hl, -0.125);
      const Matrix r_inv = spd_power(*state.hr, -0.125);
      const Matrix ghat = matmul(matmul(l_inv, g), r_inv);
      if (ghat.is_zero()) return zeros_like(g);
      return (hp.rho / frob_norm(ghat)) * matmul(matmul(l_inv, ghat), r_inv);
    }
    case OptimizerKind::OneSidedShampoo: {
      const Matrix l = spd_power(*state.hl, 0.25);
      if (hp.mode == StepMode::Classic)
        return two_sided_solve(l, Matrix::identity(g.cols()), g);
      const Matrix l_inv = spd_power(*state.hl, -0.25);
      const Matrix ghat = matmul(l_inv, g);
      if (ghat.is_zero()) return zeros_like(g);
      return (hp.rho / frob_norm(ghat)) * matmul(l_inv, ghat);
    }
    default:
      MATOPT_CHECK(false, "compute_delta: " << to_string(kind) << " has a dedicated step");
      return {};
  }
}

void check_step_shapes(const Matrix& w, const Matrix& g) {
  MATOPT_CHECK(w.rows() == g.rows() && w.cols() == g.cols(),
               "step: w is " << w.shape_str() << " but g is " << g.shape_str());
}

}  // namespace

std::pair<Matrix, OptimizerState> muadam_step(OptimizerState state, const Matrix& w,
                                              const Matrix& g, const HyperParams& hp) {
  hp.validate();
  check_step_shapes(w, g);
  MATOPT_CHECK(hp.beta1 > 0.0, "muadam: beta1 must be in (0, 1)");
  const long t = state.step_count;

  ema_update(state.m, hp.beta1, g);
  ema_update(state.v, hp.beta2, hadamard(g, g));
  const Matrix mhat = bias_corrected(*state.m, hp.beta1, t);
  const Matrix vhat = bias_corrected(*state.v, hp.beta2, t);

  Matrix delta;
  if (mhat.is_zero()) {
    delta = zeros_like(g);  // degenerate LMO: no movement
  } else {
    const Matrix denom = elementwise_pow_plus(vhat, hp.p, hp.epsilon);
    const Matrix n = elementwise_div(mhat, denom);
    const Matrix n_polar = polar_of(n, hp);
    delta = rms_factor(g, hp) * elementwise_div(n_polar, denom);
  }

  Matrix w_next = w - hp.gamma * delta;
  MATOPT_CHECK(w_next.all_finite(), "muadam: non-finite iterate");
  state.step_count = t + 1;
  return {std::move(w_next), std::move(state)};
}

namespace {

std::pair<Matrix, OptimizerState> rotated_step(OptimizerKind kind, OptimizerState state,
                                               const Matrix& w, const Matrix& g,
                                               const HyperParams& hp) {
  hp.validate();
  check_step_shapes(w, g);
  const long t = state.step_count;
  state = update_preconditioner(kind, std::move(state), g, hp);

  const Matrix& ql = *state.ql;
  const Matrix& qr = *state.qr;
  const Matrix g_rot = matmul(matmul(ql.transpose(), g), qr);

  Matrix inner;
  if (kind == OptimizerKind::Soap) {
    ema_update(state.m, hp.beta1, g_rot);
    ema_update(state.v, hp.beta2, hadamard(g_rot, g_rot));
    const Matrix mhat = bias_corrected(*state.m, hp.beta1, t);
    const Matrix vhat = bias_corrected(*state.v, hp.beta2, t);
    inner = entrywise_delta(OptimizerKind::Soap, mhat, vhat, hp);
  } else {
    ema_update(state.m, hp.beta1, g_rot);
    const Matrix mhat = bias_corrected(*state.m, hp.beta1, t);
    inner = hp.rho * sign_of(mhat);
  }

  const Matrix delta = matmul(matmul(ql, inner), qr.transpose());
  Matrix w_next = w - hp.gamma * delta;
  MATOPT_CHECK(w_next.all_finite(), "step: non-finite iterate");
  state.step_count = t + 1;
  return {std::move(w_next), std::move(state)};
}

}  // namespace

std::pair<Matrix, OptimizerState> soap_step(OptimizerState state, const Matrix& w,
                                            const Matrix& g, const HyperParams& hp) {
  return rotated_step(OptimizerKind::Soap, std::move(state), w, g, hp);
}

std::pair<Matrix, OptimizerState> splus_step(OptimizerState state, const Matrix& w,
                                             const Matrix& g, const HyperParams& hp) {
  return rotated_step(OptimizerKind::Splus, std::move(state), w, g, hp);
}

std::pair<Matrix, OptimizerState> step(OptimizerKind kind, OptimizerState state,
                                       const Matrix& w, const Matrix& g,
                                       const HyperParams& hp) {
  hp.validate();
  check_step_shapes(w, g);
  MATOPT_CHECK(g.all_finite(), "step: non-finite gradient");

  switch (kind) {
    case OptimizerKind::MuAdam: {
      HyperParams h = hp;
      h.p = 0.25;
      return muadam_step(std::move(state), w, g, h);
    }
    case OptimizerKind::MuAdamSania: {
      HyperParams h = hp;
      h.p = 0.5;
      return muadam_step(std::move(state), w, g, h);
    }
    case OptimizerKind::Soap:
      return soap_step(std::move(state), w, g, hp);
    case OptimizerKind::Splus:
      return splus_step(std::move(state), w, g, hp);
    default:
      break;
  }

  const long t = state.step_count;
  state = update_preconditioner(kind, std::move(state), g, hp);
  const Matrix delta = compute_delta(kind, state, g, hp);

  Matrix w_next = w;
  if (kind == OptimizerKind::AdamW && hp.weight_decay > 0.0)
    w_next = (1.0 - hp.gamma * hp.weight_decay) * w_next;
  w_next = w_next - hp.gamma * delta;
  MATOPT_CHECK(w_next.all_finite(), "step: non-finite iterate");
  state.step_count = t + 1;
  return {std::move(w_next), std::move(state)};
}

}  // namespace matopt
