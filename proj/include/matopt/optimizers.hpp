// matopt/optimizers.hpp
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

#ifndef MATOPT_OPTIMIZERS_HPP
#define MATOPT_OPTIMIZERS_HPP

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "matopt/geometry.hpp"
#include "matopt/matrix.hpp"
#include "matopt/polar.hpp"

namespace matopt {

// The catalogue. Each entry is one (preconditioner, base norm) pair; see
// README.md for the full table.
enum class OptimizerKind {
  Sgd,
  NormalizedSgd,
  SignSgd,
  Muon,
  AdaGrad,
  Adam,
  AdamW,
  Madgrad,
  AdamSania,
  Shampoo,
  OneSidedShampoo,
  Soap,
  Splus,
  MuAdam,
  MuAdamSania,
};

std::string to_string(OptimizerKind k);
std::optional<OptimizerKind> optimizer_from_string(const std::string& name);
std::vector<OptimizerKind> all_optimizers();

// LmoNormalized takes the exact norm-ball step (the update always lands on
// the trust-region boundary); Classic omits that normalization where the
// historical method does (Adam, AdaGrad, Shampoo, ...). Inherently
// normalized methods (sign, polar, normalized SGD) behave the same in both.
enum class StepMode { LmoNormalized, Classic };

struct HyperParams {
  double gamma = 1e-3;        // step size
  double beta1 = 0.9;         // momentum EMA; 0 disables momentum
  double beta2 = 0.999;       // second-moment EMA
  double epsilon = 1e-8;      // stability constant
  double p = 0.25;            // exponent for the MuAdam family: 1/4 or 1/2
  double rho = 1.0;           // trust-region radius of the LMO
  double weight_decay = 0.0;  // decoupled, AdamW only
  StepMode mode = StepMode::Classic;
  bool rms_scaling = false;
  SpectralBackend spectral_backend = SpectralBackend::NewtonSchulz;
  PolarSchedule polar = PolarSchedule::quintic_default();
  int refresh_every = 10;     // SOAP / SPlus eigenbasis refresh period

  void validate() const;
};

// Per-trajectory mutable buffers. A state belongs to exactly one
// trajectory; distinct trajectories can run on distinct threads.
struct OptimizerState {
  long step_count = 0;           // t, incremented once per step
  std::optional<Matrix> m;       // first moment
  std::optional<Matrix> v;       // second moment (entrywise, nonnegative)
  std::optional<Matrix> hl, hr;  // Kronecker accumulators (SPD)
  std::optional<Matrix> ql, qr;  // cached eigenbases
  long refresh_counter = 0;      // steps since the last eigenbasis refresh
  int grad_rows = 0, grad_cols = 0;  // shape of the gradients seen so far
};

// One optimization step: w_next = w - gamma * delta(kind). Advances every
// state buffer exactly once.
std::pair<Matrix, OptimizerState> step(OptimizerKind kind, OptimizerState state,
                                       const Matrix& w, const Matrix& g,
                                       const HyperParams& hp);

// The accumulator recursion of the kind, applied once (no step-count
// change; `step` calls this first and increments the counter at the end).
OptimizerState update_preconditioner(OptimizerKind kind, OptimizerState state,
                                     const Matrix& g, const HyperParams& hp);

// The preconditioner whose transformed-space LMO reproduces the method,
// built from the accumulators as left by update_preconditioner within the
// current step. Throws if a required accumulator is missing.
Preconditioner materialize_preconditioner(OptimizerKind kind, const OptimizerState& state,
                                          const HyperParams& hp);

// The base norm of the kind's catalogue row.
BaseNorm base_norm_for(OptimizerKind kind);

// True for kinds whose LMO input is the bias-corrected momentum rather
// than the raw gradient.
bool uses_momentum(OptimizerKind kind);

// buf / (1 - beta^(t+1))
Matrix bias_corrected(const Matrix& buf, double beta, long t);

// MuAdam / MuAdam-SANIA step (exponent hp.p: 1/4 or 1/2): momentum and
// second-moment EMAs with bias correction, entrywise preconditioning,
// iterative polar factor, the same preconditioning again, then the update.
std::pair<Matrix, OptimizerState> muadam_step(OptimizerState state, const Matrix& w,
                                              const Matrix& g, const HyperParams& hp);

// Rotated-eigenbasis hybrids: gradient is rotated into the cached Shampoo
// eigenbases, the inner rule (Adam for SOAP, sign for SPlus) is applied
// there, and the result is rotated back.
std::pair<Matrix, OptimizerState> soap_step(OptimizerState state, const Matrix& w,
                                            const Matrix& g, const HyperParams& hp);
std::pair<Matrix, OptimizerState> splus_step(OptimizerState state, const Matrix& w,
                                             const Matrix& g, const HyperParams& hp);

}  // namespace matopt

#endif  // MATOPT_OPTIMIZERS_HPP
