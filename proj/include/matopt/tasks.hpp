// matopt/tasks.hpp
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

#ifndef MATOPT_TASKS_HPP
#define MATOPT_TASKS_HPP

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "matopt/invariance.hpp"
#include "matopt/matrix.hpp"

namespace matopt {

struct Dataset {
  Matrix x;               // samples x features, dense
  std::vector<double> y;  // binary labels in {0, 1}
  std::vector<int> train_idx, val_idx, test_idx;

  int samples() const { return x.rows(); }
  int features() const { return x.cols(); }
};

// LIBSVM text format: `<label> <index>:<value> ...` per nonempty line,
// 1-based strictly ascending indices, absent indices read as 0. Labels
// {-1,+1} and {1,2} are mapped to {0,1}; {0,1} pass through. Errors
// report the line number and offending field.
Dataset parse_libsvm(const std::string& text);

// Inverse of parse_libsvm on the dense representation (nonzero entries
// only; pins the feature count with an explicit trailing zero when the
// last column is empty). Mixed {0,1} labels round-trip exactly.
std::string to_libsvm(const Dataset& d);

// Seeded shuffle split into train/validation/test fractions.
void assign_splits(Dataset& d, double train_frac, double val_frac, uint64_t seed);

// Feature scaling X~ = X diag(e), e_i = exp(a_i), a_i ~ Uniform[-k, k].
// Returns the scaled dataset (sharing labels and splits) and e.
std::pair<Dataset, std::vector<double>> scale_features(const Dataset& d, double k,
                                                       uint64_t seed);

// Two balanced Gaussian blobs at +/- separation/2 along a seeded random
// unit direction; the default desk-scale classification fixture.
Dataset synthetic_blobs(int samples, int features, double separation, uint64_t seed);

// L(W) = ||X W - Y||_F^2 with grad 2 X^T (X W - Y).
LossFn quadratic_loss(const Matrix& x, const Matrix& y);

// Bias-free two-layer ReLU perceptron over a packed parameter matrix of
// shape (features + classes) x hidden: rows [0, features) hold W1 and
// rows [features, features + classes) hold W2^T. Packing the layers into
// one matrix lets one optimizer state drive the whole model while
// elementwise reparameterizations can still target the first layer.
struct MlpSpec {
  int features = 0;
  int hidden = 0;
  int classes = 2;

  int packed_rows() const { return features + classes; }
  int packed_cols() const { return hidden; }
};

Matrix mlp_init_params(const MlpSpec& spec, uint64_t seed);  // W1 zero, W2 uniform
Matrix mlp_w1(const MlpSpec& spec, const Matrix& params);    // features x hidden
Matrix mlp_w2(const MlpSpec& spec, const Matrix& params);    // hidden x classes
Matrix mlp_logits(const MlpSpec& spec, const Matrix& params, const Matrix& x);
std::vector<int> mlp_predict(const MlpSpec& spec, const Matrix& params, const Matrix& x);

struct MlpTask {
  MlpSpec spec;
  LossFn loss;  // full-batch softmax cross-entropy on the train split
};

MlpTask mlp_loss(const Dataset& d, int hidden);

// Fraction of correct argmax predictions on a split.
double accuracy(const MlpSpec& spec, const Matrix& params, const Dataset& d,
                const std::vector<int>& split);

// The parameter reparam induced by feature scaling: row i of W1 is scaled
// by e_i, the W2 block is left alone.
Reparam mlp_scale_reparam(const MlpSpec& spec, const std::vector<double>& e);

// Same for the quadratic task (W is features x targets).
Reparam quadratic_scale_reparam(int features, int targets, const std::vector<double>& e);

}  // namespace matopt

#endif  // MATOPT_TASKS_HPP
