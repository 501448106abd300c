// matopt/tasks.cpp
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

#include "matopt/tasks.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <sstream>

#include "matopt/rng.hpp"

namespace matopt {

namespace {

bool parse_double(const std::string& s, double* out) {
  const char* begin = s.data();
  const char* end = begin + s.size();
  auto [ptr, ec] = std::from_chars(begin, end, *out);
  return ec == std::errc() && ptr == end;
}

bool parse_int(const std::string& s, int* out) {
  const char* begin = s.data();
  const char* end = begin + s.size();
  auto [ptr, ec] = std::from_chars(begin, end, *out);
  return ec == std::errc() && ptr == end;
}

std::string format_double(double x) {
  char buf[40];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  (void)ec;
  return std::string(buf, ptr);
}

struct RawLine {
  double label;
  std::vector<std::pair<int, double>> entries;
};

}  // namespace

Dataset parse_libsvm(const std::string& text) {
  std::vector<RawLine> lines;
  int max_index = 0;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream ls(line);
    std::string tok;
    if (!(ls >> tok)) continue;  // blank line

    RawLine raw;
    // A leading '+' is conventional for +1 labels.
    std::string label_tok = tok;
    if (!label_tok.empty() && label_tok.front() == '+') label_tok.erase(0, 1);
    MATOPT_CHECK(parse_double(label_tok, &raw.label),
                 "libsvm: bad label at line " << line_no << ", field \"" << tok << "\"");

    int prev_index = 0;
    while (ls >> tok) {
      const size_t colon = tok.find(':');
      int index = 0;
      double value = 0.0;
      MATOPT_CHECK(colon != std::string::npos &&
                       parse_int(tok.substr(0, colon), &index) &&
                       parse_double(tok.substr(colon + 1), &value),
                   "libsvm: malformed entry at line " << line_no << ", field \"" << tok << "\"");
      MATOPT_CHECK(index >= 1, "libsvm: index " << index << " at line " << line_no
                                                << " is not 1-based");
      MATOPT_CHECK(index > prev_index, "libsvm: non-ascending index at line " << line_no
                                                                             << ", field \"" << tok << "\"");
      MATOPT_CHECK(std::isfinite(value),
                   "libsvm: non-finite value at line " << line_no << ", field \"" << tok << "\"");
      prev_index = index;
      max_index = std::max(max_index, index);
      raw.entries.emplace_back(index, value);
    }
    lines.push_back(std::move(raw));
  }
  MATOPT_CHECK(!lines.empty(), "libsvm: empty input");

  bool any_minus_one = false, any_zero = false;
  for (const auto& l : lines) {
    if (l.label == -1.0) any_minus_one = true;
    if (l.label == 0.0) any_zero = true;
  }

  Dataset d;
  d.x = Matrix(static_cast<int>(lines.size()), max_index);
  d.y.reserve(lines.size());
  for (size_t i = 0; i < lines.size(); ++i) {
    const double lab = lines[i].label;
    double mapped;
    if (any_minus_one) {
      MATOPT_CHECK(lab == -1.0 || lab == 1.0,
                   "libsvm: label " << lab << " outside {-1, +1} at line " << i + 1);
      mapped = lab == -1.0 ? 0.0 : 1.0;
    } else if (any_zero) {
      MATOPT_CHECK(lab == 0.0 || lab == 1.0,
                   "libsvm: label " << lab << " outside {0, 1} at line " << i + 1);
      mapped = lab;
    } else {
      MATOPT_CHECK(lab == 1.0 || lab == 2.0,
                   "libsvm: label " << lab << " outside {1, 2} at line " << i + 1);
      mapped = lab - 1.0;
    }
    d.y.push_back(mapped);
    for (const auto& [idx, val] : lines[i].entries)
      d.x(static_cast<int>(i), idx - 1) = val;
  }
  return d;
}

std::string to_libsvm(const Dataset& d) {
  std::ostringstream out;
  bool last_col_used = false;
  for (int i = 0; i < d.samples(); ++i)
    if (d.x(i, d.features() - 1) != 0.0) last_col_used = true;
  for (int i = 0; i < d.samples(); ++i) {
    out << static_cast<int>(d.y[i]);
    for (int j = 0; j < d.features(); ++j)
      if (d.x(i, j) != 0.0) out << ' ' << (j + 1) << ':' << format_double(d.x(i, j));
    if (i == 0 && !last_col_used) out << ' ' << d.features() << ":0";
    out << '\n';
  }
  return out.str();
}

void assign_splits(Dataset& d, double train_frac, double val_frac, uint64_t seed) {
  MATOPT_CHECK(train_frac > 0.0 && val_frac >= 0.0 && train_frac + val_frac <= 1.0,
               "assign_splits: bad fractions");
  const int n = d.samples();
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  Rng rng(seed);
  rng.shuffle(idx);
  const int n_train = static_cast<int>(std::lround(train_frac * n));
  const int n_val = static_cast<int>(std::lround(val_frac * n));
  d.train_idx.assign(idx.begin(), idx.begin() + n_train);
  d.val_idx.assign(idx.begin() + n_train, idx.begin() + n_train + n_val);
  d.test_idx.assign(idx.begin() + n_train + n_val, idx.end());
}

std::pair<Dataset, std::vector<double>> scale_features(const Dataset& d, double k,
                                                       uint64_t seed) {
  MATOPT_CHECK(k >= 0.0, "scale_features: k must be nonnegative");
  Rng rng(seed);
  std::vector<double> e(d.features());
  for (double& ei : e) ei = std::exp(rng.uniform(-k, k));
  Dataset scaled = d;
  for (int i = 0; i < d.samples(); ++i)
    for (int j = 0; j < d.features(); ++j) scaled.x(i, j) = d.x(i, j) * e[j];
  return {std::move(scaled), std::move(e)};
}

Dataset synthetic_blobs(int samples, int features, double separation, uint64_t seed) {
  MATOPT_CHECK(samples >= 2 && features >= 1, "synthetic_blobs: degenerate shape");
  Rng rng(seed);
  std::vector<double> dir(features);
  double norm = 0.0;
  for (double& x : dir) {
    x = rng.normal();
    norm += x * x;
  }
  norm = std::sqrt(norm);
  for (double& x : dir) x /= norm;

  Dataset d;
  d.x = Matrix(samples, features);
  d.y.resize(samples);
  for (int i = 0; i < samples; ++i) {
    const int label = i % 2;  // exactly balanced
    const double sign = label == 1 ? 1.0 : -1.0;
    for (int j = 0; j < features; ++j)
      d.x(i, j) = sign * 0.5 * separation * dir[j] + rng.normal();
    d.y[i] = label;
  }
  return d;
}

LossFn quadratic_loss(const Matrix& x, const Matrix& y) {
  MATOPT_CHECK(x.rows() == y.rows(), "quadratic_loss: X and Y row counts differ");
  LossFn f;
  f.rows = x.cols();
  f.cols = y.cols();
  f.eval = [x, y](const Matrix& w) {
    const Matrix r = matmul(x, w) - y;
    return frob_inner(r, r);
  };
  f.grad = [x, y](const Matrix& w) {
    const Matrix r = matmul(x, w) - y;
    return 2.0 * matmul(x.transpose(), r);
  };
  return f;
}

Matrix mlp_init_params(const MlpSpec& spec, uint64_t seed) {
  Matrix p(spec.packed_rows(), spec.packed_cols());
  Rng rng(seed);
  const double bound = 1.0 / std::sqrt(static_cast<double>(spec.hidden));
  for (int c = 0; c < spec.classes; ++c)
    for (int h = 0; h < spec.hidden; ++h)
      p(spec.features + c, h) = rng.uniform(-bound, bound);
  return p;  // W1 rows stay zero
}

Matrix mlp_w1(const MlpSpec& spec, const Matrix& params) {
  Matrix w1(spec.features, spec.hidden);
  for (int i = 0; i < spec.features; ++i)
    for (int h = 0; h < spec.hidden; ++h) w1(i, h) = params(i, h);
  return w1;
}

Matrix mlp_w2(const MlpSpec& spec, const Matrix& params) {
  Matrix w2(spec.hidden, spec.classes);
  for (int c = 0; c < spec.classes; ++c)
    for (int h = 0; h < spec.hidden; ++h) w2(h, c) = params(spec.features + c, h);
  return w2;
}

namespace {

Matrix relu(const Matrix& z) {
  Matrix a = z;
  for (double& x : a.data()) x = x > 0.0 ? x : 0.0;
  return a;
}

}  // namespace

Matrix mlp_logits(const MlpSpec& spec, const Matrix& params, const Matrix& x) {
  MATOPT_CHECK(x.cols() == spec.features, "mlp: feature count mismatch");
  const Matrix a1 = relu(matmul(x, mlp_w1(spec, params)));
  return matmul(a1, mlp_w2(spec, params));
}

std::vector<int> mlp_predict(const MlpSpec& spec, const Matrix& params, const Matrix& x) {
  const Matrix logits = mlp_logits(spec, params, x);
  std::vector<int> pred(x.rows());
  for (int i = 0; i < logits.rows(); ++i) {
    int arg = 0;
    for (int c = 1; c < logits.cols(); ++c)
      if (logits(i, c) > logits(i, arg)) arg = c;
    pred[i] = arg;
  }
  return pred;
}

MlpTask mlp_loss(const Dataset& d, int hidden) {
  MATOPT_CHECK(hidden >= 1, "mlp_loss: hidden must be >= 1");
  MATOPT_CHECK(!d.train_idx.empty(), "mlp_loss: dataset has no train split");
  for (double lab : d.y)
    MATOPT_CHECK(lab == 0.0 || lab == 1.0, "mlp_loss: labels must be binary");

  MlpTask task;
  task.spec = MlpSpec{d.features(), hidden, 2};

  const int n = static_cast<int>(d.train_idx.size());
  Matrix x_train(n, d.features());
  std::vector<int> y_train(n);
  for (int i = 0; i < n; ++i) {
    const int src = d.train_idx[i];
    for (int j = 0; j < d.features(); ++j) x_train(i, j) = d.x(src, j);
    y_train[i] = static_cast<int>(d.y[src]);
  }

  const MlpSpec spec = task.spec;
  task.loss.rows = spec.packed_rows();
  task.loss.cols = spec.packed_cols();

  // Full-batch softmax cross-entropy, max-subtracted for stability.
  task.loss.eval = [spec, x_train, y_train](const Matrix& params) {
    const Matrix logits = mlp_logits(spec, params, x_train);
    const int n = logits.rows(), c = logits.cols();
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
      double mx = logits(i, 0);
      for (int j = 1; j < c; ++j) mx = std::max(mx, logits(i, j));
      double lse = 0.0;
      for (int j = 0; j < c; ++j) lse += std::exp(logits(i, j) - mx);
      total += mx + std::log(lse) - logits(i, y_train[i]);
    }
    return total / n;
  };

  // Hand-derived backpropagation for both layers, packed like the params.
  // relu'(0) is taken as 1 so the zero-initialized first layer receives
  // gradient signal at the first step.
  task.loss.grad = [spec, x_train, y_train](const Matrix& params) {
    const Matrix w1 = mlp_w1(spec, params);
    const Matrix w2 = mlp_w2(spec, params);
    const Matrix z1 = matmul(x_train, w1);
    const Matrix a1 = relu(z1);
    const Matrix logits = matmul(a1, w2);
    const int n = logits.rows(), c = logits.cols();

    Matrix dlogits(n, c);
    for (int i = 0; i < n; ++i) {
      double mx = logits(i, 0);
      for (int j = 1; j < c; ++j) mx = std::max(mx, logits(i, j));
      double lse = 0.0;
      for (int j = 0; j < c; ++j) lse += std::exp(logits(i, j) - mx);
      for (int j = 0; j < c; ++j) {
        const double soft = std::exp(logits(i, j) - mx) / lse;
        dlogits(i, j) = (soft - (j == y_train[i] ? 1.0 : 0.0)) / n;
      }
    }

    const Matrix g_w2 = matmul(a1.transpose(), dlogits);  // hidden x classes
    Matrix dz1 = matmul(dlogits, w2.transpose());         // n x hidden
    for (int i = 0; i < n; ++i)
      for (int h = 0; h < spec.hidden; ++h)
        if (z1(i, h) < 0.0) dz1(i, h) = 0.0;
    const Matrix g_w1 = matmul(x_train.transpose(), dz1);  // features x hidden

    Matrix g(spec.packed_rows(), spec.packed_cols());
    for (int i = 0; i < spec.features; ++i)
      for (int h = 0; h < spec.hidden; ++h) g(i, h) = g_w1(i, h);
    for (int ci = 0; ci < spec.classes; ++ci)
      for (int h = 0; h < spec.hidden; ++h) g(spec.features + ci, h) = g_w2(h, ci);
    return g;
  };
  return task;
}

double accuracy(const MlpSpec& spec, const Matrix& params, const Dataset& d,
                const std::vector<int>& split) {
  MATOPT_CHECK(!split.empty(), "accuracy: empty split");
  Matrix x(static_cast<int>(split.size()), d.features());
  for (size_t i = 0; i < split.size(); ++i)
    for (int j = 0; j < d.features(); ++j) x(static_cast<int>(i), j) = d.x(split[i], j);
  const std::vector<int> pred = mlp_predict(spec, params, x);
  int correct = 0;
  for (size_t i = 0; i < split.size(); ++i)
    if (pred[i] == static_cast<int>(d.y[split[i]])) ++correct;
  return static_cast<double>(correct) / split.size();
}

Reparam mlp_scale_reparam(const MlpSpec& spec, const std::vector<double>& e) {
  MATOPT_CHECK(static_cast<int>(e.size()) == spec.features,
               "mlp_scale_reparam: scale length != feature count");
  Matrix a = Matrix::filled(spec.packed_rows(), spec.packed_cols(), 1.0);
  for (int i = 0; i < spec.features; ++i)
    for (int h = 0; h < spec.hidden; ++h) a(i, h) = e[i];
  return Reparam::elementwise_scale(std::move(a));
}

Reparam quadratic_scale_reparam(int features, int targets, const std::vector<double>& e) {
  MATOPT_CHECK(static_cast<int>(e.size()) == features,
               "quadratic_scale_reparam: scale length != feature count");
  Matrix a = Matrix::filled(features, targets, 1.0);
  for (int i = 0; i < features; ++i)
    for (int j = 0; j < targets; ++j) a(i, j) = e[i];
  return Reparam::elementwise_scale(std::move(a));
}

}  // namespace matopt
