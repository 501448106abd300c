// matopt/matrix.cpp
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

#include "matopt/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace matopt {

namespace {

constexpr int kJacobiMaxSweeps = 100;     // iteration cap for svd / sym_eig
constexpr double kJacobiTol = 1e-14;      // relative off-diagonal threshold

void check_same_shape(const Matrix& a, const Matrix& b, const char* op) {
  MATOPT_CHECK(a.rows() == b.rows() && a.cols() == b.cols(),
               op << ": shape mismatch " << a.shape_str() << " vs " << b.shape_str());
}

void check_finite(const Matrix& a, const char* op) {
  MATOPT_CHECK(a.all_finite(), op << ": non-finite result");
}

bool is_integral(double p) { return p == std::floor(p); }

}  // namespace

Matrix::Matrix(int rows, int cols) : rows_(rows), cols_(cols) {
  MATOPT_CHECK(rows >= 0 && cols >= 0, "matrix dims must be nonnegative");
  data_.assign(static_cast<size_t>(rows) * cols, 0.0);
}

Matrix::Matrix(int rows, int cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  MATOPT_CHECK(rows >= 0 && cols >= 0, "matrix dims must be nonnegative");
  MATOPT_CHECK(data_.size() == static_cast<size_t>(rows) * cols,
               "data length " << data_.size() << " != " << rows << "x" << cols);
  MATOPT_CHECK(all_finite(), "matrix constructed with non-finite entries");
}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows) {
  rows_ = static_cast<int>(rows.size());
  cols_ = rows_ == 0 ? 0 : static_cast<int>(rows.begin()->size());
  data_.reserve(static_cast<size_t>(rows_) * cols_);
  for (const auto& r : rows) {
    MATOPT_CHECK(static_cast<int>(r.size()) == cols_, "ragged initializer list");
    data_.insert(data_.end(), r.begin(), r.end());
  }
  MATOPT_CHECK(all_finite(), "matrix constructed with non-finite entries");
}

Matrix Matrix::identity(int n) {
  Matrix m(n, n);
  for (int i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::diag(const std::vector<double>& d) {
  Matrix m(static_cast<int>(d.size()), static_cast<int>(d.size()));
  for (size_t i = 0; i < d.size(); ++i) m(static_cast<int>(i), static_cast<int>(i)) = d[i];
  check_finite(m, "diag");
  return m;
}

Matrix Matrix::filled(int rows, int cols, double value) {
  Matrix m(rows, cols);
  std::fill(m.data_.begin(), m.data_.end(), value);
  check_finite(m, "filled");
  return m;
}

Matrix Matrix::transpose() const {
  Matrix t(cols_, rows_);
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

bool Matrix::all_finite() const {
  for (double x : data_)
    if (!std::isfinite(x)) return false;
  return true;
}

bool Matrix::is_zero() const {
  for (double x : data_)
    if (x != 0.0) return false;
  return true;
}

double Matrix::max_abs() const {
  double m = 0.0;
  for (double x : data_) m = std::max(m, std::fabs(x));
  return m;
}

std::string Matrix::shape_str() const {
  return std::to_string(rows_) + "x" + std::to_string(cols_);
}

bool operator==(const Matrix& a, const Matrix& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() && a.data() == b.data();
}

Matrix operator+(const Matrix& a, const Matrix& b) {
  check_same_shape(a, b, "add");
  Matrix r = a;
  for (size_t i = 0; i < r.data().size(); ++i) r.data()[i] += b.data()[i];
  check_finite(r, "add");
  return r;
}

Matrix operator-(const Matrix& a, const Matrix& b) {
  check_same_shape(a, b, "sub");
  Matrix r = a;
  for (size_t i = 0; i < r.data().size(); ++i) r.data()[i] -= b.data()[i];
  check_finite(r, "sub");
  return r;
}

Matrix operator-(const Matrix& a) { return -1.0 * a; }

Matrix operator*(double c, const Matrix& a) {
  Matrix r = a;
  for (double& x : r.data()) x *= c;
  check_finite(r, "scale");
  return r;
}

Matrix operator*(const Matrix& a, double c) { return c * a; }

Matrix matmul(const Matrix& a, const Matrix& b) {
  MATOPT_CHECK(a.cols() == b.rows(),
               "matmul: dimension mismatch " << a.shape_str() << " * " << b.shape_str());
  Matrix r(a.rows(), b.cols());
  const int m = a.rows(), k = a.cols(), n = b.cols();
  for (int i = 0; i < m; ++i) {
    for (int l = 0; l < k; ++l) {
      const double ail = a(i, l);
      if (ail == 0.0) continue;
      for (int j = 0; j < n; ++j) r(i, j) += ail * b(l, j);
    }
  }
  check_finite(r, "matmul");
  return r;
}

Matrix hadamard(const Matrix& a, const Matrix& b) {
  check_same_shape(a, b, "hadamard");
  Matrix r = a;
  for (size_t i = 0; i < r.data().size(); ++i) r.data()[i] *= b.data()[i];
  check_finite(r, "hadamard");
  return r;
}

Matrix hadamard_inv(const Matrix& a) {
  Matrix r = a;
  for (double& x : r.data()) {
    MATOPT_CHECK(x > 0.0, "hadamard_inv: nonpositive entry " << x);
    x = 1.0 / x;
  }
  return r;
}

Matrix hadamard_pow(const Matrix& a, double p) {
  Matrix r = a;
  const bool integral = is_integral(p);
  for (double& x : r.data()) {
    if (!integral) {
      MATOPT_CHECK(x >= 0.0, "hadamard_pow: negative entry " << x << " for fractional power");
      MATOPT_CHECK(x > 0.0 || p > 0.0, "hadamard_pow: zero entry with nonpositive power");
    } else {
      MATOPT_CHECK(x != 0.0 || p >= 0.0, "hadamard_pow: zero entry with negative power");
    }
    x = std::pow(x, p);
  }
  check_finite(r, "hadamard_pow");
  return r;
}

double frob_inner(const Matrix& a, const Matrix& b) {
  check_same_shape(a, b, "frob_inner");
  double s = 0.0;
  for (size_t i = 0; i < a.data().size(); ++i) s += a.data()[i] * b.data()[i];
  return s;
}

double frob_norm(const Matrix& a) { return std::sqrt(frob_inner(a, a)); }

namespace {

// Completes column j of u (which has negligible norm) to be orthonormal
// against the other columns: projects every standard basis vector and keeps
// the one with the largest residual (lowest index on ties). Deterministic.
void complete_column(Matrix& u, int j) {
  const int m = u.rows();
  std::vector<double> best(m, 0.0);
  double best_norm = -1.0;
  for (int probe = 0; probe < m; ++probe) {
    std::vector<double> v(m, 0.0);
    v[probe] = 1.0;
    for (int c = 0; c < u.cols(); ++c) {
      if (c == j) continue;
      double dot = 0.0;
      for (int i = 0; i < m; ++i) dot += u(i, c) * v[i];
      for (int i = 0; i < m; ++i) v[i] -= dot * u(i, c);
    }
    double norm = 0.0;
    for (double x : v) norm += x * x;
    norm = std::sqrt(norm);
    if (norm > best_norm) {
      best_norm = norm;
      best = v;
    }
  }
  MATOPT_CHECK(best_norm > 1e-8, "svd: failed to complete orthonormal basis");
  for (int i = 0; i < m; ++i) u(i, j) = best[i] / best_norm;
}

// One-sided Jacobi on a tall-or-square matrix (m >= n). Returns u (m x n),
// sigma (n), v (n x n), unsorted.
void one_sided_jacobi(const Matrix& input, Matrix* u_out, std::vector<double>* sigma_out,
                      Matrix* v_out) {
  const int m = input.rows(), n = input.cols();
  Matrix a = input;
  Matrix v = Matrix::identity(n);

  int sweep = 0;
  double worst_offdiag = 0.0;
  for (; sweep < kJacobiMaxSweeps; ++sweep) {
    bool rotated = false;
    worst_offdiag = 0.0;
    for (int p = 0; p < n - 1; ++p) {
      for (int q = p + 1; q < n; ++q) {
        double app = 0.0, aqq = 0.0, apq = 0.0;
        for (int i = 0; i < m; ++i) {
          app += a(i, p) * a(i, p);
          aqq += a(i, q) * a(i, q);
          apq += a(i, p) * a(i, q);
        }
        const double denom = std::sqrt(app * aqq);
        if (denom > 0.0) worst_offdiag = std::max(worst_offdiag, std::fabs(apq) / denom);
        if (std::fabs(apq) <= kJacobiTol * denom) continue;
        rotated = true;
        // Jacobi rotation zeroing the (p,q) entry of a^T a.
        const double tau = (aqq - app) / (2.0 * apq);
        const double t = (tau >= 0.0 ? 1.0 / (tau + std::sqrt(1.0 + tau * tau))
                                     : 1.0 / (tau - std::sqrt(1.0 + tau * tau)));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        for (int i = 0; i < m; ++i) {
          const double ap = a(i, p), aq = a(i, q);
          a(i, p) = c * ap - s * aq;
          a(i, q) = s * ap + c * aq;
        }
        for (int i = 0; i < n; ++i) {
          const double vp = v(i, p), vq = v(i, q);
          v(i, p) = c * vp - s * vq;
          v(i, q) = s * vp + c * vq;
        }
      }
    }
    if (!rotated) break;
  }
  MATOPT_CHECK(sweep < kJacobiMaxSweeps,
               "svd: one-sided Jacobi did not converge after " << kJacobiMaxSweeps
               << " sweeps on " << input.shape_str() << " (off-diagonal residual "
               << worst_offdiag << ")");

  std::vector<double> sigma(n);
  Matrix u(m, n);
  double sigma_max = 0.0;
  for (int j = 0; j < n; ++j) {
    double norm = 0.0;
    for (int i = 0; i < m; ++i) norm += a(i, j) * a(i, j);
    sigma[j] = std::sqrt(norm);
    sigma_max = std::max(sigma_max, sigma[j]);
  }
  // Numerically-zero columns get sigma = 0 and a completed direction.
  const double zero_tol = sigma_max * (4.4e-16 * std::max(m, n));
  std::vector<int> deficient;
  for (int j = 0; j < n; ++j) {
    if (sigma[j] <= zero_tol) {
      sigma[j] = 0.0;
      deficient.push_back(j);
    } else {
      for (int i = 0; i < m; ++i) u(i, j) = a(i, j) / sigma[j];
    }
  }
  for (int j : deficient) complete_column(u, j);

  *u_out = std::move(u);
  *sigma_out = std::move(sigma);
  *v_out = std::move(v);
}

}  // namespace

SpectralDecomposition svd(const Matrix& a) {
  MATOPT_CHECK(a.rows() >= 1 && a.cols() >= 1, "svd: empty matrix");
  MATOPT_CHECK(a.all_finite(), "svd: non-finite input");

  const bool transposed = a.rows() < a.cols();
  Matrix work = transposed ? a.transpose() : a;

  Matrix u, v;
  std::vector<double> sigma;
  one_sided_jacobi(work, &u, &sigma, &v);

  // Sort descending, stable in the original column order.
  const int r = static_cast<int>(sigma.size());
  std::vector<int> order(r);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int x, int y) { return sigma[x] > sigma[y]; });

  Matrix us(u.rows(), r), vs(v.rows(), r);
  std::vector<double> ss(r);
  for (int j = 0; j < r; ++j) {
    ss[j] = sigma[order[j]];
    for (int i = 0; i < u.rows(); ++i) us(i, j) = u(i, order[j]);
    for (int i = 0; i < v.rows(); ++i) vs(i, j) = v(i, order[j]);
  }

  SpectralDecomposition d;
  if (transposed) {
    d.u = std::move(vs);
    d.v = std::move(us);
  } else {
    d.u = std::move(us);
    d.v = std::move(vs);
  }
  d.sigma = std::move(ss);
  return d;
}

SymEig sym_eig(const Matrix& s) {
  MATOPT_CHECK(s.rows() == s.cols(), "sym_eig: matrix not square, " << s.shape_str());
  MATOPT_CHECK(s.all_finite(), "sym_eig: non-finite input");
  const int n = s.rows();
  const double scale = std::max(1.0, s.max_abs());
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      MATOPT_CHECK(std::fabs(s(i, j) - s(j, i)) <= 1e-12 * scale,
                   "sym_eig: input not symmetric at (" << i << "," << j << ")");

  // Work on the symmetrized copy; classical cyclic Jacobi.
  Matrix a = 0.5 * (s + s.transpose());
  Matrix q = Matrix::identity(n);

  auto off_norm = [&]() {
    double sum = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) sum += a(i, j) * a(i, j);
    return std::sqrt(2.0 * sum);
  };

  const double tol = kJacobiTol * std::max(1.0, frob_norm(a));
  int sweep = 0;
  for (; sweep < kJacobiMaxSweeps && off_norm() > tol; ++sweep) {
    for (int p = 0; p < n - 1; ++p) {
      for (int j = p + 1; j < n; ++j) {
        if (std::fabs(a(p, j)) <= tol / (n * n)) continue;
        const double theta = (a(j, j) - a(p, p)) / (2.0 * a(p, j));
        const double t = (theta >= 0.0 ? 1.0 / (theta + std::sqrt(1.0 + theta * theta))
                                       : 1.0 / (theta - std::sqrt(1.0 + theta * theta)));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double sn = c * t;
        for (int i = 0; i < n; ++i) {
          const double aip = a(i, p), aij = a(i, j);
          a(i, p) = c * aip - sn * aij;
          a(i, j) = sn * aip + c * aij;
        }
        for (int i = 0; i < n; ++i) {
          const double api = a(p, i), aji = a(j, i);
          a(p, i) = c * api - sn * aji;
          a(j, i) = sn * api + c * aji;
        }
        for (int i = 0; i < n; ++i) {
          const double qip = q(i, p), qij = q(i, j);
          q(i, p) = c * qip - sn * qij;
          q(i, j) = sn * qip + c * qij;
        }
      }
    }
  }
  MATOPT_CHECK(sweep < kJacobiMaxSweeps || off_norm() <= tol,
               "sym_eig: Jacobi did not converge after " << kJacobiMaxSweeps << " sweeps");

  std::vector<double> lambda(n);
  for (int i = 0; i < n; ++i) lambda[i] = a(i, i);

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int x, int y) { return lambda[x] > lambda[y]; });

  SymEig e;
  e.q = Matrix(n, n);
  e.lambda.resize(n);
  for (int j = 0; j < n; ++j) {
    e.lambda[j] = lambda[order[j]];
    for (int i = 0; i < n; ++i) e.q(i, j) = q(i, order[j]);
  }
  return e;
}

Matrix spd_power(const Matrix& s, double p, double floor) {
  MATOPT_CHECK(floor >= 0.0, "spd_power: floor must be nonnegative");
  MATOPT_CHECK(p >= 0.0 || floor > 0.0, "spd_power: p < 0 requires floor > 0");
  SymEig e = sym_eig(s);
  const double lmax = e.lambda.empty() ? 0.0 : std::max(0.0, e.lambda.front());
  const int n = s.rows();
  std::vector<double> powered(n);
  for (int i = 0; i < n; ++i) {
    MATOPT_CHECK(e.lambda[i] >= -1e-10 * std::max(1.0, lmax),
                 "spd_power: negative eigenvalue " << e.lambda[i]);
    const double lam = std::max(e.lambda[i], floor);
    if (lam == 0.0) {
      MATOPT_CHECK(p >= 0.0, "spd_power: zero eigenvalue with negative power");
      powered[i] = (p == 0.0) ? 1.0 : 0.0;
    } else {
      powered[i] = std::pow(lam, p);
    }
  }
  Matrix d = Matrix::diag(powered);
  Matrix r = matmul(matmul(e.q, d), e.q.transpose());
  // Symmetrize away rounding noise.
  return 0.5 * (r + r.transpose());
}

Matrix spd_power(const Matrix& s, double p) {
  SymEig e = sym_eig(s);
  const double lmax = e.lambda.empty() ? 0.0 : std::max(0.0, e.lambda.front());
  const double floor = 1e-12 * (lmax > 0.0 ? lmax : 1.0);
  return spd_power(s, p, floor);
}

Matrix solve(const Matrix& a, const Matrix& b) {
  MATOPT_CHECK(a.rows() == a.cols(), "solve: matrix not square");
  MATOPT_CHECK(a.rows() == b.rows(), "solve: shape mismatch");
  const int n = a.rows(), m = b.cols();
  Matrix lu = a, x = b;
  const double pivot_tol = 1e-12 * std::max(1.0, a.max_abs());
  for (int k = 0; k < n; ++k) {
    int piv = k;
    for (int i = k + 1; i < n; ++i)
      if (std::fabs(lu(i, k)) > std::fabs(lu(piv, k))) piv = i;
    MATOPT_CHECK(std::fabs(lu(piv, k)) > pivot_tol, "solve: matrix is singular");
    if (piv != k) {
      for (int j = 0; j < n; ++j) std::swap(lu(k, j), lu(piv, j));
      for (int j = 0; j < m; ++j) std::swap(x(k, j), x(piv, j));
    }
    for (int i = k + 1; i < n; ++i) {
      const double f = lu(i, k) / lu(k, k);
      if (f == 0.0) continue;
      for (int j = k; j < n; ++j) lu(i, j) -= f * lu(k, j);
      for (int j = 0; j < m; ++j) x(i, j) -= f * x(k, j);
    }
  }
  for (int k = n - 1; k >= 0; --k) {
    for (int j = 0; j < m; ++j) {
      double s = x(k, j);
      for (int i = k + 1; i < n; ++i) s -= lu(k, i) * x(i, j);
      x(k, j) = s / lu(k, k);
    }
  }
  check_finite(x, "solve");
  return x;
}

Matrix inverse(const Matrix& a) { return solve(a, Matrix::identity(a.rows())); }

}  // namespace matopt
