// matopt/matrix.hpp
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

#ifndef MATOPT_MATRIX_HPP
#define MATOPT_MATRIX_HPP

#include <initializer_list>
#include <string>
#include <vector>

#include "matopt/check.hpp"

namespace matopt {

// Dense row-major matrix of doubles. Entries are finite by construction;
// every operation that could produce NaN/Inf validates its result.
class Matrix {
 public:
  Matrix() : rows_(0), cols_(0) {}
  Matrix(int rows, int cols);                             // zero-filled
  Matrix(int rows, int cols, std::vector<double> data);   // validates
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  static Matrix identity(int n);
  static Matrix diag(const std::vector<double>& d);
  static Matrix filled(int rows, int cols, double value);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  long size() const { return static_cast<long>(rows_) * cols_; }
  bool empty() const { return rows_ == 0 || cols_ == 0; }

  double& operator()(int i, int j) { return data_[static_cast<size_t>(i) * cols_ + j]; }
  double operator()(int i, int j) const { return data_[static_cast<size_t>(i) * cols_ + j]; }
  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }

  Matrix transpose() const;
  bool all_finite() const;
  bool is_zero() const;
  double max_abs() const;
  std::string shape_str() const;

 private:
  int rows_, cols_;
  std::vector<double> data_;
};

bool operator==(const Matrix& a, const Matrix& b);

Matrix operator+(const Matrix& a, const Matrix& b);
Matrix operator-(const Matrix& a, const Matrix& b);
Matrix operator-(const Matrix& a);
Matrix operator*(double c, const Matrix& a);
Matrix operator*(const Matrix& a, double c);

Matrix matmul(const Matrix& a, const Matrix& b);
Matrix hadamard(const Matrix& a, const Matrix& b);
Matrix hadamard_inv(const Matrix& a);
Matrix hadamard_pow(const Matrix& a, double p);

double frob_inner(const Matrix& a, const Matrix& b);
double frob_norm(const Matrix& a);

// Thin SVD a = u * diag(sigma) * v^T with sigma sorted descending.
// Zero singular values are kept; the matching columns of u (or v) are
// completed by Gram-Schmidt against the earlier ones so the polar factor
// u * v^T is always defined.
struct SpectralDecomposition {
  Matrix u;                   // m x r, orthonormal columns
  std::vector<double> sigma;  // r = min(m, n), descending, nonnegative
  Matrix v;                   // n x r, orthonormal columns
};

// One-sided Jacobi. Deterministic: fixed sweep order, no randomness.
SpectralDecomposition svd(const Matrix& a);

struct SymEig {
  Matrix q;                    // n x n orthogonal, eigenvectors in columns
  std::vector<double> lambda;  // descending
};

// Cyclic Jacobi for symmetric matrices. Input must be symmetric within
// 1e-12 relative to its largest entry.
SymEig sym_eig(const Matrix& s);

// q * diag(max(lambda_i, floor)^p) * q^T for symmetric PSD s.
// p < 0 requires floor > 0.
Matrix spd_power(const Matrix& s, double p, double floor);

// Same with the default floor 1e-12 * max eigenvalue (or 1e-12 if the
// matrix is zero), for inverse roots of near-singular accumulators.
Matrix spd_power(const Matrix& s, double p);

// Gaussian elimination with partial pivoting; pivot threshold is
// 1e-12 relative to the largest entry of a.
Matrix solve(const Matrix& a, const Matrix& b);
Matrix inverse(const Matrix& a);

}  // namespace matopt

#endif  // MATOPT_MATRIX_HPP
