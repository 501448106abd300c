// matopt/geometry.cpp
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

#include "matopt/geometry.hpp"

#include <cmath>

namespace matopt {

std::string to_string(BaseNorm b) {
  switch (b) {
    case BaseNorm::Frobenius: return "frobenius";
    case BaseNorm::Spectral: return "spectral";
    case BaseNorm::MaxAbs: return "max-abs";
    case BaseNorm::ColNorm: return "col-norm";
    case BaseNorm::RowNorm: return "row-norm";
  }
  return "?";
}

Preconditioner Preconditioner::identity() { return Preconditioner(); }

Preconditioner Preconditioner::left_right(Matrix l, Matrix r) {
  MATOPT_CHECK(l.rows() == l.cols() && r.rows() == r.cols(),
               "preconditioner: L and R must be square");
  for (const Matrix* m : {&l, &r}) {
    SpectralDecomposition d = svd(*m);
    MATOPT_CHECK(d.sigma.back() > 1e-12 * d.sigma.front(),
                 "preconditioner: factor is singular (sigma_min/sigma_max = "
                     << (d.sigma.front() > 0 ? d.sigma.back() / d.sigma.front() : 0.0) << ")");
  }
  Preconditioner p;
  p.kind_ = Kind::LeftRight;
  p.l_ = std::move(l);
  p.r_ = std::move(r);
  return p;
}

Preconditioner Preconditioner::elementwise(Matrix d) {
  for (double x : d.data())
    MATOPT_CHECK(x > 0.0, "preconditioner: D entry " << x << " is not positive");
  Preconditioner p;
  p.kind_ = Kind::Elementwise;
  p.d_ = std::move(d);
  return p;
}

namespace {

double col_norm(const Matrix& g, int j) {
  double s = 0.0;
  for (int i = 0; i < g.rows(); ++i) s += g(i, j) * g(i, j);
  return std::sqrt(s);
}

double row_norm(const Matrix& g, int i) {
  double s = 0.0;
  for (int j = 0; j < g.cols(); ++j) s += g(i, j) * g(i, j);
  return std::sqrt(s);
}

// Column scale for ColNorm (1 -> RMS geometry divides by sqrt(rows)) and
// row scale for RowNorm (RMS -> inf geometry multiplies by sqrt(cols)).
double col_scale(const Matrix& g, bool rms) { return rms ? 1.0 / std::sqrt(double(g.rows())) : 1.0; }
double row_scale(const Matrix& g, bool rms) { return rms ? std::sqrt(double(g.cols())) : 1.0; }

// Symmetric matrices are inverted through their eigendecomposition, the
// general case through Gaussian elimination.
Matrix invert_factor(const Matrix& m) {
  const int n = m.rows();
  const double scale = std::max(1.0, m.max_abs());
  bool symmetric = true;
  for (int i = 0; i < n && symmetric; ++i)
    for (int j = i + 1; j < n; ++j)
      if (std::fabs(m(i, j) - m(j, i)) > 1e-12 * scale) {
        symmetric = false;
        break;
      }
  if (symmetric) {
    SymEig e = sym_eig(m);
    double lmax = 0.0;
    for (double l : e.lambda) lmax = std::max(lmax, std::fabs(l));
    std::vector<double> inv(e.lambda.size());
    for (size_t i = 0; i < e.lambda.size(); ++i) {
      MATOPT_CHECK(std::fabs(e.lambda[i]) > 1e-12 * std::max(lmax, 1e-300),
                   "lmo_precond: singular preconditioner factor");
      inv[i] = 1.0 / e.lambda[i];
    }
    return matmul(matmul(e.q, Matrix::diag(inv)), e.q.transpose());
  }
  return inverse(m);
}

}  // namespace

double eval_base_norm(const Matrix& g, BaseNorm base, bool rms_scaling) {
  MATOPT_CHECK(g.all_finite(), "eval_base_norm: non-finite input");
  switch (base) {
    case BaseNorm::Frobenius:
      return frob_norm(g);
    case BaseNorm::Spectral: {
      if (g.is_zero()) return 0.0;
      const double smax = svd(g).sigma.front();
      return rms_scaling ? std::sqrt(double(g.rows()) / g.cols()) * smax : smax;
    }
    case BaseNorm::MaxAbs:
      return g.max_abs();
    case BaseNorm::ColNorm: {
      double m = 0.0;
      for (int j = 0; j < g.cols(); ++j) m = std::max(m, col_norm(g, j));
      return m * col_scale(g, rms_scaling);
    }
    case BaseNorm::RowNorm: {
      double m = 0.0;
      for (int i = 0; i < g.rows(); ++i) m = std::max(m, row_norm(g, i));
      return m * row_scale(g, rms_scaling);
    }
  }
  MATOPT_CHECK(false, "eval_base_norm: bad tag");
  return 0.0;
}

double eval_precond_norm(const Matrix& g, const Preconditioner& p, BaseNorm base,
                         bool rms_scaling) {
  switch (p.kind()) {
    case Preconditioner::Kind::Identity:
      return eval_base_norm(g, base, rms_scaling);
    case Preconditioner::Kind::LeftRight:
      return eval_base_norm(matmul(matmul(p.l(), g), p.r()), base, rms_scaling);
    case Preconditioner::Kind::Elementwise:
      return eval_base_norm(hadamard(p.d(), g), base, rms_scaling);
  }
  MATOPT_CHECK(false, "eval_precond_norm: bad tag");
  return 0.0;
}

double dual_norm(const Matrix& g, BaseNorm base, bool rms_scaling) {
  switch (base) {
    case BaseNorm::Frobenius:
      return frob_norm(g);
    case BaseNorm::Spectral: {
      if (g.is_zero()) return 0.0;
      double nuclear = 0.0;
      for (double s : svd(g).sigma) nuclear += s;
      return rms_scaling ? std::sqrt(double(g.cols()) / g.rows()) * nuclear : nuclear;
    }
    case BaseNorm::MaxAbs: {
      double l1 = 0.0;
      for (double x : g.data()) l1 += std::fabs(x);
      return l1;
    }
    case BaseNorm::ColNorm: {
      double s = 0.0;
      for (int j = 0; j < g.cols(); ++j) s += col_norm(g, j);
      return s / col_scale(g, rms_scaling);
    }
    case BaseNorm::RowNorm: {
      double s = 0.0;
      for (int i = 0; i < g.rows(); ++i) s += row_norm(g, i);
      return s / row_scale(g, rms_scaling);
    }
  }
  MATOPT_CHECK(false, "dual_norm: bad tag");
  return 0.0;
}

LmoResult lmo_base(const Matrix& g, BaseNorm base, const LmoConfig& cfg) {
  MATOPT_CHECK(cfg.rho > 0.0, "lmo: rho must be positive");
  MATOPT_CHECK(g.all_finite(), "lmo: non-finite input");
  if (g.is_zero()) return {Matrix(g.rows(), g.cols()), true};

  LmoResult out;
  switch (base) {
    case BaseNorm::Frobenius: {
      out.direction = (cfg.rho / frob_norm(g)) * g;
      break;
    }
    case BaseNorm::Spectral: {
      Matrix uvt = cfg.spectral_backend == SpectralBackend::ExactSvd
                       ? polar_exact(g)
                       : polar_iterate(g, cfg.newton_schulz).factor;
      double scale = cfg.rho;
      if (cfg.rms_scaling) scale *= std::sqrt(double(g.cols()) / g.rows());
      out.direction = scale * uvt;
      break;
    }
    case BaseNorm::MaxAbs: {
      Matrix t = g;
      for (double& x : t.data()) x = (x > 0.0) - (x < 0.0);  // sign, sign(0) = 0
      out.direction = cfg.rho * t;
      break;
    }
    case BaseNorm::ColNorm: {
      Matrix t = g;
      const double scale = cfg.rho / col_scale(g, cfg.rms_scaling);
      for (int j = 0; j < g.cols(); ++j) {
        const double n = col_norm(g, j);
        if (n == 0.0) continue;  // zero columns stay zero
        for (int i = 0; i < g.rows(); ++i) t(i, j) = scale * g(i, j) / n;
      }
      out.direction = std::move(t);
      break;
    }
    case BaseNorm::RowNorm: {
      Matrix t = g;
      const double scale = cfg.rho / row_scale(g, cfg.rms_scaling);
      for (int i = 0; i < g.rows(); ++i) {
        const double n = row_norm(g, i);
        if (n == 0.0) continue;
        for (int j = 0; j < g.cols(); ++j) t(i, j) = scale * g(i, j) / n;
      }
      out.direction = std::move(t);
      break;
    }
  }
  return out;
}

LmoResult lmo_precond(const Matrix& g, const Preconditioner& p, BaseNorm base,
                      const LmoConfig& cfg) {
  switch (p.kind()) {
    case Preconditioner::Kind::Identity:
      return lmo_base(g, base, cfg);
    case Preconditioner::Kind::LeftRight: {
      MATOPT_CHECK(p.l().rows() == g.rows() && p.r().rows() == g.cols(),
                   "lmo_precond: (L, R) shapes do not match the gradient");
      const Matrix l_inv = invert_factor(p.l());
      const Matrix r_inv = invert_factor(p.r());
      const Matrix g_hat = matmul(matmul(l_inv.transpose(), g), r_inv.transpose());
      LmoResult inner = lmo_base(g_hat, base, cfg);
      inner.direction = matmul(matmul(l_inv, inner.direction), r_inv);
      return inner;
    }
    case Preconditioner::Kind::Elementwise: {
      MATOPT_CHECK(p.d().rows() == g.rows() && p.d().cols() == g.cols(),
                   "lmo_precond: D shape does not match the gradient");
      const Matrix d_inv = hadamard_inv(p.d());
      LmoResult inner = lmo_base(hadamard(d_inv, g), base, cfg);
      inner.direction = hadamard(d_inv, inner.direction);
      return inner;
    }
  }
  MATOPT_CHECK(false, "lmo_precond: bad tag");
  return {};
}

}  // namespace matopt
