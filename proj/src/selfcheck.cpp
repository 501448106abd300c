// matopt/selfcheck.cpp
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

#include "matopt/selfcheck.hpp"

#include <cmath>

#include "matopt/geometry.hpp"
#include "matopt/rng.hpp"
#include "matopt/tasks.hpp"

namespace matopt {

namespace {

Matrix gaussian(Rng& rng, int m, int n) {
  Matrix a(m, n);
  for (double& x : a.data()) x = rng.normal();
  return a;
}

Preconditioner make_preconditioner(Rng& rng, Preconditioner::Kind kind, int m, int n) {
  switch (kind) {
    case Preconditioner::Kind::Identity:
      return Preconditioner::identity();
    case Preconditioner::Kind::LeftRight:
      return Preconditioner::left_right(gaussian(rng, m, m) + 3.0 * Matrix::identity(m),
                                        gaussian(rng, n, n) + 3.0 * Matrix::identity(n));
    case Preconditioner::Kind::Elementwise: {
      Matrix d(m, n);
      for (double& x : d.data()) x = std::exp(rng.uniform(-1.5, 1.5));
      return Preconditioner::elementwise(d);
    }
  }
  return Preconditioner::identity();
}

void tally(SuiteResult& out, bool ok, double gap) {
  ++out.checks;
  if (!ok) ++out.failures;
  out.worst_gap = std::max(out.worst_gap, gap);
}

Matrix conditioned_square(Rng& rng, int n, double kappa) {
  // u diag(sigma) v^T with sigma_1 = 1, sigma_n = 1/kappa.
  Matrix a = gaussian(rng, n, n);
  const auto d = svd(a);
  std::vector<double> sigma(n);
  sigma[0] = 1.0;
  for (int i = 1; i < n; ++i)
    sigma[i] = i == n - 1 ? 1.0 / kappa : std::exp(rng.uniform(std::log(1.0 / kappa), 0.0));
  Matrix s(n, n);
  for (int i = 0; i < n; ++i) s(i, i) = sigma[i];
  return matmul(matmul(d.u, s), d.v.transpose());
}

}  // namespace

SuiteResult selfcheck_lmo(int instances, int candidates) {
  SuiteResult out{"lmo"};
  Rng rng(1001);
  const int m = 3, n = 4;
  LmoConfig cfg;
  cfg.rho = 0.9;
  const BaseNorm norms[] = {BaseNorm::Frobenius, BaseNorm::Spectral, BaseNorm::MaxAbs,
                            BaseNorm::ColNorm, BaseNorm::RowNorm};
  const Preconditioner::Kind kinds[] = {Preconditioner::Kind::Identity,
                                        Preconditioner::Kind::LeftRight,
                                        Preconditioner::Kind::Elementwise};
  for (auto kind : kinds) {
    for (auto base : norms) {
      for (int i = 0; i < instances; ++i) {
        const Matrix g = gaussian(rng, m, n);
        const auto p = make_preconditioner(rng, kind, m, n);
        const auto res = lmo_precond(g, p, base, cfg);
        const double value = frob_inner(g, res.direction);

        const double norm = eval_precond_norm(res.direction, p, base);
        tally(out, std::fabs(norm - cfg.rho) <= 1e-8 * cfg.rho, std::fabs(norm - cfg.rho));

        double best = -1e300;
        for (int c = 0; c < candidates; ++c) {
          Matrix t = gaussian(rng, m, n);
          const double tn = eval_precond_norm(t, p, base);
          if (tn <= 1e-12) continue;
          const double shrink = (c % 2 == 0) ? 1.0 : std::pow(rng.uniform(), 0.25);
          t = (shrink * cfg.rho / tn) * t;
          best = std::max(best, frob_inner(g, t));
        }
        tally(out, best <= value + 1e-9, std::max(0.0, best - value));
      }
    }
  }
  return out;
}

SuiteResult selfcheck_duality(int instances) {
  SuiteResult out{"duality"};
  Rng rng(1003);
  LmoConfig cfg;
  cfg.rho = 1.3;
  for (int i = 0; i < instances; ++i) {
    const Matrix g = gaussian(rng, 4, 5);
    for (BaseNorm base : {BaseNorm::Frobenius, BaseNorm::Spectral, BaseNorm::MaxAbs,
                          BaseNorm::ColNorm, BaseNorm::RowNorm}) {
      const double got = frob_inner(g, lmo_base(g, base, cfg).direction);
      const double want = cfg.rho * dual_norm(g, base);
      const double gap = std::fabs(got - want);
      tally(out, gap <= 1e-9 * std::max(1.0, std::fabs(want)), gap);
    }
  }
  return out;
}

SuiteResult selfcheck_polar(const PolarSchedule& quintic, int instances) {
  SuiteResult out{"polar"};
  Rng rng(1005);
  for (int i = 0; i < instances; ++i) {
    const int n = 3 + static_cast<int>(rng.uniform_index(4));
    const double kappa = std::exp(rng.uniform(0.0, std::log(100.0)));
    const Matrix g = conditioned_square(rng, n, kappa);
    const Matrix exact = polar_exact(g);

    const auto cubic = polar_iterate(g, PolarSchedule::cubic(30));
    const double cubic_gap = frob_norm(cubic.factor - exact);
    tally(out, cubic_gap <= 1e-5, cubic_gap);

    try {
      const auto quint = polar_iterate(g, quintic);
      const double quint_gap = frob_norm(quint.factor - exact);
      tally(out, quint_gap <= 1e-2 && quint.residual() <= 1e-2,
            std::max(quint_gap, quint.residual()));
    } catch (const Error&) {
      tally(out, false, 1e300);  // corrupted schedules may outright diverge
    }
  }
  return out;
}

SuiteResult selfcheck_gradients(int probes) {
  SuiteResult out{"gradcheck"};
  Rng rng(1007);

  Dataset blobs = synthetic_blobs(24, 5, 2.0, 77);
  assign_splits(blobs, 0.7, 0.1, 3);
  const MlpTask mlp = mlp_loss(blobs, 6);
  const Matrix xq = gaussian(rng, 10, 4);
  const Matrix yq = gaussian(rng, 10, 2);
  const LossFn quad = quadratic_loss(xq, yq);

  struct Probe {
    const LossFn* loss;
    int rows, cols;
  };
  const Probe probes_list[] = {{&quad, 4, 2},
                               {&mlp.loss, mlp.spec.packed_rows(), mlp.spec.packed_cols()}};
  for (const auto& pr : probes_list) {
    for (int i = 0; i < probes; ++i) {
      Matrix w(pr.rows, pr.cols);
      for (double& x : w.data()) x = 0.8 * rng.normal();
      const Matrix an = pr.loss->grad(w);
      double worst = 0.0;
      for (int r = 0; r < pr.rows; ++r) {
        for (int c = 0; c < pr.cols; ++c) {
          const double h = 1e-6 * (1.0 + std::fabs(w(r, c)));
          Matrix wp = w, wm = w;
          wp(r, c) += h;
          wm(r, c) -= h;
          const double fd = (pr.loss->eval(wp) - pr.loss->eval(wm)) / (2.0 * h);
          worst = std::max(worst, std::fabs(fd - an(r, c)) / (1.0 + std::fabs(an(r, c))));
        }
      }
      tally(out, worst <= 1e-5, worst);
    }
  }
  return out;
}

std::vector<SuiteResult> run_selfchecks(const std::string& filter) {
  std::vector<SuiteResult> results;
  auto want = [&](const char* name) {
    return filter.empty() || std::string(name).find(filter) != std::string::npos;
  };
  if (want("lmo")) results.push_back(selfcheck_lmo());
  if (want("duality")) results.push_back(selfcheck_duality());
  if (want("polar")) results.push_back(selfcheck_polar());
  if (want("gradcheck")) results.push_back(selfcheck_gradients());
  return results;
}

}  // namespace matopt
