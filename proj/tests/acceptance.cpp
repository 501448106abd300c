// Acceptance suite: end-to-end checks with pinned tolerances, one pass/fail
// line per criterion. Returns the number of failed criteria.
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

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "matopt/harness.hpp"
#include "matopt/invariance.hpp"
#include "matopt/rng.hpp"
#include "matopt/selfcheck.hpp"
#include "matopt/tasks.hpp"

using namespace matopt;
namespace fs = std::filesystem;

namespace {

struct Check {
  bool ok = true;
  std::ostringstream detail;
};

void expect(Check& c, bool ok, const std::string& what) {
  if (!ok) {
    c.ok = false;
    if (!c.detail.str().empty()) c.detail << "; ";
    c.detail << what;
  }
}

Matrix gaussian(Rng& rng, int m, int n) {
  Matrix a(m, n);
  for (double& x : a.data()) x = rng.normal();
  return a;
}

Matrix conditioned_square(Rng& rng, int n, double kappa) {
  const auto qa = svd(gaussian(rng, n, n)).u;
  const auto qb = svd(gaussian(rng, n, n)).u;
  Matrix s(n, n);
  s(0, 0) = 1.0;
  for (int i = 1; i < n; ++i)
    s(i, i) = (i == n - 1) ? 1.0 / kappa : std::exp(rng.uniform(std::log(1.0 / kappa), 0.0));
  return matmul(matmul(qa, s), qb.transpose());
}

// --------------------------------------------------------------------------
// 1. Scale-invariance reproduction on the two-layer bias-free MLP.

Check criterion1() {
  Check c;
  ExperimentConfig cfg;
  cfg.task = "mlp";
  cfg.hidden = 100;
  cfg.epsilon = 1e-40;
  cfg.scale_k = 10.0;
  cfg.steps = 200;
  cfg.seeds = {18, 52, 812};
  cfg.mode = "classic";

  Dataset data = synthetic_blobs(cfg.samples, cfg.features, cfg.separation, cfg.data_seed);
  assign_splits(data, 0.6, 0.2, cfg.split_seed);
  auto [scaled_data, e] = scale_features(data, cfg.scale_k, cfg.scale_seed);
  const MlpTask orig = mlp_loss(data, cfg.hidden);
  const MlpTask scal = mlp_loss(scaled_data, cfg.hidden);
  const Reparam reparam = mlp_scale_reparam(orig.spec, e);

  struct Setting {
    OptimizerKind kind;
    double lr;
    bool expect_invariant;
  };
  // Learning rates tuned per optimizer, as in a per-method sweep.
  const Setting settings[] = {{OptimizerKind::AdamSania, 0.01, true},
                              {OptimizerKind::MuAdamSania, 1e-4, true},
                              {OptimizerKind::AdamW, 0.05, false},
                              {OptimizerKind::Muon, 0.05, false}};
  for (const auto& s : settings) {
    HyperParams hp;
    hp.gamma = s.lr;
    hp.epsilon = cfg.epsilon;
    hp.mode = StepMode::Classic;
    double max_loss_gap = 0.0, max_param_gap = 0.0;
    for (long seed : cfg.seeds) {
      const Matrix w0 = mlp_init_params(orig.spec, static_cast<uint64_t>(seed));
      const auto [a, b] =
          run_pair(s.kind, orig.loss, scal.loss, reparam, w0, hp, cfg.steps);
      const InvarianceReport rep = compare_pair(a, b, reparam, 1e-6);
      max_loss_gap = std::max(max_loss_gap, rep.max_loss_gap);
      max_param_gap = std::max(max_param_gap, rep.max_param_gap);
    }
    std::ostringstream what;
    what << to_string(s.kind) << " loss_gap=" << format_double(max_loss_gap)
         << " param_gap=" << format_double(max_param_gap);
    if (s.expect_invariant)
      expect(c, max_loss_gap <= 1e-6 && max_param_gap <= 1e-6, what.str());
    else
      expect(c, max_loss_gap >= 1e-3, what.str());
  }
  return c;
}

// --------------------------------------------------------------------------
// 2. Theorem-1 oracle equivalence: dominance over sampled candidates and
//    constraint-boundary activeness, per (base norm x preconditioner) pair.

Check criterion2() {
  Check c;
  Rng rng(2024);
  LmoConfig cfg;
  cfg.rho = 1.1;
  const int m = 3, n = 4;
  const BaseNorm norms[] = {BaseNorm::Frobenius, BaseNorm::Spectral, BaseNorm::MaxAbs,
                            BaseNorm::ColNorm, BaseNorm::RowNorm};
  const Preconditioner::Kind kinds[] = {Preconditioner::Kind::Identity,
                                        Preconditioner::Kind::LeftRight,
                                        Preconditioner::Kind::Elementwise};
  double worst_dominance = 0.0, worst_boundary = 0.0;
  for (auto kind : kinds) {
    for (auto base : norms) {
      for (int inst = 0; inst < 200; ++inst) {
        const Matrix g = gaussian(rng, m, n);
        Preconditioner p = Preconditioner::identity();
        if (kind == Preconditioner::Kind::LeftRight)
          p = Preconditioner::left_right(gaussian(rng, m, m) + 3.0 * Matrix::identity(m),
                                         gaussian(rng, n, n) + 3.0 * Matrix::identity(n));
        else if (kind == Preconditioner::Kind::Elementwise) {
          Matrix d(m, n);
          for (double& x : d.data()) x = std::exp(rng.uniform(-1.5, 1.5));
          p = Preconditioner::elementwise(d);
        }
        const auto res = lmo_precond(g, p, base, cfg);
        const double value = frob_inner(g, res.direction);

        const double norm = eval_precond_norm(res.direction, p, base);
        worst_boundary = std::max(worst_boundary, std::fabs(norm - cfg.rho) / cfg.rho);

        for (int cand = 0; cand < 1000; ++cand) {
          Matrix t = gaussian(rng, m, n);
          const double tn = eval_precond_norm(t, p, base);
          if (tn <= 1e-12) continue;
          const double shrink = (cand % 2 == 0) ? 1.0 : std::pow(rng.uniform(), 0.25);
          t = (shrink * cfg.rho / tn) * t;
          worst_dominance = std::max(worst_dominance, frob_inner(g, t) - value);
        }
      }
    }
  }
  c.detail << "worst candidate surplus " << format_double(worst_dominance)
           << ", worst boundary violation " << format_double(worst_boundary);
  expect(c, worst_dominance <= 1e-9, "candidate dominance");
  expect(c, worst_boundary <= 1e-8, "boundary activeness");
  return c;
}

// --------------------------------------------------------------------------
// 3. Duality identities on 100 random matrices.

Check criterion3() {
  Check c;
  Rng rng(3033);
  LmoConfig cfg;
  cfg.rho = 0.7;
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const Matrix g = gaussian(rng, 4, 5);
    // Frobenius dual, nuclear norm, entrywise l1 - each by its own oracle.
    const double fro = frob_norm(g);
    double nuclear = 0.0;
    for (double s : svd(g).sigma) nuclear += s;
    double l1 = 0.0;
    for (double x : g.data()) l1 += std::fabs(x);

    const double pairs[][2] = {
        {frob_inner(g, lmo_base(g, BaseNorm::Frobenius, cfg).direction), cfg.rho * fro},
        {frob_inner(g, lmo_base(g, BaseNorm::Spectral, cfg).direction), cfg.rho * nuclear},
        {frob_inner(g, lmo_base(g, BaseNorm::MaxAbs, cfg).direction), cfg.rho * l1}};
    for (const auto& pr : pairs) worst = std::max(worst, std::fabs(pr[0] - pr[1]));
  }
  c.detail << "worst identity gap " << format_double(worst);
  expect(c, worst <= 1e-9, "duality identity");
  return c;
}

// --------------------------------------------------------------------------
// 4. Polar accuracy on 100 random square matrices with condition <= 100.

Check criterion4() {
  Check c;
  Rng rng(4044);
  double worst_cubic = 0.0, worst_quintic = 0.0, worst_orth = 0.0;
  for (int i = 0; i < 100; ++i) {
    const int n = 3 + static_cast<int>(rng.uniform_index(4));  // 3..6
    const double kappa = std::exp(rng.uniform(0.0, std::log(100.0)));
    const Matrix g = conditioned_square(rng, n, kappa);
    const Matrix exact = polar_exact(g);

    const auto cubic = polar_iterate(g, PolarSchedule::cubic(30));
    worst_cubic = std::max(worst_cubic, frob_norm(cubic.factor - exact));

    const auto quintic = polar_iterate(g, PolarSchedule::quintic_default());
    worst_quintic = std::max(worst_quintic, frob_norm(quintic.factor - exact));
    worst_orth = std::max(worst_orth, quintic.residual());
  }
  c.detail << "cubic " << format_double(worst_cubic) << ", quintic " << format_double(worst_quintic)
           << ", orth " << format_double(worst_orth);
  expect(c, worst_cubic <= 1e-5, "cubic 30-step accuracy");
  expect(c, worst_quintic <= 1e-2, "quintic 5-step accuracy");
  expect(c, worst_orth <= 1e-2, "quintic orthogonality residual");
  return c;
}

// --------------------------------------------------------------------------
// 5. Shampoo closed form over 50 random gradient sequences of length 5.

Check criterion5() {
  Check c;
  Rng rng(5055);
  HyperParams hp;
  hp.mode = StepMode::Classic;
  hp.gamma = 1.0;
  double worst = 0.0;
  for (int seq = 0; seq < 50; ++seq) {
    OptimizerState state;
    Matrix hl(4, 4), hr(3, 3);
    Matrix w = gaussian(rng, 4, 3);
    for (int t = 0; t < 5; ++t) {
      const Matrix g = gaussian(rng, 4, 3);
      hl = hl + matmul(g, g.transpose());
      hr = hr + matmul(g.transpose(), g);
      auto [w_next, s] = step(OptimizerKind::Shampoo, std::move(state), w, g, hp);
      const Matrix got = w - w_next;  // gamma = 1
      const Matrix want =
          matmul(matmul(spd_power(hl, -0.25), g), spd_power(hr, -0.25));
      worst = std::max(worst, frob_norm(got - want) / std::max(1.0, frob_norm(want)));
      w = w_next;
      state = std::move(s);
    }
  }
  c.detail << "worst closed-form gap " << format_double(worst);
  expect(c, worst <= 1e-8, "shampoo closed form");
  return c;
}

// --------------------------------------------------------------------------
// 6. Algorithm conformance for the MuAdam family: an independent
//    straight-line transcription (plain vectors, no library calls) must
//    match muadam_step to 1e-12 for p = 1/4 and p = 1/2.

namespace straightline {

using Mat = std::vector<std::vector<double>>;

Mat make(int m, int n) { return Mat(m, std::vector<double>(n, 0.0)); }

Mat mul(const Mat& a, const Mat& b) {
  const int m = a.size(), k = b.size(), n = b[0].size();
  Mat r = make(m, n);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) {
      double s = 0.0;
      for (int l = 0; l < k; ++l) s += a[i][l] * b[l][j];
      r[i][j] = s;
    }
  return r;
}

Mat transpose(const Mat& a) {
  Mat r = make(a[0].size(), a.size());
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = 0; j < a[0].size(); ++j) r[j][i] = a[i][j];
  return r;
}

double fro(const Mat& a) {
  double s = 0.0;
  for (const auto& row : a)
    for (double x : row) s += x * x;
  return std::sqrt(s);
}

// One full update: EMAs, bias correction, entrywise preconditioning, the
// five-step quintic orthogonalization, preconditioning again, descent.
Mat reference_update(const Mat& w, const Mat& g, Mat& mbuf, Mat& vbuf, long t, double beta1,
                     double beta2, double eps, double p, double gamma) {
  const int m = w.size(), n = w[0].size();
  Mat mhat = make(m, n), vhat = make(m, n), denom = make(m, n), x = make(m, n);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) {
      mbuf[i][j] = beta1 * mbuf[i][j] + (1.0 - beta1) * g[i][j];
      vbuf[i][j] = beta2 * vbuf[i][j] + (1.0 - beta2) * g[i][j] * g[i][j];
      mhat[i][j] = mbuf[i][j] / (1.0 - std::pow(beta1, double(t + 1)));
      vhat[i][j] = vbuf[i][j] / (1.0 - std::pow(beta2, double(t + 1)));
      denom[i][j] = std::pow(vhat[i][j], p) + eps;
      x[i][j] = mhat[i][j] / denom[i][j];
    }

  const double norm = fro(x);
  for (auto& row : x)
    for (double& v : row) v /= norm;
  const double coeff[5][3] = {
      {4.241239185486759, -12.507320735266488, 9.266081549799425},
      {4.189405135825070, -12.078838733887491, 8.889433598062420},
      {3.971551152433216, -10.385537705517351, 7.413986553084134},
      {3.206112842522337, -5.697599028745462, 3.491486186223124},
      {2.131579970582533, -1.814203975838699, 0.683897715056333}};
  for (const auto& co : coeff) {
    if (m >= n) {
      const Mat gram = mul(transpose(x), x);       // n x n
      const Mat gram2 = mul(gram, gram);
      Mat poly = make(n, n);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          poly[i][j] = co[1] * gram[i][j] + co[2] * gram2[i][j] + (i == j ? co[0] : 0.0);
      x = mul(x, poly);
    } else {
      const Mat gram = mul(x, transpose(x));       // m x m
      const Mat gram2 = mul(gram, gram);
      Mat poly = make(m, m);
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
          poly[i][j] = co[1] * gram[i][j] + co[2] * gram2[i][j] + (i == j ? co[0] : 0.0);
      x = mul(poly, x);
    }
  }

  Mat w_next = make(m, n);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) w_next[i][j] = w[i][j] - gamma * x[i][j] / denom[i][j];
  return w_next;
}

}  // namespace straightline

Check criterion6() {
  Check c;
  Rng rng(6066);
  double worst = 0.0;
  for (double p : {0.25, 0.5}) {
    for (int trial = 0; trial < 20; ++trial) {
      const int m = 2 + static_cast<int>(rng.uniform_index(4));
      const int n = 2 + static_cast<int>(rng.uniform_index(4));
      const long t = static_cast<long>(rng.uniform_index(6));
      HyperParams hp;
      hp.p = p;
      hp.gamma = 0.37;
      hp.beta1 = 0.9;
      hp.beta2 = 0.999;
      hp.epsilon = 1e-8;
      hp.spectral_backend = SpectralBackend::NewtonSchulz;  // quintic default

      const Matrix w = gaussian(rng, m, n);
      const Matrix g = gaussian(rng, m, n);
      Matrix m0 = gaussian(rng, m, n);
      Matrix v0 = hadamard(gaussian(rng, m, n), gaussian(rng, m, n));
      for (double& x : v0.data()) x = std::fabs(x);

      OptimizerState state;
      state.step_count = t;
      state.m = m0;
      state.v = v0;
      auto [w_next, s2] = muadam_step(std::move(state), w, g, hp);

      straightline::Mat wr = straightline::make(m, n), gr = wr, mr = wr, vr = wr;
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < n; ++j) {
          wr[i][j] = w(i, j);
          gr[i][j] = g(i, j);
          mr[i][j] = m0(i, j);
          vr[i][j] = v0(i, j);
        }
      const auto ref = straightline::reference_update(wr, gr, mr, vr, t, hp.beta1, hp.beta2,
                                                      hp.epsilon, p, hp.gamma);
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < n; ++j)
          worst = std::max(worst, std::fabs(w_next(i, j) - ref[i][j]));
    }
  }
  c.detail << "worst transcription gap " << format_double(worst);
  expect(c, worst <= 1e-12, "algorithm transcription");
  return c;
}

// --------------------------------------------------------------------------
// 7. Vector-case reference suite.

Check criterion7() {
  Check c;
  for (const auto& r : vector_reference_suite()) {
    std::ostringstream what;
    what << r.algorithm << " gap=" << format_double(r.max_param_gap);
    if (r.expected_invariant)
      expect(c, r.max_param_gap <= 1e-10, what.str());
    else
      expect(c, r.max_param_gap >= 1e-3, what.str());
  }
  return c;
}

// --------------------------------------------------------------------------
// 8. Gradient correctness for every fixture loss.

Check criterion8() {
  Check c;
  Rng rng(8088);

  Dataset blobs = synthetic_blobs(30, 6, 2.4, 88);
  assign_splits(blobs, 0.6, 0.2, 3);
  auto [scaled, e] = scale_features(blobs, 5.0, 21);
  const MlpTask mlp_orig = mlp_loss(blobs, 12);
  const MlpTask mlp_scaled = mlp_loss(scaled, 12);
  const Matrix xq = gaussian(rng, 12, 5);
  const Matrix yq = gaussian(rng, 12, 2);
  const LossFn quad = quadratic_loss(xq, yq);
  const LossFn quad_re = reparametrize(
      quad, Reparam::affine(gaussian(rng, 5, 5) + 3.0 * Matrix::identity(5),
                            gaussian(rng, 2, 2) + 3.0 * Matrix::identity(2)));

  struct Item {
    const char* name;
    const LossFn* loss;
  };
  const Item items[] = {{"quadratic", &quad},
                        {"quadratic-affine", &quad_re},
                        {"mlp", &mlp_orig.loss},
                        {"mlp-scaled", &mlp_scaled.loss}};
  double worst = 0.0;
  for (const auto& item : items) {
    for (int probe = 0; probe < 20; ++probe) {
      Matrix w(item.loss->rows, item.loss->cols);
      for (double& x : w.data()) x = 0.8 * rng.normal();
      const Matrix an = item.loss->grad(w);
      for (int i = 0; i < w.rows(); ++i)
        for (int j = 0; j < w.cols(); ++j) {
          const double h = 1e-6 * (1.0 + std::fabs(w(i, j)));
          Matrix wp = w, wm = w;
          wp(i, j) += h;
          wm(i, j) -= h;
          const double fd = (item.loss->eval(wp) - item.loss->eval(wm)) / (2.0 * h);
          worst = std::max(worst, std::fabs(fd - an(i, j)) / (1.0 + std::fabs(an(i, j))));
        }
    }
  }
  c.detail << "worst relative gradient error " << format_double(worst);
  expect(c, worst <= 1e-5, "finite differences");
  return c;
}

// --------------------------------------------------------------------------
// 9. Byte-identical CSV output from repeated cmd_run invocations of the CLI.

Check criterion9() {
  Check c;
#ifndef MATOPT_CLI_PATH
  expect(c, false, "CLI path not configured");
#else
  const fs::path base = fs::temp_directory_path() / "matopt_acceptance";
  fs::remove_all(base);
  fs::create_directories(base);
  const std::string args =
      " run --task mlp --optimizer adam,muadam-sania --lr 0.01 --steps 40 --seed 18,52 --out ";
  for (const char* sub : {"a", "b"}) {
    const std::string cmd =
        std::string(MATOPT_CLI_PATH) + args + (base / sub).string() + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    expect(c, status != -1 && WEXITSTATUS(status) == 0, "cli run failed");
  }
  auto slurp = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };
  const std::string csv_a = slurp(base / "a" / "runs.csv");
  const std::string csv_b = slurp(base / "b" / "runs.csv");
  expect(c, !csv_a.empty() && csv_a == csv_b, "runs.csv bytes differ");
  expect(c, slurp(base / "a" / "runs.svg") == slurp(base / "b" / "runs.svg"),
         "runs.svg bytes differ");
  c.detail << "two runs, " << csv_a.size() << " bytes each";
#endif
  return c;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    std::function<Check()> run;
    double budget_s;  // generous wall-clock budget
  };
  const Criterion criteria[] = {
      {1, "scale-invariance reproduction (MLP, k=10, 200 epochs, 3 seeds)", criterion1, 300},
      {2, "preconditioned LMO dominance and boundary activeness", criterion2, 30},
      {3, "duality identities (Frobenius / nuclear / l1)", criterion3, 30},
      {4, "polar factor accuracy (cubic-30 and quintic-5)", criterion4, 60},
      {5, "shampoo closed form via eigendecomposition oracle", criterion5, 60},
      {6, "algorithm conformance for muadam / muadam-sania", criterion6, 60},
      {7, "vector reference suite (newton / sgd / adam / sania)", criterion7, 60},
      {8, "gradient correctness by central finite differences", criterion8, 120},
      {9, "byte-identical CSV on repeated runs", criterion9, 120},
  };

  int failures = 0;
  for (const auto& cr : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Check c;
    try {
      c = cr.run();
    } catch (const std::exception& e) {
      c.ok = false;
      c.detail << "exception: " << e.what();
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (secs > cr.budget_s) {
      c.ok = false;
      c.detail << "; exceeded " << cr.budget_s << "s budget";
    }
    std::cout << (c.ok ? "[PASS] " : "[FAIL] ") << cr.id << ". " << cr.name;
    if (!c.detail.str().empty()) std::cout << " (" << c.detail.str() << ")";
    std::cout << " [" << format_double(std::round(secs * 100.0) / 100.0) << "s]\n";
    failures += !c.ok;
  }
  if (failures == 0)
    std::cout << "all 9 acceptance criteria passed\n";
  else
    std::cout << failures << " acceptance criteria FAILED\n";
  return failures;
}
