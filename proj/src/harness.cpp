// matopt/harness.cpp
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

#include "matopt/harness.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include "json.hpp"
#include "matopt/invariance.hpp"
#include "matopt/rng.hpp"
#include "matopt/selfcheck.hpp"
#include "matopt/tasks.hpp"

namespace matopt {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

double now_ms() {
  return std::chrono::duration<double, std::milli>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  MATOPT_CHECK(out.good(), "cannot open " << path.string() << " for writing");
  out << content;
  MATOPT_CHECK(out.good(), "failed writing " << path.string());
}

// ---------------------------------------------------------------------------
// Config plumbing

template <typename T>
void read_key(const json& j, const char* key, T* out) {
  if (j.contains(key)) *out = j.at(key).get<T>();
}

}  // namespace

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  (void)ec;
  return std::string(buf, ptr);
}

ExperimentConfig config_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(std::string("config: invalid JSON: ") + e.what());
  }
  MATOPT_CHECK(j.is_object(), "config: top level must be a JSON object");

  static const char* known[] = {
      "task",        "dataset_path", "optimizer",   "lr",          "beta1",
      "beta2",       "epsilon",      "weight_decay", "rho",        "steps",
      "seeds",       "scale_k",      "mode",        "rms_scaling", "hidden",
      "refresh_every", "invariance_tol", "lr_schedule", "lr_grid", "out_dir",
      "samples",     "features",     "separation",  "data_seed",   "scale_seed",
      "split_seed"};
  for (const auto& [key, value] : j.items()) {
    bool ok = false;
    for (const char* k : known) ok = ok || key == k;
    MATOPT_CHECK(ok, "config: unknown key \"" << key << "\"");
  }

  ExperimentConfig cfg;
  read_key(j, "task", &cfg.task);
  read_key(j, "dataset_path", &cfg.dataset_path);
  read_key(j, "optimizer", &cfg.optimizer);
  read_key(j, "lr", &cfg.lr);
  read_key(j, "beta1", &cfg.beta1);
  read_key(j, "beta2", &cfg.beta2);
  read_key(j, "epsilon", &cfg.epsilon);
  read_key(j, "weight_decay", &cfg.weight_decay);
  read_key(j, "rho", &cfg.rho);
  read_key(j, "steps", &cfg.steps);
  read_key(j, "seeds", &cfg.seeds);
  read_key(j, "scale_k", &cfg.scale_k);
  read_key(j, "mode", &cfg.mode);
  read_key(j, "rms_scaling", &cfg.rms_scaling);
  read_key(j, "hidden", &cfg.hidden);
  read_key(j, "refresh_every", &cfg.refresh_every);
  read_key(j, "invariance_tol", &cfg.invariance_tol);
  read_key(j, "lr_schedule", &cfg.lr_schedule);
  read_key(j, "lr_grid", &cfg.lr_grid);
  read_key(j, "out_dir", &cfg.out_dir);
  read_key(j, "samples", &cfg.samples);
  read_key(j, "features", &cfg.features);
  read_key(j, "separation", &cfg.separation);
  read_key(j, "data_seed", &cfg.data_seed);
  read_key(j, "scale_seed", &cfg.scale_seed);
  read_key(j, "split_seed", &cfg.split_seed);
  return cfg;
}

namespace {

json config_json(const ExperimentConfig& cfg) {
  return json{{"task", cfg.task},
              {"dataset_path", cfg.dataset_path},
              {"optimizer", cfg.optimizer},
              {"lr", cfg.lr},
              {"beta1", cfg.beta1},
              {"beta2", cfg.beta2},
              {"epsilon", cfg.epsilon},
              {"weight_decay", cfg.weight_decay},
              {"rho", cfg.rho},
              {"steps", cfg.steps},
              {"seeds", cfg.seeds},
              {"scale_k", cfg.scale_k},
              {"mode", cfg.mode},
              {"rms_scaling", cfg.rms_scaling},
              {"hidden", cfg.hidden},
              {"refresh_every", cfg.refresh_every},
              {"invariance_tol", cfg.invariance_tol},
              {"lr_schedule", cfg.lr_schedule},
              {"lr_grid", cfg.lr_grid},
              {"out_dir", cfg.out_dir},
              {"samples", cfg.samples},
              {"features", cfg.features},
              {"separation", cfg.separation},
              {"data_seed", cfg.data_seed},
              {"scale_seed", cfg.scale_seed},
              {"split_seed", cfg.split_seed}};
}

}  // namespace

std::string config_to_json(const ExperimentConfig& cfg) { return config_json(cfg).dump(2); }

HyperParams hyperparams_from(const ExperimentConfig& cfg) {
  MATOPT_CHECK(cfg.mode == "classic" || cfg.mode == "lmo",
               "config: mode must be \"classic\" or \"lmo\", got \"" << cfg.mode << "\"");
  HyperParams hp;
  hp.gamma = cfg.lr;
  hp.beta1 = cfg.beta1;
  hp.beta2 = cfg.beta2;
  hp.epsilon = cfg.epsilon;
  hp.weight_decay = cfg.weight_decay;
  hp.rho = cfg.rho;
  hp.mode = cfg.mode == "lmo" ? StepMode::LmoNormalized : StepMode::Classic;
  hp.rms_scaling = cfg.rms_scaling;
  hp.refresh_every = cfg.refresh_every;
  return hp;
}

double scheduled_lr(const ExperimentConfig& cfg, double lr, int t) {
  if (cfg.lr_schedule == "constant") return lr;
  const double total = std::max(1, cfg.steps);
  if (cfg.lr_schedule == "warmup-linear") {
    const double warmup = std::max(1.0, std::floor(0.1 * total));
    if (t < warmup) return lr * (t + 1) / warmup;
    return lr * std::max(0.05, 1.0 - (t - warmup) / std::max(1.0, total - warmup));
  }
  if (cfg.lr_schedule == "cosine")
    return lr * 0.5 * (1.0 + std::cos(3.14159265358979323846 * t / total));
  MATOPT_CHECK(false, "config: unknown lr_schedule \"" << cfg.lr_schedule << "\"");
  return lr;
}

namespace {

// ---------------------------------------------------------------------------
// Task construction

struct TaskContext {
  LossFn loss;
  std::optional<MlpSpec> mlp;  // accuracy only exists for the MLP task
  Dataset dataset;             // MLP: carries splits for accuracy
  Matrix quad_x, quad_y;       // quadratic task data
};

Dataset load_dataset(const ExperimentConfig& cfg) {
  Dataset d;
  if (cfg.dataset_path.empty()) {
    d = synthetic_blobs(cfg.samples, cfg.features, cfg.separation, cfg.data_seed);
  } else {
    std::ifstream in(cfg.dataset_path, std::ios::binary);
    MATOPT_CHECK(in.good(), "config: cannot open dataset \"" << cfg.dataset_path << "\"");
    std::ostringstream ss;
    ss << in.rdbuf();
    d = parse_libsvm(ss.str());
  }
  assign_splits(d, 0.6, 0.2, cfg.split_seed);
  return d;
}

TaskContext build_task(const ExperimentConfig& cfg, bool scaled,
                       std::vector<double>* scale_out) {
  MATOPT_CHECK(cfg.task == "mlp" || cfg.task == "quadratic",
               "config: unknown task \"" << cfg.task << "\"");
  TaskContext ctx;
  if (cfg.task == "mlp") {
    Dataset d = load_dataset(cfg);
    if (scaled) {
      auto [sd, e] = scale_features(d, cfg.scale_k, cfg.scale_seed);
      if (scale_out) *scale_out = e;
      d = std::move(sd);
    }
    const MlpTask task = mlp_loss(d, cfg.hidden);
    ctx.loss = task.loss;
    ctx.mlp = task.spec;
    ctx.dataset = std::move(d);
  } else {
    Rng rng(cfg.data_seed);
    Matrix x(cfg.samples, cfg.features);
    // Rows scaled by 1/sqrt(samples) so the Gram matrix is O(1) and default
    // learning rates are stable.
    const double row_scale = 1.0 / std::sqrt(static_cast<double>(cfg.samples));
    for (double& v : x.data()) v = row_scale * rng.normal();
    Matrix w_star(cfg.features, 2);
    for (double& v : w_star.data()) v = rng.normal();
    Matrix y = matmul(x, w_star);
    for (double& v : y.data()) v += 0.01 * rng.normal();
    if (scaled) {
      Rng srng(cfg.scale_seed);
      std::vector<double> e(cfg.features);
      for (double& ei : e) ei = std::exp(srng.uniform(-cfg.scale_k, cfg.scale_k));
      if (scale_out) *scale_out = e;
      for (int i = 0; i < x.rows(); ++i)
        for (int j = 0; j < x.cols(); ++j) x(i, j) *= e[j];
    }
    ctx.loss = quadratic_loss(x, y);
    ctx.quad_x = std::move(x);
    ctx.quad_y = std::move(y);
  }
  return ctx;
}

Matrix initial_params(const ExperimentConfig& cfg, const TaskContext& ctx, long seed) {
  if (ctx.mlp) return mlp_init_params(*ctx.mlp, static_cast<uint64_t>(seed));
  Rng rng(static_cast<uint64_t>(seed) * 0x9e3779b97f4a7c15ULL + 1);
  Matrix w0(cfg.features, 2);
  for (double& v : w0.data()) v = 0.5 * rng.normal();
  return w0;
}

Reparam induced_reparam(const ExperimentConfig& cfg, const TaskContext& ctx,
                        const std::vector<double>& e) {
  if (ctx.mlp) return mlp_scale_reparam(*ctx.mlp, e);
  return quadratic_scale_reparam(cfg.features, 2, e);
}

std::vector<OptimizerKind> resolve_optimizers(const std::string& spec) {
  std::vector<OptimizerKind> kinds;
  std::istringstream ss(spec);
  std::string name;
  while (std::getline(ss, name, ',')) {
    if (name.empty()) continue;
    const auto kind = optimizer_from_string(name);
    MATOPT_CHECK(kind.has_value(), "config: unknown optimizer \"" << name << "\"");
    kinds.push_back(*kind);
  }
  MATOPT_CHECK(!kinds.empty(), "config: no optimizer given");
  return kinds;
}

// ---------------------------------------------------------------------------
// Trajectory recording

struct Row {
  std::string run_id;
  std::string optimizer;
  std::string task;
  long seed;
  int step;
  double train_loss;
  double test_accuracy;  // NaN for the quadratic task
  bool scaled;
};

void append_row_csv(std::string& out, const Row& r) {
  out += r.run_id;
  out += ',';
  out += r.optimizer;
  out += ',';
  out += r.task;
  out += ',';
  out += std::to_string(r.seed);
  out += ',';
  out += std::to_string(r.step);
  out += ',';
  out += format_double(r.train_loss);
  out += ',';
  out += format_double(r.test_accuracy);
  out += ',';
  out += r.scaled ? "true" : "false";
  out += ",0\n";  // wall_ms column: pinned to 0 so outputs stay byte-stable
}

struct RunResult {
  std::vector<Row> rows;
  Trajectory trajectory;
  double final_val_accuracy = std::nan("");
  double final_train_loss = std::nan("");
};

RunResult run_single(const ExperimentConfig& cfg, const TaskContext& ctx, OptimizerKind kind,
                     long seed, bool scaled, Matrix w0, const std::string& run_suffix = "") {
  RunResult out;
  const std::string run_id = cfg.task + "-" + to_string(kind) + "-s" + std::to_string(seed) +
                             (scaled ? "-scaled" : "") + run_suffix;
  HyperParams hp = hyperparams_from(cfg);

  Matrix w = std::move(w0);
  OptimizerState state;
  Trajectory traj;
  for (int t = 0; t < cfg.steps; ++t) {
    double value;
    try {
      value = ctx.loss.eval(w);
    } catch (const Error&) {
      traj.diverged = true;
      break;
    }
    double acc = std::nan("");
    if (ctx.mlp && !ctx.dataset.test_idx.empty())
      acc = accuracy(*ctx.mlp, w, ctx.dataset, ctx.dataset.test_idx);
    out.rows.push_back(
        {run_id, to_string(kind), cfg.task, seed, t, value, acc, scaled});
    traj.losses.push_back(value);
    traj.params.push_back(w);
    if (!std::isfinite(value) || value > 1e12) {
      traj.diverged = true;  // recorded, not raised
      break;
    }
    try {
      HyperParams hp_t = hp;
      hp_t.gamma = scheduled_lr(cfg, hp.gamma, t);
      auto [w_next, s] = step(kind, std::move(state), w, ctx.loss.grad(w), hp_t);
      w = std::move(w_next);
      state = std::move(s);
    } catch (const Error&) {
      traj.diverged = true;
      break;
    }
  }
  if (!traj.diverged) {
    traj.losses.push_back(ctx.loss.eval(w));
    traj.params.push_back(w);
  }
  out.final_train_loss = traj.losses.empty() ? std::nan("") : traj.losses.back();
  if (ctx.mlp && !ctx.dataset.val_idx.empty() && !traj.params.empty())
    out.final_val_accuracy = accuracy(*ctx.mlp, traj.params.back(), ctx.dataset,
                                      ctx.dataset.val_idx);
  out.trajectory = std::move(traj);
  return out;
}

// ---------------------------------------------------------------------------
// Minimal SVG line charts: loss (log scale) on the left, accuracy on the
// right. No external plotting dependency; the CSV stays canonical.

struct Series {
  std::string label;
  std::vector<double> ys;
  bool dashed = false;
};

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

void append_panel(std::string& svg, double x0, const std::string& title,
                  const std::vector<Series>& series, bool log_scale) {
  const double w = 420, h = 320, pad = 45;
  double lo = 1e300, hi = -1e300;
  size_t max_len = 1;
  for (const auto& s : series) {
    max_len = std::max(max_len, s.ys.size());
    for (double y : s.ys) {
      if (!std::isfinite(y)) continue;
      const double v = log_scale ? (y > 0 ? std::log10(y) : NAN) : y;
      if (!std::isfinite(v)) continue;
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  if (lo > hi) {
    lo = 0;
    hi = 1;
  }
  if (hi - lo < 1e-12) hi = lo + 1;

  svg += "<g transform=\"translate(" + format_double(x0) + ",20)\">\n";
  svg += "<rect x=\"" + format_double(pad) + "\" y=\"10\" width=\"" + format_double(w - pad - 10) +
         "\" height=\"" + format_double(h - pad - 10) +
         "\" fill=\"none\" stroke=\"#cccccc\"/>\n";
  svg += "<text x=\"" + format_double(w / 2) +
         "\" y=\"0\" text-anchor=\"middle\" font-size=\"13\" font-family=\"sans-serif\">" +
         title + "</text>\n";
  svg += "<text x=\"" + format_double(pad - 4) + "\" y=\"20\" text-anchor=\"end\" font-size=\"10\" "
         "font-family=\"sans-serif\">" + format_double(log_scale ? std::pow(10.0, hi) : hi) +
         "</text>\n";
  svg += "<text x=\"" + format_double(pad - 4) + "\" y=\"" + format_double(h - pad + 5) +
         "\" text-anchor=\"end\" font-size=\"10\" font-family=\"sans-serif\">" +
         format_double(log_scale ? std::pow(10.0, lo) : lo) + "</text>\n";

  int color = 0;
  double legend_y = 24.0;
  for (const auto& s : series) {
    std::string points;
    for (size_t i = 0; i < s.ys.size(); ++i) {
      double v = s.ys[i];
      if (!std::isfinite(v)) continue;
      if (log_scale) {
        if (v <= 0) continue;
        v = std::log10(v);
      }
      const double px = pad + (w - pad - 10) * (max_len > 1 ? double(i) / (max_len - 1) : 0.0);
      const double py = 10 + (h - pad - 20) * (1.0 - (v - lo) / (hi - lo));
      points += format_double(px) + "," + format_double(py) + " ";
    }
    const char* col = kPalette[color % 8];
    svg += "<polyline fill=\"none\" stroke=\"";
    svg += col;
    svg += "\" stroke-width=\"1.4\"";
    if (s.dashed) svg += " stroke-dasharray=\"5,3\"";
    svg += " points=\"" + points + "\"/>\n";
    svg += "<text x=\"" + format_double(w - 120) + "\" y=\"" + format_double(legend_y) +
           "\" font-size=\"9\" font-family=\"sans-serif\" fill=\"";
    svg += col;
    svg += "\">" + s.label + (s.dashed ? " (scaled)" : "") + "</text>\n";
    legend_y += 11.0;
    ++color;
  }
  svg += "</g>\n";
}

std::string render_svg(const std::vector<Series>& loss_series,
                       const std::vector<Series>& acc_series) {
  std::string svg =
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"900\" height=\"380\" "
      "viewBox=\"0 0 900 380\">\n";
  append_panel(svg, 10, "training loss (log scale)", loss_series, true);
  append_panel(svg, 460, "test accuracy", acc_series, false);
  svg += "</svg>\n";
  return svg;
}

void write_meta(const ExperimentConfig& cfg, const std::string& command, double wall_ms) {
  json meta{{"version", kVersion},
            {"command", command},
            {"config", config_json(cfg)},
            {"wall_ms", wall_ms}};
  // Hyperparameter selection here is a plain grid sweep, not a Bayesian
  // tuner; recorded so downstream comparisons know the protocol.
  if (command == "sweep") meta["tuning"] = "grid";
  write_file(fs::path(cfg.out_dir) / "meta.json", meta.dump(2) + "\n");
}

}  // namespace

// ---------------------------------------------------------------------------
// Commands

int cmd_run(const ExperimentConfig& cfg) {
  const double t0 = now_ms();
  std::vector<OptimizerKind> kinds;
  TaskContext ctx;
  try {
    kinds = resolve_optimizers(cfg.optimizer);
    ctx = build_task(cfg, /*scaled=*/false, nullptr);
    MATOPT_CHECK(!cfg.seeds.empty(), "config: seeds must be nonempty");
    MATOPT_CHECK(cfg.steps >= 1, "config: steps must be >= 1");
    hyperparams_from(cfg).validate();
  } catch (const Error& e) {
    std::cerr << "matopt run: " << e.what() << "\n";
    return 2;
  }

  fs::create_directories(cfg.out_dir);
  std::string csv = std::string(kRunsCsvHeader) + "\n";
  std::vector<Series> loss_series, acc_series;
  for (OptimizerKind kind : kinds) {
    for (long seed : cfg.seeds) {
      const RunResult res = run_single(cfg, ctx, kind, seed, false, initial_params(cfg, ctx, seed));
      for (const Row& r : res.rows) append_row_csv(csv, r);
      Series ls{to_string(kind) + "-s" + std::to_string(seed), {}, false};
      Series as = ls;
      for (const Row& r : res.rows) {
        ls.ys.push_back(r.train_loss);
        as.ys.push_back(r.test_accuracy);
      }
      loss_series.push_back(std::move(ls));
      acc_series.push_back(std::move(as));
    }
  }
  write_file(fs::path(cfg.out_dir) / "runs.csv", csv);
  write_file(fs::path(cfg.out_dir) / "runs.svg", render_svg(loss_series, acc_series));
  write_meta(cfg, "run", now_ms() - t0);
  return 0;
}

int cmd_invariance(const ExperimentConfig& cfg) {
  const double t0 = now_ms();
  std::vector<OptimizerKind> kinds;
  TaskContext original, scaled;
  std::vector<double> scale;
  Reparam reparam = Reparam::identity_scale(1, 1);
  try {
    kinds = resolve_optimizers(cfg.optimizer);
    MATOPT_CHECK(!cfg.seeds.empty(), "config: seeds must be nonempty");
    original = build_task(cfg, false, nullptr);
    scaled = build_task(cfg, true, &scale);
    reparam = induced_reparam(cfg, original, scale);
    hyperparams_from(cfg).validate();
  } catch (const Error& e) {
    std::cerr << "matopt invariance: " << e.what() << "\n";
    return 2;
  }

  fs::create_directories(cfg.out_dir);
  std::string csv = std::string(kRunsCsvHeader) + "\n";
  std::vector<Series> loss_series, acc_series;
  json report = json::array();

  for (OptimizerKind kind : kinds) {
    double max_loss_gap = 0.0, max_param_gap = 0.0;
    for (long seed : cfg.seeds) {
      const Matrix w0 = initial_params(cfg, original, seed);
      const RunResult a = run_single(cfg, original, kind, seed, false, w0);
      const RunResult b = run_single(cfg, scaled, kind, seed, true, reparam.transform_params(w0));
      for (const Row& r : a.rows) append_row_csv(csv, r);
      for (const Row& r : b.rows) append_row_csv(csv, r);

      const InvarianceReport rep =
          compare_pair(a.trajectory, b.trajectory, reparam, cfg.invariance_tol);
      max_loss_gap = std::max(max_loss_gap, rep.max_loss_gap);
      max_param_gap = std::max(max_param_gap, rep.max_param_gap);

      Series la{to_string(kind) + "-s" + std::to_string(seed), {}, false};
      Series lb{to_string(kind) + "-s" + std::to_string(seed), {}, true};
      Series aa = la, ab = lb;
      for (const Row& r : a.rows) {
        la.ys.push_back(r.train_loss);
        aa.ys.push_back(r.test_accuracy);
      }
      for (const Row& r : b.rows) {
        lb.ys.push_back(r.train_loss);
        ab.ys.push_back(r.test_accuracy);
      }
      loss_series.push_back(std::move(la));
      loss_series.push_back(std::move(lb));
      acc_series.push_back(std::move(aa));
      acc_series.push_back(std::move(ab));
    }
    const bool invariant =
        max_loss_gap <= cfg.invariance_tol && max_param_gap <= cfg.invariance_tol;
    std::cout << "optimizer=" << to_string(kind)
              << " verdict=" << (invariant ? "Invariant" : "NotInvariant")
              << " max_loss_gap=" << format_double(max_loss_gap)
              << " max_param_gap=" << format_double(max_param_gap)
              << " tolerance=" << format_double(cfg.invariance_tol) << "\n";
    report.push_back({{"optimizer", to_string(kind)},
                      {"verdict", invariant ? "Invariant" : "NotInvariant"},
                      {"max_loss_gap", max_loss_gap},
                      {"max_param_gap", max_param_gap},
                      {"tolerance", cfg.invariance_tol}});
  }

  write_file(fs::path(cfg.out_dir) / "invariance.csv", csv);
  write_file(fs::path(cfg.out_dir) / "invariance_report.json", report.dump(2) + "\n");
  write_file(fs::path(cfg.out_dir) / "invariance.svg", render_svg(loss_series, acc_series));
  write_meta(cfg, "invariance", now_ms() - t0);
  return 0;
}

int cmd_sweep(const ExperimentConfig& cfg) {
  const double t0 = now_ms();
  std::vector<OptimizerKind> kinds;
  TaskContext ctx;
  try {
    kinds = resolve_optimizers(cfg.optimizer);
    MATOPT_CHECK(!cfg.lr_grid.empty(), "config: sweep needs a nonempty lr_grid");
    MATOPT_CHECK(!cfg.seeds.empty(), "config: seeds must be nonempty");
    ctx = build_task(cfg, false, nullptr);
    hyperparams_from(cfg).validate();
  } catch (const Error& e) {
    std::cerr << "matopt sweep: " << e.what() << "\n";
    return 2;
  }

  fs::create_directories(cfg.out_dir);
  std::string csv =
      "run_id,optimizer,task,seed,lr,step,train_loss,val_accuracy,test_accuracy,scaled,wall_ms\n";
  std::string best =
      "optimizer,task,best_lr,metric,value\n";

  const bool use_accuracy = cfg.task == "mlp";
  for (OptimizerKind kind : kinds) {
    double best_metric = use_accuracy ? -1e300 : 1e300;
    double best_lr = cfg.lr_grid.front();
    for (double lr : cfg.lr_grid) {
      ExperimentConfig run_cfg = cfg;
      run_cfg.lr = lr;
      double mean_metric = 0.0;
      int counted = 0;
      for (long seed : cfg.seeds) {
        const RunResult res = run_single(run_cfg, ctx, kind, seed, false,
                                         initial_params(run_cfg, ctx, seed),
                                         "-lr" + format_double(lr));
        double val_acc = res.final_val_accuracy;
        for (const Row& r : res.rows) {
          csv += r.run_id + ',' + r.optimizer + ',' + r.task + ',' + std::to_string(r.seed) +
                 ',' + format_double(lr) + ',' + std::to_string(r.step) + ',' +
                 format_double(r.train_loss) + ',' + format_double(val_acc) + ',' +
                 format_double(r.test_accuracy) + ",false,0\n";
        }
        const double metric = use_accuracy ? res.final_val_accuracy : res.final_train_loss;
        if (std::isfinite(metric)) {
          mean_metric += metric;
          ++counted;
        }
      }
      mean_metric = counted > 0 ? mean_metric / counted
                                : (use_accuracy ? -1e300 : 1e300);
      const bool better =
          use_accuracy ? mean_metric > best_metric : mean_metric < best_metric;
      if (better) {
        best_metric = mean_metric;
        best_lr = lr;
      }
    }
    best += to_string(kind) + ',' + cfg.task + ',' + format_double(best_lr) + ',' +
            (use_accuracy ? "final_val_accuracy" : "final_train_loss") + ',' +
            format_double(best_metric) + "\n";
  }

  write_file(fs::path(cfg.out_dir) / "sweep.csv", csv);
  write_file(fs::path(cfg.out_dir) / "best.csv", best);
  write_meta(cfg, "sweep", now_ms() - t0);
  return 0;
}

int cmd_selfcheck(const ExperimentConfig& cfg, const std::string& suite_filter) {
  (void)cfg;
  const auto results = run_selfchecks(suite_filter);
  if (results.empty()) {
    std::cerr << "matopt selfcheck: no suite matches \"" << suite_filter << "\"\n";
    return 2;
  }
  bool all_ok = true;
  for (const auto& r : results) {
    std::cout << (r.passed() ? "[PASS] " : "[FAIL] ") << r.name << ": " << r.checks
              << " checks, " << r.failures << " failures, worst gap "
              << format_double(r.worst_gap) << "\n";
    all_ok = all_ok && r.passed();
  }
  return all_ok ? 0 : 1;
}

}  // namespace matopt
