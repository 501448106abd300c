// matopt command-line interface.
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

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "matopt/harness.hpp"

namespace {

// Every run/invariance/sweep flag mirrors a JSON config key. The file (if
// any) supplies defaults; flags that were actually passed override it.
struct CommonFlags {
  matopt::ExperimentConfig flags;  // storage the options write into
  std::string config_path;

  CLI::Option* o_task = nullptr;
  CLI::Option* o_dataset = nullptr;
  CLI::Option* o_optimizer = nullptr;
  CLI::Option* o_lr = nullptr;
  CLI::Option* o_beta1 = nullptr;
  CLI::Option* o_beta2 = nullptr;
  CLI::Option* o_epsilon = nullptr;
  CLI::Option* o_weight_decay = nullptr;
  CLI::Option* o_rho = nullptr;
  CLI::Option* o_steps = nullptr;
  CLI::Option* o_seeds = nullptr;
  CLI::Option* o_scale_k = nullptr;
  CLI::Option* o_mode = nullptr;
  CLI::Option* o_rms = nullptr;
  CLI::Option* o_hidden = nullptr;
  CLI::Option* o_schedule = nullptr;
  CLI::Option* o_grid = nullptr;
  CLI::Option* o_tol = nullptr;
  CLI::Option* o_out = nullptr;

  void attach(CLI::App* cmd) {
    cmd->add_option("--config", config_path, "JSON config file; flags override its keys");
    o_task = cmd->add_option("--task", flags.task, "task: quadratic | mlp");
    o_dataset = cmd->add_option("--dataset", flags.dataset_path,
                                "LIBSVM dataset path (default: bundled synthetic)");
    o_optimizer =
        cmd->add_option("--optimizer", flags.optimizer, "optimizer name or comma-separated list");
    o_lr = cmd->add_option("--lr", flags.lr, "learning rate");
    o_beta1 = cmd->add_option("--beta1", flags.beta1, "momentum EMA coefficient");
    o_beta2 = cmd->add_option("--beta2", flags.beta2, "second-moment EMA coefficient");
    o_epsilon = cmd->add_option("--epsilon", flags.epsilon, "stability constant");
    o_weight_decay =
        cmd->add_option("--weight-decay", flags.weight_decay, "decoupled weight decay (adamw)");
    o_rho = cmd->add_option("--rho", flags.rho, "LMO trust-region radius");
    o_steps = cmd->add_option("--steps", flags.steps, "steps (= epochs; training is full-batch)");
    o_seeds = cmd->add_option("--seed", flags.seeds, "random seeds")->delimiter(',');
    o_scale_k = cmd->add_option("--scale-k", flags.scale_k, "feature-scaling exponent bound k");
    o_mode = cmd->add_option("--mode", flags.mode, "step mode: lmo | classic");
    o_rms = cmd->add_flag("--rms-scaling", flags.rms_scaling,
                          "apply RMS dimension factors to spectral steps");
    o_hidden = cmd->add_option("--hidden", flags.hidden, "MLP hidden width");
    o_schedule =
        cmd->add_option("--lr-schedule", flags.lr_schedule, "constant | warmup-linear | cosine");
    o_grid = cmd->add_option("--lr-grid", flags.lr_grid, "sweep learning rates")->delimiter(',');
    o_tol = cmd->add_option("--invariance-tol", flags.invariance_tol,
                            "invariance verdict tolerance");
    o_out = cmd->add_option("--out", flags.out_dir, "output directory");
  }

  // 0 on success, 2 on config errors.
  int build(matopt::ExperimentConfig* out) const {
    matopt::ExperimentConfig cfg;
    if (!config_path.empty()) {
      std::ifstream in(config_path, std::ios::binary);
      if (!in.good()) {
        std::cerr << "matopt: cannot open config \"" << config_path << "\"\n";
        return 2;
      }
      std::ostringstream ss;
      ss << in.rdbuf();
      try {
        cfg = matopt::config_from_json(ss.str());
      } catch (const matopt::Error& e) {
        std::cerr << "matopt: " << e.what() << "\n";
        return 2;
      }
    }
    if (o_task->count()) cfg.task = flags.task;
    if (o_dataset->count()) cfg.dataset_path = flags.dataset_path;
    if (o_optimizer->count()) cfg.optimizer = flags.optimizer;
    if (o_lr->count()) cfg.lr = flags.lr;
    if (o_beta1->count()) cfg.beta1 = flags.beta1;
    if (o_beta2->count()) cfg.beta2 = flags.beta2;
    if (o_epsilon->count()) cfg.epsilon = flags.epsilon;
    if (o_weight_decay->count()) cfg.weight_decay = flags.weight_decay;
    if (o_rho->count()) cfg.rho = flags.rho;
    if (o_steps->count()) cfg.steps = flags.steps;
    if (o_seeds->count()) cfg.seeds = flags.seeds;
    if (o_scale_k->count()) cfg.scale_k = flags.scale_k;
    if (o_mode->count()) cfg.mode = flags.mode;
    if (o_rms->count()) cfg.rms_scaling = flags.rms_scaling;
    if (o_hidden->count()) cfg.hidden = flags.hidden;
    if (o_schedule->count()) cfg.lr_schedule = flags.lr_schedule;
    if (o_grid->count()) cfg.lr_grid = flags.lr_grid;
    if (o_tol->count()) cfg.invariance_tol = flags.invariance_tol;
    if (o_out->count()) cfg.out_dir = flags.out_dir;
    *out = cfg;
    return 0;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"matopt: preconditioned-norm matrix optimization toolkit"};
  app.require_subcommand(1);

  CommonFlags run_flags, inv_flags, sweep_flags;
  std::string suite_filter;

  CLI::App* run = app.add_subcommand("run", "train one or more optimizers, write runs.csv");
  run_flags.attach(run);

  CLI::App* inv = app.add_subcommand(
      "invariance", "paired original-vs-scaled runs with an invariance verdict");
  inv_flags.attach(inv);

  CLI::App* sweep = app.add_subcommand("sweep", "learning-rate grid sweep, write best.csv");
  sweep_flags.attach(sweep);

  CLI::App* selfcheck = app.add_subcommand("selfcheck", "run the bundled oracle suites");
  selfcheck->add_option("--suite", suite_filter, "run only suites matching this name");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;  // bad usage is a configuration error
  }

  try {
    matopt::ExperimentConfig cfg;
    if (run->parsed()) {
      if (int rc = run_flags.build(&cfg)) return rc;
      return matopt::cmd_run(cfg);
    }
    if (inv->parsed()) {
      if (int rc = inv_flags.build(&cfg)) return rc;
      return matopt::cmd_invariance(cfg);
    }
    if (sweep->parsed()) {
      if (int rc = sweep_flags.build(&cfg)) return rc;
      return matopt::cmd_sweep(cfg);
    }
    if (selfcheck->parsed()) return matopt::cmd_selfcheck({}, suite_filter);
  } catch (const std::exception& e) {
    std::cerr << "matopt: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
