// matopt/harness.hpp
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

#ifndef MATOPT_HARNESS_HPP
#define MATOPT_HARNESS_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "matopt/optimizers.hpp"

namespace matopt {

// Flat experiment configuration; JSON config files use exactly these keys
// and every one can be overridden by the CLI flag of the same name.
struct ExperimentConfig {
  std::string task = "mlp";        // "quadratic" | "mlp"
  std::string dataset_path;        // LIBSVM file; empty = bundled synthetic
  std::string optimizer = "adam";  // comma-separated list allowed
  double lr = 0.01;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double weight_decay = 0.0;
  double rho = 1.0;
  int steps = 200;
  std::vector<long> seeds = {18, 52, 812};
  double scale_k = 10.0;
  std::string mode = "classic";  // "classic" | "lmo"
  bool rms_scaling = false;
  int hidden = 100;
  int refresh_every = 10;
  double invariance_tol = 1e-6;
  std::string lr_schedule = "constant";  // constant | warmup-linear | cosine
  std::vector<double> lr_grid;
  std::string out_dir = "out";

  // Bundled synthetic dataset knobs (used when dataset_path is empty).
  int samples = 320;
  int features = 10;
  double separation = 2.4;
  uint64_t data_seed = 9;
  uint64_t scale_seed = 97;
  uint64_t split_seed = 5;
};

// Parses a JSON object with the keys above; unknown keys are an error.
ExperimentConfig config_from_json(const std::string& text);
std::string config_to_json(const ExperimentConfig& cfg);

HyperParams hyperparams_from(const ExperimentConfig& cfg);

// Per-step learning rate under the configured schedule.
double scheduled_lr(const ExperimentConfig& cfg, double lr, int t);

// Commands. Each writes its outputs under cfg.out_dir and returns a
// process exit code: 0 success, 1 check failure, 2 configuration error.
int cmd_run(const ExperimentConfig& cfg);
int cmd_invariance(const ExperimentConfig& cfg);
int cmd_sweep(const ExperimentConfig& cfg);
int cmd_selfcheck(const ExperimentConfig& cfg, const std::string& suite_filter);

// Shortest-round-trip decimal formatting (std::to_chars); used for every
// float the harness writes so outputs are byte-stable.
std::string format_double(double x);

constexpr const char* kVersion = "matopt 0.1.0";
constexpr const char* kRunsCsvHeader =
    "run_id,optimizer,task,seed,step,train_loss,test_accuracy,scaled,wall_ms";

}  // namespace matopt

#endif  // MATOPT_HARNESS_HPP
