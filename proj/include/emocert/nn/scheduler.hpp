// Copyright 2026 The emocert Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <limits>
#include <variant>

namespace emocert::nn {

// After `patience` consecutive epochs without a strictly lower monitored
// metric, lr <- max(lr * factor, min_lr) and the counter restarts.
struct ReduceOnPlateauConfig {
  double factor = 0.5;
  std::size_t patience = 2;
  double min_lr = 1e-6;
};

// lr = eta_min + (eta_max - eta_min)(1 + cos(pi T_cur / T_i)) / 2 with
// cycle lengths T_0, T_0 T_mult, T_0 T_mult^2, ... measured in epochs.
// eta_max is the optimizer's base learning rate.
struct CosineWarmRestartsConfig {
  double t0 = 10.0;
  double t_mult = 2.0;
  double eta_min = 0.0;
};

struct ConstantLr {};

using SchedulerConfig =
    std::variant<ReduceOnPlateauConfig, CosineWarmRestartsConfig, ConstantLr>;

class Scheduler {
 public:
  Scheduler(SchedulerConfig config, double base_lr);

  double lr() const { return lr_; }

  // End-of-epoch signal carrying the monitored validation metric (lower is
  // better). Only the plateau rule reacts to it.
  double OnEpochEnd(double validation_metric);

  // Absolute training progress in epochs (e.g. epoch + batch / batches).
  // Only warm restarts react to it.
  double OnProgress(double epochs);

  double t_cur() const { return t_cur_; }
  double t_i() const { return t_i_; }
  std::size_t cycle() const { return cycle_; }

 private:
  SchedulerConfig config_;
  double base_lr_;
  double lr_;
  double best_ = std::numeric_limits<double>::infinity();
  std::size_t bad_epochs_ = 0;
  double t_cur_ = 0.0;
  double t_i_ = 0.0;
  std::size_t cycle_ = 0;
};

}  // namespace emocert::nn
