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

#include "emocert/nn/scheduler.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "emocert/core/error.hpp"

namespace emocert::nn {

Scheduler::Scheduler(SchedulerConfig config, double base_lr)
    : config_(config), base_lr_(base_lr), lr_(base_lr) {
  if (!(base_lr > 0.0)) throw InvalidArgument("base learning rate must be > 0");
  if (const auto* w = std::get_if<CosineWarmRestartsConfig>(&config_)) {
    if (!(w->t0 > 0.0) || !(w->t_mult >= 1.0) || !(w->eta_min >= 0.0) ||
        !(w->eta_min <= base_lr)) {
      throw InvalidArgument("invalid warm-restart configuration");
    }
    t_i_ = w->t0;
  } else if (const auto* p = std::get_if<ReduceOnPlateauConfig>(&config_)) {
    if (!(p->factor > 0.0 && p->factor < 1.0) || p->patience == 0) {
      throw InvalidArgument("invalid plateau configuration");
    }
  }
}

double Scheduler::OnEpochEnd(double metric) {
  const auto* p = std::get_if<ReduceOnPlateauConfig>(&config_);
  if (!p) return lr_;
  if (metric < best_) {
    best_ = metric;
    bad_epochs_ = 0;
  } else if (++bad_epochs_ >= p->patience) {
    lr_ = std::max(lr_ * p->factor, p->min_lr);
    bad_epochs_ = 0;
  }
  return lr_;
}

double Scheduler::OnProgress(double epochs) {
  const auto* w = std::get_if<CosineWarmRestartsConfig>(&config_);
  if (!w) return lr_;
  if (!(epochs >= 0.0)) throw InvalidArgument("progress must be >= 0");
  // Recomputed from the absolute position so rounding never accumulates.
  double remaining = epochs;
  double length = w->t0;
  std::size_t cycle = 0;
  while (remaining >= length) {
    remaining -= length;
    length *= w->t_mult;
    ++cycle;
  }
  t_cur_ = remaining;
  t_i_ = length;
  cycle_ = cycle;
  lr_ = w->eta_min + (base_lr_ - w->eta_min) *
                         (1.0 + std::cos(std::numbers::pi * t_cur_ / t_i_)) / 2.0;
  return lr_;
}

}  // namespace emocert::nn
