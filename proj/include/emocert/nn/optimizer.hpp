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

#include <cstdint>
#include <variant>

#include "emocert/nn/parameters.hpp"

namespace emocert::nn {

// v <- alpha v + (1 - alpha) g^2;  theta <- theta - lr g / (sqrt(v) + eps)
struct RmsPropConfig {
  double lr = 5e-4;
  double alpha = 0.9;
  double eps = 1e-8;
};

// Adam moments with bias correction and decoupled weight decay:
// theta <- theta - lr wd theta - lr mhat / (sqrt(vhat) + eps)
struct AdamWConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 0.01;
};

using OptimizerConfig = std::variant<RmsPropConfig, AdamWConfig>;

double BaseLearningRate(const OptimizerConfig& config);

template <typename T>
class Optimizer {
 public:
  // Allocates zeroed moment buffers shaped like every trainable parameter.
  Optimizer(OptimizerConfig config, const ParameterSet<T>& params);

  // Updates every parameter named in `grads` using learning rate `lr` and
  // increments the step counter. Throws InvalidArgument on shape mismatch.
  void Step(ParameterSet<T>& params, const ParameterSet<T>& grads, double lr);

  std::uint64_t step_count() const { return steps_; }
  const OptimizerConfig& config() const { return config_; }
  const ParameterSet<T>& first_moments() const { return first_; }
  const ParameterSet<T>& second_moments() const { return second_; }

 private:
  OptimizerConfig config_;
  ParameterSet<T> first_;
  ParameterSet<T> second_;
  std::uint64_t steps_ = 0;
};

}  // namespace emocert::nn
