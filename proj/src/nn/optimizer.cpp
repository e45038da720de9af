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

#include "emocert/nn/optimizer.hpp"

#include <cmath>

namespace emocert::nn {

double BaseLearningRate(const OptimizerConfig& config) {
  return std::visit([](const auto& c) { return c.lr; }, config);
}

template <typename T>
Optimizer<T>::Optimizer(OptimizerConfig config, const ParameterSet<T>& params)
    : config_(std::move(config)),
      first_(params.ZerosLikeTrainable()),
      second_(params.ZerosLikeTrainable()) {}

template <typename T>
void Optimizer<T>::Step(ParameterSet<T>& params, const ParameterSet<T>& grads,
                        double lr) {
  ++steps_;
  for (const auto& entry : grads.entries()) {
    auto& theta = params.at(entry.name);
    auto& m = first_.at(entry.name);
    auto& v = second_.at(entry.name);
    const auto& g = entry.value;
    if (theta.shape() != g.shape()) {
      throw InvalidArgument("gradient shape mismatch for " + entry.name);
    }
    if (const auto* rms = std::get_if<RmsPropConfig>(&config_)) {
      for (std::size_t i = 0; i < g.size(); ++i) {
        const double gi = g[i];
        const double vi = rms->alpha * v[i] + (1.0 - rms->alpha) * gi * gi;
        v[i] = static_cast<T>(vi);
        theta[i] = static_cast<T>(theta[i] - lr * gi / (std::sqrt(vi) + rms->eps));
      }
    } else {
      const auto& adam = std::get<AdamWConfig>(config_);
      const double t = static_cast<double>(steps_);
      const double c1 = 1.0 - std::pow(adam.beta1, t);
      const double c2 = 1.0 - std::pow(adam.beta2, t);
      for (std::size_t i = 0; i < g.size(); ++i) {
        const double gi = g[i];
        const double mi = adam.beta1 * m[i] + (1.0 - adam.beta1) * gi;
        const double vi = adam.beta2 * v[i] + (1.0 - adam.beta2) * gi * gi;
        m[i] = static_cast<T>(mi);
        v[i] = static_cast<T>(vi);
        double th = theta[i];
        th -= lr * adam.weight_decay * th;
        th -= lr * (mi / c1) / (std::sqrt(vi / c2) + adam.eps);
        theta[i] = static_cast<T>(th);
      }
    }
  }
}

template class Optimizer<float>;
template class Optimizer<double>;

}  // namespace emocert::nn
