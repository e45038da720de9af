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

#include <array>
#include <cstddef>
#include <span>
#include <variant>
#include <vector>

#include "emocert/core/tensor.hpp"

namespace emocert::nn {

// Mean over the batch of -(y . yhat) / (|y| |yhat| + eps), applied to the
// raw network outputs.
struct CosineProximity {
  double eps = 1e-12;
};

// Softmax cross-entropy on the network outputs (treated as logits):
// sum_i w[y_i] * -log p_i[y_i] / sum_i w[y_i].
struct WeightedCrossEntropy {
  std::vector<double> class_weights = {1.0, 1.0, 1.0, 1.0};
};

using LossSpec = std::variant<CosineProximity, WeightedCrossEntropy>;

template <typename T>
struct LossValue {
  double value = 0.0;
  core::BasicTensor<T> grad;  // d(value)/d(outputs)
};

// `targets` must be one-hot rows shaped like `outputs`. Throws
// InvalidArgument otherwise, or when a class weight is not positive.
template <typename T>
LossValue<T> EvaluateLoss(const LossSpec& loss,
                          const core::BasicTensor<T>& outputs,
                          const core::BasicTensor<T>& targets);

// w_c = total / (num_classes * count_c). Throws when a class is absent.
std::vector<double> ClassWeightsFromCounts(std::span<const std::size_t> counts);

// One-hot [labels.size(), num_classes] tensor.
template <typename T>
core::BasicTensor<T> OneHot(std::span<const int> labels, std::size_t num_classes);

}  // namespace emocert::nn
