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
#include <vector>

#include "emocert/core/rng.hpp"
#include "emocert/core/tensor.hpp"
#include "emocert/nn/layers.hpp"
#include "emocert/nn/model_spec.hpp"
#include "emocert/nn/parameters.hpp"

namespace emocert::nn {

enum class Mode { kTrain, kEval };

template <typename T>
struct LayerCache {
  core::BasicTensor<T> input;  // conv2d, relu, dense
  core::BasicTensor<T> mask;   // dropout
  kernels::BatchNormSaved<T> batch_norm;
  std::vector<std::uint32_t> argmax;  // max_pool
  Shape input_shape;
};

template <typename T>
struct ActivationCache {
  Mode mode = Mode::kEval;
  ArchId arch = ArchId::kBaseline;
  std::vector<LayerCache<T>> layers;
};

template <typename T>
struct ForwardResult {
  core::BasicTensor<T> outputs;        // final-layer activations [N, classes]
  core::BasicTensor<T> probabilities;  // row-wise softmax of outputs
  ActivationCache<T> cache;            // filled in train mode only
};

// Runs the stack on batch [N, 1, 48, 48] (or the ModelSpec input shape).
// Train mode draws dropout masks from `rng` (required when any dropout rate
// is positive), normalizes with batch statistics and updates the batch-norm
// running statistics in `params`. Eval mode is deterministic and leaves
// `params` untouched.
template <typename T>
ForwardResult<T> Forward(const ModelSpec& spec, ParameterSet<T>& params,
                         const core::BasicTensor<T>& batch, Mode mode,
                         core::Rng* rng);

// Eval-mode forward over read-only parameters; safe to call concurrently.
template <typename T>
ForwardResult<T> Evaluate(const ModelSpec& spec, const ParameterSet<T>& params,
                          const core::BasicTensor<T>& batch);

// Gradients of every trainable parameter given d(loss)/d(outputs). The cache
// must come from a train-mode Forward on the same spec. Running statistics
// are not touched. When grad_input is non-null it receives d(loss)/d(batch).
template <typename T>
ParameterSet<T> Backward(const ModelSpec& spec, const ParameterSet<T>& params,
                         const ActivationCache<T>& cache,
                         const core::BasicTensor<T>& grad_outputs,
                         core::BasicTensor<T>* grad_input = nullptr);

// Index of the largest entry of each row; ties go to the lowest index.
template <typename T>
std::vector<int> ArgmaxRows(const core::BasicTensor<T>& x);

}  // namespace emocert::nn
