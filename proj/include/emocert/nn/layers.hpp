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

// Batched layer kernels with hand-derived gradients. Every tensor carries the
// batch in dimension 0. Backward functions accumulate into parameter
// gradients (callers zero them) and overwrite input gradients.
namespace emocert::nn::kernels {

template <typename T>
using Tensor = core::BasicTensor<T>;

// x [N, C, H, W], weight [O, C, K, K], bias [O] or null.
template <typename T>
Tensor<T> Conv2dForward(const Tensor<T>& x, const Tensor<T>& weight,
                        const Tensor<T>* bias, std::size_t padding);

template <typename T>
void Conv2dBackward(const Tensor<T>& x, const Tensor<T>& weight,
                    std::size_t padding, const Tensor<T>& dy, Tensor<T>* dx,
                    Tensor<T>& dweight, Tensor<T>* dbias);

// Normalized activations and per-channel 1/sqrt(var + eps) of the batch.
template <typename T>
struct BatchNormSaved {
  Tensor<T> xhat;
  std::vector<double> inv_std;
};

// Batch statistics; x is [N, C, ...]. Fills `saved` and returns the biased
// batch mean and unbiased batch variance per channel for the running stats.
template <typename T>
Tensor<T> BatchNormTrainForward(const Tensor<T>& x, const Tensor<T>& gamma,
                                const Tensor<T>& beta, double eps,
                                BatchNormSaved<T>& saved,
                                std::vector<double>& batch_mean,
                                std::vector<double>& batch_var);

template <typename T>
Tensor<T> BatchNormEvalForward(const Tensor<T>& x, const Tensor<T>& gamma,
                               const Tensor<T>& beta,
                               const Tensor<T>& running_mean,
                               const Tensor<T>& running_var, double eps);

template <typename T>
void BatchNormBackward(const Tensor<T>& dy, const BatchNormSaved<T>& saved,
                       const Tensor<T>& gamma, Tensor<T>& dx,
                       Tensor<T>& dgamma, Tensor<T>& dbeta);

template <typename T>
Tensor<T> ReluForward(const Tensor<T>& x);

template <typename T>
Tensor<T> ReluBackward(const Tensor<T>& x, const Tensor<T>& dy);

// Inverted dropout: kept units are scaled by 1/(1-rate). The mask holds
// that scale or 0 and is drawn with one Uniform() per element (none when
// rate == 0).
template <typename T>
Tensor<T> DropoutForward(const Tensor<T>& x, double rate, core::Rng& rng,
                         Tensor<T>& mask);

template <typename T>
Tensor<T> DropoutBackward(const Tensor<T>& mask, const Tensor<T>& dy);

// argmax holds, per output element, the flat input index of the first
// maximum in its window.
template <typename T>
Tensor<T> MaxPoolForward(const Tensor<T>& x, std::size_t size,
                         std::vector<std::uint32_t>& argmax);

template <typename T>
Tensor<T> MaxPoolBackward(const core::Shape& input_shape,
                          const std::vector<std::uint32_t>& argmax,
                          const Tensor<T>& dy);

template <typename T>
Tensor<T> GlobalAvgPoolForward(const Tensor<T>& x);

template <typename T>
Tensor<T> GlobalAvgPoolBackward(const core::Shape& input_shape,
                                const Tensor<T>& dy);

// x [N, in], weight [out, in], bias [out] or null.
template <typename T>
Tensor<T> DenseForward(const Tensor<T>& x, const Tensor<T>& weight,
                       const Tensor<T>* bias);

template <typename T>
void DenseBackward(const Tensor<T>& x, const Tensor<T>& weight,
                   const Tensor<T>& dy, Tensor<T>* dx, Tensor<T>& dweight,
                   Tensor<T>* dbias);

// Row-wise numerically stable softmax of a [N, K] tensor.
template <typename T>
Tensor<T> SoftmaxRows(const Tensor<T>& x);

}  // namespace emocert::nn::kernels
