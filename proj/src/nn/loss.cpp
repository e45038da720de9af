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

#include "emocert/nn/loss.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "emocert/core/error.hpp"

namespace emocert::nn {
namespace {

using core::BasicTensor;

// Class index of each one-hot row.
template <typename T>
std::vector<std::size_t> TargetClasses(const BasicTensor<T>& outputs,
                                       const BasicTensor<T>& targets) {
  if (outputs.rank() != 2 || targets.shape() != outputs.shape()) {
    throw InvalidArgument("loss expects outputs and targets of equal [N, K] shape");
  }
  const std::size_t n = targets.dim(0), k = targets.dim(1);
  std::vector<std::size_t> classes(n);
  for (std::size_t r = 0; r < n; ++r) {
    std::size_t ones = 0;
    for (std::size_t j = 0; j < k; ++j) {
      const T v = targets[r * k + j];
      if (v == T{1}) {
        ++ones;
        classes[r] = j;
      } else if (v != T{0}) {
        ones = 2;
      }
    }
    if (ones != 1) {
      throw InvalidArgument("target row " + std::to_string(r) +
                            " is not one-hot");
    }
  }
  return classes;
}

template <typename T>
LossValue<T> Cosine(const CosineProximity& spec, const BasicTensor<T>& outputs,
                    const BasicTensor<T>& targets) {
  TargetClasses(outputs, targets);
  const std::size_t n = outputs.dim(0), k = outputs.dim(1);
  LossValue<T> result{0.0, BasicTensor<T>(outputs.shape())};
  for (std::size_t r = 0; r < n; ++r) {
    const T* yhat = outputs.raw() + r * k;
    const T* y = targets.raw() + r * k;
    double dot = 0.0, ny = 0.0, nh = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
      dot += double(y[j]) * yhat[j];
      ny += double(y[j]) * y[j];
      nh += double(yhat[j]) * yhat[j];
    }
    ny = std::sqrt(ny);
    nh = std::sqrt(nh);
    const double denom = ny * nh + spec.eps;
    result.value += -dot / denom;
    // d/dyhat of -dot/(|y||yhat| + eps); the second term vanishes at yhat = 0.
    for (std::size_t j = 0; j < k; ++j) {
      double g = -y[j] / denom;
      if (nh > 0.0) g += dot * ny * (yhat[j] / nh) / (denom * denom);
      result.grad[r * k + j] = static_cast<T>(g / static_cast<double>(n));
    }
  }
  result.value /= static_cast<double>(n);
  return result;
}

template <typename T>
LossValue<T> CrossEntropy(const WeightedCrossEntropy& spec,
                          const BasicTensor<T>& outputs,
                          const BasicTensor<T>& targets) {
  const auto classes = TargetClasses(outputs, targets);
  const std::size_t n = outputs.dim(0), k = outputs.dim(1);
  if (spec.class_weights.size() != k) {
    throw InvalidArgument("expected " + std::to_string(k) + " class weights");
  }
  for (double w : spec.class_weights) {
    if (!(w > 0.0)) throw InvalidArgument("class weights must be positive");
  }
  LossValue<T> result{0.0, BasicTensor<T>(outputs.shape())};
  double weight_total = 0.0;
  std::vector<double> probs(k);
  for (std::size_t r = 0; r < n; ++r) {
    const T* z = outputs.raw() + r * k;
    const double top = *std::max_element(z, z + k);
    double total = 0.0;
    for (std::size_t j = 0; j < k; ++j) total += std::exp(z[j] - top);
    const double log_total = std::log(total);
    for (std::size_t j = 0; j < k; ++j) probs[j] = std::exp(z[j] - top) / total;
    const double w = spec.class_weights[classes[r]];
    weight_total += w;
    result.value += w * -(z[classes[r]] - top - log_total);
    for (std::size_t j = 0; j < k; ++j) {
      result.grad[r * k + j] =
          static_cast<T>(w * (probs[j] - (j == classes[r] ? 1.0 : 0.0)));
    }
  }
  result.value /= weight_total;
  for (auto& g : result.grad.data()) g = static_cast<T>(g / weight_total);
  return result;
}

}  // namespace

template <typename T>
LossValue<T> EvaluateLoss(const LossSpec& loss, const BasicTensor<T>& outputs,
                          const BasicTensor<T>& targets) {
  if (const auto* c = std::get_if<CosineProximity>(&loss)) {
    return Cosine(*c, outputs, targets);
  }
  return CrossEntropy(std::get<WeightedCrossEntropy>(loss), outputs, targets);
}

std::vector<double> ClassWeightsFromCounts(std::span<const std::size_t> counts) {
  std::size_t total = 0;
  for (std::size_t c : counts) {
    if (c == 0) throw InvalidArgument("cannot weight a class with no samples");
    total += c;
  }
  std::vector<double> weights;
  for (std::size_t c : counts) {
    weights.push_back(static_cast<double>(total) /
                      (static_cast<double>(counts.size()) * static_cast<double>(c)));
  }
  return weights;
}

template <typename T>
BasicTensor<T> OneHot(std::span<const int> labels, std::size_t num_classes) {
  BasicTensor<T> out({labels.size(), num_classes});
  for (std::size_t r = 0; r < labels.size(); ++r) {
    if (labels[r] < 0 || static_cast<std::size_t>(labels[r]) >= num_classes) {
      throw InvalidArgument("label out of range");
    }
    out[r * num_classes + static_cast<std::size_t>(labels[r])] = T{1};
  }
  return out;
}

template LossValue<float> EvaluateLoss(const LossSpec&, const BasicTensor<float>&,
                                       const BasicTensor<float>&);
template LossValue<double> EvaluateLoss(const LossSpec&, const BasicTensor<double>&,
                                        const BasicTensor<double>&);
template BasicTensor<float> OneHot(std::span<const int>, std::size_t);
template BasicTensor<double> OneHot(std::span<const int>, std::size_t);

}  // namespace emocert::nn
