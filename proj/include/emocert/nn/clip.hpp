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

#include <cmath>

#include "emocert/core/error.hpp"
#include "emocert/nn/parameters.hpp"

namespace emocert::nn {

template <typename T>
double GlobalNorm(const ParameterSet<T>& grads) {
  double sq = 0.0;
  for (const auto& e : grads.entries()) {
    for (T v : e.value.data()) sq += double(v) * v;
  }
  return std::sqrt(sq);
}

// Rescales all gradients by max_norm / N when their global L2 norm N
// exceeds max_norm. Returns N (the norm before clipping).
template <typename T>
double ClipGradients(ParameterSet<T>& grads, double max_norm) {
  if (!(max_norm > 0.0)) throw InvalidArgument("max_norm must be > 0");
  const double norm = GlobalNorm(grads);
  if (norm > max_norm) {
    const double scale = max_norm / norm;
    for (auto& e : grads.entries()) {
      for (T& v : e.value.data()) v = static_cast<T>(v * scale);
    }
  }
  return norm;
}

}  // namespace emocert::nn
