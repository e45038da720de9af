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
#include <span>
#include <vector>

#include "emocert/core/rng.hpp"

namespace emocert::nn {

// Draws n indices with replacement where P(i) is proportional to
// 1 / count(labels[i]). Every class carries the same total mass, so each
// draw picks a class uniformly (UniformIndex(num_classes)) and then a member
// of that class uniformly. num_classes = 0 infers max(label) + 1. Throws
// InvalidArgument when a class in [0, num_classes) has no samples.
std::vector<std::size_t> WeightedSampleIndices(std::span<const int> labels,
                                               std::size_t n, core::Rng& rng,
                                               std::size_t num_classes = 0);

// A shuffled permutation of [0, size).
std::vector<std::size_t> ShuffledIndices(std::size_t size, core::Rng& rng);

}  // namespace emocert::nn
