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

#include "emocert/nn/sampler.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "emocert/core/error.hpp"

namespace emocert::nn {

std::vector<std::size_t> WeightedSampleIndices(std::span<const int> labels,
                                               std::size_t n, core::Rng& rng,
                                               std::size_t num_classes) {
  if (labels.empty()) throw InvalidArgument("cannot sample from an empty set");
  for (int label : labels) {
    if (label < 0) throw InvalidArgument("labels must be non-negative");
  }
  if (num_classes == 0) {
    num_classes = static_cast<std::size_t>(*std::max_element(labels.begin(), labels.end())) + 1;
  }
  std::vector<std::vector<std::size_t>> members(num_classes);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const auto c = static_cast<std::size_t>(labels[i]);
    if (c >= num_classes) throw InvalidArgument("label out of range");
    members[c].push_back(i);
  }
  for (std::size_t c = 0; c < num_classes; ++c) {
    if (members[c].empty()) {
      throw InvalidArgument("class " + std::to_string(c) +
                            " has no samples; cannot compute weights");
    }
  }
  std::vector<std::size_t> out(n);
  for (auto& index : out) {
    const auto& bucket = members[rng.UniformIndex(num_classes)];
    index = bucket[rng.UniformIndex(bucket.size())];
  }
  return out;
}

std::vector<std::size_t> ShuffledIndices(std::size_t size, core::Rng& rng) {
  std::vector<std::size_t> out(size);
  std::iota(out.begin(), out.end(), std::size_t{0});
  core::Shuffle(std::span<std::size_t>(out), rng);
  return out;
}

}  // namespace emocert::nn
