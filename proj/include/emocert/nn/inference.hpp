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
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "emocert/core/tensor.hpp"
#include "emocert/data/manifest.hpp"
#include "emocert/metrics/records.hpp"
#include "emocert/nn/parameters.hpp"

namespace emocert::nn {

struct SampleFilter {
  std::optional<data::Split> split;
  bool originals_only = false;

  bool Accepts(const data::Sample& sample) const;
};

// Normalized images [N, 1, 48, 48] with emotion labels. sample_indices maps
// row i back to the manifest.
struct LabeledSet {
  core::TensorF images;
  std::vector<int> labels;
  std::vector<std::size_t> sample_indices;

  std::size_t size() const { return labels.size(); }
};

// Unreadable or malformed images are left out and described in `skipped`
// as "<id>: <reason>". Rows keep manifest order for any thread count.
LabeledSet LoadLabeledSet(const data::Manifest& manifest,
                          const std::filesystem::path& images_dir,
                          const SampleFilter& filter, std::size_t threads,
                          std::vector<std::string>* skipped = nullptr);

// Eval-mode class probabilities for every row, computed in fixed batches
// of `batch_size` so the result does not depend on `threads`.
core::TensorF PredictProbabilities(const Model& model, const core::TensorF& images,
                                   std::size_t threads, std::size_t batch_size = 128);

struct PredictionResult {
  std::vector<metrics::PredictionRecord> records;  // manifest order
  std::vector<std::string> skipped;
};

PredictionResult Predict(const Model& model, const data::Manifest& manifest,
                         const std::filesystem::path& images_dir,
                         const SampleFilter& filter, std::size_t threads);

}  // namespace emocert::nn
