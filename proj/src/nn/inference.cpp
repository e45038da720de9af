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

#include "emocert/nn/inference.hpp"

#include <algorithm>
#include <cstring>

#include "emocert/core/parallel.hpp"
#include "emocert/data/image.hpp"
#include "emocert/nn/network.hpp"

namespace emocert::nn {

bool SampleFilter::Accepts(const data::Sample& sample) const {
  if (split && sample.split != *split) return false;
  return !originals_only || sample.IsOriginal();
}

LabeledSet LoadLabeledSet(const data::Manifest& manifest,
                          const std::filesystem::path& images_dir,
                          const SampleFilter& filter, std::size_t threads,
                          std::vector<std::string>* skipped) {
  std::vector<std::size_t> candidates;
  for (std::size_t i = 0; i < manifest.samples.size(); ++i) {
    if (filter.Accepts(manifest.samples[i])) candidates.push_back(i);
  }
  std::vector<data::Image48> images(candidates.size());
  std::vector<std::string> errors(candidates.size());
  core::ParallelFor(candidates.size(), threads, [&](std::size_t k) {
    const auto& sample = manifest.samples[candidates[k]];
    try {
      images[k] = data::ReadImage(data::ResolveImage(images_dir, sample));
    } catch (const std::exception& e) {
      errors[k] = sample.id + ": " + e.what();
    }
  });
  LabeledSet set;
  for (std::size_t k = 0; k < candidates.size(); ++k) {
    if (errors[k].empty()) {
      set.sample_indices.push_back(candidates[k]);
    } else if (skipped) {
      skipped->push_back(errors[k]);
    }
  }
  set.images = core::TensorF({set.sample_indices.size(), 1, data::kImageSide, data::kImageSide});
  std::size_t row = 0;
  for (std::size_t k = 0; k < candidates.size(); ++k) {
    if (!errors[k].empty()) continue;
    data::Normalize(images[k], set.images.raw() + row * data::kImagePixels);
    set.labels.push_back(static_cast<int>(manifest.samples[candidates[k]].emotion));
    ++row;
  }
  return set;
}

core::TensorF PredictProbabilities(const Model& model, const core::TensorF& images,
                                   std::size_t threads, std::size_t batch_size) {
  if (images.rank() != 4) throw InvalidArgument("expected images [N, C, H, W]");
  if (batch_size == 0) throw InvalidArgument("batch size must be positive");
  const std::size_t n = images.dim(0);
  const std::size_t per_sample = n == 0 ? 0 : images.size() / n;
  const std::size_t classes = model.spec.num_classes;
  core::TensorF probs({n, classes});
  const std::size_t batches = (n + batch_size - 1) / batch_size;
  core::ParallelFor(batches, threads, [&](std::size_t b) {
    const std::size_t begin = b * batch_size;
    const std::size_t count = std::min(batch_size, n - begin);
    Shape shape = images.shape();
    shape[0] = count;
    std::vector<float> chunk(images.raw() + begin * per_sample,
                             images.raw() + (begin + count) * per_sample);
    const auto result =
        Evaluate(model.spec, model.params, core::TensorF(shape, std::move(chunk)));
    std::memcpy(probs.raw() + begin * classes, result.probabilities.raw(),
                count * classes * sizeof(float));
  });
  return probs;
}

PredictionResult Predict(const Model& model, const data::Manifest& manifest,
                         const std::filesystem::path& images_dir,
                         const SampleFilter& filter, std::size_t threads) {
  PredictionResult result;
  const LabeledSet set = LoadLabeledSet(manifest, images_dir, filter, threads, &result.skipped);
  const core::TensorF probs = PredictProbabilities(model, set.images, threads);
  const std::size_t classes = model.spec.num_classes;
  for (std::size_t row = 0; row < set.size(); ++row) {
    const auto& sample = manifest.samples[set.sample_indices[row]];
    metrics::PredictionRecord record;
    record.sample_id = sample.id;
    for (std::size_t c = 0; c < classes; ++c) record.probs[c] = probs[row * classes + c];
    record.true_class = sample.emotion;
    record.predicted = metrics::ArgmaxClass(record.probs);
    record.gender = sample.gender;
    record.race = sample.race;
    record.age_group = sample.age_group;
    record.augmentation = sample.augmentation;
    result.records.push_back(std::move(record));
  }
  return result;
}

}  // namespace emocert::nn
