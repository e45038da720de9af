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
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "emocert/core/rng.hpp"
#include "emocert/data/image.hpp"
#include "emocert/data/manifest.hpp"

namespace emocert::data {

// Target proportions for each demographic attribute, indexed by enumerator.
struct DemographicMix {
  std::array<double, 3> gender = {0.48, 0.48, 0.04};
  std::array<double, 3> race = {0.60, 0.20, 0.20};
  std::array<double, 5> age_group = {0.05, 0.20, 0.40, 0.30, 0.05};
};

// Adds Gaussian pixel noise of `extra_sigma` (8-bit scale) to every sample
// whose `attribute` equals `group`, making that group harder to classify.
struct NoiseBias {
  Attribute attribute = Attribute::kGender;
  std::string group;
  double extra_sigma = 0.0;
};

struct FixtureConfig {
  std::size_t n_per_class = 500;
  DemographicMix mix;
  double noise_sigma = 12.0;
  std::optional<NoiseBias> bias;
  std::uint64_t seed = 0;
  std::string source = "synthetic";
};

// Stand-ins for the four emotions: horizontal gratings (anger), vertical
// gratings (fear), checkerboards (calm) and concentric rings (surprise),
// each with per-sample jitter of period, phase, amplitude, orientation and
// centre, plus additive Gaussian noise.
Image48 RenderFixtureImage(Emotion emotion, double noise_sigma, core::Rng& rng);

// Builds n_per_class originals per emotion with demographic labels assigned
// by exact quota (largest remainder) and shuffled per class. Writes
// <id>.pgm into images_dir. Sample k of class c draws from the seed
// DeriveSeed(seed, id) so images are independent of thread count.
// All samples are tagged split=train; use SplitDataset afterwards.
Manifest GenerateFixture(const FixtureConfig& config,
                         const std::filesystem::path& images_dir,
                         std::size_t threads = 1);

// Throws InvalidArgument unless every attribute's fractions are
// non-negative and sum to 1 within 1e-9.
void ValidateMix(const DemographicMix& mix);

}  // namespace emocert::data
