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
#include <optional>
#include <string>

#include "emocert/core/rng.hpp"
#include "emocert/data/manifest.hpp"

namespace emocert::data {

struct RebalanceResult {
  Manifest manifest;
  std::size_t originals_before = 0;
  std::size_t originals_kept = 0;
  std::optional<std::string> warning;  // set when the class is absent
};

// Keeps ceil(keep_fraction * n) uniformly chosen originals of `emotion`
// together with their augmented children. Other classes and sample order are
// untouched. keep_fraction must lie in (0, 1].
RebalanceResult RebalanceClass(const Manifest& manifest, Emotion emotion,
                               double keep_fraction, core::Rng& rng);

struct SplitFractions {
  double train = 0.8;
  double val = 0.1;
  double test = 0.1;
};

// Stratified by emotion over the originals, with per-stratum counts rounded
// by largest remainder. Augmented children inherit the split of their
// origin, so no origin spans two splits. Throws InvalidArgument when the
// fractions are invalid or a stratum cannot populate every split that has a
// nonzero fraction.
Manifest SplitDataset(const Manifest& manifest, const SplitFractions& fractions,
                      core::Rng& rng);

}  // namespace emocert::data
