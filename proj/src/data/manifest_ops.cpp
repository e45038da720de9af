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

#include "emocert/data/manifest_ops.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "emocert/core/error.hpp"

namespace emocert::data {

RebalanceResult RebalanceClass(const Manifest& manifest, Emotion emotion,
                               double keep_fraction, core::Rng& rng) {
  if (!(keep_fraction > 0.0 && keep_fraction <= 1.0)) {
    throw InvalidArgument("keep_fraction must lie in (0, 1]");
  }
  std::vector<std::size_t> candidates;
  for (std::size_t i = 0; i < manifest.samples.size(); ++i) {
    const Sample& s = manifest.samples[i];
    if (s.IsOriginal() && s.emotion == emotion) candidates.push_back(i);
  }
  RebalanceResult result;
  result.originals_before = candidates.size();
  if (candidates.empty()) {
    result.manifest = manifest;
    result.warning = "class '" + std::string(Name(emotion)) +
                     "' is absent; manifest left unchanged";
    return result;
  }
  // The small epsilon keeps exact products such as 0.5 * 1000 from rounding
  // up through floating-point noise.
  const auto keep = static_cast<std::size_t>(
      std::ceil(keep_fraction * static_cast<double>(candidates.size()) - 1e-9));
  core::Shuffle(std::span<std::size_t>(candidates), rng);
  std::unordered_set<std::string> kept;
  for (std::size_t k = 0; k < keep; ++k) {
    kept.insert(manifest.samples[candidates[k]].id);
  }
  result.originals_kept = kept.size();
  result.manifest.header = manifest.header;
  for (const Sample& s : manifest.samples) {
    if (s.emotion != emotion || kept.count(s.origin_id)) {
      result.manifest.samples.push_back(s);
    }
  }
  return result;
}

Manifest SplitDataset(const Manifest& manifest, const SplitFractions& fractions,
                      core::Rng& rng) {
  const std::array<double, 3> f = {fractions.train, fractions.val,
                                   fractions.test};
  for (double v : f) {
    if (!(v >= 0.0 && v <= 1.0)) {
      throw InvalidArgument("split fractions must lie in [0, 1]");
    }
  }
  if (std::abs(f[0] + f[1] + f[2] - 1.0) > 1e-9) {
    throw InvalidArgument("split fractions must sum to 1");
  }

  std::array<std::vector<std::size_t>, kNumEmotions> strata;
  for (std::size_t i = 0; i < manifest.samples.size(); ++i) {
    const Sample& s = manifest.samples[i];
    if (s.IsOriginal()) {
      strata[static_cast<std::size_t>(s.emotion)].push_back(i);
    }
  }

  Manifest out = manifest;
  std::unordered_map<std::string, Split> split_of;
  for (std::size_t c = 0; c < kNumEmotions; ++c) {
    auto& stratum = strata[c];
    if (stratum.empty()) continue;
    const std::size_t n = stratum.size();
    std::array<std::size_t, 3> counts{};
    std::array<double, 3> remainders{};
    std::size_t assigned = 0;
    for (std::size_t k = 0; k < 3; ++k) {
      const double exact = f[k] * static_cast<double>(n);
      counts[k] = static_cast<std::size_t>(std::floor(exact + 1e-9));
      remainders[k] = exact - static_cast<double>(counts[k]);
      assigned += counts[k];
    }
    while (assigned < n) {
      std::size_t best = 0;
      for (std::size_t k = 1; k < 3; ++k) {
        if (remainders[k] > remainders[best]) best = k;
      }
      ++counts[best];
      remainders[best] = -1.0;
      ++assigned;
    }
    for (std::size_t k = 0; k < 3; ++k) {
      if (f[k] > 0.0 && counts[k] == 0) {
        throw InvalidArgument(
            "stratum '" + std::string(Name(static_cast<Emotion>(c))) +
            "' has " + std::to_string(n) +
            " originals, too few to populate every split");
      }
    }
    core::Shuffle(std::span<std::size_t>(stratum), rng);
    std::size_t pos = 0;
    for (std::size_t k = 0; k < 3; ++k) {
      for (std::size_t m = 0; m < counts[k]; ++m, ++pos) {
        Sample& s = out.samples[stratum[pos]];
        s.split = static_cast<Split>(k);
        split_of[s.id] = s.split;
      }
    }
  }
  for (Sample& s : out.samples) {
    if (!s.IsOriginal()) {
      if (auto it = split_of.find(s.origin_id); it != split_of.end()) {
        s.split = it->second;
      }
    }
  }
  return out;
}

}  // namespace emocert::data
