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

#include "emocert/data/fixture.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <span>
#include <vector>

#include "emocert/core/error.hpp"
#include "emocert/core/parallel.hpp"

namespace emocert::data {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

template <std::size_t N>
void CheckFractions(const std::array<double, N>& f, const char* what) {
  double sum = 0.0;
  for (double v : f) {
    if (!(v >= 0.0)) {
      throw InvalidArgument(std::string("negative fraction in ") + what +
                            " mix");
    }
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw InvalidArgument(std::string(what) + " mix must sum to 1");
  }
}

// Largest-remainder quota of n items over fractions f, as a label list.
template <std::size_t N>
std::vector<std::size_t> QuotaLabels(const std::array<double, N>& f,
                                     std::size_t n) {
  std::array<std::size_t, N> counts{};
  std::array<double, N> rem{};
  std::size_t assigned = 0;
  for (std::size_t k = 0; k < N; ++k) {
    const double exact = f[k] * static_cast<double>(n);
    counts[k] = static_cast<std::size_t>(std::floor(exact + 1e-9));
    rem[k] = exact - static_cast<double>(counts[k]);
    assigned += counts[k];
  }
  while (assigned < n) {
    std::size_t best = 0;
    for (std::size_t k = 1; k < N; ++k) {
      if (rem[k] > rem[best]) best = k;
    }
    ++counts[best];
    rem[best] = -1.0;
    ++assigned;
  }
  std::vector<std::size_t> labels;
  labels.reserve(n);
  for (std::size_t k = 0; k < N; ++k) labels.insert(labels.end(), counts[k], k);
  return labels;
}

bool MatchesBias(const Sample& s, const NoiseBias& bias) {
  switch (bias.attribute) {
    case Attribute::kGender:
      return Name(s.gender) == bias.group;
    case Attribute::kRace:
      return Name(s.race) == bias.group;
    case Attribute::kAgeGroup:
      return Name(s.age_group) == bias.group;
  }
  return false;
}

}  // namespace

void ValidateMix(const DemographicMix& mix) {
  CheckFractions(mix.gender, "gender");
  CheckFractions(mix.race, "race");
  CheckFractions(mix.age_group, "age_group");
}

Image48 RenderFixtureImage(Emotion emotion, double noise_sigma,
                           core::Rng& rng) {
  const double period = rng.Uniform(7.0, 11.0);
  const double phase = rng.Uniform(0.0, kTwoPi);
  const double phase2 = rng.Uniform(0.0, kTwoPi);
  const double amplitude = rng.Uniform(45.0, 80.0);
  const double offset = rng.Uniform(-15.0, 15.0);
  const double tilt = rng.Uniform(-6.0, 6.0) * std::numbers::pi / 180.0;
  const double cx = 23.5 + rng.Uniform(-5.0, 5.0);
  const double cy = 23.5 + rng.Uniform(-5.0, 5.0);
  const double ct = std::cos(tilt);
  const double st = std::sin(tilt);
  const double k = kTwoPi / period;

  Image48 img;
  for (int row = 0; row < kImageSide; ++row) {
    for (int col = 0; col < kImageSide; ++col) {
      const double x = col - 23.5;
      const double y = row - 23.5;
      const double u = x * ct - y * st;  // tilted horizontal axis
      const double v = x * st + y * ct;  // tilted vertical axis
      double pattern = 0.0;
      switch (emotion) {
        case Emotion::kAnger:
          pattern = std::sin(k * v + phase);
          break;
        case Emotion::kFear:
          pattern = std::sin(k * u + phase);
          break;
        case Emotion::kCalm:
          pattern = 2.0 * std::sin(k * u + phase) * std::sin(k * v + phase2);
          pattern = std::clamp(pattern, -1.0, 1.0);
          break;
        case Emotion::kSurprise:
          pattern = std::sin(k * std::hypot(col - cx, row - cy) + phase);
          break;
      }
      double value = 128.0 + offset + amplitude * pattern;
      value += rng.Gaussian(0.0, noise_sigma);
      img.at(row, col) =
          static_cast<std::uint8_t>(std::lround(std::clamp(value, 0.0, 255.0)));
    }
  }
  return img;
}

Manifest GenerateFixture(const FixtureConfig& config,
                         const std::filesystem::path& images_dir,
                         std::size_t threads) {
  if (config.n_per_class < 1) {
    throw InvalidArgument("n_per_class must be at least 1");
  }
  ValidateMix(config.mix);
  if (!(config.noise_sigma >= 0.0)) {
    throw InvalidArgument("noise_sigma must be >= 0");
  }
  if (config.bias) {
    if (!(config.bias->extra_sigma >= 0.0)) {
      throw InvalidArgument("bias extra_sigma must be >= 0");
    }
    bool known = false;
    switch (config.bias->attribute) {
      case Attribute::kGender:
        known = Parse<Gender>(config.bias->group).has_value();
        break;
      case Attribute::kRace:
        known = Parse<Race>(config.bias->group).has_value();
        break;
      case Attribute::kAgeGroup:
        known = Parse<AgeGroup>(config.bias->group).has_value();
        break;
    }
    if (!known) {
      throw InvalidArgument("unknown bias group '" + config.bias->group + "'");
    }
  }
  std::filesystem::create_directories(images_dir);

  Manifest manifest;
  manifest.header.creation_seed = config.seed;
  manifest.header.notes = "synthetic fixture";
  core::Rng labels_rng(core::DeriveSeed(config.seed, "demographics"));
  for (std::size_t c = 0; c < kNumEmotions; ++c) {
    const auto emotion = static_cast<Emotion>(c);
    auto genders = QuotaLabels(config.mix.gender, config.n_per_class);
    auto races = QuotaLabels(config.mix.race, config.n_per_class);
    auto ages = QuotaLabels(config.mix.age_group, config.n_per_class);
    core::Shuffle(std::span<std::size_t>(genders), labels_rng);
    core::Shuffle(std::span<std::size_t>(races), labels_rng);
    core::Shuffle(std::span<std::size_t>(ages), labels_rng);
    for (std::size_t i = 0; i < config.n_per_class; ++i) {
      char id[64];
      std::snprintf(id, sizeof(id), "%s-%05zu", std::string(Name(emotion)).c_str(),
                    i);
      Sample s;
      s.id = id;
      s.image = s.id + ".pgm";
      s.emotion = emotion;
      s.gender = static_cast<Gender>(genders[i]);
      s.race = static_cast<Race>(races[i]);
      s.age_group = static_cast<AgeGroup>(ages[i]);
      s.source = config.source;
      s.split = Split::kTrain;
      s.augmentation = Augmentation::kNone;
      s.origin_id = s.id;
      manifest.samples.push_back(std::move(s));
    }
  }

  core::ParallelFor(manifest.samples.size(), threads, [&](std::size_t i) {
    const Sample& s = manifest.samples[i];
    double sigma = config.noise_sigma;
    if (config.bias && MatchesBias(s, *config.bias)) {
      sigma = std::hypot(sigma, config.bias->extra_sigma);
    }
    core::Rng rng(core::DeriveSeed(config.seed, s.id));
    WriteImage(RenderFixtureImage(s.emotion, sigma, rng), images_dir / s.image);
  });
  return manifest;
}

}  // namespace emocert::data
