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
#include <string>
#include <string_view>

#include "emocert/core/rng.hpp"
#include "emocert/data/image.hpp"
#include "emocert/data/manifest.hpp"

namespace emocert::augment {

using data::Augmentation;
using data::Image48;

// Geometry and strength of every deployment-condition variant. The defaults
// are the canonical values; all of them can be overridden.
struct AugmentParams {
  double rotation_degrees = 12.0;  // rotation_cw uses +, rotation_ccw uses -
  double dark_gain = 0.4;
  double contrast_factor = 1.6;
  double contrast_pivot = 128.0;
  double noise_sigma = 10.0;
  double blur_sigma = 1.5;
  int blur_radius = 2;           // 5x5 kernel
  int occlusion_rect_rows = 12;  // rows [0, 12)
  int occlusion_diag_legs = 20;  // pixels with row + col < 20
  int forehead_first_row = 8;
  int forehead_last_row = 13;  // inclusive
  int hair_strands = 3;
  int hair_min_length = 24;
  int hair_max_length = 40;
};

// The ten variants emitted per original, in output order.
inline constexpr std::array<Augmentation, 10> kCanonicalVariants = {
    Augmentation::kRotationCw,    Augmentation::kRotationCcw,
    Augmentation::kDark,          Augmentation::kContrast,
    Augmentation::kNoise,         Augmentation::kBlur,
    Augmentation::kOcclusionRect, Augmentation::kOcclusionDiag,
    Augmentation::kForeheadBar,   Augmentation::kHairStrand,
};

inline constexpr std::size_t kExpansionFactor = kCanonicalVariants.size() + 1;

// Output is always a valid 48x48 image with pixels clamped to [0, 255].
// Occlusion variants (including hair strands) write intensity 0. Only the
// noise and hair_strand variants consume random draws. Throws
// InvalidArgument for Augmentation::kNone.
Image48 AugmentImage(const Image48& image, Augmentation kind, core::Rng& rng,
                     const AugmentParams& params = {});

// Boolean mask (1 = zeroed) of the fixed occlusion variants.
std::array<std::uint8_t, data::kImagePixels> OcclusionMask(
    Augmentation kind, const AugmentParams& params = {});

// Seed for one (origin, variant) pair, so regenerating one image never
// shifts the draws of another.
std::uint64_t VariantSeed(std::uint64_t dataset_seed, std::string_view origin_id,
                          Augmentation kind);

// "<origin_id>__<variant>"
std::string ChildId(std::string_view origin_id, Augmentation kind);

// Original followed by its ten children, for every sample. Children inherit
// labels, demographics, source and split. Throws InvalidArgument when the
// input holds any augmented sample.
data::Manifest ExpandManifest(const data::Manifest& manifest);

// ExpandManifest plus the pixels: children are written as
// "<origin_id>__<variant>.pgm" into out_images_dir, and originals are copied
// there when it differs from in_images_dir.
data::Manifest ExpandDataset(const data::Manifest& manifest,
                             const std::filesystem::path& in_images_dir,
                             const std::filesystem::path& out_images_dir,
                             std::uint64_t seed, std::size_t threads = 1,
                             const AugmentParams& params = {});

}  // namespace emocert::augment
