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

#include "emocert/augment/augment.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "emocert/core/error.hpp"
#include "emocert/core/parallel.hpp"

namespace emocert::augment {
namespace {

using data::kImagePixels;
using data::kImageSide;

std::uint8_t ToPixel(double value) {
  return static_cast<std::uint8_t>(std::lround(std::clamp(value, 0.0, 255.0)));
}

template <typename F>
Image48 MapPixels(const Image48& in, F f) {
  Image48 out;
  for (std::size_t i = 0; i < kImagePixels; ++i) {
    out.pixels[i] = ToPixel(f(static_cast<double>(in.pixels[i])));
  }
  return out;
}

double Sample(const Image48& img, int row, int col) {
  row = std::clamp(row, 0, kImageSide - 1);
  col = std::clamp(col, 0, kImageSide - 1);
  return img.at(row, col);
}

// Positive degrees turn the picture clockwise on screen (y axis down).
// Bilinear resampling; out-of-frame lookups replicate the nearest edge.
Image48 Rotate(const Image48& in, double degrees) {
  const double theta = degrees * std::numbers::pi / 180.0;
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  constexpr double kCentre = (kImageSide - 1) / 2.0;
  Image48 out;
  for (int row = 0; row < kImageSide; ++row) {
    for (int col = 0; col < kImageSide; ++col) {
      const double x = col - kCentre;
      const double y = row - kCentre;
      const double sx = c * x + s * y + kCentre;
      const double sy = -s * x + c * y + kCentre;
      const double fx = std::floor(sx);
      const double fy = std::floor(sy);
      const double ax = sx - fx;
      const double ay = sy - fy;
      const int x0 = static_cast<int>(fx);
      const int y0 = static_cast<int>(fy);
      const double top = (1 - ax) * Sample(in, y0, x0) + ax * Sample(in, y0, x0 + 1);
      const double bottom =
          (1 - ax) * Sample(in, y0 + 1, x0) + ax * Sample(in, y0 + 1, x0 + 1);
      out.at(row, col) = ToPixel((1 - ay) * top + ay * bottom);
    }
  }
  return out;
}

Image48 Blur(const Image48& in, double sigma, int radius) {
  std::vector<double> kernel(2 * radius + 1);
  double total = 0.0;
  for (int k = -radius; k <= radius; ++k) {
    kernel[k + radius] = std::exp(-(k * k) / (2.0 * sigma * sigma));
    total += kernel[k + radius];
  }
  for (double& w : kernel) w /= total;

  std::array<double, kImagePixels> horizontal{};
  for (int row = 0; row < kImageSide; ++row) {
    for (int col = 0; col < kImageSide; ++col) {
      double acc = 0.0;
      for (int k = -radius; k <= radius; ++k) {
        acc += kernel[k + radius] * Sample(in, row, col + k);
      }
      horizontal[row * kImageSide + col] = acc;
    }
  }
  Image48 out;
  for (int row = 0; row < kImageSide; ++row) {
    for (int col = 0; col < kImageSide; ++col) {
      double acc = 0.0;
      for (int k = -radius; k <= radius; ++k) {
        const int r = std::clamp(row + k, 0, kImageSide - 1);
        acc += kernel[k + radius] * horizontal[r * kImageSide + col];
      }
      out.at(row, col) = ToPixel(acc);
    }
  }
  return out;
}

Image48 HairStrands(const Image48& in, core::Rng& rng, const AugmentParams& p) {
  Image48 out = in;
  const auto span = static_cast<std::uint64_t>(
      std::max(1, p.hair_max_length - p.hair_min_length + 1));
  for (int strand = 0; strand < p.hair_strands; ++strand) {
    int col = 6 + static_cast<int>(rng.UniformIndex(kImageSide - 12));
    const int length =
        std::min(kImageSide, p.hair_min_length + static_cast<int>(rng.UniformIndex(span)));
    for (int row = 0; row < length; ++row) {
      out.at(row, col) = 0;
      col = std::clamp(col + static_cast<int>(rng.UniformIndex(3)) - 1, 0,
                       kImageSide - 1);
    }
  }
  return out;
}

}  // namespace

std::array<std::uint8_t, kImagePixels> OcclusionMask(Augmentation kind,
                                                     const AugmentParams& p) {
  std::array<std::uint8_t, kImagePixels> mask{};
  for (int row = 0; row < kImageSide; ++row) {
    for (int col = 0; col < kImageSide; ++col) {
      bool hit = false;
      switch (kind) {
        case Augmentation::kOcclusionRect:
          hit = row < p.occlusion_rect_rows;
          break;
        case Augmentation::kOcclusionDiag:
          hit = row + col < p.occlusion_diag_legs;
          break;
        case Augmentation::kForeheadBar:
          hit = row >= p.forehead_first_row && row <= p.forehead_last_row;
          break;
        default:
          throw InvalidArgument("no fixed occlusion mask for variant " +
                                std::string(data::Name(kind)));
      }
      mask[row * kImageSide + col] = hit ? 1 : 0;
    }
  }
  return mask;
}

Image48 AugmentImage(const Image48& image, Augmentation kind, core::Rng& rng,
                     const AugmentParams& p) {
  switch (kind) {
    case Augmentation::kRotationCw:
      return Rotate(image, p.rotation_degrees);
    case Augmentation::kRotationCcw:
      return Rotate(image, -p.rotation_degrees);
    case Augmentation::kDark:
      return MapPixels(image, [&](double v) { return v * p.dark_gain; });
    case Augmentation::kContrast:
      return MapPixels(image, [&](double v) {
        return (v - p.contrast_pivot) * p.contrast_factor + p.contrast_pivot;
      });
    case Augmentation::kNoise:
      return MapPixels(image,
                       [&](double v) { return v + rng.Gaussian(0.0, p.noise_sigma); });
    case Augmentation::kBlur:
      return Blur(image, p.blur_sigma, p.blur_radius);
    case Augmentation::kOcclusionRect:
    case Augmentation::kOcclusionDiag:
    case Augmentation::kForeheadBar: {
      const auto mask = OcclusionMask(kind, p);
      Image48 out = image;
      for (std::size_t i = 0; i < kImagePixels; ++i) {
        if (mask[i]) out.pixels[i] = 0;
      }
      return out;
    }
    case Augmentation::kHairStrand:
      return HairStrands(image, rng, p);
    case Augmentation::kNone:
      break;
  }
  throw InvalidArgument("'none' is not an augmentation variant");
}

std::uint64_t VariantSeed(std::uint64_t dataset_seed, std::string_view origin_id,
                          Augmentation kind) {
  return core::DeriveSeed(core::DeriveSeed(dataset_seed, origin_id),
                          static_cast<std::uint64_t>(kind));
}

std::string ChildId(std::string_view origin_id, Augmentation kind) {
  return std::string(origin_id) + "__" + std::string(data::Name(kind));
}

data::Manifest ExpandManifest(const data::Manifest& manifest) {
  data::Manifest out;
  out.header = manifest.header;
  out.samples.reserve(manifest.samples.size() * kExpansionFactor);
  for (const auto& s : manifest.samples) {
    if (!s.IsOriginal()) {
      throw InvalidArgument("expansion requires originals only; sample '" +
                            s.id + "' is already augmented");
    }
  }
  for (const auto& s : manifest.samples) {
    out.samples.push_back(s);
    for (Augmentation kind : kCanonicalVariants) {
      data::Sample child = s;
      child.id = ChildId(s.id, kind);
      child.image = child.id + ".pgm";
      child.augmentation = kind;
      child.origin_id = s.id;
      out.samples.push_back(std::move(child));
    }
  }
  return out;
}

data::Manifest ExpandDataset(const data::Manifest& manifest,
                             const std::filesystem::path& in_images_dir,
                             const std::filesystem::path& out_images_dir,
                             std::uint64_t seed, std::size_t threads,
                             const AugmentParams& params) {
  data::Manifest out = ExpandManifest(manifest);
  std::filesystem::create_directories(out_images_dir);
  const bool copy_originals =
      !std::filesystem::equivalent(in_images_dir, out_images_dir);
  core::ParallelFor(manifest.samples.size(), threads, [&](std::size_t i) {
    const data::Sample& s = manifest.samples[i];
    const Image48 original = data::ReadImage(data::ResolveImage(in_images_dir, s));
    if (copy_originals) {
      data::WriteImage(original, data::ResolveImage(out_images_dir, s));
    }
    for (Augmentation kind : kCanonicalVariants) {
      core::Rng rng(VariantSeed(seed, s.id, kind));
      data::WriteImage(AugmentImage(original, kind, rng, params),
                       out_images_dir / (ChildId(s.id, kind) + ".pgm"));
    }
  });
  return out;
}

}  // namespace emocert::augment
