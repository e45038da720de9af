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

#include "emocert/core/error.hpp"

namespace emocert::data {

inline constexpr int kImageSide = 48;
inline constexpr std::size_t kImagePixels = kImageSide * kImageSide;

// 48x48 8-bit grayscale face crop, row-major.
struct Image48 {
  std::array<std::uint8_t, kImagePixels> pixels{};

  std::uint8_t& at(int row, int col) { return pixels[row * kImageSide + col]; }
  std::uint8_t at(int row, int col) const {
    return pixels[row * kImageSide + col];
  }

  static Image48 Filled(std::uint8_t value) {
    Image48 img;
    img.pixels.fill(value);
    return img;
  }

  bool operator==(const Image48&) const = default;
};

enum class ImageErrorKind {
  kIo,
  kUnsupportedFormat,
  kBadDimensions,
  kBadMaxval,
  kTruncated,
};

class ImageError : public FormatError {
 public:
  ImageError(ImageErrorKind kind, const std::string& what)
      : FormatError(what), kind_(kind) {}
  ImageErrorKind kind() const { return kind_; }

 private:
  ImageErrorKind kind_;
};

// Binary PGM (P5) with maxval 255, exactly 48x48. Header comments are
// accepted on read; the writer emits "P5\n48 48\n255\n".
Image48 DecodePgm(std::string_view bytes, std::string_view source = "<memory>");
std::string EncodePgm(const Image48& image);

Image48 ReadImage(const std::filesystem::path& path);
void WriteImage(const Image48& image, const std::filesystem::path& path);

// value / 255 into `out`, which must hold kImagePixels elements.
template <typename T>
void Normalize(const Image48& image, T* out) {
  for (std::size_t i = 0; i < kImagePixels; ++i) {
    out[i] = static_cast<T>(image.pixels[i]) / static_cast<T>(255);
  }
}

}  // namespace emocert::data
