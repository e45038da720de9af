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

#include "emocert/data/image.hpp"

#include <cctype>
#include <fstream>
#include <iterator>
#include <optional>

namespace emocert::data {
namespace {

// Reads one unsigned header token, skipping whitespace and '#' comments.
std::optional<long> NextHeaderNumber(std::string_view bytes, std::size_t& pos) {
  for (;;) {
    while (pos < bytes.size() &&
           std::isspace(static_cast<unsigned char>(bytes[pos]))) {
      ++pos;
    }
    if (pos < bytes.size() && bytes[pos] == '#') {
      while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
      continue;
    }
    break;
  }
  if (pos >= bytes.size() ||
      !std::isdigit(static_cast<unsigned char>(bytes[pos]))) {
    return std::nullopt;
  }
  long value = 0;
  while (pos < bytes.size() &&
         std::isdigit(static_cast<unsigned char>(bytes[pos]))) {
    value = value * 10 + (bytes[pos] - '0');
    if (value > 1'000'000) return std::nullopt;
    ++pos;
  }
  return value;
}

}  // namespace

Image48 DecodePgm(std::string_view bytes, std::string_view source) {
  const std::string where(source);
  if (bytes.size() < 2 || bytes[0] != 'P') {
    throw ImageError(ImageErrorKind::kUnsupportedFormat,
                     where + ": not a PGM file");
  }
  if (bytes[1] != '5') {
    throw ImageError(ImageErrorKind::kUnsupportedFormat,
                     where + ": unsupported PGM variant P" +
                         std::string(1, bytes[1]) + " (only binary P5)");
  }
  std::size_t pos = 2;
  const auto width = NextHeaderNumber(bytes, pos);
  const auto height = NextHeaderNumber(bytes, pos);
  const auto maxval = NextHeaderNumber(bytes, pos);
  if (!width || !height || !maxval || pos >= bytes.size() ||
      !std::isspace(static_cast<unsigned char>(bytes[pos]))) {
    throw ImageError(ImageErrorKind::kTruncated,
                     where + ": malformed PGM header");
  }
  ++pos;  // single whitespace byte before the raster
  if (*width != kImageSide || *height != kImageSide) {
    throw ImageError(ImageErrorKind::kBadDimensions,
                     where + ": expected 48x48, got " + std::to_string(*width) +
                         "x" + std::to_string(*height));
  }
  if (*maxval != 255) {
    throw ImageError(ImageErrorKind::kBadMaxval,
                     where + ": expected maxval 255, got " +
                         std::to_string(*maxval));
  }
  if (bytes.size() - pos < kImagePixels) {
    throw ImageError(ImageErrorKind::kTruncated,
                     where + ": raster truncated");
  }
  Image48 image;
  for (std::size_t i = 0; i < kImagePixels; ++i) {
    image.pixels[i] = static_cast<std::uint8_t>(bytes[pos + i]);
  }
  return image;
}

std::string EncodePgm(const Image48& image) {
  std::string out = "P5\n48 48\n255\n";
  out.append(reinterpret_cast<const char*>(image.pixels.data()),
             image.pixels.size());
  return out;
}

Image48 ReadImage(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ImageError(ImageErrorKind::kIo,
                     "cannot open image " + path.string());
  }
  const std::string bytes((std::istreambuf_iterator<char>(in)),
                          std::istreambuf_iterator<char>());
  return DecodePgm(bytes, path.string());
}

void WriteImage(const Image48& image, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw ImageError(ImageErrorKind::kIo,
                     "cannot write image " + path.string());
  }
  const std::string bytes = EncodePgm(image);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) {
    throw ImageError(ImageErrorKind::kIo,
                     "short write to " + path.string());
  }
}

}  // namespace emocert::data
