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

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "emocert/data/schema.hpp"

namespace emocert::data {

// One labeled image. Augmented samples point at their unaugmented parent
// through origin_id; originals point at themselves.
struct Sample {
  std::string id;
  std::string image;  // relative to the images directory
  Emotion emotion = Emotion::kAnger;
  Gender gender = Gender::kUnsure;
  Race race = Race::kCaucasian;
  AgeGroup age_group = AgeGroup::k20To39;
  std::string source;
  Split split = Split::kTrain;
  Augmentation augmentation = Augmentation::kNone;
  std::string origin_id;

  bool IsOriginal() const { return augmentation == Augmentation::kNone; }
  bool operator==(const Sample&) const = default;
};

struct ManifestHeader {
  int schema_version = 1;
  std::uint64_t creation_seed = 0;
  std::string notes;
  bool operator==(const ManifestHeader&) const = default;
};

struct Manifest {
  ManifestHeader header;
  std::vector<Sample> samples;
  bool operator==(const Manifest&) const = default;
};

inline constexpr int kManifestSchemaVersion = 1;

// Line-delimited JSON. An optional first line {"manifest": {...}} carries
// the header; every other non-blank line is one flat sample object with
// exactly the fields id, image, emotion, gender, race, age_group, source,
// split, augmentation, origin_id.
//
// Parsing validates every record and throws ValidationError listing all
// violations with their line numbers.
Manifest ParseManifest(std::istream& in, std::string_view source_name);
Manifest LoadManifest(const std::filesystem::path& path);

void WriteManifest(const Manifest& manifest, std::ostream& out);
void SaveManifest(const Manifest& manifest, const std::filesystem::path& path);

// Structural checks that do not depend on line numbers: unique ids,
// none <=> self-origin, every origin_id resolving to an original.
std::vector<std::string> ValidateManifest(const Manifest& manifest);

std::filesystem::path ResolveImage(const std::filesystem::path& images_dir,
                                   const Sample& sample);

}  // namespace emocert::data
