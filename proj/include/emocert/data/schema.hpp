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
#include <optional>
#include <string>
#include <string_view>

namespace emocert::data {

enum class Emotion : std::uint8_t { kAnger, kFear, kCalm, kSurprise };
enum class Gender : std::uint8_t { kMale, kFemale, kUnsure };
enum class Race : std::uint8_t { kCaucasian, kAfricanAmerican, kAsian };
enum class AgeGroup : std::uint8_t { k0To3, k4To19, k20To39, k40To69, k70Plus };
enum class Split : std::uint8_t { kTrain, kVal, kTest };
enum class Augmentation : std::uint8_t {
  kNone,
  kRotationCw,
  kRotationCcw,
  kDark,
  kContrast,
  kNoise,
  kBlur,
  kOcclusionRect,
  kOcclusionDiag,
  kForeheadBar,
  kHairStrand,
};

inline constexpr std::size_t kNumEmotions = 4;

// Serialized spellings, indexed by enumerator value.
template <typename E>
struct EnumNames;

template <>
struct EnumNames<Emotion> {
  static constexpr std::string_view kAttribute = "emotion";
  static constexpr std::array<std::string_view, 4> kNames = {
      "anger", "fear", "calm", "surprise"};
};
template <>
struct EnumNames<Gender> {
  static constexpr std::string_view kAttribute = "gender";
  static constexpr std::array<std::string_view, 3> kNames = {"male", "female",
                                                             "unsure"};
};
template <>
struct EnumNames<Race> {
  static constexpr std::string_view kAttribute = "race";
  static constexpr std::array<std::string_view, 3> kNames = {
      "caucasian", "african_american", "asian"};
};
template <>
struct EnumNames<AgeGroup> {
  static constexpr std::string_view kAttribute = "age_group";
  static constexpr std::array<std::string_view, 5> kNames = {
      "0-3", "4-19", "20-39", "40-69", "70+"};
};
template <>
struct EnumNames<Split> {
  static constexpr std::string_view kAttribute = "split";
  static constexpr std::array<std::string_view, 3> kNames = {"train", "val",
                                                             "test"};
};
template <>
struct EnumNames<Augmentation> {
  static constexpr std::string_view kAttribute = "augmentation";
  static constexpr std::array<std::string_view, 11> kNames = {
      "none",           "rotation_cw",    "rotation_ccw", "dark",
      "contrast",       "noise",          "blur",         "occlusion_rect",
      "occlusion_diag", "forehead_bar",   "hair_strand"};
};

template <typename E>
constexpr std::size_t EnumCount() {
  return EnumNames<E>::kNames.size();
}

template <typename E>
constexpr std::string_view Name(E value) {
  return EnumNames<E>::kNames[static_cast<std::size_t>(value)];
}

template <typename E>
constexpr E FromIndex(std::size_t index) {
  return static_cast<E>(index);
}

template <typename E>
std::optional<E> Parse(std::string_view text) {
  const auto& names = EnumNames<E>::kNames;
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (names[i] == text) return static_cast<E>(i);
  }
  return std::nullopt;
}

// Demographic attributes that fairness metrics can partition by.
enum class Attribute : std::uint8_t { kGender, kRace, kAgeGroup };
inline constexpr std::array<Attribute, 3> kAllAttributes = {
    Attribute::kGender, Attribute::kRace, Attribute::kAgeGroup};

std::string_view AttributeName(Attribute attribute);
std::optional<Attribute> ParseAttribute(std::string_view text);

// Comma-separated list of the valid spellings, for error messages.
template <typename E>
std::string ValidNames() {
  std::string out;
  for (auto name : EnumNames<E>::kNames) {
    if (!out.empty()) out += ", ";
    out += name;
  }
  return out;
}

}  // namespace emocert::data
