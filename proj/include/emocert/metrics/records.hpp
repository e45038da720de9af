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
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "emocert/data/schema.hpp"

namespace emocert::metrics {

using Probs = std::array<double, data::kNumEmotions>;

struct PredictionRecord {
  std::string sample_id;
  Probs probs{};
  data::Emotion true_class = data::Emotion::kAnger;
  data::Emotion predicted = data::Emotion::kAnger;
  data::Gender gender = data::Gender::kUnsure;
  data::Race race = data::Race::kCaucasian;
  data::AgeGroup age_group = data::AgeGroup::k20To39;
  data::Augmentation augmentation = data::Augmentation::kNone;

  bool correct() const { return predicted == true_class; }
  bool operator==(const PredictionRecord&) const = default;
};

inline constexpr double kProbabilityTolerance = 1e-6;

// Largest entry; ties go to the lowest class index.
data::Emotion ArgmaxClass(const Probs& probs);

// Empty when the record satisfies: probs >= 0, sum within 1e-6 of 1,
// predicted == ArgmaxClass(probs). Otherwise one message per violation.
std::vector<std::string> RecordIssues(const PredictionRecord& record);

// Group value of `record` for a demographic attribute, as its serialized
// name.
std::string_view GroupOf(const PredictionRecord& record, data::Attribute attribute);

// Line-delimited JSON, one object per record with keys sample_id, probs,
// true, predicted, gender, race, age_group, augmentation. Class and group
// values are their serialized names.
std::string RecordToLine(const PredictionRecord& record);
void WriteRecords(std::span<const PredictionRecord> records, std::ostream& out);
void SaveRecords(std::span<const PredictionRecord> records,
                 const std::filesystem::path& path);

// Strict reader: every malformed line, unknown key, bad enum value and
// invalid probability vector is collected and thrown as one
// ValidationError.
std::vector<PredictionRecord> ParseRecords(std::istream& in,
                                           std::string_view source_name);
std::vector<PredictionRecord> LoadRecords(const std::filesystem::path& path);

}  // namespace emocert::metrics
