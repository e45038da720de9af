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
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "emocert/data/schema.hpp"
#include "emocert/metrics/records.hpp"

namespace emocert::metrics {

using Records = std::span<const PredictionRecord>;

// All record-level metrics throw InvalidArgument on empty input.
double Accuracy(Records records);
double MacroF1(Records records);
double MeanConfidence(Records records);
// Natural-log entropy averaged over records; 0 ln 0 is taken as 0.
double MeanEntropy(Records records);
double Entropy(const Probs& probs);

// Rows are the true class, columns the predicted class.
struct ConfusionMatrix {
  std::array<std::array<std::uint64_t, data::kNumEmotions>, data::kNumEmotions> counts{};

  std::uint64_t Total() const;
  std::uint64_t Trace() const;
  std::uint64_t RowSum(std::size_t row) const;
  std::uint64_t ColumnSum(std::size_t col) const;
  bool operator==(const ConfusionMatrix&) const = default;
};

ConfusionMatrix Confusion(Records records);

// Header row "true\predicted,anger,fear,calm,surprise", then one row per
// true class.
std::string ConfusionCsv(const ConfusionMatrix& matrix);

struct ClassStats {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::uint64_t support = 0;
  bool operator==(const ClassStats&) const = default;
};

// Precision and recall are 0 when their denominator is 0; F1 is 0 when
// precision + recall is 0.
std::array<ClassStats, data::kNumEmotions> PerClassStats(const ConfusionMatrix& matrix);

inline constexpr std::size_t kDefaultMinGroupN = 30;

struct GroupStat {
  std::string group;
  std::uint64_t count = 0;
  std::uint64_t correct = 0;
  double accuracy = 0.0;
  bool included = false;  // count >= min_group_n
  bool operator==(const GroupStat&) const = default;
};

struct GroupMetrics {
  data::Attribute attribute = data::Attribute::kGender;
  std::size_t min_group_n = kDefaultMinGroupN;
  std::vector<GroupStat> groups;  // groups present in the records, enum order
  // max - min accuracy over included groups; nullopt when none qualifies.
  std::optional<double> max_gap;
  std::optional<std::string> best_group;
  std::optional<std::string> worst_group;
  bool operator==(const GroupMetrics&) const = default;

  const GroupStat* Find(std::string_view group) const;
};

// Throws InvalidArgument on empty input, min_group_n == 0, or when no group
// reaches min_group_n.
GroupMetrics ComputeGroupMetrics(Records records, data::Attribute attribute,
                                 std::size_t min_group_n = kDefaultMinGroupN);

struct TagStat {
  data::Augmentation tag = data::Augmentation::kNone;
  std::uint64_t count = 0;
  std::uint64_t correct = 0;
  double accuracy = 0.0;
  bool below_floor = false;
  bool operator==(const TagStat&) const = default;
};

struct RobustnessMetrics {
  std::vector<TagStat> tags;  // tags present in the records, enum order
  std::optional<double> floor;
  std::optional<data::Augmentation> weakest;  // lowest accuracy, first in enum order on ties
  bool operator==(const RobustnessMetrics&) const = default;

  const TagStat* Find(data::Augmentation tag) const;
};

RobustnessMetrics ComputeRobustness(Records records,
                                    std::optional<double> floor = std::nullopt);

struct BundleOptions {
  std::optional<double> train_accuracy;
  std::size_t min_group_n = kDefaultMinGroupN;
  std::optional<double> robustness_floor;
};

struct MetricsBundle {
  std::uint64_t record_count = 0;
  std::uint64_t correct = 0;
  double accuracy = 0.0;
  double macro_f1 = 0.0;
  double mean_confidence = 0.0;
  double mean_entropy = 0.0;
  ConfusionMatrix confusion;
  std::array<ClassStats, data::kNumEmotions> per_class{};
  std::vector<GroupMetrics> per_group;  // gender, race, age_group
  RobustnessMetrics robustness;
  std::optional<double> train_accuracy;
  std::optional<double> train_test_gap;  // train_accuracy - accuracy
  bool operator==(const MetricsBundle&) const = default;

  const GroupMetrics* Group(data::Attribute attribute) const;
};

// An attribute where no group reaches min_group_n keeps its group table
// but has no max_gap, so certification reports it as not evaluated.
MetricsBundle ComputeBundle(Records records, const BundleOptions& options = {});

nlohmann::ordered_json ToJson(const MetricsBundle& bundle);
// Inverse of ToJson. Throws FormatError on a malformed document.
MetricsBundle BundleFromJson(const nlohmann::ordered_json& json);

}  // namespace emocert::metrics
