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
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "emocert/data/schema.hpp"

namespace emocert::cert {

enum class Dimension { kReliability, kFairness };

std::string_view DimensionName(Dimension dimension);

struct ReliabilityThresholds {
  double min_test_accuracy = 0.60;
  double min_mean_confidence = 0.50;
  double max_mean_entropy = 0.90;  // nats
  double max_train_test_gap = 0.15;
  bool operator==(const ReliabilityThresholds&) const = default;
};

struct FairnessThresholds {
  // Indexed by data::Attribute: gender, race, age_group.
  std::array<double, 3> max_gap = {0.10, 0.10, 0.10};
  std::size_t min_group_n = 30;
  bool operator==(const FairnessThresholds&) const = default;

  double MaxGap(data::Attribute attribute) const {
    return max_gap[static_cast<std::size_t>(attribute)];
  }
};

// A deliberately accepted shortfall for one demographic group.
struct KnownLimitation {
  data::Attribute attribute = data::Attribute::kAgeGroup;
  std::string group;
  std::string rationale;
  bool operator==(const KnownLimitation&) const = default;
};

inline constexpr int kProfileSchemaVersion = 1;

struct CertificationProfile {
  int schema_version = kProfileSchemaVersion;
  std::string name = "default";
  ReliabilityThresholds reliability;
  FairnessThresholds fairness;
  std::vector<KnownLimitation> known_limitations;
  bool operator==(const CertificationProfile&) const = default;
};

// Document layout:
//   {"schema_version": 1, "name": "...",
//    "reliability": {"min_test_accuracy": .., "min_mean_confidence": ..,
//                    "max_mean_entropy": .., "max_train_test_gap": ..},
//    "fairness": {"max_gap": {"gender": .., "race": .., "age_group": ..},
//                 "min_group_n": ..},
//    "known_limitations": [{"attribute": .., "group": .., "rationale": ..}]}
// schema_version is required; omitted thresholds keep their defaults.
// Unknown keys, out-of-range thresholds and unknown attributes or groups
// are all collected into one ValidationError.
CertificationProfile ParseProfile(const nlohmann::ordered_json& document,
                                  std::string_view source = "<profile>");
CertificationProfile ParseProfileText(std::string_view text,
                                      std::string_view source = "<profile>");
CertificationProfile LoadProfile(const std::filesystem::path& path);

nlohmann::ordered_json ToJson(const CertificationProfile& profile);

}  // namespace emocert::cert
