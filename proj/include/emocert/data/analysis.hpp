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

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "emocert/data/manifest.hpp"

namespace emocert::data {

struct ValueCount {
  std::string value;
  std::size_t count = 0;
  std::size_t originals = 0;
  std::size_t augmented = 0;
  double fraction = 0.0;  // count / total samples
};

struct AttributeBreakdown {
  std::string attribute;
  std::vector<ValueCount> values;

  const ValueCount* Find(std::string_view value) const;
};

// Composition of a manifest: exact counts per attribute value, with
// originals and augmented samples tallied separately.
struct DatasetReport {
  std::size_t total_samples = 0;
  std::size_t total_originals = 0;
  std::size_t total_augmented = 0;
  double expansion_factor = 0.0;  // total_samples / total_originals
  // emotion, gender, race, age_group, source, split, augmentation
  std::vector<AttributeBreakdown> attributes;

  const AttributeBreakdown& Attribute(std::string_view name) const;
};

// Throws InvalidArgument on an empty manifest.
DatasetReport AnalyzeDataset(const Manifest& manifest);

nlohmann::ordered_json ToJson(const DatasetReport& report);

}  // namespace emocert::data
