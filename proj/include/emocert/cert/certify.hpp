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
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "emocert/cert/profile.hpp"
#include "emocert/metrics/metrics.hpp"

namespace emocert::cert {

enum class Verdict { kPass, kFail, kExempted };

std::string_view VerdictName(Verdict verdict);

enum class Comparator { kAtLeast, kAtMost };

struct CriterionResult {
  std::string id;  // e.g. "reliability.test_accuracy", "fairness.race_gap"
  Dimension dimension = Dimension::kReliability;
  std::optional<double> observed;  // nullopt when the metric was missing
  Comparator comparator = Comparator::kAtLeast;
  double threshold = 0.0;
  Verdict verdict = Verdict::kFail;
  std::string evidence;  // path of the metric in the metrics document
  std::string notes;
  bool operator==(const CriterionResult&) const = default;
};

// One result per criterion, reliability first, in a fixed order. A
// criterion whose metric is absent fails with the note "not evaluated".
// A fairness gap above its bound is exempted only when dropping the groups
// named by matching known limitations brings the gap within the bound.
std::vector<CriterionResult> EvaluateProfile(const CertificationProfile& profile,
                                             const metrics::MetricsBundle& bundle);

struct DimensionVerdict {
  Dimension dimension = Dimension::kReliability;
  bool pass = true;  // every non-exempted criterion passes
  std::size_t passed = 0;
  std::size_t failed = 0;
  std::size_t exempted = 0;
  bool operator==(const DimensionVerdict&) const = default;
};

std::vector<DimensionVerdict> DimensionVerdicts(const std::vector<CriterionResult>& results);

}  // namespace emocert::cert
