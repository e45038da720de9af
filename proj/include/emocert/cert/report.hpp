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

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "emocert/cert/certify.hpp"
#include "emocert/cert/profile.hpp"
#include "emocert/metrics/metrics.hpp"

namespace emocert::cert {

inline constexpr int kReportSchemaVersion = 1;

std::string_view ToolkitVersion();
std::string_view Disclaimer();

// Lowercase hex SHA-256.
std::string Sha256Hex(std::string_view bytes);
std::string Sha256File(const std::filesystem::path& path);

// Current UTC time as "YYYY-MM-DDTHH:MM:SSZ".
std::string UtcTimestamp();

// Named digests, e.g. {"predictions", <hex>}, kept in insertion order.
using Digests = std::vector<std::pair<std::string, std::string>>;

struct CertificationReport {
  CertificationProfile profile;
  metrics::MetricsBundle metrics;
  std::vector<CriterionResult> results;
  std::vector<DimensionVerdict> dimensions;
  std::string toolkit_version;
  Digests digests;
  std::string timestamp;
  std::string disclaimer;

  bool AllDimensionsPass() const;
};

// Evaluates the profile and assembles the report. Everything except the
// timestamp is a function of the inputs.
CertificationReport BuildReport(const CertificationProfile& profile,
                                const metrics::MetricsBundle& bundle, Digests digests,
                                std::string timestamp);

enum class ReportFormat { kStructured, kHumanReadable };

// "structured" (JSON) or "human_readable" (Markdown).
std::optional<ReportFormat> ParseReportFormat(std::string_view text);

nlohmann::ordered_json ReportToJson(const CertificationReport& report);

// Problems found when checking a structured report against the report
// schema; empty when valid.
std::vector<std::string> ValidateReportJson(const nlohmann::ordered_json& document);

// Throws InvalidArgument when the report has no results. The structured
// form is validated before it is returned.
std::string RenderReport(const CertificationReport& report, ReportFormat format);

}  // namespace emocert::cert
