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

#include "emocert/cert/certify.hpp"

#include <algorithm>
#include <cstdio>

namespace emocert::cert {
namespace {

CriterionResult Reliability(std::string id, std::optional<double> observed,
                            Comparator comparator, double threshold, std::string evidence) {
  CriterionResult r;
  r.id = "reliability." + std::move(id);
  r.dimension = Dimension::kReliability;
  r.observed = observed;
  r.comparator = comparator;
  r.threshold = threshold;
  r.evidence = std::move(evidence);
  if (!observed) {
    r.verdict = Verdict::kFail;
    r.notes = "not evaluated: metric missing from the metrics bundle";
  } else {
    const bool ok = comparator == Comparator::kAtLeast ? *observed >= threshold
                                                       : *observed <= threshold;
    r.verdict = ok ? Verdict::kPass : Verdict::kFail;
  }
  return r;
}

// max - min accuracy over groups with at least min_n records, skipping
// groups listed in `skip`.
std::optional<double> Gap(const metrics::GroupMetrics& groups, std::size_t min_n,
                          const std::vector<std::string>& skip) {
  std::optional<double> lo, hi;
  for (const auto& g : groups.groups) {
    if (g.count < min_n) continue;
    if (std::find(skip.begin(), skip.end(), g.group) != skip.end()) continue;
    lo = lo ? std::min(*lo, g.accuracy) : g.accuracy;
    hi = hi ? std::max(*hi, g.accuracy) : g.accuracy;
  }
  if (!lo) return std::nullopt;
  return *hi - *lo;
}

CriterionResult Fairness(const CertificationProfile& profile,
                         const metrics::MetricsBundle& bundle, data::Attribute attribute) {
  const std::string name(data::AttributeName(attribute));
  CriterionResult r;
  r.id = "fairness." + name + "_gap";
  r.dimension = Dimension::kFairness;
  r.comparator = Comparator::kAtMost;
  r.threshold = profile.fairness.MaxGap(attribute);
  r.evidence = "per_group." + name + ".max_gap";
  r.verdict = Verdict::kFail;
  const metrics::GroupMetrics* groups = bundle.Group(attribute);
  const std::size_t min_n = profile.fairness.min_group_n;
  if (groups) r.observed = Gap(*groups, min_n, {});
  if (!r.observed) {
    r.notes = groups ? "not evaluated: no " + name + " group has at least " +
                           std::to_string(min_n) + " records"
                     : "not evaluated: metric missing from the metrics bundle";
    return r;
  }
  if (*r.observed <= r.threshold) {
    r.verdict = Verdict::kPass;
    return r;
  }
  std::vector<std::string> exempt;
  std::string rationale;
  for (const auto& limit : profile.known_limitations) {
    if (limit.attribute != attribute) continue;
    const auto* stat = groups->Find(limit.group);
    if (!stat || stat->count < min_n) continue;
    exempt.push_back(limit.group);
    if (!rationale.empty()) rationale += "; ";
    rationale += limit.group + ": " + limit.rationale;
  }
  if (exempt.empty()) return r;
  const double residual = Gap(*groups, min_n, exempt).value_or(0.0);
  if (residual <= r.threshold) {
    r.verdict = Verdict::kExempted;
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.4f", residual);
    r.notes = "known limitation (" + rationale + "); gap without exempted groups " + buf;
  } else {
    r.notes = "gap exceeds the bound even without known-limitation groups";
  }
  return r;
}

}  // namespace

std::string_view VerdictName(Verdict verdict) {
  switch (verdict) {
    case Verdict::kPass:
      return "pass";
    case Verdict::kFail:
      return "fail";
    case Verdict::kExempted:
      return "exempted";
  }
  return "fail";
}

std::vector<CriterionResult> EvaluateProfile(const CertificationProfile& profile,
                                             const metrics::MetricsBundle& bundle) {
  const auto& rel = profile.reliability;
  std::vector<CriterionResult> results;
  const bool has_records = bundle.record_count > 0;
  auto metric = [&](double v) { return has_records ? std::optional<double>(v) : std::nullopt; };
  results.push_back(Reliability("test_accuracy", metric(bundle.accuracy), Comparator::kAtLeast,
                                rel.min_test_accuracy, "accuracy"));
  results.push_back(Reliability("mean_confidence", metric(bundle.mean_confidence),
                                Comparator::kAtLeast, rel.min_mean_confidence,
                                "mean_confidence"));
  results.push_back(Reliability("mean_entropy", metric(bundle.mean_entropy),
                                Comparator::kAtMost, rel.max_mean_entropy, "mean_entropy"));
  results.push_back(Reliability("train_test_gap", bundle.train_test_gap, Comparator::kAtMost,
                                rel.max_train_test_gap, "train_test_gap"));
  for (auto attribute : data::kAllAttributes) {
    results.push_back(Fairness(profile, bundle, attribute));
  }
  return results;
}

std::vector<DimensionVerdict> DimensionVerdicts(const std::vector<CriterionResult>& results) {
  std::vector<DimensionVerdict> out = {{Dimension::kReliability}, {Dimension::kFairness}};
  for (const auto& r : results) {
    auto& d = out[r.dimension == Dimension::kReliability ? 0 : 1];
    switch (r.verdict) {
      case Verdict::kPass:
        ++d.passed;
        break;
      case Verdict::kFail:
        ++d.failed;
        d.pass = false;
        break;
      case Verdict::kExempted:
        ++d.exempted;
        break;
    }
  }
  return out;
}

}  // namespace emocert::cert
