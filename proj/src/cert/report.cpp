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

#include "emocert/cert/report.hpp"

#include <openssl/evp.h>

#include <array>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>

#include "emocert/core/error.hpp"

#ifndef EMOCERT_VERSION
#define EMOCERT_VERSION "0.0.0"
#endif

namespace emocert::cert {
namespace {

using Json = nlohmann::ordered_json;

std::string Fixed(double value, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, value);
  return buf;
}

std::string_view ComparatorSymbol(Comparator c) {
  return c == Comparator::kAtLeast ? ">=" : "<=";
}

// Checks `obj[key]` exists and satisfies `pred`; records `expect` otherwise.
template <typename Pred>
void Expect(const Json& obj, const std::string& path, const char* key, Pred pred,
            const char* expect, std::vector<std::string>& issues) {
  if (!obj.is_object() || !obj.contains(key)) {
    issues.push_back(path + "." + key + ": missing");
  } else if (!pred(obj.at(key))) {
    issues.push_back(path + "." + key + ": expected " + expect);
  }
}

bool IsVerdict(const Json& v) {
  return v.is_string() && (v == "pass" || v == "fail" || v == "exempted");
}

}  // namespace

std::string_view ToolkitVersion() { return EMOCERT_VERSION; }

std::string_view Disclaimer() {
  return "Self-assessment only. This report records automated checks of one model's "
         "predictions against the thresholds in the embedded profile. It is not a "
         "conformity assessment under the EU AI Act or any harmonised standard, it covers "
         "only the reliability and fairness criteria listed, and its verdicts hold only "
         "for the inputs identified by the digests below.";
}

std::string Sha256Hex(std::string_view bytes) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int length = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest.data(), &length, EVP_sha256(),
                 nullptr) != 1) {
    throw Error("SHA-256 computation failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < length; ++i) {
    out += kHex[digest[i] >> 4];
    out += kHex[digest[i] & 0xf];
  }
  return out;
}

std::string Sha256File(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return Sha256Hex(buffer.str());
}

std::string UtcTimestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm utc{};
  gmtime_r(&now, &utc);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &utc);
  return buf;
}

bool CertificationReport::AllDimensionsPass() const {
  for (const auto& d : dimensions) {
    if (!d.pass) return false;
  }
  return true;
}

CertificationReport BuildReport(const CertificationProfile& profile,
                                const metrics::MetricsBundle& bundle, Digests digests,
                                std::string timestamp) {
  CertificationReport report;
  report.profile = profile;
  report.metrics = bundle;
  report.results = EvaluateProfile(profile, bundle);
  report.dimensions = DimensionVerdicts(report.results);
  report.toolkit_version = std::string(ToolkitVersion());
  report.digests = std::move(digests);
  report.timestamp = std::move(timestamp);
  report.disclaimer = std::string(Disclaimer());
  return report;
}

std::optional<ReportFormat> ParseReportFormat(std::string_view text) {
  if (text == "structured") return ReportFormat::kStructured;
  if (text == "human_readable") return ReportFormat::kHumanReadable;
  return std::nullopt;
}

Json ReportToJson(const CertificationReport& report) {
  Json j;
  j["report_schema_version"] = kReportSchemaVersion;
  j["toolkit"] = {{"name", "emocert"}, {"version", report.toolkit_version}};
  j["generated_at"] = report.timestamp;
  Json digests = Json::object();
  for (const auto& [name, hex] : report.digests) digests[name] = {{"sha256", hex}};
  j["inputs"] = digests;
  j["overall"] = report.AllDimensionsPass() ? "pass" : "fail";
  Json dims = Json::object();
  for (const auto& d : report.dimensions) {
    dims[std::string(DimensionName(d.dimension))] = {{"verdict", d.pass ? "pass" : "fail"},
                                                     {"passed", d.passed},
                                                     {"failed", d.failed},
                                                     {"exempted", d.exempted}};
  }
  j["dimensions"] = dims;
  Json criteria = Json::array();
  for (const auto& r : report.results) {
    criteria.push_back({{"id", r.id},
                        {"dimension", DimensionName(r.dimension)},
                        {"observed", r.observed ? Json(*r.observed) : Json(nullptr)},
                        {"comparator", ComparatorSymbol(r.comparator)},
                        {"threshold", r.threshold},
                        {"verdict", VerdictName(r.verdict)},
                        {"evidence", r.evidence},
                        {"notes", r.notes}});
  }
  j["criteria"] = criteria;
  j["profile"] = ToJson(report.profile);
  j["metrics"] = metrics::ToJson(report.metrics);
  j["disclaimer"] = report.disclaimer;
  return j;
}

std::vector<std::string> ValidateReportJson(const Json& doc) {
  std::vector<std::string> issues;
  const auto is_string = [](const Json& v) { return v.is_string(); };
  const auto is_object = [](const Json& v) { return v.is_object(); };
  const auto is_count = [](const Json& v) { return v.is_number_unsigned(); };
  if (!doc.is_object()) return {"$: expected an object"};
  Expect(doc, "$", "report_schema_version",
         [](const Json& v) { return v.is_number_integer() && v == kReportSchemaVersion; },
         "the current schema version", issues);
  Expect(doc, "$", "toolkit", is_object, "an object", issues);
  if (doc.contains("toolkit") && doc["toolkit"].is_object()) {
    Expect(doc["toolkit"], "$.toolkit", "name", is_string, "a string", issues);
    Expect(doc["toolkit"], "$.toolkit", "version", is_string, "a string", issues);
  }
  Expect(doc, "$", "generated_at", is_string, "a string", issues);
  Expect(doc, "$", "inputs", is_object, "an object", issues);
  if (doc.contains("inputs") && doc["inputs"].is_object()) {
    for (const auto& item : doc["inputs"].items()) {
      Expect(item.value(), "$.inputs." + item.key(), "sha256",
             [](const Json& v) {
               return v.is_string() && v.get<std::string>().size() == 64 &&
                      v.get<std::string>().find_first_not_of("0123456789abcdef") ==
                          std::string::npos;
             },
             "64 lowercase hex digits", issues);
    }
  }
  Expect(doc, "$", "overall", IsVerdict, "a verdict", issues);
  Expect(doc, "$", "dimensions", is_object, "an object", issues);
  bool all_pass = true;
  for (const char* dim : {"reliability", "fairness"}) {
    if (!doc.contains("dimensions") || !doc["dimensions"].is_object()) break;
    const std::string path = std::string("$.dimensions");
    Expect(doc["dimensions"], path, dim, is_object, "an object", issues);
    if (!doc["dimensions"].contains(dim) || !doc["dimensions"][dim].is_object()) continue;
    const Json& d = doc["dimensions"][dim];
    const std::string dpath = path + "." + dim;
    Expect(d, dpath, "verdict", [](const Json& v) { return v == "pass" || v == "fail"; },
           "pass or fail", issues);
    for (const char* key : {"passed", "failed", "exempted"}) {
      Expect(d, dpath, key, is_count, "a non-negative integer", issues);
    }
    if (d.value("verdict", "") != "pass") all_pass = false;
    if (d.contains("failed") && d["failed"].is_number_unsigned() &&
        (d["failed"].get<std::uint64_t>() == 0) != (d.value("verdict", "") == "pass")) {
      issues.push_back(dpath + ": verdict inconsistent with failed count");
    }
  }
  if (doc.contains("overall") && IsVerdict(doc["overall"]) &&
      (doc["overall"] == "pass") != all_pass) {
    issues.push_back("$.overall: inconsistent with dimension verdicts");
  }
  Expect(doc, "$", "criteria", [](const Json& v) { return v.is_array() && !v.empty(); },
         "a non-empty array", issues);
  if (doc.contains("criteria") && doc["criteria"].is_array()) {
    for (std::size_t i = 0; i < doc["criteria"].size(); ++i) {
      const Json& c = doc["criteria"][i];
      const std::string path = "$.criteria[" + std::to_string(i) + "]";
      Expect(c, path, "id", is_string, "a string", issues);
      Expect(c, path, "dimension",
             [](const Json& v) { return v == "reliability" || v == "fairness"; },
             "reliability or fairness", issues);
      Expect(c, path, "observed", [](const Json& v) { return v.is_number() || v.is_null(); },
             "a number or null", issues);
      Expect(c, path, "comparator", [](const Json& v) { return v == ">=" || v == "<="; },
             ">= or <=", issues);
      Expect(c, path, "threshold", [](const Json& v) { return v.is_number(); }, "a number",
             issues);
      Expect(c, path, "verdict", IsVerdict, "a verdict", issues);
      Expect(c, path, "evidence", is_string, "a string", issues);
      Expect(c, path, "notes", is_string, "a string", issues);
    }
  }
  Expect(doc, "$", "profile", is_object, "an object", issues);
  Expect(doc, "$", "metrics", is_object, "an object", issues);
  Expect(doc, "$", "disclaimer",
         [](const Json& v) { return v.is_string() && !v.get<std::string>().empty(); },
         "a non-empty string", issues);
  return issues;
}

std::string RenderReport(const CertificationReport& report, ReportFormat format) {
  if (report.results.empty()) throw InvalidArgument("report has no criterion results");
  if (format == ReportFormat::kStructured) {
    const Json doc = ReportToJson(report);
    const auto issues = ValidateReportJson(doc);
    if (!issues.empty()) throw ValidationError("report failed schema validation", issues);
    return doc.dump(2) + "\n";
  }
  std::ostringstream md;
  md << "# Certification report: " << report.profile.name << "\n\n";
  md << "- Toolkit: emocert " << report.toolkit_version << "\n";
  md << "- Generated: " << report.timestamp << "\n";
  md << "- Overall: **" << (report.AllDimensionsPass() ? "PASS" : "FAIL") << "**\n\n";
  md << "## Dimensions\n\n| Dimension | Verdict | Passed | Failed | Exempted |\n"
        "|---|---|---|---|---|\n";
  for (const auto& d : report.dimensions) {
    md << "| " << DimensionName(d.dimension) << " | " << (d.pass ? "pass" : "fail") << " | "
       << d.passed << " | " << d.failed << " | " << d.exempted << " |\n";
  }
  md << "\n## Criteria\n\n| Criterion | Observed | Threshold | Verdict | Notes |\n"
        "|---|---|---|---|---|\n";
  for (const auto& r : report.results) {
    md << "| " << r.id << " | " << (r.observed ? Fixed(*r.observed, 4) : "n/a") << " | "
       << ComparatorSymbol(r.comparator) << " " << Fixed(r.threshold, 4) << " | "
       << VerdictName(r.verdict) << " | " << r.notes << " |\n";
  }
  const auto& m = report.metrics;
  md << "\n## Metrics summary\n\n";
  md << "- Records: " << m.record_count << "\n";
  md << "- Accuracy: " << Fixed(m.accuracy, 4) << "\n";
  md << "- Macro F1: " << Fixed(m.macro_f1, 4) << "\n";
  md << "- Mean confidence: " << Fixed(m.mean_confidence, 4) << "\n";
  md << "- Mean entropy (nats): " << Fixed(m.mean_entropy, 4) << "\n";
  if (m.train_test_gap) md << "- Train-test gap: " << Fixed(*m.train_test_gap, 4) << "\n";
  for (const auto& g : m.per_group) {
    md << "\n### " << data::AttributeName(g.attribute) << "\n\n| Group | Count | Accuracy | In gap |\n"
       << "|---|---|---|---|\n";
    for (const auto& s : g.groups) {
      md << "| " << s.group << " | " << s.count << " | " << Fixed(s.accuracy, 4) << " | "
         << (s.count >= report.profile.fairness.min_group_n ? "yes" : "no (too few records)")
         << " |\n";
    }
  }
  if (!m.robustness.tags.empty()) {
    md << "\n### Augmentation robustness\n\n| Tag | Count | Accuracy |\n|---|---|---|\n";
    for (const auto& t : m.robustness.tags) {
      md << "| " << data::Name(t.tag) << " | " << t.count << " | " << Fixed(t.accuracy, 4)
         << " |\n";
    }
    if (m.robustness.weakest) md << "\nWeakest: " << data::Name(*m.robustness.weakest) << "\n";
  }
  if (!report.profile.known_limitations.empty()) {
    md << "\n## Known limitations\n\n";
    for (const auto& l : report.profile.known_limitations) {
      md << "- " << data::AttributeName(l.attribute) << " = " << l.group << ": " << l.rationale
         << "\n";
    }
  }
  md << "\n## Input digests (SHA-256)\n\n";
  for (const auto& [name, hex] : report.digests) md << "- " << name << ": `" << hex << "`\n";
  md << "\n## Disclaimer\n\n" << report.disclaimer << "\n";
  return md.str();
}

}  // namespace emocert::cert
