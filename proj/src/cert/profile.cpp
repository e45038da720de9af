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

#include "emocert/cert/profile.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "emocert/core/error.hpp"

namespace emocert::cert {
namespace {

using Json = nlohmann::ordered_json;

class Checker {
 public:
  explicit Checker(std::string_view source) : source_(source) {}

  void Issue(const std::string& path, const std::string& message) {
    issues_.push_back(std::string(source_) + ": " + path + ": " + message);
  }

  bool Object(const Json& value, const std::string& path,
              std::initializer_list<std::string_view> allowed) {
    if (!value.is_object()) {
      Issue(path, "expected an object");
      return false;
    }
    for (const auto& item : value.items()) {
      bool known = false;
      for (auto key : allowed) known = known || item.key() == key;
      if (!known) Issue(path + "." + item.key(), "unknown key");
    }
    return true;
  }

  void Number(const Json& obj, const char* key, const std::string& path, double lo,
              double hi, double& out) {
    const auto it = obj.find(key);
    if (it == obj.end()) return;
    const std::string where = path + "." + key;
    if (!it->is_number()) {
      Issue(where, "expected a number");
      return;
    }
    const double v = it->get<double>();
    if (!(v >= lo && v <= hi)) {
      std::ostringstream msg;
      msg << "value " << v << " outside [" << lo << ", " << hi << "]";
      Issue(where, msg.str());
      return;
    }
    out = v;
  }

  std::vector<std::string>& issues() { return issues_; }

 private:
  std::string_view source_;
  std::vector<std::string> issues_;
};

bool GroupExists(data::Attribute attribute, std::string_view group) {
  switch (attribute) {
    case data::Attribute::kGender:
      return data::Parse<data::Gender>(group).has_value();
    case data::Attribute::kRace:
      return data::Parse<data::Race>(group).has_value();
    case data::Attribute::kAgeGroup:
      return data::Parse<data::AgeGroup>(group).has_value();
  }
  return false;
}

}  // namespace

std::string_view DimensionName(Dimension dimension) {
  return dimension == Dimension::kReliability ? "reliability" : "fairness";
}

CertificationProfile ParseProfile(const Json& doc, std::string_view source) {
  Checker check(source);
  CertificationProfile profile;
  if (check.Object(doc, "$", {"schema_version", "name", "reliability", "fairness",
                              "known_limitations"})) {
    const auto version = doc.find("schema_version");
    if (version == doc.end()) {
      check.Issue("$.schema_version", "required");
    } else if (!version->is_number_integer() ||
               version->get<int>() != kProfileSchemaVersion) {
      check.Issue("$.schema_version",
                  "unsupported (expected " + std::to_string(kProfileSchemaVersion) + ")");
    }
    if (const auto name = doc.find("name"); name != doc.end()) {
      if (name->is_string() && !name->get<std::string>().empty()) {
        profile.name = name->get<std::string>();
      } else {
        check.Issue("$.name", "expected a non-empty string");
      }
    }
    if (const auto rel = doc.find("reliability"); rel != doc.end()) {
      auto& r = profile.reliability;
      if (check.Object(*rel, "$.reliability",
                       {"min_test_accuracy", "min_mean_confidence", "max_mean_entropy",
                        "max_train_test_gap"})) {
        check.Number(*rel, "min_test_accuracy", "$.reliability", 0.0, 1.0, r.min_test_accuracy);
        check.Number(*rel, "min_mean_confidence", "$.reliability", 0.0, 1.0,
                     r.min_mean_confidence);
        check.Number(*rel, "max_mean_entropy", "$.reliability", 0.0,
                     std::log(static_cast<double>(data::kNumEmotions)), r.max_mean_entropy);
        check.Number(*rel, "max_train_test_gap", "$.reliability", 0.0, 1.0,
                     r.max_train_test_gap);
      }
    }
    if (const auto fair = doc.find("fairness"); fair != doc.end()) {
      auto& f = profile.fairness;
      if (check.Object(*fair, "$.fairness", {"max_gap", "min_group_n"})) {
        if (const auto gaps = fair->find("max_gap"); gaps != fair->end()) {
          if (check.Object(*gaps, "$.fairness.max_gap", {"gender", "race", "age_group"})) {
            for (auto attribute : data::kAllAttributes) {
              const std::string key(data::AttributeName(attribute));
              check.Number(*gaps, key.c_str(), "$.fairness.max_gap", 0.0, 1.0,
                           f.max_gap[static_cast<std::size_t>(attribute)]);
            }
          }
        }
        if (const auto n = fair->find("min_group_n"); n != fair->end()) {
          if (n->is_number_unsigned() && n->get<std::uint64_t>() >= 1) {
            f.min_group_n = n->get<std::size_t>();
          } else {
            check.Issue("$.fairness.min_group_n", "expected an integer >= 1");
          }
        }
      }
    }
    if (const auto limits = doc.find("known_limitations"); limits != doc.end()) {
      if (!limits->is_array()) {
        check.Issue("$.known_limitations", "expected an array");
      } else {
        for (std::size_t i = 0; i < limits->size(); ++i) {
          const std::string path = "$.known_limitations[" + std::to_string(i) + "]";
          const Json& entry = (*limits)[i];
          if (!check.Object(entry, path, {"attribute", "group", "rationale"})) continue;
          KnownLimitation limit;
          bool ok = true;
          const auto attr = entry.find("attribute");
          const auto group = entry.find("group");
          const auto why = entry.find("rationale");
          std::optional<data::Attribute> attribute;
          if (attr == entry.end() || !attr->is_string() ||
              !(attribute = data::ParseAttribute(attr->get<std::string>()))) {
            check.Issue(path + ".attribute", "expected one of: gender, race, age_group");
            ok = false;
          } else {
            limit.attribute = *attribute;
          }
          if (group == entry.end() || !group->is_string()) {
            check.Issue(path + ".group", "expected a string");
            ok = false;
          } else if (attribute && !GroupExists(*attribute, group->get<std::string>())) {
            check.Issue(path + ".group", "unknown " +
                                             std::string(data::AttributeName(*attribute)) +
                                             " group '" + group->get<std::string>() + "'");
            ok = false;
          } else {
            limit.group = group->get<std::string>();
          }
          if (why == entry.end() || !why->is_string() || why->get<std::string>().empty()) {
            check.Issue(path + ".rationale", "expected a non-empty string");
            ok = false;
          } else {
            limit.rationale = why->get<std::string>();
          }
          if (ok) profile.known_limitations.push_back(std::move(limit));
        }
      }
    }
  }
  if (!check.issues().empty()) {
    throw ValidationError("invalid certification profile " + std::string(source),
                          std::move(check.issues()));
  }
  return profile;
}

CertificationProfile ParseProfileText(std::string_view text, std::string_view source) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ValidationError("invalid certification profile " + std::string(source),
                          {std::string(source) + ": malformed JSON (" + e.what() + ")"});
  }
  return ParseProfile(doc, source);
}

CertificationProfile LoadProfile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open profile " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return ParseProfileText(buffer.str(), path.string());
}

Json ToJson(const CertificationProfile& p) {
  Json j;
  j["schema_version"] = p.schema_version;
  j["name"] = p.name;
  j["reliability"] = {{"min_test_accuracy", p.reliability.min_test_accuracy},
                      {"min_mean_confidence", p.reliability.min_mean_confidence},
                      {"max_mean_entropy", p.reliability.max_mean_entropy},
                      {"max_train_test_gap", p.reliability.max_train_test_gap}};
  Json gaps;
  for (auto attribute : data::kAllAttributes) {
    gaps[std::string(data::AttributeName(attribute))] = p.fairness.MaxGap(attribute);
  }
  j["fairness"] = {{"max_gap", gaps}, {"min_group_n", p.fairness.min_group_n}};
  Json limits = Json::array();
  for (const auto& l : p.known_limitations) {
    limits.push_back({{"attribute", data::AttributeName(l.attribute)},
                      {"group", l.group},
                      {"rationale", l.rationale}});
  }
  j["known_limitations"] = limits;
  return j;
}

}  // namespace emocert::cert
