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

#include "emocert/metrics/records.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>

#include <json.hpp>

#include "emocert/core/error.hpp"

namespace emocert::metrics {
namespace {

using Json = nlohmann::ordered_json;

constexpr std::array<std::string_view, 8> kKeys = {
    "sample_id", "probs", "true", "predicted",
    "gender",    "race",  "age_group", "augmentation"};

template <typename E>
void ReadEnum(const Json& obj, std::string_view key, E& out,
              std::vector<std::string>& issues, const std::string& where) {
  const auto it = obj.find(std::string(key));
  if (it == obj.end()) {
    issues.push_back(where + ": missing field '" + std::string(key) + "'");
    return;
  }
  if (!it->is_string()) {
    issues.push_back(where + ": field '" + std::string(key) + "' must be a string");
    return;
  }
  const auto text = it->get<std::string>();
  if (const auto value = data::Parse<E>(text)) {
    out = *value;
  } else {
    issues.push_back(where + ": unknown " + std::string(key) + " '" + text +
                     "' (expected one of: " + data::ValidNames<E>() + ")");
  }
}

}  // namespace

data::Emotion ArgmaxClass(const Probs& probs) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < probs.size(); ++i) {
    if (probs[i] > probs[best]) best = i;
  }
  return data::FromIndex<data::Emotion>(best);
}

std::vector<std::string> RecordIssues(const PredictionRecord& record) {
  std::vector<std::string> issues;
  double sum = 0.0;
  bool finite = true;
  for (double p : record.probs) {
    if (!std::isfinite(p)) {
      finite = false;
    } else if (p < 0.0) {
      issues.push_back("probability " + std::to_string(p) + " is negative");
    }
    sum += p;
  }
  if (!finite) {
    issues.push_back("probabilities must be finite");
    return issues;
  }
  if (std::abs(sum - 1.0) > kProbabilityTolerance) {
    issues.push_back("probabilities sum to " + std::to_string(sum) + ", not 1");
  }
  if (record.predicted != ArgmaxClass(record.probs)) {
    issues.push_back("predicted class '" + std::string(data::Name(record.predicted)) +
                     "' is not the argmax '" +
                     std::string(data::Name(ArgmaxClass(record.probs))) + "'");
  }
  return issues;
}

std::string_view GroupOf(const PredictionRecord& record, data::Attribute attribute) {
  switch (attribute) {
    case data::Attribute::kGender:
      return data::Name(record.gender);
    case data::Attribute::kRace:
      return data::Name(record.race);
    case data::Attribute::kAgeGroup:
      return data::Name(record.age_group);
  }
  throw InvalidArgument("unknown attribute");
}

std::string RecordToLine(const PredictionRecord& record) {
  Json obj;
  obj["sample_id"] = record.sample_id;
  obj["probs"] = Json::array();
  for (double p : record.probs) obj["probs"].push_back(p);
  obj["true"] = data::Name(record.true_class);
  obj["predicted"] = data::Name(record.predicted);
  obj["gender"] = data::Name(record.gender);
  obj["race"] = data::Name(record.race);
  obj["age_group"] = data::Name(record.age_group);
  obj["augmentation"] = data::Name(record.augmentation);
  return obj.dump();
}

void WriteRecords(std::span<const PredictionRecord> records, std::ostream& out) {
  for (const auto& record : records) out << RecordToLine(record) << '\n';
}

void SaveRecords(std::span<const PredictionRecord> records,
                 const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  WriteRecords(records, out);
  if (!out) throw Error("failed writing " + path.string());
}

std::vector<PredictionRecord> ParseRecords(std::istream& in,
                                           std::string_view source_name) {
  std::vector<PredictionRecord> records;
  std::vector<std::string> issues;
  std::set<std::string> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = std::string(source_name) + ":" + std::to_string(line_no);
    Json obj;
    try {
      obj = Json::parse(line);
    } catch (const Json::parse_error& e) {
      issues.push_back(where + ": malformed JSON (" + e.what() + ")");
      continue;
    }
    if (!obj.is_object()) {
      issues.push_back(where + ": expected a JSON object");
      continue;
    }
    const std::size_t before = issues.size();
    for (const auto& item : obj.items()) {
      bool known = false;
      for (auto key : kKeys) known = known || item.key() == key;
      if (!known) issues.push_back(where + ": unknown field '" + item.key() + "'");
    }
    PredictionRecord record;
    const auto id = obj.find("sample_id");
    if (id == obj.end() || !id->is_string() || id->get<std::string>().empty()) {
      issues.push_back(where + ": 'sample_id' must be a non-empty string");
    } else {
      record.sample_id = id->get<std::string>();
      if (!seen.insert(record.sample_id).second) {
        issues.push_back(where + ": duplicate sample_id '" + record.sample_id + "'");
      }
    }
    const auto probs = obj.find("probs");
    if (probs == obj.end() || !probs->is_array() ||
        probs->size() != data::kNumEmotions) {
      issues.push_back(where + ": 'probs' must be an array of 4 numbers");
    } else {
      for (std::size_t i = 0; i < data::kNumEmotions; ++i) {
        if (!(*probs)[i].is_number()) {
          issues.push_back(where + ": 'probs' must be an array of 4 numbers");
          break;
        }
        record.probs[i] = (*probs)[i].get<double>();
      }
    }
    ReadEnum(obj, "true", record.true_class, issues, where);
    ReadEnum(obj, "predicted", record.predicted, issues, where);
    ReadEnum(obj, "gender", record.gender, issues, where);
    ReadEnum(obj, "race", record.race, issues, where);
    ReadEnum(obj, "age_group", record.age_group, issues, where);
    ReadEnum(obj, "augmentation", record.augmentation, issues, where);
    if (issues.size() == before) {
      for (const auto& issue : RecordIssues(record)) issues.push_back(where + ": " + issue);
    }
    if (issues.size() == before) records.push_back(std::move(record));
  }
  if (!issues.empty()) {
    throw ValidationError("invalid prediction records in " + std::string(source_name),
                          std::move(issues));
  }
  return records;
}

std::vector<PredictionRecord> LoadRecords(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  return ParseRecords(in, path.string());
}

}  // namespace emocert::metrics
