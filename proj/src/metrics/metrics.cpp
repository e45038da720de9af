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

#include "emocert/metrics/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "emocert/core/error.hpp"

namespace emocert::metrics {
namespace {

using Json = nlohmann::ordered_json;

void RequireRecords(Records records) {
  if (records.empty()) throw InvalidArgument("no prediction records");
}

double Ratio(std::uint64_t num, std::uint64_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

template <typename E>
std::size_t Index(E value) {
  return static_cast<std::size_t>(value);
}

std::size_t GroupIndex(const PredictionRecord& r, data::Attribute attribute) {
  switch (attribute) {
    case data::Attribute::kGender:
      return Index(r.gender);
    case data::Attribute::kRace:
      return Index(r.race);
    case data::Attribute::kAgeGroup:
      return Index(r.age_group);
  }
  return 0;
}

std::size_t GroupCount(data::Attribute attribute) {
  switch (attribute) {
    case data::Attribute::kGender:
      return data::EnumCount<data::Gender>();
    case data::Attribute::kRace:
      return data::EnumCount<data::Race>();
    case data::Attribute::kAgeGroup:
      return data::EnumCount<data::AgeGroup>();
  }
  return 0;
}

std::string GroupName(data::Attribute attribute, std::size_t index) {
  switch (attribute) {
    case data::Attribute::kGender:
      return std::string(data::Name(data::FromIndex<data::Gender>(index)));
    case data::Attribute::kRace:
      return std::string(data::Name(data::FromIndex<data::Race>(index)));
    case data::Attribute::kAgeGroup:
      return std::string(data::Name(data::FromIndex<data::AgeGroup>(index)));
  }
  return {};
}

GroupMetrics GroupTable(Records records, data::Attribute attribute,
                        std::size_t min_group_n) {
  if (min_group_n == 0) throw InvalidArgument("min_group_n must be >= 1");
  const std::size_t n_groups = GroupCount(attribute);
  std::vector<std::uint64_t> count(n_groups), correct(n_groups);
  for (const auto& r : records) {
    const std::size_t g = GroupIndex(r, attribute);
    ++count[g];
    if (r.correct()) ++correct[g];
  }
  GroupMetrics out;
  out.attribute = attribute;
  out.min_group_n = min_group_n;
  const GroupStat* best = nullptr;
  const GroupStat* worst = nullptr;
  for (std::size_t g = 0; g < n_groups; ++g) {
    if (count[g] == 0) continue;
    out.groups.push_back({GroupName(attribute, g), count[g], correct[g],
                          Ratio(correct[g], count[g]), count[g] >= min_group_n});
  }
  for (const auto& stat : out.groups) {
    if (!stat.included) continue;
    if (!best || stat.accuracy > best->accuracy) best = &stat;
    if (!worst || stat.accuracy < worst->accuracy) worst = &stat;
  }
  if (best) {
    out.max_gap = best->accuracy - worst->accuracy;
    out.best_group = best->group;
    out.worst_group = worst->group;
  }
  return out;
}

Json OptionalNumber(const std::optional<double>& value) {
  return value ? Json(*value) : Json(nullptr);
}

std::optional<double> ReadOptionalNumber(const Json& obj, const char* key) {
  const Json& v = obj.at(key);
  if (v.is_null()) return std::nullopt;
  return v.get<double>();
}

std::optional<std::string> ReadOptionalString(const Json& obj, const char* key) {
  const Json& v = obj.at(key);
  if (v.is_null()) return std::nullopt;
  return v.get<std::string>();
}

template <typename E>
E ReadEnumValue(const Json& v) {
  const auto text = v.get<std::string>();
  const auto parsed = data::Parse<E>(text);
  if (!parsed) throw FormatError("unknown value '" + text + "'");
  return *parsed;
}

}  // namespace

double Accuracy(Records records) {
  RequireRecords(records);
  std::uint64_t correct = 0;
  for (const auto& r : records) correct += r.correct() ? 1 : 0;
  return Ratio(correct, records.size());
}

double MacroF1(Records records) {
  RequireRecords(records);
  const auto stats = PerClassStats(Confusion(records));
  double sum = 0.0;
  for (const auto& s : stats) sum += s.f1;
  return sum / static_cast<double>(stats.size());
}

double MeanConfidence(Records records) {
  RequireRecords(records);
  double sum = 0.0;
  for (const auto& r : records) sum += *std::max_element(r.probs.begin(), r.probs.end());
  return sum / static_cast<double>(records.size());
}

double Entropy(const Probs& probs) {
  double h = 0.0;
  for (double p : probs) {
    if (p > 0.0) h -= p * std::log(p);
  }
  return h;
}

double MeanEntropy(Records records) {
  RequireRecords(records);
  double sum = 0.0;
  for (const auto& r : records) sum += Entropy(r.probs);
  return sum / static_cast<double>(records.size());
}

std::uint64_t ConfusionMatrix::Total() const {
  std::uint64_t total = 0;
  for (const auto& row : counts) {
    for (auto c : row) total += c;
  }
  return total;
}

std::uint64_t ConfusionMatrix::Trace() const {
  std::uint64_t trace = 0;
  for (std::size_t i = 0; i < counts.size(); ++i) trace += counts[i][i];
  return trace;
}

std::uint64_t ConfusionMatrix::RowSum(std::size_t row) const {
  std::uint64_t sum = 0;
  for (auto c : counts.at(row)) sum += c;
  return sum;
}

std::uint64_t ConfusionMatrix::ColumnSum(std::size_t col) const {
  std::uint64_t sum = 0;
  for (const auto& row : counts) sum += row.at(col);
  return sum;
}

ConfusionMatrix Confusion(Records records) {
  RequireRecords(records);
  ConfusionMatrix m;
  for (const auto& r : records) ++m.counts[Index(r.true_class)][Index(r.predicted)];
  return m;
}

std::string ConfusionCsv(const ConfusionMatrix& matrix) {
  std::string out = "true\\predicted";
  for (auto name : data::EnumNames<data::Emotion>::kNames) {
    out += ',';
    out += name;
  }
  out += '\n';
  for (std::size_t i = 0; i < data::kNumEmotions; ++i) {
    out += data::EnumNames<data::Emotion>::kNames[i];
    for (auto c : matrix.counts[i]) out += ',' + std::to_string(c);
    out += '\n';
  }
  return out;
}

std::array<ClassStats, data::kNumEmotions> PerClassStats(const ConfusionMatrix& m) {
  std::array<ClassStats, data::kNumEmotions> out;
  for (std::size_t c = 0; c < data::kNumEmotions; ++c) {
    const std::uint64_t tp = m.counts[c][c];
    auto& s = out[c];
    s.support = m.RowSum(c);
    s.precision = Ratio(tp, m.ColumnSum(c));
    s.recall = Ratio(tp, s.support);
    const double pr = s.precision + s.recall;
    s.f1 = pr > 0.0 ? 2.0 * s.precision * s.recall / pr : 0.0;
  }
  return out;
}

const GroupStat* GroupMetrics::Find(std::string_view group) const {
  for (const auto& g : groups) {
    if (g.group == group) return &g;
  }
  return nullptr;
}

GroupMetrics ComputeGroupMetrics(Records records, data::Attribute attribute,
                                 std::size_t min_group_n) {
  RequireRecords(records);
  GroupMetrics out = GroupTable(records, attribute, min_group_n);
  if (!out.max_gap) {
    throw InvalidArgument("no " + std::string(data::AttributeName(attribute)) +
                          " group has at least " + std::to_string(min_group_n) +
                          " records");
  }
  return out;
}

const TagStat* RobustnessMetrics::Find(data::Augmentation tag) const {
  for (const auto& t : tags) {
    if (t.tag == tag) return &t;
  }
  return nullptr;
}

RobustnessMetrics ComputeRobustness(Records records, std::optional<double> floor) {
  constexpr std::size_t kTags = data::EnumCount<data::Augmentation>();
  std::array<std::uint64_t, kTags> count{}, correct{};
  for (const auto& r : records) {
    ++count[Index(r.augmentation)];
    if (r.correct()) ++correct[Index(r.augmentation)];
  }
  RobustnessMetrics out;
  out.floor = floor;
  for (std::size_t t = 0; t < kTags; ++t) {
    if (count[t] == 0) continue;
    TagStat stat{data::FromIndex<data::Augmentation>(t), count[t], correct[t],
                 Ratio(correct[t], count[t]), false};
    stat.below_floor = floor.has_value() && stat.accuracy < *floor;
    out.tags.push_back(stat);
  }
  const TagStat* weakest = nullptr;
  for (const auto& t : out.tags) {
    if (!weakest || t.accuracy < weakest->accuracy) weakest = &t;
  }
  if (weakest) out.weakest = weakest->tag;
  return out;
}

const GroupMetrics* MetricsBundle::Group(data::Attribute attribute) const {
  for (const auto& g : per_group) {
    if (g.attribute == attribute) return &g;
  }
  return nullptr;
}

MetricsBundle ComputeBundle(Records records, const BundleOptions& options) {
  RequireRecords(records);
  MetricsBundle b;
  b.record_count = records.size();
  b.confusion = Confusion(records);
  b.correct = b.confusion.Trace();
  b.accuracy = Accuracy(records);
  b.per_class = PerClassStats(b.confusion);
  b.macro_f1 = MacroF1(records);
  b.mean_confidence = MeanConfidence(records);
  b.mean_entropy = MeanEntropy(records);
  for (auto attribute : data::kAllAttributes) {
    b.per_group.push_back(GroupTable(records, attribute, options.min_group_n));
  }
  b.robustness = ComputeRobustness(records, options.robustness_floor);
  if (options.train_accuracy) {
    const double train = *options.train_accuracy;
    if (!(train >= 0.0 && train <= 1.0)) {
      throw InvalidArgument("train accuracy must lie in [0, 1]");
    }
    b.train_accuracy = train;
    b.train_test_gap = train - b.accuracy;
  }
  return b;
}

Json ToJson(const MetricsBundle& b) {
  Json j;
  j["record_count"] = b.record_count;
  j["correct"] = b.correct;
  j["accuracy"] = b.accuracy;
  j["macro_f1"] = b.macro_f1;
  j["mean_confidence"] = b.mean_confidence;
  j["mean_entropy"] = b.mean_entropy;
  j["train_accuracy"] = OptionalNumber(b.train_accuracy);
  j["train_test_gap"] = OptionalNumber(b.train_test_gap);
  Json confusion = Json::array();
  for (const auto& row : b.confusion.counts) confusion.push_back(row);
  j["confusion"] = {{"labels", data::EnumNames<data::Emotion>::kNames},
                    {"counts", confusion}};
  Json per_class = Json::object();
  for (std::size_t c = 0; c < data::kNumEmotions; ++c) {
    const auto& s = b.per_class[c];
    per_class[std::string(data::EnumNames<data::Emotion>::kNames[c])] = {
        {"precision", s.precision}, {"recall", s.recall},
        {"f1", s.f1},               {"support", s.support}};
  }
  j["per_class"] = per_class;
  Json per_group = Json::object();
  for (const auto& g : b.per_group) {
    Json groups = Json::array();
    for (const auto& s : g.groups) {
      groups.push_back({{"group", s.group},
                        {"count", s.count},
                        {"correct", s.correct},
                        {"accuracy", s.accuracy},
                        {"included", s.included}});
    }
    Json entry;
    entry["min_group_n"] = g.min_group_n;
    entry["max_gap"] = OptionalNumber(g.max_gap);
    entry["best_group"] = g.best_group ? Json(*g.best_group) : Json(nullptr);
    entry["worst_group"] = g.worst_group ? Json(*g.worst_group) : Json(nullptr);
    entry["groups"] = groups;
    per_group[std::string(data::AttributeName(g.attribute))] = entry;
  }
  j["per_group"] = per_group;
  Json tags = Json::array();
  for (const auto& t : b.robustness.tags) {
    tags.push_back({{"tag", data::Name(t.tag)},
                    {"count", t.count},
                    {"correct", t.correct},
                    {"accuracy", t.accuracy},
                    {"below_floor", t.below_floor}});
  }
  j["per_augmentation"] = {
      {"floor", OptionalNumber(b.robustness.floor)},
      {"weakest", b.robustness.weakest ? Json(data::Name(*b.robustness.weakest))
                                       : Json(nullptr)},
      {"tags", tags}};
  return j;
}

MetricsBundle BundleFromJson(const Json& j) {
  try {
    MetricsBundle b;
    b.record_count = j.at("record_count").get<std::uint64_t>();
    b.correct = j.at("correct").get<std::uint64_t>();
    b.accuracy = j.at("accuracy").get<double>();
    b.macro_f1 = j.at("macro_f1").get<double>();
    b.mean_confidence = j.at("mean_confidence").get<double>();
    b.mean_entropy = j.at("mean_entropy").get<double>();
    b.train_accuracy = ReadOptionalNumber(j, "train_accuracy");
    b.train_test_gap = ReadOptionalNumber(j, "train_test_gap");
    const Json& counts = j.at("confusion").at("counts");
    if (counts.size() != data::kNumEmotions) throw FormatError("confusion must be 4x4");
    for (std::size_t r = 0; r < data::kNumEmotions; ++r) {
      if (counts[r].size() != data::kNumEmotions) throw FormatError("confusion must be 4x4");
      for (std::size_t c = 0; c < data::kNumEmotions; ++c) {
        b.confusion.counts[r][c] = counts[r][c].get<std::uint64_t>();
      }
    }
    for (std::size_t c = 0; c < data::kNumEmotions; ++c) {
      const Json& s = j.at("per_class").at(std::string(data::EnumNames<data::Emotion>::kNames[c]));
      b.per_class[c] = {s.at("precision").get<double>(), s.at("recall").get<double>(),
                        s.at("f1").get<double>(), s.at("support").get<std::uint64_t>()};
    }
    for (const auto& item : j.at("per_group").items()) {
      const auto attribute = data::ParseAttribute(item.key());
      if (!attribute) throw FormatError("unknown attribute '" + item.key() + "'");
      const Json& e = item.value();
      GroupMetrics g;
      g.attribute = *attribute;
      g.min_group_n = e.at("min_group_n").get<std::size_t>();
      g.max_gap = ReadOptionalNumber(e, "max_gap");
      g.best_group = ReadOptionalString(e, "best_group");
      g.worst_group = ReadOptionalString(e, "worst_group");
      for (const Json& s : e.at("groups")) {
        g.groups.push_back({s.at("group").get<std::string>(), s.at("count").get<std::uint64_t>(),
                            s.at("correct").get<std::uint64_t>(),
                            s.at("accuracy").get<double>(), s.at("included").get<bool>()});
      }
      b.per_group.push_back(std::move(g));
    }
    const Json& aug = j.at("per_augmentation");
    b.robustness.floor = ReadOptionalNumber(aug, "floor");
    if (!aug.at("weakest").is_null()) {
      b.robustness.weakest = ReadEnumValue<data::Augmentation>(aug.at("weakest"));
    }
    for (const Json& t : aug.at("tags")) {
      b.robustness.tags.push_back({ReadEnumValue<data::Augmentation>(t.at("tag")),
                                   t.at("count").get<std::uint64_t>(),
                                   t.at("correct").get<std::uint64_t>(),
                                   t.at("accuracy").get<double>(),
                                   t.at("below_floor").get<bool>()});
    }
    return b;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed metrics document: ") + e.what());
  }
}

}  // namespace emocert::metrics
