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

#include "emocert/data/analysis.hpp"

#include <map>

#include "emocert/core/error.hpp"

namespace emocert::data {
namespace {

template <typename E, typename Getter>
AttributeBreakdown TallyEnum(const Manifest& manifest, Getter get) {
  AttributeBreakdown out;
  out.attribute = std::string(EnumNames<E>::kAttribute);
  for (auto name : EnumNames<E>::kNames) {
    out.values.push_back(ValueCount{std::string(name)});
  }
  for (const Sample& s : manifest.samples) {
    ValueCount& vc = out.values[static_cast<std::size_t>(get(s))];
    ++vc.count;
    ++(s.IsOriginal() ? vc.originals : vc.augmented);
  }
  return out;
}

}  // namespace

const ValueCount* AttributeBreakdown::Find(std::string_view value) const {
  for (const auto& vc : values) {
    if (vc.value == value) return &vc;
  }
  return nullptr;
}

const AttributeBreakdown& DatasetReport::Attribute(std::string_view name) const {
  for (const auto& a : attributes) {
    if (a.attribute == name) return a;
  }
  throw InvalidArgument("report has no attribute " + std::string(name));
}

DatasetReport AnalyzeDataset(const Manifest& manifest) {
  if (manifest.samples.empty()) {
    throw InvalidArgument("cannot analyze an empty manifest");
  }
  DatasetReport report;
  report.total_samples = manifest.samples.size();
  for (const Sample& s : manifest.samples) {
    ++(s.IsOriginal() ? report.total_originals : report.total_augmented);
  }
  report.expansion_factor =
      report.total_originals == 0
          ? 0.0
          : static_cast<double>(report.total_samples) /
                static_cast<double>(report.total_originals);

  report.attributes.push_back(
      TallyEnum<Emotion>(manifest, [](const Sample& s) { return s.emotion; }));
  report.attributes.push_back(
      TallyEnum<Gender>(manifest, [](const Sample& s) { return s.gender; }));
  report.attributes.push_back(
      TallyEnum<Race>(manifest, [](const Sample& s) { return s.race; }));
  report.attributes.push_back(TallyEnum<AgeGroup>(
      manifest, [](const Sample& s) { return s.age_group; }));

  // Sources are free-form; report them in lexicographic order.
  std::map<std::string, ValueCount> sources;
  for (const Sample& s : manifest.samples) {
    ValueCount& vc = sources[s.source];
    vc.value = s.source;
    ++vc.count;
    ++(s.IsOriginal() ? vc.originals : vc.augmented);
  }
  AttributeBreakdown source{"source", {}};
  for (auto& [name, vc] : sources) source.values.push_back(vc);
  report.attributes.push_back(std::move(source));

  report.attributes.push_back(
      TallyEnum<Split>(manifest, [](const Sample& s) { return s.split; }));
  report.attributes.push_back(TallyEnum<Augmentation>(
      manifest, [](const Sample& s) { return s.augmentation; }));

  const double total = static_cast<double>(report.total_samples);
  for (auto& attribute : report.attributes) {
    for (auto& vc : attribute.values) {
      vc.fraction = static_cast<double>(vc.count) / total;
    }
  }
  return report;
}

nlohmann::ordered_json ToJson(const DatasetReport& report) {
  nlohmann::ordered_json j;
  j["total_samples"] = report.total_samples;
  j["total_originals"] = report.total_originals;
  j["total_augmented"] = report.total_augmented;
  j["expansion_factor"] = report.expansion_factor;
  for (const auto& attribute : report.attributes) {
    nlohmann::ordered_json values = nlohmann::ordered_json::object();
    for (const auto& vc : attribute.values) {
      values[vc.value] = {{"count", vc.count},
                          {"fraction", vc.fraction},
                          {"originals", vc.originals},
                          {"augmented", vc.augmented}};
    }
    j[attribute.attribute] = std::move(values);
  }
  return j;
}

}  // namespace emocert::data
