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

#include "emocert/data/manifest.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <unordered_map>

#include <json.hpp>

#include "emocert/core/error.hpp"

namespace emocert::data {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

constexpr std::array<std::string_view, 10> kSampleFields = {
    "id",     "image", "emotion",      "gender",   "race", "age_group",
    "source", "split", "augmentation", "origin_id"};

std::string Quote(std::string_view s) { return "'" + std::string(s) + "'"; }

class LineParser {
 public:
  LineParser(const json& object, std::size_t line,
             std::vector<std::string>& issues)
      : object_(object), line_(line), issues_(issues) {}

  std::string String(std::string_view field) {
    const auto it = object_.find(std::string(field));
    if (it == object_.end()) {
      Issue("missing field " + Quote(field));
      return {};
    }
    if (!it->is_string()) {
      Issue("field " + Quote(field) + " must be a string");
      return {};
    }
    return it->get<std::string>();
  }

  template <typename E>
  E Enum(std::string_view field) {
    const std::string text = String(field);
    if (object_.contains(std::string(field)) &&
        object_.at(std::string(field)).is_string()) {
      if (auto parsed = Parse<E>(text)) return *parsed;
      Issue("unknown " + std::string(field) + " " + Quote(text) +
            " (expected one of: " + ValidNames<E>() + ")");
    }
    return E{};
  }

  void Issue(const std::string& message) {
    issues_.push_back("line " + std::to_string(line_) + ": " + message);
    ++count_;
  }

  std::size_t count() const { return count_; }

 private:
  const json& object_;
  std::size_t line_;
  std::vector<std::string>& issues_;
  std::size_t count_ = 0;
};

ordered_json SampleToJson(const Sample& s) {
  ordered_json j;
  j["id"] = s.id;
  j["image"] = s.image;
  j["emotion"] = Name(s.emotion);
  j["gender"] = Name(s.gender);
  j["race"] = Name(s.race);
  j["age_group"] = Name(s.age_group);
  j["source"] = s.source;
  j["split"] = Name(s.split);
  j["augmentation"] = Name(s.augmentation);
  j["origin_id"] = s.origin_id;
  return j;
}

void ParseHeader(const json& object, std::size_t line, ManifestHeader& header,
                 std::vector<std::string>& issues) {
  const auto prefix = "line " + std::to_string(line) + ": ";
  const json& h = object.at("manifest");
  if (!h.is_object()) {
    issues.push_back(prefix + "manifest header must be an object");
    return;
  }
  for (const auto& [key, value] : h.items()) {
    if (key == "schema_version" && value.is_number_integer()) {
      header.schema_version = value.get<int>();
    } else if (key == "creation_seed" && value.is_number_unsigned()) {
      header.creation_seed = value.get<std::uint64_t>();
    } else if (key == "creation_seed" && value.is_number_integer() &&
               value.get<std::int64_t>() >= 0) {
      header.creation_seed = value.get<std::uint64_t>();
    } else if (key == "notes" && value.is_string()) {
      header.notes = value.get<std::string>();
    } else {
      issues.push_back(prefix + "invalid manifest header entry " + Quote(key));
    }
  }
  if (header.schema_version != kManifestSchemaVersion) {
    issues.push_back(prefix + "unsupported manifest schema version " +
                     std::to_string(header.schema_version));
  }
}

}  // namespace

Manifest ParseManifest(std::istream& in, std::string_view source_name) {
  Manifest manifest;
  std::vector<std::string> issues;
  std::vector<std::size_t> line_of;  // sample index -> line number
  std::string text;
  std::size_t line = 0;
  bool seen_record = false;
  while (std::getline(in, text)) {
    ++line;
    if (!text.empty() && text.back() == '\r') text.pop_back();
    if (text.find_first_not_of(" \t") == std::string::npos) continue;
    json object;
    try {
      object = json::parse(text);
    } catch (const json::parse_error&) {
      issues.push_back("line " + std::to_string(line) + ": malformed record");
      continue;
    }
    if (!object.is_object()) {
      issues.push_back("line " + std::to_string(line) +
                       ": record must be an object");
      continue;
    }
    if (object.contains("manifest")) {
      if (seen_record || object.size() != 1) {
        issues.push_back("line " + std::to_string(line) +
                         ": manifest header must be the first line and alone");
      } else {
        ParseHeader(object, line, manifest.header, issues);
      }
      seen_record = true;
      continue;
    }
    seen_record = true;

    LineParser p(object, line, issues);
    for (const auto& [key, value] : object.items()) {
      if (std::find(kSampleFields.begin(), kSampleFields.end(), key) ==
          kSampleFields.end()) {
        p.Issue("unknown field " + Quote(key));
      }
    }
    Sample s;
    s.id = p.String("id");
    s.image = p.String("image");
    s.emotion = p.Enum<Emotion>("emotion");
    s.gender = p.Enum<Gender>("gender");
    s.race = p.Enum<Race>("race");
    s.age_group = p.Enum<AgeGroup>("age_group");
    s.source = p.String("source");
    s.split = p.Enum<Split>("split");
    s.augmentation = p.Enum<Augmentation>("augmentation");
    s.origin_id = p.String("origin_id");
    if (p.count() == 0 && s.id.empty()) p.Issue("empty id");
    if (p.count() == 0) {
      manifest.samples.push_back(std::move(s));
      line_of.push_back(line);
    }
  }

  // Cross-record checks, reported against the offending lines.
  std::unordered_map<std::string, std::size_t> first_line;
  std::unordered_map<std::string, const Sample*> by_id;
  for (std::size_t i = 0; i < manifest.samples.size(); ++i) {
    const Sample& s = manifest.samples[i];
    const auto [it, inserted] = first_line.emplace(s.id, line_of[i]);
    if (!inserted) {
      issues.push_back("line " + std::to_string(line_of[i]) +
                       ": duplicate id " + Quote(s.id) +
                       " (first defined on line " +
                       std::to_string(it->second) + ")");
    } else {
      by_id.emplace(s.id, &s);
    }
  }
  for (std::size_t i = 0; i < manifest.samples.size(); ++i) {
    const Sample& s = manifest.samples[i];
    const auto where = "line " + std::to_string(line_of[i]) + ": ";
    if (s.IsOriginal() && s.origin_id != s.id) {
      issues.push_back(where + "original sample " + Quote(s.id) +
                       " must have origin_id equal to its id");
    }
    if (!s.IsOriginal()) {
      if (s.origin_id == s.id) {
        issues.push_back(where + "augmented sample " + Quote(s.id) +
                         " cannot be its own origin");
      } else if (auto it = by_id.find(s.origin_id); it == by_id.end()) {
        issues.push_back(where + "origin_id " + Quote(s.origin_id) +
                         " does not resolve");
      } else if (!it->second->IsOriginal()) {
        issues.push_back(where + "origin_id " + Quote(s.origin_id) +
                         " refers to an augmented sample");
      }
    }
  }

  if (!issues.empty()) {
    throw ValidationError(
        "invalid manifest " + std::string(source_name) + " (" +
            std::to_string(issues.size()) + " issue" +
            (issues.size() == 1 ? "" : "s") + ")",
        std::move(issues));
  }
  return manifest;
}

Manifest LoadManifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open manifest " + path.string());
  return ParseManifest(in, path.string());
}

void WriteManifest(const Manifest& manifest, std::ostream& out) {
  ordered_json header;
  header["manifest"]["schema_version"] = manifest.header.schema_version;
  header["manifest"]["creation_seed"] = manifest.header.creation_seed;
  header["manifest"]["notes"] = manifest.header.notes;
  out << header.dump() << '\n';
  for (const Sample& s : manifest.samples) out << SampleToJson(s).dump() << '\n';
}

void SaveManifest(const Manifest& manifest, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error("cannot write manifest " + path.string());
  WriteManifest(manifest, out);
  if (!out) throw Error("short write to " + path.string());
}

std::vector<std::string> ValidateManifest(const Manifest& manifest) {
  std::vector<std::string> issues;
  std::unordered_map<std::string, const Sample*> by_id;
  for (const Sample& s : manifest.samples) {
    if (!by_id.emplace(s.id, &s).second) {
      issues.push_back("duplicate id " + Quote(s.id));
    }
  }
  for (const Sample& s : manifest.samples) {
    if (s.IsOriginal() != (s.origin_id == s.id)) {
      issues.push_back("sample " + Quote(s.id) +
                       ": augmentation=none must coincide with self-origin");
    }
    if (!s.IsOriginal()) {
      auto it = by_id.find(s.origin_id);
      if (it == by_id.end() || !it->second->IsOriginal()) {
        issues.push_back("sample " + Quote(s.id) + ": origin_id " +
                         Quote(s.origin_id) + " does not resolve");
      }
    }
  }
  return issues;
}

std::filesystem::path ResolveImage(const std::filesystem::path& images_dir,
                                   const Sample& sample) {
  return images_dir / sample.image;
}

}  // namespace emocert::data
