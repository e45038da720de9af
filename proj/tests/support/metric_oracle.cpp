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

#include "metric_oracle.hpp"

#include <cmath>
#include <functional>

#include "emocert/data/schema.hpp"

namespace emocert::testing {
namespace {

using metrics::PredictionRecord;
using Pred = std::function<bool(const PredictionRecord&)>;

std::uint64_t CountIf(std::span<const PredictionRecord> records, const Pred& pred) {
  std::uint64_t n = 0;
  for (const auto& r : records) {
    if (pred(r)) ++n;
  }
  return n;
}

bool IsCorrect(const PredictionRecord& r) { return r.true_class == r.predicted; }

std::string GroupLabel(const PredictionRecord& r, int attribute) {
  switch (attribute) {
    case 0:
      return std::string(data::Name(r.gender));
    case 1:
      return std::string(data::Name(r.race));
    default:
      return std::string(data::Name(r.age_group));
  }
}

std::vector<std::string> GroupOrder(int attribute) {
  std::vector<std::string> out;
  auto add = [&](const auto& names) {
    for (auto n : names) out.emplace_back(n);
  };
  if (attribute == 0) add(data::EnumNames<data::Gender>::kNames);
  if (attribute == 1) add(data::EnumNames<data::Race>::kNames);
  if (attribute == 2) add(data::EnumNames<data::AgeGroup>::kNames);
  return out;
}

}  // namespace

OracleBundle BruteForceBundle(std::span<const PredictionRecord> records,
                              std::size_t min_group_n) {
  OracleBundle o;
  o.count = records.size();
  o.correct = CountIf(records, IsCorrect);
  o.accuracy = double(o.correct) / double(o.count);

  for (int t = 0; t < 4; ++t) {
    for (int p = 0; p < 4; ++p) {
      o.confusion[t][p] = CountIf(records, [&](const PredictionRecord& r) {
        return int(r.true_class) == t && int(r.predicted) == p;
      });
    }
  }
  double f1_sum = 0.0;
  for (int c = 0; c < 4; ++c) {
    const auto tp = CountIf(records, [&](const PredictionRecord& r) {
      return int(r.true_class) == c && int(r.predicted) == c;
    });
    const auto predicted = CountIf(
        records, [&](const PredictionRecord& r) { return int(r.predicted) == c; });
    const auto actual = CountIf(
        records, [&](const PredictionRecord& r) { return int(r.true_class) == c; });
    o.precision[c] = predicted ? double(tp) / double(predicted) : 0.0;
    o.recall[c] = actual ? double(tp) / double(actual) : 0.0;
    // F1 = 2 tp / (predicted + actual) is algebraically the harmonic mean.
    o.f1[c] = (predicted + actual) ? 2.0 * double(tp) / double(predicted + actual) : 0.0;
    f1_sum += o.f1[c];
  }
  o.macro_f1 = f1_sum / 4.0;

  double conf = 0.0, ent = 0.0;
  for (const auto& r : records) {
    double top = r.probs[0];
    for (double p : r.probs) top = p > top ? p : top;
    conf += top;
    for (double p : r.probs) {
      if (p > 0.0) ent += -p * std::log(p);
    }
  }
  o.mean_confidence = conf / double(o.count);
  o.mean_entropy = ent / double(o.count);

  for (int a = 0; a < 3; ++a) {
    std::optional<double> hi, lo;
    for (const auto& name : GroupOrder(a)) {
      auto in_group = [&](const PredictionRecord& r) { return GroupLabel(r, a) == name; };
      OracleGroup g;
      g.group = name;
      g.count = CountIf(records, in_group);
      if (g.count == 0) continue;
      g.correct = CountIf(records, [&](const PredictionRecord& r) {
        return in_group(r) && IsCorrect(r);
      });
      g.accuracy = double(g.correct) / double(g.count);
      g.included = g.count >= min_group_n;
      if (g.included) {
        if (!hi || g.accuracy > *hi) hi = g.accuracy;
        if (!lo || g.accuracy < *lo) lo = g.accuracy;
      }
      o.groups[a].push_back(g);
    }
    if (hi) o.max_gap[a] = *hi - *lo;
  }

  for (auto name : data::EnumNames<data::Augmentation>::kNames) {
    auto has_tag = [&](const PredictionRecord& r) { return data::Name(r.augmentation) == name; };
    const auto n = CountIf(records, has_tag);
    if (n == 0) continue;
    const auto k = CountIf(records, [&](const PredictionRecord& r) {
      return has_tag(r) && IsCorrect(r);
    });
    o.tags.push_back({std::string(name), {n, k}});
  }
  return o;
}

std::vector<std::string> CompareWithOracle(const metrics::MetricsBundle& b,
                                           const OracleBundle& o, double tolerance) {
  std::vector<std::string> issues;
  auto exact = [&](const std::string& what, std::uint64_t got, std::uint64_t want) {
    if (got != want) {
      issues.push_back(what + ": " + std::to_string(got) + " != " + std::to_string(want));
    }
  };
  auto near = [&](const std::string& what, double got, double want) {
    if (!(std::fabs(got - want) <= tolerance)) {
      issues.push_back(what + ": " + std::to_string(got) + " != " + std::to_string(want));
    }
  };
  exact("record_count", b.record_count, o.count);
  exact("correct", b.correct, o.correct);
  near("accuracy", b.accuracy, o.accuracy);
  near("macro_f1", b.macro_f1, o.macro_f1);
  near("mean_confidence", b.mean_confidence, o.mean_confidence);
  near("mean_entropy", b.mean_entropy, o.mean_entropy);
  for (int t = 0; t < 4; ++t) {
    for (int p = 0; p < 4; ++p) {
      exact("confusion", b.confusion.counts[t][p], o.confusion[t][p]);
    }
    near("precision", b.per_class[t].precision, o.precision[t]);
    near("recall", b.per_class[t].recall, o.recall[t]);
    near("f1", b.per_class[t].f1, o.f1[t]);
  }
  for (int a = 0; a < 3; ++a) {
    const auto attribute = data::kAllAttributes[a];
    const auto* g = b.Group(attribute);
    const std::string attr(data::AttributeName(attribute));
    if (!g) {
      issues.push_back("missing group table " + attr);
      continue;
    }
    exact(attr + " groups", g->groups.size(), o.groups[a].size());
    for (std::size_t i = 0; i < std::min(g->groups.size(), o.groups[a].size()); ++i) {
      const auto& want = o.groups[a][i];
      const auto& got = g->groups[i];
      if (got.group != want.group) issues.push_back(attr + " group order");
      exact(attr + "." + want.group + ".count", got.count, want.count);
      exact(attr + "." + want.group + ".correct", got.correct, want.correct);
      exact(attr + "." + want.group + ".included", got.included, want.included);
      near(attr + "." + want.group + ".accuracy", got.accuracy, want.accuracy);
    }
    if (g->max_gap.has_value() != o.max_gap[a].has_value()) {
      issues.push_back(attr + " gap presence");
    } else if (o.max_gap[a]) {
      near(attr + ".max_gap", *g->max_gap, *o.max_gap[a]);
    }
  }
  exact("tags", b.robustness.tags.size(), o.tags.size());
  for (std::size_t i = 0; i < std::min(b.robustness.tags.size(), o.tags.size()); ++i) {
    const auto& got = b.robustness.tags[i];
    const auto& [name, nk] = o.tags[i];
    if (data::Name(got.tag) != name) issues.push_back("tag order");
    exact("tag." + name + ".count", got.count, nk.first);
    exact("tag." + name + ".correct", got.correct, nk.second);
    near("tag." + name + ".accuracy", got.accuracy, double(nk.second) / double(nk.first));
  }
  return issues;
}

}  // namespace emocert::testing
