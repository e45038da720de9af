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

// Acceptance run: prints one PASS/FAIL line per criterion and exits non-zero
// if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "emocert/augment/augment.hpp"
#include "emocert/cert/certify.hpp"
#include "emocert/cert/profile.hpp"
#include "emocert/cert/report.hpp"
#include "emocert/cli/cli.hpp"
#include "emocert/core/rng.hpp"
#include "emocert/data/fixture.hpp"
#include "emocert/metrics/metrics.hpp"
#include "emocert/metrics/records.hpp"
#include "emocert/nn/model_spec.hpp"
#include "emocert/nn/optimizer.hpp"
#include "emocert/nn/parameters.hpp"
#include "emocert/nn/sampler.hpp"
#include "emocert/nn/scheduler.hpp"
#include "golden_records.hpp"
#include "gradient_check.hpp"
#include "metric_oracle.hpp"
#include "temp_dir.hpp"

namespace emocert {
namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

const fs::path kDefaultProfile =
    fs::path(EMOCERT_SOURCE_DIR) / "profiles" / "default.json";
constexpr char kPinnedTime[] = "2024-01-01T00:00:00Z";

struct Outcome {
  bool pass = false;
  std::string detail;
};

double Seconds(Clock::time_point since) {
  return std::chrono::duration<double>(Clock::now() - since).count();
}

std::string Format(const char* fmt, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), fmt, args...);
  return buf;
}

int failures = 0;

void Criterion(int id, const char* title, const std::function<Outcome()>& body) {
  const auto start = Clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  if (!o.pass) ++failures;
  std::printf("[%s] %2d %s: %s (%.2f s)\n", o.pass ? "PASS" : "FAIL", id, title,
              o.detail.c_str(), Seconds(start));
  std::fflush(stdout);
}

Outcome ParameterCounts() {
  const auto start = Clock::now();
  const std::size_t enhanced =
      nn::CountParameters(nn::BuildModel(nn::ArchId::kEnhanced).spec);
  const std::size_t baseline =
      nn::CountParameters(nn::BuildModel(nn::ArchId::kBaseline).spec);
  const double secs = Seconds(start);
  return {enhanced == 321380 && baseline == 1944 && secs < 1.0,
          Format("enhanced=%zu baseline=%zu", enhanced, baseline)};
}

Outcome EntropyConvention() {
  std::vector<metrics::PredictionRecord> uniform(8);
  std::vector<metrics::PredictionRecord> one_hot(8);
  for (std::size_t i = 0; i < uniform.size(); ++i) {
    uniform[i].probs = {0.25, 0.25, 0.25, 0.25};
    one_hot[i].probs = {0.0, 0.0, 0.0, 0.0};
    one_hot[i].probs[i % 4] = 1.0;
  }
  const double u = metrics::MeanEntropy(uniform);
  const double h = metrics::MeanEntropy(one_hot);
  return {std::abs(u - 1.386294) <= 1e-6 && h == 0.0,
          Format("uniform=%.7f one_hot=%g", u, h)};
}

Outcome GoldenMetrics() {
  const auto start = Clock::now();
  metrics::BundleOptions options;
  options.train_accuracy = testing::kGoldenTrainAccuracy;
  const auto b = metrics::ComputeBundle(testing::GoldenEnhancedRecords(), options);
  const double gender = *b.Group(data::Attribute::kGender)->max_gap;
  const double race = *b.Group(data::Attribute::kRace)->max_gap;
  const double blur = b.robustness.Find(data::Augmentation::kBlur)->accuracy;
  const double secs = Seconds(start);
  auto near = [](double v, double want) { return std::abs(v - want) <= 1e-4; };
  return {near(b.accuracy, 0.6819) && near(*b.train_test_gap, 0.1056) &&
              near(gender, 0.0356) && near(race, 0.0785) && near(blur, 0.5489) &&
              secs < 5.0,
          Format("accuracy=%.4f gap=%.4f gender_gap=%.4f race_gap=%.4f blur=%.4f",
                 b.accuracy, *b.train_test_gap, gender, race, blur)};
}

Outcome CertificationVerdicts() {
  const auto profile = cert::LoadProfile(kDefaultProfile);
  metrics::BundleOptions enh_options;
  enh_options.train_accuracy = testing::kGoldenTrainAccuracy;
  const auto enh = cert::BuildReport(
      profile, metrics::ComputeBundle(testing::GoldenEnhancedRecords(), enh_options),
      {}, kPinnedTime);
  metrics::BundleOptions base_options;
  base_options.train_accuracy = testing::kBaselineTrainAccuracy;
  const auto base = cert::BuildReport(
      profile, metrics::ComputeBundle(testing::GoldenBaselineRecords(), base_options),
      {}, kPinnedTime);
  std::size_t base_rel_failed = 0;
  std::size_t base_other_failed = 0;
  for (const auto& r : base.results) {
    if (r.verdict != cert::Verdict::kFail) continue;
    (r.dimension == cert::Dimension::kReliability ? base_rel_failed : base_other_failed)++;
  }
  bool identical = true;
  for (auto format : {cert::ReportFormat::kStructured, cert::ReportFormat::kHumanReadable}) {
    const auto again = cert::BuildReport(profile, enh.metrics, {}, kPinnedTime);
    identical = identical && cert::RenderReport(enh, format) == cert::RenderReport(again, format);
  }
  return {enh.AllDimensionsPass() && base_rel_failed == 3 && base_other_failed == 0 &&
              identical,
          Format("enhanced=%s baseline reliability failures=%zu other failures=%zu "
                 "byte-identical=%s",
                 enh.AllDimensionsPass() ? "pass" : "fail", base_rel_failed,
                 base_other_failed, identical ? "yes" : "no")};
}

Outcome GradientSuite() {
  const auto start = Clock::now();
  std::size_t accepted = 0;
  std::size_t total = 0;
  double worst = 0.0;
  std::string worst_case;
  for (const auto& c : testing::GradientSuiteCases(2)) {
    ++total;
    const auto r = testing::RunGradientCheck(c);
    if (!r.accepted) continue;
    ++accepted;
    if (r.max_rel_error >= worst) {
      worst = r.max_rel_error;
      worst_case = c.name + "/" + r.worst_entry;
    }
  }
  const double secs = Seconds(start);
  return {accepted >= 20 && worst < 1e-4 && secs < 60.0,
          Format("%zu of %zu configurations accepted, max relative error %.2e (%s)",
                 accepted, total, worst, worst_case.c_str())};
}

Outcome OptimizerSchedulerOracles() {
  auto scalar = [](double v) {
    nn::ParameterSet<double> p;
    p.Add("theta", core::Tensor({1}, v), true);
    return p;
  };
  auto rms = scalar(0.0);
  nn::Optimizer<double> rms_opt(nn::RmsPropConfig{}, rms);
  rms_opt.Step(rms, scalar(1.0), 5e-4);
  const double rms_step = rms.at("theta")[0];

  auto adam = scalar(1.0);
  nn::Optimizer<double> adam_opt(nn::AdamWConfig{1e-3, 0.9, 0.999, 1e-8, 0.01}, adam);
  adam_opt.Step(adam, scalar(1.0), 1e-3);
  const double adam_theta = adam.at("theta")[0];

  nn::Scheduler sched(nn::CosineWarmRestartsConfig{10, 2, 0}, 1e-3);
  const double half = sched.OnProgress(5.0);
  const double restart = sched.OnProgress(10.0);
  const double next_period = sched.t_i();

  const bool ok = std::abs(rms_step - -1.5811e-3) <= 1e-7 &&
                  std::abs(adam_theta - 0.998990) <= 1e-6 &&
                  std::abs(half - 5e-4) <= 1e-12 && restart == 1e-3 &&
                  next_period == 20.0;
  return {ok, Format("rmsprop step=%.7e adamw theta=%.6f half-period lr=%.3e "
                     "restart lr=%.3e next period=%g",
                     rms_step, adam_theta, half, restart, next_period)};
}

Outcome ExpansionFactor() {
  testing::TempDir dir("accept-expand");
  data::FixtureConfig config;
  config.n_per_class = 25;
  const auto originals = data::GenerateFixture(config, dir / "in");
  const auto out = augment::ExpandDataset(originals, dir / "in", dir / "out", 0);
  return {originals.samples.size() == 100 && out.samples.size() == 1100,
          Format("%zu originals -> %zu samples", originals.samples.size(),
                 out.samples.size())};
}

struct PipelineRun {
  fs::path root;
  double seconds = 0.0;
  double enhanced_test_accuracy = 0.0;  // original test images
  double enhanced_all_accuracy = 0.0;   // test images incl. augmented
  double baseline_test_accuracy = 0.0;
  int certify_exit = -1;
  std::string error;
};

double OriginalsAccuracy(const std::vector<metrics::PredictionRecord>& records) {
  std::vector<metrics::PredictionRecord> originals;
  for (const auto& r : records) {
    if (r.augmentation == data::Augmentation::kNone) originals.push_back(r);
  }
  return metrics::Accuracy(originals);
}

// fixture -> split -> augment -> train both models -> evaluate -> certify,
// driven through the command-line front end.
PipelineRun RunPipeline(const fs::path& root) {
  PipelineRun run;
  run.root = root;
  const auto start = Clock::now();
  auto p = [&](const char* name) { return (root / name).string(); };
  auto step = [&](std::vector<std::string> args) {
    std::ostringstream out;
    std::ostringstream err;
    const int code = cli::Run(args, out, err);
    if (code != cli::kExitOk && args[0] != "certify" && run.error.empty()) {
      run.error = args[0] + " exited " + std::to_string(code) + ": " + err.str();
    }
    return code;
  };
  step({"fixture", "gen", "--out", p("fixture.jsonl"), "--images-dir", p("img"),
        "--n-per-class", "700", "--seed", "0"});
  // 5/7, 1/7, 1/7 of 2,800 originals gives 2,000 / 400 / 400.
  step({"dataset", "split", "--manifest", p("fixture.jsonl"), "--out", p("split.jsonl"),
        "--train", "0.7142857142857143", "--val", "0.14285714285714285", "--test",
        "0.14285714285714285", "--seed", "0"});
  step({"dataset", "augment", "--manifest", p("split.jsonl"), "--images-dir", p("img"),
        "--out-images-dir", p("aug"), "--out", p("aug.jsonl"), "--seed", "0"});
  step({"train", "--arch", "enhanced", "--manifest", p("aug.jsonl"), "--images-dir",
        p("aug"), "--model", p("enhanced.emw"), "--history", p("enhanced_history.csv"),
        "--epochs", "5", "--samples-per-epoch", "2000", "--seed", "0"});
  step({"train", "--arch", "baseline", "--train-originals-only", "--manifest",
        p("aug.jsonl"), "--images-dir", p("aug"), "--model", p("baseline.emw"),
        "--history", p("baseline_history.csv"), "--epochs", "30", "--seed", "0"});
  step({"evaluate", "--manifest", p("aug.jsonl"), "--images-dir", p("aug"), "--model",
        p("enhanced.emw"), "--split", "test", "--out", p("enhanced_test.jsonl")});
  step({"evaluate", "--manifest", p("aug.jsonl"), "--images-dir", p("aug"), "--model",
        p("enhanced.emw"), "--split", "train", "--originals-only", "--out",
        p("enhanced_train.jsonl")});
  step({"evaluate", "--manifest", p("aug.jsonl"), "--images-dir", p("aug"), "--model",
        p("baseline.emw"), "--split", "test", "--originals-only", "--out",
        p("baseline_test.jsonl")});
  if (!run.error.empty()) return run;
  run.certify_exit =
      step({"certify", "--profile", kDefaultProfile.string(), "--predictions",
            p("enhanced_test.jsonl"), "--train-predictions", p("enhanced_train.jsonl"),
            "--format", "structured", "--pin-timestamp", kPinnedTime, "--out",
            p("enhanced_report.json")});
  run.seconds = Seconds(start);
  const auto enhanced = metrics::LoadRecords(root / "enhanced_test.jsonl");
  run.enhanced_test_accuracy = OriginalsAccuracy(enhanced);
  run.enhanced_all_accuracy = metrics::Accuracy(enhanced);
  run.baseline_test_accuracy =
      metrics::Accuracy(metrics::LoadRecords(root / "baseline_test.jsonl"));
  return run;
}

Outcome EndToEnd(const PipelineRun& run) {
  if (!run.error.empty()) return {false, run.error};
  return {run.enhanced_test_accuracy >= 0.90 && run.baseline_test_accuracy >= 0.70 &&
              run.seconds < 600.0 && run.certify_exit == 0,
          Format("enhanced=%.4f (with augmented test images %.4f) baseline=%.4f "
                 "certify exit=%d pipeline=%.1f s",
                 run.enhanced_test_accuracy, run.enhanced_all_accuracy,
                 run.baseline_test_accuracy, run.certify_exit, run.seconds)};
}

Outcome Determinism(const PipelineRun& a, const PipelineRun& b) {
  if (!a.error.empty() || !b.error.empty()) {
    return {false, a.error.empty() ? b.error : a.error};
  }
  std::vector<std::string> differing;
  std::size_t compared = 0;
  for (const char* name :
       {"enhanced_history.csv", "baseline_history.csv", "enhanced.emw", "baseline.emw",
        "enhanced_test.jsonl", "enhanced_train.jsonl", "baseline_test.jsonl",
        "enhanced_report.json"}) {
    ++compared;
    if (testing::ReadFileBytes(a.root / name) != testing::ReadFileBytes(b.root / name)) {
      differing.push_back(name);
    }
  }
  std::string detail = Format("%zu artifacts compared", compared);
  if (differing.empty()) detail += ", all byte-identical";
  for (const auto& d : differing) detail += ", differs: " + d;
  return {differing.empty(), detail};
}

Outcome SamplerStatistics() {
  std::vector<int> labels(1000, 0);
  labels.resize(1100, 1);
  core::Rng rng(0);
  const auto draws = nn::WeightedSampleIndices(labels, 100000, rng);
  double minority = 0.0;
  for (auto i : draws) minority += labels[i] == 1;
  minority /= static_cast<double>(draws.size());
  return {std::abs(minority - 0.5) <= 0.02,
          Format("majority=%.4f minority=%.4f over %zu draws", 1.0 - minority, minority,
                 draws.size())};
}

Outcome OracleEquivalence() {
  std::size_t mismatches = 0;
  std::string first;
  double worst_weighted = 0.0;
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    const auto records = testing::RandomRecords(50 + (seed * 7919) % 451, seed);
    const auto bundle = metrics::ComputeBundle(records, {});
    const auto issues = testing::CompareWithOracle(
        bundle, testing::BruteForceBundle(records, metrics::kDefaultMinGroupN), 1e-12);
    if (!issues.empty()) {
      if (first.empty()) first = Format("seed %llu: ", (unsigned long long)seed) + issues[0];
      ++mismatches;
    }
    for (const auto& g : bundle.per_group) {
      double weighted = 0.0;
      for (const auto& s : g.groups) weighted += s.accuracy * static_cast<double>(s.count);
      worst_weighted = std::max(
          worst_weighted,
          std::abs(weighted / static_cast<double>(bundle.record_count) - bundle.accuracy));
    }
  }
  std::string detail = Format("1000 files, %zu mismatches, max weighted-mean deviation %.1e",
                              mismatches, worst_weighted);
  if (!first.empty()) detail += "; first: " + first;
  return {mismatches == 0 && worst_weighted <= 1e-12, detail};
}

int Main() {
  Criterion(1, "parameter counts", ParameterCounts);
  Criterion(2, "entropy convention", EntropyConvention);
  Criterion(3, "golden metrics file", GoldenMetrics);
  Criterion(4, "certification verdicts", CertificationVerdicts);
  Criterion(5, "gradient suite", GradientSuite);
  Criterion(6, "optimizer and scheduler oracles", OptimizerSchedulerOracles);
  Criterion(7, "expansion factor", ExpansionFactor);

  testing::TempDir first("accept-run-a");
  testing::TempDir second("accept-run-b");
  PipelineRun a;
  PipelineRun b;
  Criterion(8, "end-to-end convergence", [&] {
    a = RunPipeline(first.path());
    return EndToEnd(a);
  });
  Criterion(9, "determinism", [&] {
    b = RunPipeline(second.path());
    return Determinism(a, b);
  });

  Criterion(10, "sampler statistics", SamplerStatistics);
  Criterion(11, "metric oracle equivalence", OracleEquivalence);
  std::printf("%d of 11 criteria passed\n", 11 - failures);
  return failures == 0 ? 0 : 1;
}

}  // namespace
}  // namespace emocert

int main() { return emocert::Main(); }
