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

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <vector>

#include "emocert/core/error.hpp"
#include "emocert/core/rng.hpp"
#include "emocert/data/fixture.hpp"
#include "emocert/data/image.hpp"
#include "emocert/nn/clip.hpp"
#include "emocert/nn/early_stopping.hpp"
#include "emocert/nn/inference.hpp"
#include "emocert/nn/loss.hpp"
#include "emocert/nn/network.hpp"
#include "emocert/nn/optimizer.hpp"
#include "emocert/nn/sampler.hpp"
#include "emocert/nn/scheduler.hpp"
#include "emocert/nn/trainer.hpp"

namespace emocert::nn {
namespace {

using core::Tensor;

Tensor Row(std::vector<double> values) {
  const std::size_t k = values.size();
  return Tensor({1, k}, std::span<const double>(values));
}

ParameterSet<double> Scalar(double value) {
  ParameterSet<double> p;
  p.Add("theta", Tensor({1}, value), true);
  return p;
}

// ---------------------------------------------------------------- losses

TEST(LossTest, CosineOfIdenticalOneHotIsMinusOne) {
  const auto v = EvaluateLoss<double>(CosineProximity{}, Row({0, 1, 0, 0}), Row({0, 1, 0, 0}));
  EXPECT_NEAR(v.value, -1.0, 1e-9);
}

TEST(LossTest, CosineIsScaleInvariantAndAveraged) {
  // Rows: parallel to the target (-1) and orthogonal to it (0).
  const std::vector<double> out = {0, 5, 0, 0, 3, 0, 0, 0};
  const std::vector<double> tgt = {0, 1, 0, 0, 0, 0, 1, 0};
  const auto v = EvaluateLoss<double>(CosineProximity{}, Tensor({2, 4}, std::span<const double>(out)),
                                      Tensor({2, 4}, std::span<const double>(tgt)));
  EXPECT_NEAR(v.value, -0.5, 1e-9);
}

TEST(LossTest, CosineZeroPredictionIsFinite) {
  const auto v = EvaluateLoss<double>(CosineProximity{}, Row({0, 0, 0, 0}), Row({1, 0, 0, 0}));
  EXPECT_EQ(v.value, 0.0);
  EXPECT_TRUE(v.grad.AllFinite());
}

TEST(LossTest, CrossEntropyPerfectPredictionIsZero) {
  const auto v = EvaluateLoss<double>(WeightedCrossEntropy{}, Row({1000, 0, 0, 0}),
                                      Row({1, 0, 0, 0}));
  EXPECT_EQ(v.value, 0.0);
}

TEST(LossTest, CrossEntropyHalfProbabilityIsLn2) {
  const auto v = EvaluateLoss<double>(WeightedCrossEntropy{{1.0, 1.0}}, Row({0.3, 0.3}),
                                      Row({0, 1}));
  EXPECT_NEAR(v.value, 0.693147, 1e-6);
}

TEST(LossTest, CrossEntropyWeightsNormalizeByTargetWeights) {
  // Row 1 (class 0, weight 1) has p = 1/2; row 2 (class 1, weight 3) has p = 1/4.
  const std::vector<double> out = {0, 0, std::log(3.0), 0};
  const std::vector<double> tgt = {1, 0, 0, 1};
  const auto v = EvaluateLoss<double>(WeightedCrossEntropy{{1.0, 3.0}},
                                      Tensor({2, 2}, std::span<const double>(out)),
                                      Tensor({2, 2}, std::span<const double>(tgt)));
  const double expected = (1.0 * std::log(2.0) + 3.0 * std::log(4.0)) / 4.0;
  EXPECT_NEAR(v.value, expected, 1e-12);
}

TEST(LossTest, RejectsInvalidTargetsAndWeights) {
  EXPECT_THROW(EvaluateLoss<double>(CosineProximity{}, Row({0, 1}), Row({0.5, 0.5})),
               InvalidArgument);
  EXPECT_THROW(EvaluateLoss<double>(WeightedCrossEntropy{{1.0, 0.0}}, Row({0, 1}), Row({0, 1})),
               InvalidArgument);
  EXPECT_THROW(EvaluateLoss<double>(WeightedCrossEntropy{{1.0, 1.0, 1.0}}, Row({0, 1}),
                                    Row({0, 1})),
               InvalidArgument);
}

TEST(LossTest, ClassWeightsFromCountsFollowInverseFrequency) {
  const std::vector<std::size_t> counts = {10, 20, 30, 40};
  const auto w = ClassWeightsFromCounts(counts);
  ASSERT_EQ(w.size(), 4u);
  EXPECT_DOUBLE_EQ(w[0], 100.0 / 40.0);
  EXPECT_DOUBLE_EQ(w[1], 100.0 / 80.0);
  EXPECT_DOUBLE_EQ(w[2], 100.0 / 120.0);
  EXPECT_DOUBLE_EQ(w[3], 100.0 / 160.0);
  const std::vector<std::size_t> missing = {10, 0, 3, 4};
  EXPECT_THROW(ClassWeightsFromCounts(missing), InvalidArgument);
}

TEST(LossTest, OneHotRows) {
  const std::vector<int> labels = {2, 0};
  const auto t = OneHot<double>(labels, 4);
  EXPECT_EQ(t.shape(), (core::Shape{2, 4}));
  EXPECT_EQ(t[2], 1.0);
  EXPECT_EQ(t[4], 1.0);
  EXPECT_EQ(t[0] + t[1] + t[3] + t[5] + t[6] + t[7], 0.0);
}

// ------------------------------------------------------------ optimizers

TEST(OptimizerTest, RmsPropFirstStep) {
  auto params = Scalar(0.0);
  Optimizer<double> opt(RmsPropConfig{}, params);
  opt.Step(params, Scalar(1.0), 5e-4);
  // v = 0.1, step = 5e-4 / sqrt(0.1).
  EXPECT_NEAR(params.at("theta")[0], -1.5811e-3, 1e-7);
  EXPECT_NEAR(opt.second_moments().at("theta")[0], 0.1, 1e-15);
  EXPECT_EQ(opt.step_count(), 1u);
}

TEST(OptimizerTest, AdamWFirstStep) {
  auto params = Scalar(1.0);
  Optimizer<double> opt(AdamWConfig{1e-3, 0.9, 0.999, 1e-8, 0.01}, params);
  opt.Step(params, Scalar(1.0), 1e-3);
  EXPECT_NEAR(params.at("theta")[0], 0.998990, 1e-6);
}

TEST(OptimizerTest, AdamWDecayOnlyStep) {
  auto params = Scalar(1.0);
  Optimizer<double> opt(AdamWConfig{}, params);
  opt.Step(params, Scalar(0.0), 1e-3);
  EXPECT_NEAR(params.at("theta")[0], 0.99999, 1e-12);
}

TEST(OptimizerTest, AdamWSecondStepMatchesHandTrace) {
  auto params = Scalar(1.0);
  Optimizer<double> opt(AdamWConfig{}, params);
  opt.Step(params, Scalar(1.0), 1e-3);
  opt.Step(params, Scalar(-1.0), 1e-3);
  // Hand trace of the bias-corrected update with decoupled decay.
  double theta = 1.0, m = 0.0, v = 0.0;
  for (int t = 1; t <= 2; ++t) {
    const double g = t == 1 ? 1.0 : -1.0;
    m = 0.9 * m + 0.1 * g;
    v = 0.999 * v + 0.001 * g * g;
    theta -= 1e-3 * 0.01 * theta;
    theta -= 1e-3 * (m / (1 - std::pow(0.9, t))) / (std::sqrt(v / (1 - std::pow(0.999, t))) + 1e-8);
  }
  EXPECT_NEAR(params.at("theta")[0], theta, 1e-15);
}

TEST(OptimizerTest, ShapeMismatchThrows) {
  auto params = Scalar(1.0);
  Optimizer<double> opt(AdamWConfig{}, params);
  ParameterSet<double> bad;
  bad.Add("theta", Tensor({2}), true);
  EXPECT_THROW(opt.Step(params, bad, 1e-3), InvalidArgument);
}

TEST(OptimizerTest, DefaultsMatchConfiguredConventions) {
  EXPECT_DOUBLE_EQ(BaseLearningRate(RmsPropConfig{}), 5e-4);
  EXPECT_DOUBLE_EQ(BaseLearningRate(AdamWConfig{}), 1e-3);
  EXPECT_DOUBLE_EQ(AdamWConfig{}.weight_decay, 0.01);
}

// ------------------------------------------------------------ schedulers

TEST(SchedulerTest, WarmRestartStartsAtEtaMax) {
  Scheduler s(CosineWarmRestartsConfig{10, 2, 0}, 1e-3);
  EXPECT_DOUBLE_EQ(s.OnProgress(0.0), 1e-3);
}

TEST(SchedulerTest, WarmRestartHalfPeriod) {
  Scheduler s(CosineWarmRestartsConfig{10, 2, 0}, 1e-3);
  EXPECT_NEAR(s.OnProgress(5.0), 5e-4, 1e-15);
}

TEST(SchedulerTest, WarmRestartCycleLengthsGrowGeometrically) {
  Scheduler s(CosineWarmRestartsConfig{10, 2, 0}, 1e-3);
  const double starts[] = {0.0, 10.0, 30.0, 70.0};
  const double lengths[] = {10.0, 20.0, 40.0, 80.0};
  for (int c = 0; c < 4; ++c) {
    EXPECT_DOUBLE_EQ(s.OnProgress(starts[c]), 1e-3) << "cycle " << c;
    EXPECT_DOUBLE_EQ(s.t_i(), lengths[c]);
    EXPECT_EQ(s.t_cur(), 0.0);
    EXPECT_EQ(s.cycle(), std::size_t(c));
    // Just before the restart the rate approaches eta_min.
    s.OnProgress(starts[c] + lengths[c] - 1e-9);
    EXPECT_LT(s.lr(), 1e-12);
  }
}

TEST(SchedulerTest, WarmRestartStaysWithinBounds) {
  Scheduler s(CosineWarmRestartsConfig{3, 1.5, 1e-5}, 1e-3);
  for (double e = 0.0; e < 40.0; e += 0.173) {
    const double lr = s.OnProgress(e);
    ASSERT_GE(lr, 1e-5);
    ASSERT_LE(lr, 1e-3);
    ASSERT_GE(s.t_cur(), 0.0);
    ASSERT_LE(s.t_cur(), s.t_i());
  }
}

TEST(SchedulerTest, PlateauHalvesAfterThirdFlatEpoch) {
  Scheduler s(ReduceOnPlateauConfig{0.5, 2, 1e-6}, 1e-3);
  EXPECT_DOUBLE_EQ(s.OnEpochEnd(1.0), 1e-3);
  EXPECT_DOUBLE_EQ(s.OnEpochEnd(1.0), 1e-3);
  EXPECT_DOUBLE_EQ(s.OnEpochEnd(1.0), 5e-4);
}

TEST(SchedulerTest, PlateauRespectsMinLrAndImprovementResets) {
  Scheduler s(ReduceOnPlateauConfig{0.1, 1, 2e-5}, 1e-3);
  s.OnEpochEnd(1.0);
  EXPECT_DOUBLE_EQ(s.OnEpochEnd(0.5), 1e-3);  // improvement
  EXPECT_NEAR(s.OnEpochEnd(0.6), 1e-4, 1e-18);
  EXPECT_DOUBLE_EQ(s.OnEpochEnd(0.6), 2e-5);
  EXPECT_DOUBLE_EQ(s.OnEpochEnd(0.6), 2e-5);
}

TEST(SchedulerTest, ConstantIgnoresSignals) {
  Scheduler s(ConstantLr{}, 0.01);
  EXPECT_EQ(s.OnEpochEnd(5.0), 0.01);
  EXPECT_EQ(s.OnProgress(3.5), 0.01);
}

TEST(SchedulerTest, RejectsInvalidConfigurations) {
  EXPECT_THROW(Scheduler(CosineWarmRestartsConfig{0, 2, 0}, 1e-3), InvalidArgument);
  EXPECT_THROW(Scheduler(CosineWarmRestartsConfig{10, 0.5, 0}, 1e-3), InvalidArgument);
  EXPECT_THROW(Scheduler(ReduceOnPlateauConfig{1.5, 2, 0}, 1e-3), InvalidArgument);
  EXPECT_THROW(Scheduler(ConstantLr{}, 0.0), InvalidArgument);
}

// -------------------------------------------------------- early stopping

TEST(EarlyStoppingTest, PatienceThreeTrace) {
  EarlyStopping<int> stop(3);
  const double metrics[] = {1.0, 0.9, 0.95, 0.96, 0.97};
  StopDecision last = StopDecision::kContinue;
  std::size_t stopped_at = 0;
  for (std::size_t e = 1; e <= 5; ++e) {
    last = stop.Update(e, metrics[e - 1], static_cast<int>(e));
    if (last == StopDecision::kStop) {
      stopped_at = e;
      break;
    }
    EXPECT_LE(stop.epochs_since_improvement(), stop.patience());
  }
  EXPECT_EQ(stopped_at, 5u);
  EXPECT_EQ(stop.best_epoch(), 2u);
  EXPECT_EQ(stop.best().value(), 2);
}

TEST(EarlyStoppingTest, StrictlyDecreasingNeverStops) {
  EarlyStopping<int> stop(1);
  for (std::size_t e = 1; e <= 100; ++e) {
    ASSERT_EQ(stop.Update(e, 1.0 / double(e), 0), StopDecision::kContinue);
  }
}

TEST(EarlyStoppingTest, PatienceTenStopsOnEleventhFlatEpoch) {
  EarlyStopping<int> stop(10);
  ASSERT_EQ(stop.Update(1, 0.5, 1), StopDecision::kContinue);
  // The best epoch is followed by flat epochs; the last one ends training.
  std::size_t flat = 0;
  for (std::size_t e = 2; e <= 20; ++e) {
    ++flat;
    if (stop.Update(e, 0.5, int(e)) == StopDecision::kStop) break;
    ASSERT_LE(stop.epochs_since_improvement(), 10u);
  }
  EXPECT_EQ(flat, 10u);
  EXPECT_EQ(stop.best_epoch(), 1u);
}

// -------------------------------------------------------------- clipping

TEST(ClipTest, ScalesAboveThreshold) {
  ParameterSet<double> g;
  const std::vector<double> v = {3.0, 4.0};
  g.Add("w", Tensor({2}, std::span<const double>(v)), true);
  EXPECT_DOUBLE_EQ(ClipGradients(g, 1.0), 5.0);
  EXPECT_NEAR(g.at("w")[0], 0.6, 1e-15);
  EXPECT_NEAR(g.at("w")[1], 0.8, 1e-15);
}

TEST(ClipTest, LeavesSmallGradientsUnchanged) {
  ParameterSet<double> g;
  const std::vector<double> v = {0.3, 0.4};
  g.Add("w", Tensor({2}, std::span<const double>(v)), true);
  ClipGradients(g, 1.0);
  EXPECT_EQ(g.at("w")[0], 0.3);
  EXPECT_EQ(g.at("w")[1], 0.4);
  EXPECT_THROW(ClipGradients(g, 0.0), InvalidArgument);
}

TEST(ClipTest, PreservesDirectionAndBoundsNorm) {
  core::Rng rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    ParameterSet<double> g;
    g.Add("a", Tensor({7}), true);
    g.Add("b", Tensor({3, 2}), true);
    for (auto& e : g.entries()) {
      for (double& x : e.value.data()) x = rng.Uniform(-5.0, 5.0);
    }
    const ParameterSet<double> before = g;
    ClipGradients(g, 1.0);
    EXPECT_LE(GlobalNorm(g), 1.0 + 1e-6);
    double dot = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k) {
      for (std::size_t i = 0; i < g.entries()[k].value.size(); ++i) {
        dot += g.entries()[k].value[i] * before.entries()[k].value[i];
      }
    }
    EXPECT_NEAR(dot / (GlobalNorm(g) * GlobalNorm(before)), 1.0, 1e-9);
  }
}

// --------------------------------------------------------------- sampler

std::vector<double> ClassFrequencies(const std::vector<int>& labels,
                                     const std::vector<std::size_t>& draws, int classes) {
  std::vector<double> freq(classes);
  for (auto i : draws) freq[labels[i]] += 1.0;
  for (auto& f : freq) f /= double(draws.size());
  return freq;
}

TEST(SamplerTest, BalancedLabelsGiveUniformClasses) {
  std::vector<int> labels;
  for (int i = 0; i < 400; ++i) labels.push_back(i % 4);
  core::Rng rng(1);
  const auto draws = WeightedSampleIndices(labels, 100000, rng);
  for (double f : ClassFrequencies(labels, draws, 4)) EXPECT_NEAR(f, 0.25, 0.02);
}

TEST(SamplerTest, ImbalancedTwoClassIsRebalanced) {
  std::vector<int> labels(1000, 0);
  labels.resize(1100, 1);
  core::Rng rng(2);
  const auto draws = WeightedSampleIndices(labels, 100000, rng);
  const auto f = ClassFrequencies(labels, draws, 2);
  EXPECT_NEAR(f[0], 0.5, 0.02);
  EXPECT_NEAR(f[1], 0.5, 0.02);
}

TEST(SamplerTest, MembersWithinAClassAreEquallyLikely) {
  const std::vector<int> labels = {0, 0, 0, 0, 1};
  core::Rng rng(4);
  const auto draws = WeightedSampleIndices(labels, 80000, rng);
  std::vector<double> freq(5);
  for (auto i : draws) freq[i] += 1.0 / 80000.0;
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(freq[i], 0.125, 0.01);
  EXPECT_NEAR(freq[4], 0.5, 0.01);
}

TEST(SamplerTest, SameSeedSameSequence) {
  const std::vector<int> labels = {0, 1, 1, 2, 2, 2};
  core::Rng a(9), b(9);
  EXPECT_EQ(WeightedSampleIndices(labels, 500, a), WeightedSampleIndices(labels, 500, b));
}

TEST(SamplerTest, MissingClassIsAnError) {
  const std::vector<int> labels = {0, 0, 2};
  core::Rng rng(0);
  EXPECT_THROW(WeightedSampleIndices(labels, 10, rng, 3), InvalidArgument);
  EXPECT_THROW(WeightedSampleIndices({}, 10, rng), InvalidArgument);
}

TEST(SamplerTest, ShuffledIndicesArePermutations) {
  core::Rng rng(6);
  auto idx = ShuffledIndices(100, rng);
  std::sort(idx.begin(), idx.end());
  for (std::size_t i = 0; i < 100; ++i) EXPECT_EQ(idx[i], i);
}

// --------------------------------------------------------------- trainer

LabeledSet TinySet(std::size_t per_class, std::uint64_t seed) {
  LabeledSet set;
  set.images = core::TensorF({per_class * 4, 1, 48, 48});
  core::Rng rng(seed);
  for (std::size_t i = 0; i < per_class * 4; ++i) {
    const auto emotion = data::FromIndex<data::Emotion>(i % 4);
    const auto img = data::RenderFixtureImage(emotion, 12.0, rng);
    data::Normalize(img, set.images.raw() + i * data::kImagePixels);
    set.labels.push_back(static_cast<int>(i % 4));
    set.sample_indices.push_back(i);
  }
  return set;
}

TrainConfig QuickConfig(ArchId arch) {
  TrainConfig config = DefaultTrainConfig(arch);
  config.max_epochs = 2;
  config.batch_size = 16;
  config.seed = 17;
  return config;
}

TEST(TrainerTest, DefaultConfigsMatchBothRegimes) {
  const auto base = DefaultTrainConfig(ArchId::kBaseline);
  EXPECT_TRUE(std::holds_alternative<CosineProximity>(base.loss));
  EXPECT_TRUE(std::holds_alternative<RmsPropConfig>(base.optimizer));
  EXPECT_TRUE(std::holds_alternative<ReduceOnPlateauConfig>(base.scheduler));
  EXPECT_EQ(base.patience, 3u);
  EXPECT_EQ(base.batch_size, 64u);
  const auto enh = DefaultTrainConfig(ArchId::kEnhanced);
  EXPECT_TRUE(std::holds_alternative<WeightedCrossEntropy>(enh.loss));
  EXPECT_TRUE(std::holds_alternative<AdamWConfig>(enh.optimizer));
  EXPECT_TRUE(std::holds_alternative<CosineWarmRestartsConfig>(enh.scheduler));
  EXPECT_EQ(enh.patience, 10u);
  ASSERT_TRUE(enh.clip_max_norm.has_value());
  EXPECT_EQ(*enh.clip_max_norm, 1.0);
  EXPECT_EQ(enh.sampler, SamplerKind::kWeighted);
}

TEST(TrainerTest, SameSeedGivesIdenticalHistoryAndWeights) {
  const auto train = TinySet(12, 1);
  const auto val = TinySet(4, 2);
  for (ArchId arch : {ArchId::kBaseline, ArchId::kEnhanced}) {
    auto config = QuickConfig(arch);
    if (arch == ArchId::kEnhanced) config.samples_per_epoch = 32;
    const auto a = Train(config, train, val);
    const auto b = Train(config, train, val);
    EXPECT_EQ(a.history, b.history);
    EXPECT_EQ(a.model.params, b.model.params);
    EXPECT_EQ(a.history.size(), 2u);
  }
}

TEST(TrainerTest, ReturnsBestEpochParameters) {
  const auto train = TinySet(12, 3);
  const auto val = TinySet(4, 4);
  auto config = QuickConfig(ArchId::kBaseline);
  config.max_epochs = 4;
  std::vector<HistoryRow> streamed;
  const auto result = Train(config, train, val, [&](const HistoryRow& r) { streamed.push_back(r); });
  ASSERT_EQ(streamed, result.history);
  double best = std::numeric_limits<double>::infinity();
  std::size_t best_epoch = 0;
  for (const auto& row : result.history) {
    if (row.val_loss < best) {
      best = row.val_loss;
      best_epoch = row.epoch;
    }
  }
  EXPECT_EQ(result.best_epoch, best_epoch);
  EXPECT_DOUBLE_EQ(result.best_val_loss, best);
  // Re-evaluating the returned parameters reproduces the best validation loss.
  const auto fwd = Evaluate(result.model.spec, result.model.params, val.images);
  const auto loss = EvaluateLoss(config.loss, fwd.outputs, OneHot<float>(val.labels, 4));
  EXPECT_NEAR(loss.value, best, 1e-6);
}

TEST(TrainerTest, NonFiniteLossAbortsWithLocation) {
  const auto train = TinySet(4, 5);
  const auto val = TinySet(2, 6);
  auto config = QuickConfig(ArchId::kEnhanced);
  config.batch_size = 4;
  config.clip_max_norm.reset();
  config.optimizer = AdamWConfig{std::numeric_limits<double>::infinity()};
  config.scheduler = ConstantLr{};
  try {
    Train(config, train, val);
    FAIL() << "expected divergence";
  } catch (const TrainingDiverged& e) {
    EXPECT_EQ(e.epoch(), 1u);
    EXPECT_GE(e.batch(), 2u);
    EXPECT_NE(std::string(e.what()).find("epoch 1"), std::string::npos);
  }
}

TEST(TrainerTest, RejectsInvalidInputs) {
  const auto train = TinySet(2, 7);
  LabeledSet empty;
  auto config = QuickConfig(ArchId::kBaseline);
  EXPECT_THROW(Train(config, train, empty), InvalidArgument);
  config.batch_size = 0;
  EXPECT_THROW(Train(config, train, train), InvalidArgument);
  config = QuickConfig(ArchId::kBaseline);
  config.clip_max_norm = -1.0;
  EXPECT_THROW(Train(config, train, train), InvalidArgument);
}

TEST(TrainerTest, HistoryCsvFormat) {
  std::ostringstream out;
  WriteHistoryCsv({{1, 0.5, 0.25, 0.75, 0.5, 0.001}}, out);
  EXPECT_EQ(out.str(),
            "epoch,train_loss,train_acc,val_loss,val_acc,lr\n"
            "1,0.5,0.25,0.75,0.5,0.001\n");
}

}  // namespace
}  // namespace emocert::nn
