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

#include <chrono>
#include <filesystem>
#include <sstream>

#include "emocert/core/error.hpp"
#include "emocert/core/rng.hpp"
#include "emocert/data/fixture.hpp"
#include "emocert/metrics/records.hpp"
#include "emocert/nn/inference.hpp"
#include "emocert/nn/model_io.hpp"
#include "emocert/nn/network.hpp"
#include "emocert/nn/parameters.hpp"
#include "temp_dir.hpp"

namespace emocert::nn {
namespace {

core::TensorF RandomBatch(std::size_t n, std::uint64_t seed) {
  core::TensorF batch({n, 1, 48, 48});
  core::Rng rng(seed);
  for (float& v : batch.data()) v = static_cast<float>(rng.Uniform());
  return batch;
}

TEST(ModelSpecTest, ParameterCounts) {
  EXPECT_EQ(CountParameters(CanonicalSpec(ArchId::kEnhanced)), 321380u);
  EXPECT_EQ(CountParameters(CanonicalSpec(ArchId::kBaseline)), 1944u);
  EXPECT_EQ(CountParameters(LayerSpec{Dense{10, 4, true}}), 44u);
  EXPECT_EQ(CountParameters(LayerSpec{Dense{10, 4, false}}), 40u);
  EXPECT_EQ(CountParameters(LayerSpec{BatchNorm{32}}), 64u);
  EXPECT_EQ(BuildModel(ArchId::kEnhanced).params.TrainableScalars(), 321380u);
  EXPECT_EQ(BuildModel(ArchId::kBaseline).params.TrainableScalars(), 1944u);
}

TEST(ModelSpecTest, EnhancedLayoutFollowsTheBlockStructure) {
  const auto spec = CanonicalSpec(ArchId::kEnhanced);
  std::vector<std::size_t> filters;
  std::vector<double> dropout;
  std::size_t batch_norms = 0;
  for (const auto& layer : spec.layers) {
    if (const auto* c = std::get_if<Conv2d>(&layer)) {
      filters.push_back(c->out_channels);
      EXPECT_TRUE(IsCanonicalConv(*c));
    }
    if (const auto* d = std::get_if<Dropout>(&layer)) dropout.push_back(d->rate);
    if (std::holds_alternative<BatchNorm>(layer)) ++batch_norms;
    EXPECT_FALSE(std::holds_alternative<Flatten>(layer));
  }
  EXPECT_EQ(filters, (std::vector<std::size_t>{32, 32, 64, 64, 128, 128}));
  EXPECT_EQ(dropout, (std::vector<double>{0.2, 0.3, 0.4}));
  EXPECT_EQ(batch_norms, 6u);
  EXPECT_EQ(ValidateSpec(spec), (Shape{4}));
}

TEST(ModelSpecTest, BaselineLayoutEndsWithRelu) {
  const auto spec = CanonicalSpec(ArchId::kBaseline);
  EXPECT_TRUE(std::holds_alternative<Relu>(spec.layers.back()));
  for (const auto& layer : spec.layers) {
    if (const auto* c = std::get_if<Conv2d>(&layer)) {
      EXPECT_EQ(c->kernel, 4u);
      EXPECT_EQ(c->out_channels, 10u);
    }
  }
}

TEST(ModelSpecTest, ValidationCatchesBadLayouts) {
  ModelSpec spec;
  spec.input_shape = {1, 8, 8};
  spec.layers = {Flatten{}, Dense{64, 3}};
  EXPECT_THROW(ValidateSpec(spec), InvalidArgument);  // 3 outputs, 4 classes
  spec.layers = {Conv2d{2, 4, 3, 1}, Flatten{}, Dense{256, 4}};
  EXPECT_THROW(ValidateSpec(spec), InvalidArgument);  // channel mismatch
  spec.layers = {Dropout{1.0}, Flatten{}, Dense{64, 4}};
  EXPECT_THROW(ValidateSpec(spec), InvalidArgument);
  EXPECT_FALSE(IsCanonicalConv(Conv2d{1, 1, 5, 2}));
  EXPECT_THROW(CanonicalSpec(static_cast<ArchId>(9)), InvalidArgument);
  EXPECT_FALSE(ParseArch("resnet").has_value());
}

TEST(ModelSpecTest, ParameterCountRuntimeIsSmall) {
  const auto start = std::chrono::steady_clock::now();
  BuildModel(ArchId::kEnhanced);
  BuildModel(ArchId::kBaseline);
  EXPECT_LT(std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count(), 1.0);
}

TEST(ModelTest, InitializationIsSeededAndFollowsScheme) {
  const auto a = BuildModel(ArchId::kEnhanced, 5);
  const auto b = BuildModel(ArchId::kEnhanced, 5);
  const auto c = BuildModel(ArchId::kEnhanced, 6);
  EXPECT_EQ(a.params, b.params);
  EXPECT_NE(a.params, c.params);
  for (const auto& e : a.params.entries()) {
    if (e.name.ends_with("gamma") || e.name.ends_with("running_var")) {
      for (float v : e.value.data()) ASSERT_EQ(v, 1.0f) << e.name;
    } else if (e.name.ends_with("bias") || e.name.ends_with("beta") ||
               e.name.ends_with("running_mean")) {
      for (float v : e.value.data()) ASSERT_EQ(v, 0.0f) << e.name;
    } else {
      // He-uniform bound sqrt(6 / fan_in).
      const auto& s = e.value.shape();
      const double fan_in = double(e.value.size()) / double(s[0]);
      const double bound = std::sqrt(6.0 / fan_in);
      for (float v : e.value.data()) ASSERT_LE(std::fabs(v), bound + 1e-6) << e.name;
    }
  }
}

TEST(ForwardTest, ProbabilityRowsAreNormalized) {
  for (ArchId arch : {ArchId::kBaseline, ArchId::kEnhanced}) {
    const auto model = BuildModel(arch, 1);
    const auto fwd = Evaluate(model.spec, model.params, RandomBatch(6, 2));
    ASSERT_EQ(fwd.probabilities.shape(), (Shape{6, 4}));
    for (std::size_t r = 0; r < 6; ++r) {
      double sum = 0.0;
      for (std::size_t j = 0; j < 4; ++j) {
        EXPECT_GE(fwd.probabilities[r * 4 + j], 0.0f);
        sum += fwd.probabilities[r * 4 + j];
      }
      EXPECT_NEAR(sum, 1.0, 1e-6);
    }
  }
}

TEST(ForwardTest, EvalModeIsBitIdentical) {
  const auto model = BuildModel(ArchId::kEnhanced, 3);
  const auto batch = RandomBatch(4, 4);
  EXPECT_EQ(Evaluate(model.spec, model.params, batch).outputs,
            Evaluate(model.spec, model.params, batch).outputs);
}

TEST(ForwardTest, EvalIsIndependentOfBatchComposition) {
  auto model = BuildModel(ArchId::kEnhanced, 7);
  // Give the running statistics non-trivial values first.
  core::Rng rng(1);
  for (int i = 0; i < 3; ++i) Forward(model.spec, model.params, RandomBatch(4, 10 + i), Mode::kTrain, &rng);
  const auto batch = RandomBatch(5, 8);
  const auto together = Evaluate(model.spec, model.params, batch);
  for (std::size_t n = 0; n < 5; ++n) {
    core::TensorF single({1, 1, 48, 48});
    std::copy_n(batch.raw() + n * 2304, 2304, single.raw());
    const auto alone = Evaluate(model.spec, model.params, single);
    for (std::size_t j = 0; j < 4; ++j) {
      EXPECT_NEAR(alone.probabilities[j], together.probabilities[n * 4 + j], 1e-5);
    }
  }
}

double BaselineMeanTopProbability(const Model& model, std::uint64_t input_seed) {
  const auto fwd = Evaluate(model.spec, model.params, RandomBatch(40, input_seed));
  double total = 0.0;
  for (std::size_t r = 0; r < 40; ++r) {
    float top = 0.0f;
    for (std::size_t j = 0; j < 4; ++j) top = std::max(top, fwd.probabilities[r * 4 + j]);
    total += top;
  }
  return total / 40.0;
}

// Softmax over post-ReLU outputs is near uniform while the outputs are small.
// At the 1/sqrt(fan_in) weight scale this holds for every seed; the He bound
// used for training is sqrt(6) times larger and gives seed-dependent values.
TEST(ForwardTest, BaselineIsNearUniformAtFanInScale) {
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    auto model = BuildModel(ArchId::kBaseline, seed);
    for (auto& e : model.params.entries()) {
      if (!e.name.ends_with("weight")) continue;
      for (float& v : e.value.data()) v = static_cast<float>(v / std::sqrt(6.0));
    }
    const double mean_top = BaselineMeanTopProbability(model, 100 + seed);
    EXPECT_GE(mean_top, 0.25) << "seed " << seed;
    EXPECT_LE(mean_top, 0.35) << "seed " << seed;
  }
}

TEST(ForwardTest, BaselineAtHeScaleIsNeverBelowUniform) {
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    EXPECT_GE(BaselineMeanTopProbability(BuildModel(ArchId::kBaseline, seed), 100 + seed), 0.25);
  }
}

TEST(ForwardTest, ShapeMismatchAndMissingRngThrow) {
  auto model = BuildModel(ArchId::kEnhanced);
  EXPECT_THROW(Evaluate(model.spec, model.params, core::TensorF({1, 1, 32, 32})), InvalidArgument);
  EXPECT_THROW(Forward(model.spec, model.params, RandomBatch(2, 1), Mode::kTrain, nullptr),
               InvalidArgument);
}

TEST(ForwardTest, BackwardLeavesRunningStatsUnchanged) {
  auto model = BuildModel(ArchId::kEnhanced, 2);
  core::Rng rng(3);
  auto fwd = Forward(model.spec, model.params, RandomBatch(3, 5), Mode::kTrain, &rng);
  const auto snapshot = model.params;
  const auto grads = Backward(model.spec, model.params, fwd.cache,
                              core::TensorF(fwd.outputs.shape(), 0.1f));
  EXPECT_EQ(model.params, snapshot);
  EXPECT_EQ(grads.size(), 28u);  // trainable tensors only
  for (const auto& e : grads.entries()) {
    EXPECT_EQ(e.value.shape(), model.params.at(e.name).shape());
  }
}

// ------------------------------------------------------------- model io

std::string Serialize(const Model& model) {
  std::ostringstream out;
  WriteModel(model, out);
  return out.str();
}

ModelFileErrorKind LoadError(const std::string& bytes) {
  std::istringstream in(bytes);
  try {
    ReadModel(in);
  } catch (const ModelFileError& e) {
    return e.kind();
  }
  ADD_FAILURE() << "expected a load error";
  return ModelFileErrorKind::kIo;
}

TEST(ModelIoTest, RoundTripIsBitIdentical) {
  for (ArchId arch : {ArchId::kBaseline, ArchId::kEnhanced}) {
    const auto model = BuildModel(arch, 11);
    std::istringstream in(Serialize(model));
    const auto loaded = ReadModel(in);
    EXPECT_EQ(loaded.spec.arch, arch);
    EXPECT_EQ(loaded.params, model.params);
    const auto batch = RandomBatch(3, 12);
    EXPECT_EQ(Evaluate(loaded.spec, loaded.params, batch).outputs,
              Evaluate(model.spec, model.params, batch).outputs);
  }
}

TEST(ModelIoTest, HeaderLayout) {
  const auto bytes = Serialize(BuildModel(ArchId::kEnhanced));
  EXPECT_EQ(bytes.substr(0, 4), "EMOC");
  EXPECT_EQ(static_cast<unsigned char>(bytes[4]), 1u);  // u16 version, little-endian
  EXPECT_EQ(static_cast<unsigned char>(bytes[5]), 0u);
  EXPECT_EQ(static_cast<unsigned char>(bytes[6]), 1u);  // arch id
}

TEST(ModelIoTest, CorruptFilesGiveStructuredErrors) {
  const auto bytes = Serialize(BuildModel(ArchId::kBaseline));
  std::string bad_magic = bytes;
  bad_magic[0] = 'X';
  EXPECT_EQ(LoadError(bad_magic), ModelFileErrorKind::kBadMagic);
  std::string bumped = bytes;
  bumped[4] = 2;
  EXPECT_EQ(LoadError(bumped), ModelFileErrorKind::kUnsupportedVersion);
  std::string arch = bytes;
  arch[6] = 7;
  EXPECT_EQ(LoadError(arch), ModelFileErrorKind::kUnknownArch);
  for (std::size_t cut : {std::size_t{2}, std::size_t{9}, bytes.size() / 2, bytes.size() - 1}) {
    EXPECT_EQ(LoadError(bytes.substr(0, cut)), ModelFileErrorKind::kTruncated) << cut;
  }
  EXPECT_EQ(LoadError(bytes + "x"), ModelFileErrorKind::kMismatch);
  // A baseline body under the enhanced arch id does not match the layout.
  std::string swapped = bytes;
  swapped[6] = 1;
  EXPECT_EQ(LoadError(swapped), ModelFileErrorKind::kMismatch);
}

TEST(ModelIoTest, MissingFileIsAnIoError) {
  try {
    LoadModel("/nonexistent/model.bin");
    FAIL();
  } catch (const ModelFileError& e) {
    EXPECT_EQ(e.kind(), ModelFileErrorKind::kIo);
  }
}

// ------------------------------------------------------------- inference

TEST(InferenceTest, PredictJoinsManifestAndSkipsUnreadableImages) {
  testing::TempDir dir;
  data::FixtureConfig config;
  config.n_per_class = 3;
  config.seed = 4;
  const auto manifest = data::GenerateFixture(config, dir.path());
  const auto model = BuildModel(ArchId::kEnhanced, 1);
  const auto full = Predict(model, manifest, dir.path(), {}, 1);
  ASSERT_EQ(full.records.size(), manifest.samples.size());
  EXPECT_TRUE(full.skipped.empty());
  for (std::size_t i = 0; i < full.records.size(); ++i) {
    const auto& r = full.records[i];
    const auto& s = manifest.samples[i];
    EXPECT_EQ(r.sample_id, s.id);
    EXPECT_EQ(r.true_class, s.emotion);
    EXPECT_EQ(r.gender, s.gender);
    EXPECT_EQ(r.predicted, metrics::ArgmaxClass(r.probs));
    EXPECT_TRUE(metrics::RecordIssues(r).empty());
  }
  // Multi-threaded prediction returns the same records in manifest order.
  EXPECT_EQ(Predict(model, manifest, dir.path(), {}, 3).records, full.records);

  std::filesystem::remove(data::ResolveImage(dir.path(), manifest.samples[2]));
  const auto partial = Predict(model, manifest, dir.path(), {}, 1);
  EXPECT_EQ(partial.records.size(), manifest.samples.size() - 1);
  ASSERT_EQ(partial.skipped.size(), 1u);
  EXPECT_NE(partial.skipped[0].find(manifest.samples[2].id), std::string::npos);
}

TEST(InferenceTest, FilterSelectsSplitAndOriginals) {
  data::Sample s;
  s.split = data::Split::kVal;
  s.augmentation = data::Augmentation::kBlur;
  SampleFilter f;
  EXPECT_TRUE(f.Accepts(s));
  f.originals_only = true;
  EXPECT_FALSE(f.Accepts(s));
  f.originals_only = false;
  f.split = data::Split::kTest;
  EXPECT_FALSE(f.Accepts(s));
}

}  // namespace
}  // namespace emocert::nn
