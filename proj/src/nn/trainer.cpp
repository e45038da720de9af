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

#include "emocert/nn/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <ostream>

#include "emocert/core/rng.hpp"
#include "emocert/nn/clip.hpp"
#include "emocert/nn/early_stopping.hpp"
#include "emocert/nn/network.hpp"
#include "emocert/nn/sampler.hpp"

namespace emocert::nn {
namespace {

using core::TensorF;

void CheckSet(const LabeledSet& set, const char* name, std::size_t classes) {
  if (set.size() == 0) throw InvalidArgument(std::string(name) + " set is empty");
  if (set.images.rank() != 4 || set.images.dim(0) != set.size()) {
    throw InvalidArgument(std::string(name) + " images do not match labels");
  }
  for (int label : set.labels) {
    if (label < 0 || static_cast<std::size_t>(label) >= classes) {
      throw InvalidArgument(std::string(name) + " set has a label outside 0.." +
                            std::to_string(classes - 1));
    }
  }
}

// Rows `indices[begin, end)` of `set` as a batch.
TensorF GatherImages(const LabeledSet& set, const std::vector<std::size_t>& indices,
                     std::size_t begin, std::size_t end) {
  const std::size_t per = set.images.size() / set.size();
  Shape shape = set.images.shape();
  shape[0] = end - begin;
  TensorF batch(shape);
  for (std::size_t k = begin; k < end; ++k) {
    std::memcpy(batch.raw() + (k - begin) * per, set.images.raw() + indices[k] * per,
                per * sizeof(float));
  }
  return batch;
}

std::vector<int> GatherLabels(const LabeledSet& set, const std::vector<std::size_t>& indices,
                              std::size_t begin, std::size_t end) {
  std::vector<int> labels;
  for (std::size_t k = begin; k < end; ++k) labels.push_back(set.labels[indices[k]]);
  return labels;
}

std::size_t CountCorrect(const TensorF& outputs, const std::vector<int>& labels) {
  const auto predicted = ArgmaxRows(outputs);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) correct += predicted[i] == labels[i];
  return correct;
}

struct EvalStats {
  double loss = 0.0;
  double accuracy = 0.0;
};

EvalStats EvaluateSet(const Model& model, const LossSpec& loss, const LabeledSet& set,
                      std::size_t batch_size) {
  std::vector<std::size_t> order(set.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  double loss_sum = 0.0;
  std::size_t correct = 0;
  for (std::size_t begin = 0; begin < order.size(); begin += batch_size) {
    const std::size_t end = std::min(order.size(), begin + batch_size);
    const auto labels = GatherLabels(set, order, begin, end);
    const auto result = Evaluate(model.spec, model.params, GatherImages(set, order, begin, end));
    const auto value = EvaluateLoss(loss, result.outputs,
                                    OneHot<float>(labels, model.spec.num_classes));
    loss_sum += value.value * static_cast<double>(end - begin);
    correct += CountCorrect(result.outputs, labels);
  }
  const double n = static_cast<double>(set.size());
  return {loss_sum / n, static_cast<double>(correct) / n};
}

}  // namespace

TrainingDiverged::TrainingDiverged(std::size_t epoch, std::size_t batch, double loss)
    : Error("training diverged: non-finite loss " + std::to_string(loss) +
            " at epoch " + std::to_string(epoch) + ", batch " + std::to_string(batch)),
      epoch_(epoch),
      batch_(batch) {}

TrainConfig DefaultTrainConfig(ArchId arch) {
  TrainConfig config;
  config.arch = arch;
  if (arch == ArchId::kEnhanced) {
    config.loss = WeightedCrossEntropy{{}};
    config.optimizer = AdamWConfig{};
    config.scheduler = CosineWarmRestartsConfig{};
    config.patience = 10;
    config.clip_max_norm = 1.0;
    config.sampler = SamplerKind::kWeighted;
  }
  return config;
}

TrainResult Train(const TrainConfig& config, const LabeledSet& train_set,
                  const LabeledSet& val_set, const EpochCallback& on_epoch) {
  if (config.batch_size == 0) throw InvalidArgument("batch size must be positive");
  if (config.max_epochs == 0) throw InvalidArgument("max_epochs must be positive");
  if (config.patience == 0) throw InvalidArgument("patience must be positive");
  if (config.clip_max_norm && !(*config.clip_max_norm > 0.0)) {
    throw InvalidArgument("clip_max_norm must be > 0");
  }
  Model model = BuildModel(config.arch, core::DeriveSeed(config.seed, "init"));
  const std::size_t classes = model.spec.num_classes;
  CheckSet(train_set, "training", classes);
  CheckSet(val_set, "validation", classes);

  LossSpec loss = config.loss;
  if (auto* ce = std::get_if<WeightedCrossEntropy>(&loss); ce && ce->class_weights.empty()) {
    std::vector<std::size_t> counts(classes);
    for (int label : train_set.labels) ++counts[static_cast<std::size_t>(label)];
    ce->class_weights = ClassWeightsFromCounts(counts);
  }

  Optimizer<float> optimizer(config.optimizer, model.params);
  Scheduler scheduler(config.scheduler, BaseLearningRate(config.optimizer));
  EarlyStopping<ParameterSet<float>> early_stop(config.patience);
  core::Rng sampler_rng(core::DeriveSeed(config.seed, "sampler"));
  core::Rng dropout_rng(core::DeriveSeed(config.seed, "dropout"));
  const std::size_t draws =
      config.samples_per_epoch == 0 ? train_set.size() : config.samples_per_epoch;
  const std::size_t batches = (draws + config.batch_size - 1) / config.batch_size;

  TrainResult result;
  for (std::size_t epoch = 1; epoch <= config.max_epochs; ++epoch) {
    std::vector<std::size_t> order;
    if (config.sampler == SamplerKind::kWeighted) {
      order = WeightedSampleIndices(train_set.labels, draws, sampler_rng, classes);
    } else {
      // Consecutive shuffled passes when more draws than samples are asked for.
      while (order.size() < draws) {
        const auto pass = ShuffledIndices(train_set.size(), sampler_rng);
        order.insert(order.end(), pass.begin(),
                     pass.begin() + static_cast<std::ptrdiff_t>(
                                        std::min(pass.size(), draws - order.size())));
      }
    }

    double loss_sum = 0.0;
    std::size_t correct = 0;
    double lr = scheduler.lr();
    for (std::size_t b = 0; b < batches; ++b) {
      lr = scheduler.OnProgress(static_cast<double>(epoch - 1) +
                                static_cast<double>(b) / static_cast<double>(batches));
      const std::size_t begin = b * config.batch_size;
      const std::size_t end = std::min(draws, begin + config.batch_size);
      const auto labels = GatherLabels(train_set, order, begin, end);
      auto forward = Forward(model.spec, model.params, GatherImages(train_set, order, begin, end),
                             Mode::kTrain, &dropout_rng);
      const auto value = EvaluateLoss(loss, forward.outputs, OneHot<float>(labels, classes));
      if (!std::isfinite(value.value)) throw TrainingDiverged(epoch, b + 1, value.value);
      auto grads = Backward(model.spec, model.params, forward.cache, value.grad);
      if (config.clip_max_norm) {
        const double norm = ClipGradients(grads, *config.clip_max_norm);
        if (!std::isfinite(norm)) throw TrainingDiverged(epoch, b + 1, norm);
      }
      optimizer.Step(model.params, grads, lr);
      loss_sum += value.value * static_cast<double>(end - begin);
      correct += CountCorrect(forward.outputs, labels);
    }

    const EvalStats val = EvaluateSet(model, loss, val_set, 128);
    HistoryRow row{epoch,
                   loss_sum / static_cast<double>(draws),
                   static_cast<double>(correct) / static_cast<double>(draws),
                   val.loss,
                   val.accuracy,
                   lr};
    result.history.push_back(row);
    if (on_epoch) on_epoch(row);
    scheduler.OnEpochEnd(val.loss);
    if (early_stop.Update(epoch, val.loss, model.params) == StopDecision::kStop) {
      result.stopped_early = true;
      break;
    }
  }
  if (early_stop.best()) model.params = *early_stop.best();
  result.best_epoch = early_stop.best_epoch();
  result.best_val_loss = early_stop.best_metric();
  result.model = std::move(model);
  return result;
}

std::string FormatHistoryRow(const HistoryRow& row) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), "%zu,%.9g,%.9g,%.9g,%.9g,%.9g", row.epoch, row.train_loss,
                row.train_acc, row.val_loss, row.val_acc, row.lr);
  return buf;
}

void WriteHistoryCsv(const std::vector<HistoryRow>& history, std::ostream& out) {
  out << "epoch,train_loss,train_acc,val_loss,val_acc,lr\n";
  for (const auto& row : history) out << FormatHistoryRow(row) << '\n';
}

}  // namespace emocert::nn
