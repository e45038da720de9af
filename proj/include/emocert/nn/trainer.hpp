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

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "emocert/core/error.hpp"
#include "emocert/nn/inference.hpp"
#include "emocert/nn/loss.hpp"
#include "emocert/nn/optimizer.hpp"
#include "emocert/nn/parameters.hpp"
#include "emocert/nn/scheduler.hpp"

namespace emocert::nn {

enum class SamplerKind { kUniform, kWeighted };

struct TrainConfig {
  ArchId arch = ArchId::kBaseline;
  // Weighted cross-entropy with an empty class_weights vector takes its
  // weights from the training labels (ClassWeightsFromCounts).
  LossSpec loss = CosineProximity{};
  OptimizerConfig optimizer = RmsPropConfig{};
  SchedulerConfig scheduler = ReduceOnPlateauConfig{};
  std::size_t max_epochs = 100;
  std::size_t batch_size = 64;
  std::size_t patience = 3;
  std::optional<double> clip_max_norm;
  SamplerKind sampler = SamplerKind::kUniform;
  // Draws per epoch; 0 means one pass over the training set.
  std::size_t samples_per_epoch = 0;
  std::uint64_t seed = 0;
};

// baseline: cosine proximity, RMSprop, plateau schedule, patience 3,
//           uniform shuffling, no clipping.
// enhanced: weighted cross-entropy, AdamW, cosine warm restarts, patience
//           10, class-balanced sampling, clipping at norm 1.0.
TrainConfig DefaultTrainConfig(ArchId arch);

struct HistoryRow {
  std::size_t epoch = 0;  // 1-based
  double train_loss = 0.0;
  double train_acc = 0.0;
  double val_loss = 0.0;
  double val_acc = 0.0;
  double lr = 0.0;  // rate in effect at the end of the epoch's last batch
  bool operator==(const HistoryRow&) const = default;
};

struct TrainResult {
  Model model;  // parameters of the best validation epoch
  std::vector<HistoryRow> history;
  std::size_t best_epoch = 0;
  double best_val_loss = 0.0;
  bool stopped_early = false;
};

class TrainingDiverged : public Error {
 public:
  TrainingDiverged(std::size_t epoch, std::size_t batch, double loss);
  std::size_t epoch() const { return epoch_; }
  std::size_t batch() const { return batch_; }

 private:
  std::size_t epoch_;
  std::size_t batch_;
};

using EpochCallback = std::function<void(const HistoryRow&)>;

// Deterministic for a given config: the initial weights, sampler and
// dropout masks each draw from their own stream derived from config.seed.
TrainResult Train(const TrainConfig& config, const LabeledSet& train_set,
                  const LabeledSet& val_set, const EpochCallback& on_epoch = {});

// Header "epoch,train_loss,train_acc,val_loss,val_acc,lr".
void WriteHistoryCsv(const std::vector<HistoryRow>& history, std::ostream& out);
std::string FormatHistoryRow(const HistoryRow& row);

}  // namespace emocert::nn
