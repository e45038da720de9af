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
#include <limits>
#include <optional>

namespace emocert::nn {

enum class StopDecision { kContinue, kStop };

// Monitors a lower-is-better metric. A strictly lower value is an
// improvement: it resets the counter and snapshots the weights. Training
// stops once `patience` epochs in a row fail to improve.
template <typename Snapshot>
class EarlyStopping {
 public:
  explicit EarlyStopping(std::size_t patience) : patience_(patience) {}

  StopDecision Update(std::size_t epoch, double metric, const Snapshot& current) {
    if (metric < best_metric_) {
      best_metric_ = metric;
      best_epoch_ = epoch;
      since_improvement_ = 0;
      best_ = current;
      return StopDecision::kContinue;
    }
    ++since_improvement_;
    return since_improvement_ >= patience_ ? StopDecision::kStop
                                           : StopDecision::kContinue;
  }

  double best_metric() const { return best_metric_; }
  std::size_t best_epoch() const { return best_epoch_; }
  std::size_t epochs_since_improvement() const { return since_improvement_; }
  std::size_t patience() const { return patience_; }
  const std::optional<Snapshot>& best() const { return best_; }

 private:
  std::size_t patience_;
  double best_metric_ = std::numeric_limits<double>::infinity();
  std::size_t best_epoch_ = 0;
  std::size_t since_improvement_ = 0;
  std::optional<Snapshot> best_;
};

}  // namespace emocert::nn
