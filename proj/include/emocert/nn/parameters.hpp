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

#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "emocert/core/error.hpp"
#include "emocert/core/rng.hpp"
#include "emocert/core/tensor.hpp"
#include "emocert/nn/model_spec.hpp"

namespace emocert::nn {

template <typename T>
struct NamedTensor {
  std::string name;
  core::BasicTensor<T> value;
  bool trainable = true;

  bool operator==(const NamedTensor&) const = default;
};

// Ordered name -> tensor map. Also used for gradient sets, which hold only
// the trainable entries.
template <typename T>
class ParameterSet {
 public:
  void Add(std::string name, core::BasicTensor<T> value, bool trainable) {
    if (Find(name) != nullptr) {
      throw InvalidArgument("duplicate parameter " + name);
    }
    entries_.push_back({std::move(name), std::move(value), trainable});
  }

  core::BasicTensor<T>* Find(std::string_view name) {
    for (auto& e : entries_) {
      if (e.name == name) return &e.value;
    }
    return nullptr;
  }
  const core::BasicTensor<T>* Find(std::string_view name) const {
    return const_cast<ParameterSet*>(this)->Find(name);
  }

  core::BasicTensor<T>& at(std::string_view name) {
    if (auto* t = Find(name)) return *t;
    throw InvalidArgument("no parameter named " + std::string(name));
  }
  const core::BasicTensor<T>& at(std::string_view name) const {
    return const_cast<ParameterSet*>(this)->at(name);
  }

  std::vector<NamedTensor<T>>& entries() { return entries_; }
  const std::vector<NamedTensor<T>>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }

  std::size_t TrainableScalars() const {
    std::size_t n = 0;
    for (const auto& e : entries_) {
      if (e.trainable) n += e.value.size();
    }
    return n;
  }

  // Zero tensors shaped like every trainable entry.
  ParameterSet ZerosLikeTrainable() const {
    ParameterSet out;
    for (const auto& e : entries_) {
      if (e.trainable) out.Add(e.name, core::BasicTensor<T>(e.value.shape()), true);
    }
    return out;
  }

  template <typename U>
  ParameterSet<U> Cast() const {
    ParameterSet<U> out;
    for (const auto& e : entries_) {
      out.Add(e.name, e.value.template Cast<U>(), e.trainable);
    }
    return out;
  }

  bool operator==(const ParameterSet&) const = default;

 private:
  std::vector<NamedTensor<T>> entries_;
};

// Weights: uniform in +-sqrt(6 / fan_in) (He-uniform), drawn from
// Rng(DeriveSeed(seed, slot name)) in row-major order. Biases and shifts
// start at 0, batch-norm scales and running variances at 1.
template <typename T>
ParameterSet<T> InitParameters(const ModelSpec& spec, std::uint64_t seed) {
  ParameterSet<T> params;
  for (const ParamSlot& slot : ParameterSlots(spec)) {
    core::BasicTensor<T> value(slot.shape);
    switch (slot.init) {
      case InitKind::kZero:
        break;
      case InitKind::kOne:
        value.Fill(T{1});
        break;
      case InitKind::kHeUniform: {
        core::Rng rng(core::DeriveSeed(seed, slot.name));
        const double bound = std::sqrt(6.0 / static_cast<double>(slot.fan_in));
        for (auto& v : value.data()) v = static_cast<T>(rng.Uniform(-bound, bound));
        break;
      }
    }
    params.Add(slot.name, std::move(value), slot.trainable);
  }
  return params;
}

// Canonical network with float storage.
struct Model {
  ModelSpec spec;
  ParameterSet<float> params;
};

Model BuildModel(ArchId arch, std::uint64_t seed = 0);

}  // namespace emocert::nn
