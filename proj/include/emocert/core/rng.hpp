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

#include <cstdint>
#include <span>
#include <string_view>
#include <utility>

namespace emocert::core {

// SplitMix64 finalizer. Used for seed expansion and seed derivation.
std::uint64_t SplitMix64(std::uint64_t& state);
std::uint64_t Mix64(std::uint64_t value);

// 64-bit FNV-1a over the bytes of `text`.
std::uint64_t Fnv1a64(std::string_view text);

// Child seed for task `task_id` of a generator seeded with `parent_seed`:
// Mix64(parent_seed ^ Mix64(task_id + 0x9e3779b97f4a7c15)).
std::uint64_t DeriveSeed(std::uint64_t parent_seed, std::uint64_t task_id);
std::uint64_t DeriveSeed(std::uint64_t parent_seed, std::string_view task);

// xoshiro256** with its state expanded from the seed by SplitMix64, exactly
// as in the reference implementation by Blackman and Vigna. The integer
// stream is identical on every platform; floating-point draws are derived
// from it with the fixed recipes documented on each method.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0);

  std::uint64_t seed() const { return seed_; }

  std::uint64_t NextU64();

  // (NextU64() >> 11) * 2^-53, in [0, 1).
  double Uniform();

  // lo + (hi - lo) * Uniform(). Throws InvalidArgument unless lo < hi.
  double Uniform(double lo, double hi);

  // Box-Muller, cosine branch, two uniforms per call:
  // mean + sigma * sqrt(-2 ln(1 - u1)) * cos(2 pi u2).
  // Throws InvalidArgument when sigma < 0.
  double Gaussian(double mean, double sigma);

  // Unbiased integer in [0, n) by Lemire's multiply-and-reject method.
  std::uint64_t UniformIndex(std::uint64_t n);

  // Independent generator for a sub-task.
  Rng Split(std::uint64_t task_id) const { return Rng(DeriveSeed(seed_, task_id)); }

 private:
  std::uint64_t seed_;
  std::uint64_t state_[4];
};

// Fisher-Yates shuffle driven by Rng::UniformIndex. std::shuffle is not used
// because its draw pattern is implementation-defined.
template <typename T>
void Shuffle(std::span<T> items, Rng& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng.UniformIndex(i));
    using std::swap;
    swap(items[i - 1], items[j]);
  }
}

}  // namespace emocert::core
