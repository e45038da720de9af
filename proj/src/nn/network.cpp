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

#include "emocert/nn/network.hpp"

#include <variant>

#include "emocert/core/error.hpp"

namespace emocert::nn {
namespace {

using core::BasicTensor;

template <typename T>
void CheckBatch(const ModelSpec& spec, const BasicTensor<T>& batch) {
  Shape expected = {batch.rank() > 0 ? batch.dim(0) : 0};
  expected.insert(expected.end(), spec.input_shape.begin(),
                  spec.input_shape.end());
  if (batch.rank() != spec.input_shape.size() + 1 || batch.shape() != expected) {
    throw InvalidArgument("batch shape " + core::ShapeToString(batch.shape()) +
                          " does not match model input " +
                          core::ShapeToString(spec.input_shape));
  }
}

// Shared forward pass. `stats` receives running-stat updates in train mode
// and may alias `params`.
template <typename T>
ForwardResult<T> RunForward(const ModelSpec& spec, const ParameterSet<T>& params,
                            ParameterSet<T>* stats, const BasicTensor<T>& batch,
                            Mode mode, core::Rng* rng) {
  CheckBatch(spec, batch);
  const bool train = mode == Mode::kTrain;
  ForwardResult<T> result;
  result.cache.mode = mode;
  result.cache.arch = spec.arch;
  if (train) result.cache.layers.resize(spec.layers.size());

  BasicTensor<T> x = batch;
  for (std::size_t i = 0; i < spec.layers.size(); ++i) {
    const LayerSpec& layer = spec.layers[i];
    LayerCache<T>* cache = train ? &result.cache.layers[i] : nullptr;
    if (cache) cache->input_shape = x.shape();
    auto name = [&](std::string_view role) { return SlotName(i, layer, role); };

    if (const auto* c = std::get_if<Conv2d>(&layer)) {
      BasicTensor<T> y = kernels::Conv2dForward(
          x, params.at(name("weight")),
          c->bias ? &params.at(name("bias")) : nullptr, c->padding);
      if (cache) cache->input = std::move(x);
      x = std::move(y);
    } else if (const auto* b = std::get_if<BatchNorm>(&layer)) {
      const auto& gamma = params.at(name("gamma"));
      const auto& beta = params.at(name("beta"));
      if (train) {
        std::vector<double> mean, var;
        x = kernels::BatchNormTrainForward(x, gamma, beta, b->eps,
                                           cache->batch_norm, mean, var);
        if (stats) {
          auto& rm = stats->at(name("running_mean"));
          auto& rv = stats->at(name("running_var"));
          for (std::size_t ch = 0; ch < b->channels; ++ch) {
            rm[ch] = static_cast<T>((1.0 - b->momentum) * rm[ch] +
                                    b->momentum * mean[ch]);
            rv[ch] = static_cast<T>((1.0 - b->momentum) * rv[ch] +
                                    b->momentum * var[ch]);
          }
        }
      } else {
        x = kernels::BatchNormEvalForward(x, gamma, beta,
                                          params.at(name("running_mean")),
                                          params.at(name("running_var")), b->eps);
      }
    } else if (std::holds_alternative<Relu>(layer)) {
      BasicTensor<T> y = kernels::ReluForward(x);
      if (cache) cache->input = std::move(x);
      x = std::move(y);
    } else if (const auto* d = std::get_if<Dropout>(&layer)) {
      if (train && d->rate > 0.0) {
        if (!rng) throw InvalidArgument("train-mode dropout requires an rng");
        x = kernels::DropoutForward(x, d->rate, *rng, cache->mask);
      } else if (cache) {
        cache->mask = BasicTensor<T>(x.shape(), T{1});
      }
    } else if (const auto* p = std::get_if<MaxPool>(&layer)) {
      std::vector<std::uint32_t> argmax;
      x = kernels::MaxPoolForward(x, p->size, argmax);
      if (cache) cache->argmax = std::move(argmax);
    } else if (std::holds_alternative<GlobalAvgPool>(layer)) {
      x = kernels::GlobalAvgPoolForward(x);
    } else if (std::holds_alternative<Flatten>(layer)) {
      const std::size_t n = x.dim(0);
      x.Reshape({n, x.size() / std::max<std::size_t>(n, 1)});
    } else if (const auto* d = std::get_if<Dense>(&layer)) {
      BasicTensor<T> y = kernels::DenseForward(
          x, params.at(name("weight")),
          d->bias ? &params.at(name("bias")) : nullptr);
      if (cache) cache->input = std::move(x);
      x = std::move(y);
    }
  }
  result.probabilities = kernels::SoftmaxRows(x);
  result.outputs = std::move(x);
  return result;
}

}  // namespace

template <typename T>
ForwardResult<T> Forward(const ModelSpec& spec, ParameterSet<T>& params,
                         const BasicTensor<T>& batch, Mode mode, core::Rng* rng) {
  return RunForward(spec, params, &params, batch, mode, rng);
}

template <typename T>
ForwardResult<T> Evaluate(const ModelSpec& spec, const ParameterSet<T>& params,
                          const BasicTensor<T>& batch) {
  return RunForward<T>(spec, params, nullptr, batch, Mode::kEval, nullptr);
}

template <typename T>
ParameterSet<T> Backward(const ModelSpec& spec, const ParameterSet<T>& params,
                         const ActivationCache<T>& cache,
                         const BasicTensor<T>& grad_outputs,
                         BasicTensor<T>* grad_input) {
  if (cache.mode != Mode::kTrain || cache.arch != spec.arch ||
      cache.layers.size() != spec.layers.size()) {
    throw InvalidArgument(
        "activation cache does not match the model (train-mode forward required)");
  }
  ParameterSet<T> grads = params.ZerosLikeTrainable();
  BasicTensor<T> g = grad_outputs;
  for (std::size_t idx = spec.layers.size(); idx-- > 0;) {
    const LayerSpec& layer = spec.layers[idx];
    const LayerCache<T>& c = cache.layers[idx];
    auto name = [&](std::string_view role) { return SlotName(idx, layer, role); };
    const bool need_input_grad = idx > 0 || grad_input != nullptr;

    if (const auto* conv = std::get_if<Conv2d>(&layer)) {
      BasicTensor<T> dx;
      kernels::Conv2dBackward(c.input, params.at(name("weight")), conv->padding,
                              g, need_input_grad ? &dx : nullptr,
                              grads.at(name("weight")),
                              conv->bias ? &grads.at(name("bias")) : nullptr);
      g = std::move(dx);
    } else if (std::holds_alternative<BatchNorm>(layer)) {
      BasicTensor<T> dx;
      kernels::BatchNormBackward(g, c.batch_norm, params.at(name("gamma")), dx,
                                 grads.at(name("gamma")), grads.at(name("beta")));
      g = std::move(dx);
    } else if (std::holds_alternative<Relu>(layer)) {
      g = kernels::ReluBackward(c.input, g);
    } else if (std::holds_alternative<Dropout>(layer)) {
      g = kernels::DropoutBackward(c.mask, g);
    } else if (std::holds_alternative<MaxPool>(layer)) {
      g = kernels::MaxPoolBackward(c.input_shape, c.argmax, g);
    } else if (std::holds_alternative<GlobalAvgPool>(layer)) {
      g = kernels::GlobalAvgPoolBackward(c.input_shape, g);
    } else if (std::holds_alternative<Flatten>(layer)) {
      g.Reshape(c.input_shape);
    } else if (const auto* d = std::get_if<Dense>(&layer)) {
      BasicTensor<T> dx;
      kernels::DenseBackward(c.input, params.at(name("weight")), g,
                             need_input_grad ? &dx : nullptr,
                             grads.at(name("weight")),
                             d->bias ? &grads.at(name("bias")) : nullptr);
      g = std::move(dx);
    }
  }
  if (grad_input) *grad_input = std::move(g);
  return grads;
}

template <typename T>
std::vector<int> ArgmaxRows(const BasicTensor<T>& x) {
  std::vector<int> out(x.dim(0));
  const std::size_t k = x.dim(1);
  for (std::size_t r = 0; r < out.size(); ++r) {
    std::size_t best = 0;
    for (std::size_t j = 1; j < k; ++j) {
      if (x[r * k + j] > x[r * k + best]) best = j;
    }
    out[r] = static_cast<int>(best);
  }
  return out;
}

Model BuildModel(ArchId arch, std::uint64_t seed) {
  Model model{CanonicalSpec(arch), {}};
  ValidateSpec(model.spec);
  model.params = InitParameters<float>(model.spec, seed);
  return model;
}

#define EMOCERT_INSTANTIATE_NETWORK(T)                                          \
  template ForwardResult<T> Forward(const ModelSpec&, ParameterSet<T>&,         \
                                    const BasicTensor<T>&, Mode, core::Rng*);   \
  template ForwardResult<T> Evaluate(const ModelSpec&, const ParameterSet<T>&,  \
                                     const BasicTensor<T>&);                    \
  template ParameterSet<T> Backward(const ModelSpec&, const ParameterSet<T>&,   \
                                    const ActivationCache<T>&,                  \
                                    const BasicTensor<T>&, BasicTensor<T>*);    \
  template std::vector<int> ArgmaxRows(const BasicTensor<T>&);

EMOCERT_INSTANTIATE_NETWORK(float)
EMOCERT_INSTANTIATE_NETWORK(double)

#undef EMOCERT_INSTANTIATE_NETWORK

}  // namespace emocert::nn
