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

#include "emocert/nn/layers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Core>

#include "emocert/core/error.hpp"

namespace emocert::nn::kernels {
namespace {

using core::AlignedVector;

template <typename T>
using RowMat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename T>
using MatMap = Eigen::Map<RowMat<T>>;
template <typename T>
using ConstMatMap = Eigen::Map<const RowMat<T>>;

struct ConvGeometry {
  std::size_t n, c, h, w, o, k, pad, ho, wo;

  std::size_t patch() const { return c * k * k; }
  std::size_t plane() const { return ho * wo; }
};

template <typename T>
ConvGeometry Geometry(const Tensor<T>& x, const Tensor<T>& weight,
                      std::size_t pad) {
  if (x.rank() != 4 || weight.rank() != 4 || weight.dim(1) != x.dim(1) ||
      weight.dim(2) != weight.dim(3)) {
    throw InvalidArgument("conv2d shape mismatch: input " +
                          core::ShapeToString(x.shape()) + ", weight " +
                          core::ShapeToString(weight.shape()));
  }
  ConvGeometry g{x.dim(0), x.dim(1), x.dim(2), x.dim(3), weight.dim(0),
                 weight.dim(2), pad, 0, 0};
  if (g.h + 2 * pad < g.k || g.w + 2 * pad < g.k) {
    throw InvalidArgument("conv2d kernel larger than padded input");
  }
  g.ho = g.h + 2 * pad - g.k + 1;
  g.wo = g.w + 2 * pad - g.k + 1;
  return g;
}

// cols[(ch*k + ki)*k + kj][oy*wo + ox] = x[ch][oy+ki-pad][ox+kj-pad], 0 outside.
template <typename T>
void Im2Col(const T* x, const ConvGeometry& g, T* cols) {
  const auto pad = static_cast<std::ptrdiff_t>(g.pad);
  for (std::size_t ch = 0; ch < g.c; ++ch) {
    const T* plane = x + ch * g.h * g.w;
    for (std::size_t ki = 0; ki < g.k; ++ki) {
      for (std::size_t kj = 0; kj < g.k; ++kj) {
        T* dst = cols + ((ch * g.k + ki) * g.k + kj) * g.plane();
        for (std::size_t oy = 0; oy < g.ho; ++oy) {
          const std::ptrdiff_t iy = static_cast<std::ptrdiff_t>(oy + ki) - pad;
          T* row = dst + oy * g.wo;
          if (iy < 0 || iy >= static_cast<std::ptrdiff_t>(g.h)) {
            std::fill(row, row + g.wo, T{0});
            continue;
          }
          const T* src = plane + static_cast<std::size_t>(iy) * g.w;
          for (std::size_t ox = 0; ox < g.wo; ++ox) {
            const std::ptrdiff_t ix = static_cast<std::ptrdiff_t>(ox + kj) - pad;
            row[ox] = (ix < 0 || ix >= static_cast<std::ptrdiff_t>(g.w))
                          ? T{0}
                          : src[ix];
          }
        }
      }
    }
  }
}

template <typename T>
void Col2ImAdd(const T* cols, const ConvGeometry& g, T* dx) {
  const auto pad = static_cast<std::ptrdiff_t>(g.pad);
  for (std::size_t ch = 0; ch < g.c; ++ch) {
    T* plane = dx + ch * g.h * g.w;
    for (std::size_t ki = 0; ki < g.k; ++ki) {
      for (std::size_t kj = 0; kj < g.k; ++kj) {
        const T* src = cols + ((ch * g.k + ki) * g.k + kj) * g.plane();
        for (std::size_t oy = 0; oy < g.ho; ++oy) {
          const std::ptrdiff_t iy = static_cast<std::ptrdiff_t>(oy + ki) - pad;
          if (iy < 0 || iy >= static_cast<std::ptrdiff_t>(g.h)) continue;
          T* dst = plane + static_cast<std::size_t>(iy) * g.w;
          const T* row = src + oy * g.wo;
          for (std::size_t ox = 0; ox < g.wo; ++ox) {
            const std::ptrdiff_t ix = static_cast<std::ptrdiff_t>(ox + kj) - pad;
            if (ix >= 0 && ix < static_cast<std::ptrdiff_t>(g.w)) dst[ix] += row[ox];
          }
        }
      }
    }
  }
}

// Elements per channel and channel count of an [N, C, ...] tensor.
struct ChannelLayout {
  std::size_t n, c, s;
};

template <typename T>
ChannelLayout Channels(const Tensor<T>& x) {
  if (x.rank() < 2) throw InvalidArgument("batch_norm expects [N, C, ...]");
  std::size_t s = 1;
  for (std::size_t d = 2; d < x.rank(); ++d) s *= x.dim(d);
  return {x.dim(0), x.dim(1), s};
}

}  // namespace

template <typename T>
Tensor<T> Conv2dForward(const Tensor<T>& x, const Tensor<T>& weight,
                        const Tensor<T>* bias, std::size_t padding) {
  const ConvGeometry g = Geometry(x, weight, padding);
  Tensor<T> y({g.n, g.o, g.ho, g.wo});
  AlignedVector<T> cols(g.patch() * g.plane());
  ConstMatMap<T> w(weight.raw(), g.o, g.patch());
  ConstMatMap<T> col_mat(cols.data(), g.patch(), g.plane());
  for (std::size_t n = 0; n < g.n; ++n) {
    Im2Col(x.raw() + n * g.c * g.h * g.w, g, cols.data());
    MatMap<T> out(y.raw() + n * g.o * g.plane(), g.o, g.plane());
    out.noalias() = w * col_mat;
    if (bias) {
      for (std::size_t o = 0; o < g.o; ++o) out.row(o).array() += (*bias)[o];
    }
  }
  return y;
}

template <typename T>
void Conv2dBackward(const Tensor<T>& x, const Tensor<T>& weight,
                    std::size_t padding, const Tensor<T>& dy, Tensor<T>* dx,
                    Tensor<T>& dweight, Tensor<T>* dbias) {
  const ConvGeometry g = Geometry(x, weight, padding);
  if (dy.shape() != core::Shape{g.n, g.o, g.ho, g.wo} ||
      dweight.shape() != weight.shape()) {
    throw InvalidArgument("conv2d backward shape mismatch");
  }
  if (dx) *dx = Tensor<T>(x.shape());
  AlignedVector<T> cols(g.patch() * g.plane());
  AlignedVector<T> dcols(dx ? g.patch() * g.plane() : 0);
  ConstMatMap<T> w(weight.raw(), g.o, g.patch());
  MatMap<T> dw(dweight.raw(), g.o, g.patch());
  ConstMatMap<T> col_mat(cols.data(), g.patch(), g.plane());
  for (std::size_t n = 0; n < g.n; ++n) {
    ConstMatMap<T> grad(dy.raw() + n * g.o * g.plane(), g.o, g.plane());
    Im2Col(x.raw() + n * g.c * g.h * g.w, g, cols.data());
    dw.noalias() += grad * col_mat.transpose();
    if (dbias) {
      for (std::size_t o = 0; o < g.o; ++o) (*dbias)[o] += grad.row(o).sum();
    }
    if (dx) {
      MatMap<T> dcol_mat(dcols.data(), g.patch(), g.plane());
      dcol_mat.noalias() = w.transpose() * grad;
      Col2ImAdd(dcols.data(), g, dx->raw() + n * g.c * g.h * g.w);
    }
  }
}

template <typename T>
Tensor<T> BatchNormTrainForward(const Tensor<T>& x, const Tensor<T>& gamma,
                                const Tensor<T>& beta, double eps,
                                BatchNormSaved<T>& saved,
                                std::vector<double>& batch_mean,
                                std::vector<double>& batch_var) {
  const ChannelLayout l = Channels(x);
  if (gamma.size() != l.c || beta.size() != l.c) {
    throw InvalidArgument("batch_norm parameter size mismatch");
  }
  const double m = static_cast<double>(l.n * l.s);
  Tensor<T> y(x.shape());
  saved.xhat = Tensor<T>(x.shape());
  saved.inv_std.assign(l.c, 0.0);
  batch_mean.assign(l.c, 0.0);
  batch_var.assign(l.c, 0.0);
  for (std::size_t ch = 0; ch < l.c; ++ch) {
    double sum = 0.0;
    for (std::size_t n = 0; n < l.n; ++n) {
      const T* p = x.raw() + (n * l.c + ch) * l.s;
      for (std::size_t i = 0; i < l.s; ++i) sum += p[i];
    }
    const double mean = sum / m;
    double sq = 0.0;
    for (std::size_t n = 0; n < l.n; ++n) {
      const T* p = x.raw() + (n * l.c + ch) * l.s;
      for (std::size_t i = 0; i < l.s; ++i) {
        const double d = p[i] - mean;
        sq += d * d;
      }
    }
    const double var = sq / m;
    const double inv_std = 1.0 / std::sqrt(var + eps);
    saved.inv_std[ch] = inv_std;
    batch_mean[ch] = mean;
    batch_var[ch] = m > 1.0 ? sq / (m - 1.0) : var;
    const double gm = gamma[ch];
    const double bt = beta[ch];
    for (std::size_t n = 0; n < l.n; ++n) {
      const std::size_t off = (n * l.c + ch) * l.s;
      for (std::size_t i = 0; i < l.s; ++i) {
        const double xh = (x[off + i] - mean) * inv_std;
        saved.xhat[off + i] = static_cast<T>(xh);
        y[off + i] = static_cast<T>(gm * xh + bt);
      }
    }
  }
  return y;
}

template <typename T>
Tensor<T> BatchNormEvalForward(const Tensor<T>& x, const Tensor<T>& gamma,
                               const Tensor<T>& beta,
                               const Tensor<T>& running_mean,
                               const Tensor<T>& running_var, double eps) {
  const ChannelLayout l = Channels(x);
  Tensor<T> y(x.shape());
  for (std::size_t ch = 0; ch < l.c; ++ch) {
    const double scale = gamma[ch] / std::sqrt(double(running_var[ch]) + eps);
    const double shift = beta[ch] - scale * running_mean[ch];
    for (std::size_t n = 0; n < l.n; ++n) {
      const std::size_t off = (n * l.c + ch) * l.s;
      for (std::size_t i = 0; i < l.s; ++i) {
        y[off + i] = static_cast<T>(scale * x[off + i] + shift);
      }
    }
  }
  return y;
}

template <typename T>
void BatchNormBackward(const Tensor<T>& dy, const BatchNormSaved<T>& saved,
                       const Tensor<T>& gamma, Tensor<T>& dx,
                       Tensor<T>& dgamma, Tensor<T>& dbeta) {
  const ChannelLayout l = Channels(dy);
  const double m = static_cast<double>(l.n * l.s);
  dx = Tensor<T>(dy.shape());
  for (std::size_t ch = 0; ch < l.c; ++ch) {
    double sum_dy = 0.0;
    double sum_dy_xhat = 0.0;
    for (std::size_t n = 0; n < l.n; ++n) {
      const std::size_t off = (n * l.c + ch) * l.s;
      for (std::size_t i = 0; i < l.s; ++i) {
        sum_dy += dy[off + i];
        sum_dy_xhat += double(dy[off + i]) * saved.xhat[off + i];
      }
    }
    dgamma[ch] += static_cast<T>(sum_dy_xhat);
    dbeta[ch] += static_cast<T>(sum_dy);
    const double k = gamma[ch] * saved.inv_std[ch] / m;
    for (std::size_t n = 0; n < l.n; ++n) {
      const std::size_t off = (n * l.c + ch) * l.s;
      for (std::size_t i = 0; i < l.s; ++i) {
        dx[off + i] = static_cast<T>(
            k * (m * dy[off + i] - sum_dy - saved.xhat[off + i] * sum_dy_xhat));
      }
    }
  }
}

template <typename T>
Tensor<T> ReluForward(const Tensor<T>& x) {
  Tensor<T> y(x.shape());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[i] > T{0} ? x[i] : T{0};
  return y;
}

template <typename T>
Tensor<T> ReluBackward(const Tensor<T>& x, const Tensor<T>& dy) {
  Tensor<T> dx(x.shape());
  for (std::size_t i = 0; i < x.size(); ++i) dx[i] = x[i] > T{0} ? dy[i] : T{0};
  return dx;
}

template <typename T>
Tensor<T> DropoutForward(const Tensor<T>& x, double rate, core::Rng& rng,
                         Tensor<T>& mask) {
  mask = Tensor<T>(x.shape(), T{1});
  if (rate > 0.0) {
    const T keep_scale = static_cast<T>(1.0 / (1.0 - rate));
    for (auto& m : mask.data()) m = rng.Uniform() < rate ? T{0} : keep_scale;
  }
  Tensor<T> y(x.shape());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[i] * mask[i];
  return y;
}

template <typename T>
Tensor<T> DropoutBackward(const Tensor<T>& mask, const Tensor<T>& dy) {
  Tensor<T> dx(dy.shape());
  for (std::size_t i = 0; i < dy.size(); ++i) dx[i] = dy[i] * mask[i];
  return dx;
}

template <typename T>
Tensor<T> MaxPoolForward(const Tensor<T>& x, std::size_t size,
                         std::vector<std::uint32_t>& argmax) {
  if (x.rank() != 4 || size == 0 || x.dim(2) < size || x.dim(3) < size) {
    throw InvalidArgument("max_pool shape mismatch");
  }
  const std::size_t n = x.dim(0), c = x.dim(1), h = x.dim(2), w = x.dim(3);
  const std::size_t ho = h / size, wo = w / size;
  Tensor<T> y({n, c, ho, wo});
  argmax.assign(y.size(), 0);
  std::size_t out = 0;
  for (std::size_t plane = 0; plane < n * c; ++plane) {
    const std::size_t base = plane * h * w;
    for (std::size_t oy = 0; oy < ho; ++oy) {
      for (std::size_t ox = 0; ox < wo; ++ox, ++out) {
        std::size_t best = base + (oy * size) * w + ox * size;
        for (std::size_t dy = 0; dy < size; ++dy) {
          for (std::size_t dx = 0; dx < size; ++dx) {
            const std::size_t idx = base + (oy * size + dy) * w + ox * size + dx;
            if (x[idx] > x[best]) best = idx;
          }
        }
        y[out] = x[best];
        argmax[out] = static_cast<std::uint32_t>(best);
      }
    }
  }
  return y;
}

template <typename T>
Tensor<T> MaxPoolBackward(const core::Shape& input_shape,
                          const std::vector<std::uint32_t>& argmax,
                          const Tensor<T>& dy) {
  Tensor<T> dx(input_shape);
  for (std::size_t i = 0; i < dy.size(); ++i) dx[argmax[i]] += dy[i];
  return dx;
}

template <typename T>
Tensor<T> GlobalAvgPoolForward(const Tensor<T>& x) {
  if (x.rank() != 4) throw InvalidArgument("global_avg_pool expects rank 4");
  const std::size_t planes = x.dim(0) * x.dim(1);
  const std::size_t area = x.dim(2) * x.dim(3);
  Tensor<T> y({x.dim(0), x.dim(1)});
  for (std::size_t p = 0; p < planes; ++p) {
    double sum = 0.0;
    for (std::size_t i = 0; i < area; ++i) sum += x[p * area + i];
    y[p] = static_cast<T>(sum / static_cast<double>(area));
  }
  return y;
}

template <typename T>
Tensor<T> GlobalAvgPoolBackward(const core::Shape& input_shape,
                                const Tensor<T>& dy) {
  Tensor<T> dx(input_shape);
  const std::size_t area = input_shape[2] * input_shape[3];
  const T scale = static_cast<T>(1.0 / static_cast<double>(area));
  for (std::size_t p = 0; p < dy.size(); ++p) {
    const T g = dy[p] * scale;
    for (std::size_t i = 0; i < area; ++i) dx[p * area + i] = g;
  }
  return dx;
}

template <typename T>
Tensor<T> DenseForward(const Tensor<T>& x, const Tensor<T>& weight,
                       const Tensor<T>* bias) {
  if (x.rank() != 2 || weight.rank() != 2 || x.dim(1) != weight.dim(1)) {
    throw InvalidArgument("dense shape mismatch: input " +
                          core::ShapeToString(x.shape()) + ", weight " +
                          core::ShapeToString(weight.shape()));
  }
  const std::size_t n = x.dim(0), in = x.dim(1), out = weight.dim(0);
  Tensor<T> y({n, out});
  MatMap<T> ym(y.raw(), n, out);
  ym.noalias() = ConstMatMap<T>(x.raw(), n, in) *
                 ConstMatMap<T>(weight.raw(), out, in).transpose();
  if (bias) {
    for (std::size_t r = 0; r < n; ++r) {
      for (std::size_t o = 0; o < out; ++o) ym(r, o) += (*bias)[o];
    }
  }
  return y;
}

template <typename T>
void DenseBackward(const Tensor<T>& x, const Tensor<T>& weight,
                   const Tensor<T>& dy, Tensor<T>* dx, Tensor<T>& dweight,
                   Tensor<T>* dbias) {
  const std::size_t n = x.dim(0), in = x.dim(1), out = weight.dim(0);
  if (dy.shape() != core::Shape{n, out}) {
    throw InvalidArgument("dense backward shape mismatch");
  }
  ConstMatMap<T> g(dy.raw(), n, out);
  ConstMatMap<T> xm(x.raw(), n, in);
  MatMap<T>(dweight.raw(), out, in).noalias() += g.transpose() * xm;
  if (dbias) {
    for (std::size_t o = 0; o < out; ++o) (*dbias)[o] += g.col(o).sum();
  }
  if (dx) {
    *dx = Tensor<T>({n, in});
    MatMap<T>(dx->raw(), n, in).noalias() =
        g * ConstMatMap<T>(weight.raw(), out, in);
  }
}

template <typename T>
Tensor<T> SoftmaxRows(const Tensor<T>& x) {
  if (x.rank() != 2) throw InvalidArgument("softmax expects [N, K]");
  const std::size_t n = x.dim(0), k = x.dim(1);
  Tensor<T> p(x.shape());
  for (std::size_t r = 0; r < n; ++r) {
    const T* row = x.raw() + r * k;
    const double top = *std::max_element(row, row + k);
    double total = 0.0;
    for (std::size_t j = 0; j < k; ++j) total += std::exp(row[j] - top);
    for (std::size_t j = 0; j < k; ++j) {
      p[r * k + j] = static_cast<T>(std::exp(row[j] - top) / total);
    }
  }
  return p;
}

#define EMOCERT_INSTANTIATE_KERNELS(T)                                         \
  template Tensor<T> Conv2dForward(const Tensor<T>&, const Tensor<T>&,         \
                                   const Tensor<T>*, std::size_t);             \
  template void Conv2dBackward(const Tensor<T>&, const Tensor<T>&,             \
                               std::size_t, const Tensor<T>&, Tensor<T>*,      \
                               Tensor<T>&, Tensor<T>*);                        \
  template Tensor<T> BatchNormTrainForward(                                    \
      const Tensor<T>&, const Tensor<T>&, const Tensor<T>&, double,            \
      BatchNormSaved<T>&, std::vector<double>&, std::vector<double>&);         \
  template Tensor<T> BatchNormEvalForward(const Tensor<T>&, const Tensor<T>&,  \
                                          const Tensor<T>&, const Tensor<T>&,  \
                                          const Tensor<T>&, double);           \
  template void BatchNormBackward(const Tensor<T>&, const BatchNormSaved<T>&,  \
                                  const Tensor<T>&, Tensor<T>&, Tensor<T>&,    \
                                  Tensor<T>&);                                 \
  template Tensor<T> ReluForward(const Tensor<T>&);                            \
  template Tensor<T> ReluBackward(const Tensor<T>&, const Tensor<T>&);         \
  template Tensor<T> DropoutForward(const Tensor<T>&, double, core::Rng&,      \
                                    Tensor<T>&);                               \
  template Tensor<T> DropoutBackward(const Tensor<T>&, const Tensor<T>&);      \
  template Tensor<T> MaxPoolForward(const Tensor<T>&, std::size_t,             \
                                    std::vector<std::uint32_t>&);              \
  template Tensor<T> MaxPoolBackward(const core::Shape&,                       \
                                     const std::vector<std::uint32_t>&,        \
                                     const Tensor<T>&);                        \
  template Tensor<T> GlobalAvgPoolForward(const Tensor<T>&);                   \
  template Tensor<T> GlobalAvgPoolBackward(const core::Shape&,                 \
                                           const Tensor<T>&);                  \
  template Tensor<T> DenseForward(const Tensor<T>&, const Tensor<T>&,          \
                                  const Tensor<T>*);                           \
  template void DenseBackward(const Tensor<T>&, const Tensor<T>&,              \
                              const Tensor<T>&, Tensor<T>*, Tensor<T>&,        \
                              Tensor<T>*);                                     \
  template Tensor<T> SoftmaxRows(const Tensor<T>&);

EMOCERT_INSTANTIATE_KERNELS(float)
EMOCERT_INSTANTIATE_KERNELS(double)

#undef EMOCERT_INSTANTIATE_KERNELS

}  // namespace emocert::nn::kernels
