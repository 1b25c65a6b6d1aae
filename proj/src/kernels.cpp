/*
 * Copyright 2026 The zdce Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *    http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "zdce/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace zdce::kernels {

namespace {

// Output pixels per register tile along x. Two vector registers' worth.
constexpr int kLanes = 64 / static_cast<int>(sizeof(Real));
// Output channels per register tile.
constexpr int kOutBlock = 4;
// Rows and columns per parallel job. A job's input window (all input
// channels) should stay in L2 while every output-channel block reads it.
constexpr int kRowBlock = 8;
constexpr int kColBlock = 8 * kLanes;
// Lanes for the weight-gradient reduction (9 accumulators live at once).
constexpr int kGradLanes = 32 / static_cast<int>(sizeof(Real));

int round_up(int v, int m) { return (v + m - 1) / m * m; }

// Zero-padded copy: each plane becomes (h + 2) x stride with the image at
// (1, 1) and zeros elsewhere. stride leaves room for a full lane tile.
// The planes live in caller-provided storage.
struct PaddedPlanes {
  int planes = 0;
  int h = 0;
  int w = 0;
  int stride = 0;
  std::size_t plane_size = 0;
  const Real* base = nullptr;

  const Real* plane(int p) const { return base + p * plane_size; }
};

// Pads the channel concatenation of srcs (all (N, *, H, W)) into storage.
PaddedPlanes pad_planes(std::span<const Tensor* const> srcs, int lanes,
                        std::vector<Real>& storage) {
  const Shape& s0 = srcs[0]->shape();
  int channels = 0;
  for (const Tensor* t : srcs) {
    const Shape& s = t->shape();
    if (s.n != s0.n || s.h != s0.h || s.w != s0.w)
      throw ShapeError("conv3x3: inputs " + s0.str() + " and " + s.str() +
                       " cannot be concatenated");
    channels += s.c;
  }
  PaddedPlanes p;
  p.planes = s0.n * channels;
  p.h = s0.h;
  p.w = s0.w;
  p.stride = round_up(p.w, lanes) + 2;
  p.plane_size = static_cast<std::size_t>(p.h + 2) * p.stride;
  storage.assign(p.plane_size * p.planes, Real(0));
  p.base = storage.data();
#pragma omp parallel for schedule(static)
  for (int q = 0; q < p.planes; ++q) {
    const int n = q / channels;
    int c = q % channels;
    std::size_t k = 0;
    while (c >= srcs[k]->channels())
      c -= srcs[k++]->channels();
    const Real* src = srcs[k]->plane(n, c);
    Real* dst = storage.data() + q * p.plane_size;
    for (int y = 0; y < p.h; ++y)
      std::memcpy(dst + (y + 1) * p.stride + 1, src + y * p.w,
                  sizeof(Real) * p.w);
  }
  return p;
}

PaddedPlanes pad_planes(const Tensor& t, int lanes,
                        std::vector<Real>& storage) {
  const Tensor* one[1] = {&t};
  return pad_planes(one, lanes, storage);
}

inline Real activate(Real v, Activation act) {
  switch (act) {
  case Activation::relu:
    return v > Real(0) ? v : Real(0);
  case Activation::tanh:
    return std::tanh(v);
  default:
    return v;
  }
}

// Computes OB output channels for rows [y0, y1), columns [x_begin, x_end) of
// one batch item. x_begin is a multiple of kLanes.
// in: padded planes of the batch item (in_c consecutive planes).
// w: kernel rows for the first of the OB channels, laid out [OB][in_c][9].
template <int OB>
void conv_tile(const PaddedPlanes& in, int first_plane, int in_c,
               const Real* w, const Real* bias, Real* out, int y0, int y1,
               int x_begin, int x_end, bool accumulate, Activation act) {
  const int width = in.w;
  const int stride = in.stride;
  const std::size_t out_plane = static_cast<std::size_t>(in.h) * width;
  const std::size_t wstride = static_cast<std::size_t>(in_c) * 9;

  for (int y = y0; y < y1; ++y) {
    for (int x0 = x_begin; x0 < x_end; x0 += kLanes) {
      Real acc[OB][kLanes];
      for (int ob = 0; ob < OB; ++ob) {
        const Real b = bias ? bias[ob] : Real(0);
        for (int l = 0; l < kLanes; ++l)
          acc[ob][l] = b;
      }
      for (int c = 0; c < in_c; ++c) {
        const Real* base = in.plane(first_plane + c) + y * stride + x0;
        const Real* wc = w + c * 9;
        for (int ky = 0; ky < 3; ++ky) {
          for (int kx = 0; kx < 3; ++kx) {
            const Real* src = base + ky * stride + kx;
            for (int ob = 0; ob < OB; ++ob) {
              const Real wv = wc[ob * wstride + ky * 3 + kx];
#pragma omp simd
              for (int l = 0; l < kLanes; ++l)
                acc[ob][l] += wv * src[l];
            }
          }
        }
      }
      const int n = std::min(kLanes, x_end - x0);
      for (int ob = 0; ob < OB; ++ob) {
        Real* dst = out + ob * out_plane + static_cast<std::size_t>(y) * width +
                    x0;
        if (accumulate) {
          for (int l = 0; l < n; ++l)
            dst[l] += acc[ob][l];
        } else if (act == Activation::none) {
          for (int l = 0; l < n; ++l)
            dst[l] = acc[ob][l];
        } else {
          for (int l = 0; l < n; ++l)
            dst[l] = activate(acc[ob][l], act);
        }
      }
    }
  }
}

// Shared driver: out(N, O, H, W) (=|+=) conv(in, kernel) + bias.
void conv_driver(const PaddedPlanes& in, int batch, int in_c, int out_c,
                 const Real* kernel, const Real* bias, Real* out,
                 bool accumulate, Activation act = Activation::none) {
  const int h = in.h;
  const int oblocks = (out_c + kOutBlock - 1) / kOutBlock;
  const int rblocks = (h + kRowBlock - 1) / kRowBlock;
  const int cblocks = (in.w + kColBlock - 1) / kColBlock;
  const int tiles = rblocks * cblocks;
  const int jobs = batch * tiles * oblocks;
  const std::size_t out_plane = static_cast<std::size_t>(h) * in.w;

  // Output-channel blocks vary fastest so consecutive jobs share an input
  // window.
#pragma omp parallel for schedule(dynamic)
  for (int job = 0; job < jobs; ++job) {
    const int ob = job % oblocks;
    const int tile = (job / oblocks) % tiles;
    const int n = job / (oblocks * tiles);
    const int o = ob * kOutBlock;
    const int y0 = (tile / cblocks) * kRowBlock;
    const int y1 = std::min(h, y0 + kRowBlock);
    const int x0 = (tile % cblocks) * kColBlock;
    const int x1 = std::min(in.w, x0 + kColBlock);
    const Real* w = kernel + static_cast<std::size_t>(o) * in_c * 9;
    const Real* b = bias ? bias + o : nullptr;
    Real* dst = out + (static_cast<std::size_t>(n) * out_c + o) * out_plane;
    const int first = n * in_c;
    switch (std::min(kOutBlock, out_c - o)) {
    case 4:
      conv_tile<4>(in, first, in_c, w, b, dst, y0, y1, x0, x1, accumulate, act);
      break;
    case 3:
      conv_tile<3>(in, first, in_c, w, b, dst, y0, y1, x0, x1, accumulate, act);
      break;
    case 2:
      conv_tile<2>(in, first, in_c, w, b, dst, y0, y1, x0, x1, accumulate, act);
      break;
    default:
      conv_tile<1>(in, first, in_c, w, b, dst, y0, y1, x0, x1, accumulate, act);
      break;
    }
  }
}

void check_conv_shapes(const Tensor& input, const Tensor& kernel) {
  const Shape& k = kernel.shape();
  if (k.h != 3 || k.w != 3)
    throw ShapeError("conv3x3: kernel must be (O, C, 3, 3), got " + k.str());
  if (k.c != input.channels())
    throw ShapeError("conv3x3: kernel expects " + std::to_string(k.c) +
                     " input channels, input has " +
                     std::to_string(input.channels()));
}

} // namespace

Tensor conv3x3(const Tensor& input, const Tensor& kernel, const Tensor* bias) {
  check_conv_shapes(input, kernel);
  const int out_c = kernel.batch();
  if (bias && static_cast<int>(bias->size()) != out_c)
    throw ShapeError("conv3x3: bias length " + std::to_string(bias->size()) +
                     " does not match " + std::to_string(out_c) +
                     " output channels");
  Tensor out(Shape{input.batch(), out_c, input.height(), input.width()});
  if (out.empty())
    return out;
  std::vector<Real> storage;
  const PaddedPlanes padded = pad_planes(input, kLanes, storage);
  conv_driver(padded, input.batch(), input.channels(), out_c, kernel.ptr(),
              bias ? bias->ptr() : nullptr, out.ptr(), false);
  return out;
}

Tensor conv3x3_fused(std::span<const Tensor* const> inputs,
                     const Tensor& kernel, const Tensor* bias, Activation act,
                     std::vector<Real>& scratch) {
  if (inputs.empty())
    throw ShapeError("conv3x3_fused: no inputs");
  int in_c = 0;
  for (const Tensor* t : inputs)
    in_c += t->channels();
  const Shape& k = kernel.shape();
  if (k.h != 3 || k.w != 3 || k.c != in_c)
    throw ShapeError("conv3x3_fused: kernel " + k.str() + " for " +
                     std::to_string(in_c) + " input channels");
  const int out_c = k.n;
  if (bias && static_cast<int>(bias->size()) != out_c)
    throw ShapeError("conv3x3_fused: bias length does not match kernel");
  const Shape& s = inputs[0]->shape();
  const PaddedPlanes padded = pad_planes(inputs, kLanes, scratch);
  Tensor out(Shape{s.n, out_c, s.h, s.w});
  if (out.empty())
    return out;
  conv_driver(padded, s.n, in_c, out_c, kernel.ptr(),
              bias ? bias->ptr() : nullptr, out.ptr(), false, act);
  return out;
}

void conv3x3_backward_input(const Tensor& grad_output, const Tensor& kernel,
                            Tensor& grad_input) {
  const int out_c = kernel.batch();
  const int in_c = kernel.channels();
  if (grad_output.channels() != out_c)
    throw ShapeError("conv3x3_backward_input: grad has " +
                     std::to_string(grad_output.channels()) + " channels");
  if (grad_input.shape() != Shape{grad_output.batch(), in_c,
                                  grad_output.height(), grad_output.width()})
    throw ShapeError("conv3x3_backward_input: grad_input shape " +
                     grad_input.shape().str());
  if (grad_input.empty())
    return;
  // Input gradient is a correlation of the output gradient with the
  // transposed, spatially flipped kernel.
  std::vector<Real> flipped(kernel.size());
  for (int o = 0; o < out_c; ++o)
    for (int c = 0; c < in_c; ++c)
      for (int t = 0; t < 9; ++t)
        flipped[(static_cast<std::size_t>(c) * out_c + o) * 9 + (8 - t)] =
            kernel[(static_cast<std::size_t>(o) * in_c + c) * 9 + t];
  std::vector<Real> storage;
  const PaddedPlanes padded = pad_planes(grad_output, kLanes, storage);
  conv_driver(padded, grad_output.batch(), out_c, in_c, flipped.data(),
              nullptr, grad_input.ptr(), true);
}

void conv3x3_backward_weights(const Tensor& input, const Tensor& grad_output,
                              Tensor& grad_kernel, Tensor* grad_bias) {
  const int batch = input.batch();
  const int in_c = input.channels();
  const int out_c = grad_output.channels();
  const int h = input.height();
  const int w = input.width();
  if (grad_output.shape() != Shape{batch, out_c, h, w})
    throw ShapeError("conv3x3_backward_weights: grad_output shape " +
                     grad_output.shape().str() + " vs input " +
                     input.shape().str());
  if (grad_kernel.shape() != Shape{out_c, in_c, 3, 3})
    throw ShapeError("conv3x3_backward_weights: grad_kernel shape " +
                     grad_kernel.shape().str());

  if (grad_bias) {
    if (static_cast<int>(grad_bias->size()) != out_c)
      throw ShapeError("conv3x3_backward_weights: grad_bias length");
#pragma omp parallel for schedule(static)
    for (int o = 0; o < out_c; ++o) {
      double s = 0.0;
      for (int n = 0; n < batch; ++n) {
        const Real* g = grad_output.plane(n, o);
        for (std::size_t i = 0; i < grad_output.shape().plane(); ++i)
          s += g[i];
      }
      (*grad_bias)[o] += static_cast<Real>(s);
    }
  }
  if (input.empty())
    return;

  std::vector<Real> storage;
  const PaddedPlanes in = pad_planes(input, kGradLanes, storage);
  // Output gradient with rows widened to the lane tile, zero tail.
  const int gstride = round_up(w, kGradLanes);
  std::vector<Real> gout(static_cast<std::size_t>(batch) * out_c * h * gstride,
                         Real(0));
  for (int q = 0; q < batch * out_c; ++q)
    for (int y = 0; y < h; ++y)
      std::memcpy(gout.data() + (static_cast<std::size_t>(q) * h + y) * gstride,
                  grad_output.ptr() + (static_cast<std::size_t>(q) * h + y) * w,
                  sizeof(Real) * w);

  const int jobs = out_c * in_c;
#pragma omp parallel for schedule(dynamic)
  for (int job = 0; job < jobs; ++job) {
    const int o = job / in_c;
    const int c = job % in_c;
    Real acc[9][kGradLanes] = {};
    for (int n = 0; n < batch; ++n) {
      const Real* src = in.plane(n * in_c + c);
      const Real* g = gout.data() +
                      (static_cast<std::size_t>(n) * out_c + o) * h * gstride;
      for (int y = 0; y < h; ++y) {
        const Real* grow = g + static_cast<std::size_t>(y) * gstride;
        for (int x0 = 0; x0 < gstride; x0 += kGradLanes) {
          for (int ky = 0; ky < 3; ++ky) {
            const Real* srow = src + (y + ky) * in.stride + x0;
            for (int kx = 0; kx < 3; ++kx) {
#pragma omp simd
              for (int l = 0; l < kGradLanes; ++l)
                acc[ky * 3 + kx][l] += grow[x0 + l] * srow[kx + l];
            }
          }
        }
      }
    }
    Real* dst = grad_kernel.ptr() + (static_cast<std::size_t>(o) * in_c + c) * 9;
    for (int t = 0; t < 9; ++t) {
      Real s = 0;
      for (int l = 0; l < kGradLanes; ++l)
        s += acc[t][l];
      dst[t] += s;
    }
  }
}

Tensor relu(const Tensor& x) {
  Tensor out(x.shape());
  const Real* src = x.ptr();
  Real* dst = out.ptr();
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(x.size());
#pragma omp parallel for simd schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i)
    dst[i] = src[i] > Real(0) ? src[i] : Real(0);
  return out;
}

Tensor tanh(const Tensor& x) {
  Tensor out(x.shape());
  const Real* src = x.ptr();
  Real* dst = out.ptr();
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(x.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i)
    dst[i] = std::tanh(src[i]);
  return out;
}

int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

void set_threads(int n) {
#ifdef _OPENMP
  omp_set_num_threads(std::max(1, n));
#else
  (void)n;
#endif
}

} // namespace zdce::kernels
