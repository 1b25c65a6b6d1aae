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

#include "zdce/reference.hpp"

#include <cmath>

namespace zdce::reference {

Tensor conv3x3(const Tensor& input, const Tensor& kernel, const Tensor* bias) {
  const int N = input.batch(), C = input.channels(), H = input.height(),
            W = input.width(), O = kernel.batch();
  if (kernel.channels() != C || kernel.height() != 3 || kernel.width() != 3)
    throw ShapeError("reference::conv3x3: kernel " + kernel.shape().str());
  Tensor out(Shape{N, O, H, W});
  for (int n = 0; n < N; ++n)
    for (int o = 0; o < O; ++o)
      for (int y = 0; y < H; ++y)
        for (int x = 0; x < W; ++x) {
          double s = bias ? (*bias)[o] : 0.0;
          for (int c = 0; c < C; ++c)
            for (int ky = 0; ky < 3; ++ky)
              for (int kx = 0; kx < 3; ++kx) {
                const int iy = y + ky - 1, ix = x + kx - 1;
                if (iy < 0 || iy >= H || ix < 0 || ix >= W)
                  continue;
                s += static_cast<double>(kernel.at(o, c, ky, kx)) *
                     input.at(n, c, iy, ix);
              }
          out.at(n, o, y, x) = static_cast<Real>(s);
        }
  return out;
}

Tensor conv3x3_backward_input(const Tensor& grad_output, const Tensor& kernel) {
  const int N = grad_output.batch(), O = kernel.batch(), C = kernel.channels(),
            H = grad_output.height(), W = grad_output.width();
  Tensor gin(Shape{N, C, H, W});
  for (int n = 0; n < N; ++n)
    for (int c = 0; c < C; ++c)
      for (int y = 0; y < H; ++y)
        for (int x = 0; x < W; ++x) {
          double s = 0.0;
          for (int o = 0; o < O; ++o)
            for (int ky = 0; ky < 3; ++ky)
              for (int kx = 0; kx < 3; ++kx) {
                const int oy = y - ky + 1, ox = x - kx + 1;
                if (oy < 0 || oy >= H || ox < 0 || ox >= W)
                  continue;
                s += static_cast<double>(kernel.at(o, c, ky, kx)) *
                     grad_output.at(n, o, oy, ox);
              }
          gin.at(n, c, y, x) = static_cast<Real>(s);
        }
  return gin;
}

Tensor conv3x3_backward_weights(const Tensor& input, const Tensor& grad_output) {
  const int N = input.batch(), C = input.channels(), H = input.height(),
            W = input.width(), O = grad_output.channels();
  Tensor gk(Shape{O, C, 3, 3});
  for (int o = 0; o < O; ++o)
    for (int c = 0; c < C; ++c)
      for (int ky = 0; ky < 3; ++ky)
        for (int kx = 0; kx < 3; ++kx) {
          double s = 0.0;
          for (int n = 0; n < N; ++n)
            for (int y = 0; y < H; ++y)
              for (int x = 0; x < W; ++x) {
                const int iy = y + ky - 1, ix = x + kx - 1;
                if (iy < 0 || iy >= H || ix < 0 || ix >= W)
                  continue;
                s += static_cast<double>(grad_output.at(n, o, y, x)) *
                     input.at(n, c, iy, ix);
              }
          gk.at(o, c, ky, kx) = static_cast<Real>(s);
        }
  return gk;
}

Tensor relu(const Tensor& x) {
  Tensor out(x.shape());
  for (std::size_t i = 0; i < x.size(); ++i)
    out[i] = x[i] > 0 ? x[i] : Real(0);
  return out;
}

Tensor tanh(const Tensor& x) {
  Tensor out(x.shape());
  for (std::size_t i = 0; i < x.size(); ++i)
    out[i] = std::tanh(x[i]);
  return out;
}

} // namespace zdce::reference
