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

#include "zdce/curve.hpp"

namespace zdce {

namespace {

void check_maps(const Shape& image, const Shape& maps, int n_iter) {
  if (n_iter < 1)
    throw ConfigError("curve: n_iter must be >= 1");
  if (maps.c != image.c * n_iter || maps.n != image.n || maps.h != image.h ||
      maps.w != image.w)
    throw ShapeError("curve: maps " + maps.str() + " do not provide " +
                     std::to_string(n_iter) + " iterations for image " +
                     image.str());
}

} // namespace

void CurveConfig::validate() const {
  if (n_iter < 1)
    throw ConfigError("n_iter must be >= 1, got " + std::to_string(n_iter));
}

ParamMaps::ParamMaps(Tensor maps, int n_iter)
    : maps_(std::move(maps)), n_iter_(n_iter) {
  CurveConfig{n_iter}.validate();
  if (maps_.channels() != 3 * n_iter)
    throw ShapeError("ParamMaps: " + std::to_string(maps_.channels()) +
                     " channels for " + std::to_string(n_iter) +
                     " iterations");
}

Tensor le_curve_step(const Tensor& image, const Tensor& alpha) {
  require_same_shape(image, alpha, "le_curve_step");
  Tensor out(image.shape());
  const std::size_t n = image.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Real x = image[i];
    out[i] = x + alpha[i] * x * (Real(1) - x);
  }
  return out;
}

Tensor apply_curves(const Tensor& image, const ParamMaps& maps) {
  const Shape& s = image.shape();
  check_maps(s, maps.tensor().shape(), maps.n_iter());
  Tensor out(s);
  const int n_iter = maps.n_iter();
  const std::size_t plane = s.plane();
#pragma omp parallel for collapse(2) schedule(static)
  for (int n = 0; n < s.n; ++n)
    for (int c = 0; c < s.c; ++c) {
      const Real* src = image.plane(n, c);
      Real* dst = out.plane(n, c);
      for (std::size_t i = 0; i < plane; ++i) {
        Real x = src[i];
        for (int k = 0; k < n_iter; ++k) {
          const Real a = maps.tensor().plane(n, s.c * k + c)[i];
          x = x + a * x * (Real(1) - x);
        }
        dst[i] = x;
      }
    }
  return out;
}

Var le_curve_step(Tape& tape, Var image, Var maps, int iteration) {
  const Tensor& x = tape.value(image);
  const Tensor& m = tape.value(maps);
  const Shape& s = x.shape();
  if (s.c == 0 || m.channels() % s.c != 0)
    throw ShapeError("le_curve_step: maps " + m.shape().str() +
                     " incompatible with image " + s.str());
  const int n_iter = m.channels() / s.c;
  check_maps(s, m.shape(), n_iter);
  if (iteration < 0 || iteration >= n_iter)
    throw ShapeError("le_curve_step: iteration " + std::to_string(iteration) +
                     " out of range");
  const int first = iteration * s.c;
  const std::size_t plane = s.plane();

  Tensor out(s);
  for (int n = 0; n < s.n; ++n)
    for (int c = 0; c < s.c; ++c) {
      const Real* xi = x.plane(n, c);
      const Real* ai = m.plane(n, first + c);
      Real* o = out.plane(n, c);
      for (std::size_t i = 0; i < plane; ++i)
        o[i] = xi[i] + ai[i] * xi[i] * (Real(1) - xi[i]);
    }

  return tape.record(
      OpKind::curve_step, std::move(out), {image, maps},
      [first, plane](const BackwardArgs& a) {
        const Tensor& x = *a.inputs[0];
        const Tensor& m = *a.inputs[1];
        const Shape& s = x.shape();
        for (int n = 0; n < s.n; ++n)
          for (int c = 0; c < s.c; ++c) {
            const Real* xi = x.plane(n, c);
            const Real* ai = m.plane(n, first + c);
            const Real* g = a.grad_output.plane(n, c);
            if (a.grad_inputs[0]) {
              Real* gx = a.grad_inputs[0]->plane(n, c);
              for (std::size_t i = 0; i < plane; ++i)
                gx[i] += g[i] * (Real(1) + ai[i] * (Real(1) - Real(2) * xi[i]));
            }
            if (a.grad_inputs[1]) {
              Real* ga = a.grad_inputs[1]->plane(n, first + c);
              for (std::size_t i = 0; i < plane; ++i)
                ga[i] += g[i] * xi[i] * (Real(1) - xi[i]);
            }
          }
      });
}

Var apply_curves(Tape& tape, Var image, Var maps, int n_iter) {
  check_maps(tape.value(image).shape(), tape.value(maps).shape(), n_iter);
  Var x = image;
  for (int k = 0; k < n_iter; ++k)
    x = le_curve_step(tape, x, maps, k);
  return x;
}

} // namespace zdce
