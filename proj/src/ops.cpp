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

#include "zdce/ops.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include "zdce/kernels.hpp"

namespace zdce {

namespace {

void check_bias(const Tensor& kernel, const Tensor& bias) {
  if (static_cast<int>(bias.size()) != kernel.batch())
    throw ShapeError("conv2d: bias has " + std::to_string(bias.size()) +
                     " elements for " + std::to_string(kernel.batch()) +
                     " output channels");
}

void check_region(const Shape& s, int region) {
  if (region < 1)
    throw ShapeError("region_mean: region must be >= 1, got " +
                     std::to_string(region));
  if (s.h / region == 0 || s.w / region == 0)
    throw EmptyOutputError("region_mean: region " + std::to_string(region) +
                           " does not fit in " + std::to_string(s.h) + "x" +
                           std::to_string(s.w) + " image");
}

} // namespace

Tensor conv2d(const Tensor& input, const Tensor& kernel, const Tensor& bias) {
  check_bias(kernel, bias);
  return kernels::conv3x3(input, kernel, &bias);
}

Var conv2d(Tape& tape, Var input, Var kernel, Var bias) {
  const Tensor& k = tape.value(kernel);
  check_bias(k, tape.value(bias));
  Tensor out = kernels::conv3x3(tape.value(input), k, &tape.value(bias));
  return tape.record(OpKind::conv2d, std::move(out), {input, kernel, bias},
                     [](const BackwardArgs& a) {
                       const Tensor& x = *a.inputs[0];
                       const Tensor& k = *a.inputs[1];
                       if (a.grad_inputs[0])
                         kernels::conv3x3_backward_input(a.grad_output, k,
                                                         *a.grad_inputs[0]);
                       if (a.grad_inputs[1] || a.grad_inputs[2]) {
                         Tensor gk_scratch;
                         Tensor* gk = a.grad_inputs[1];
                         if (!gk) {
                           gk_scratch = Tensor(k.shape());
                           gk = &gk_scratch;
                         }
                         kernels::conv3x3_backward_weights(
                             x, a.grad_output, *gk, a.grad_inputs[2]);
                       }
                     });
}

Tensor relu(const Tensor& x) { return kernels::relu(x); }

Var relu(Tape& tape, Var x) {
  Var out = tape.record(OpKind::relu, kernels::relu(tape.value(x)), {x},
                     [](const BackwardArgs& a) {
                       Tensor& gx = *a.grad_inputs[0];
                       const std::size_t n = gx.size();
                       for (std::size_t i = 0; i < n; ++i)
                         if (a.output[i] > Real(0))
                           gx[i] += a.grad_output[i];
                     });
  if (tape.tracks_branches()) {
    std::vector<bool> sides;
    for (Real v : tape.value(x).data())
      sides.push_back(v > Real(0));
    tape.set_branches(out, std::move(sides));
  }
  return out;
}

Tensor tanh_act(const Tensor& x) { return kernels::tanh(x); }

Var tanh_act(Tape& tape, Var x) {
  return tape.record(OpKind::tanh, kernels::tanh(tape.value(x)), {x},
                     [](const BackwardArgs& a) {
                       Tensor& gx = *a.grad_inputs[0];
                       const std::size_t n = gx.size();
                       for (std::size_t i = 0; i < n; ++i) {
                         const Real y = a.output[i];
                         gx[i] += a.grad_output[i] * (Real(1) - y * y);
                       }
                     });
}

Tensor concat_channels(const Tensor& a, const Tensor& b) {
  const Shape& sa = a.shape();
  const Shape& sb = b.shape();
  if (sa.n != sb.n || sa.h != sb.h || sa.w != sb.w)
    throw ShapeError("concat_channels: " + sa.str() + " vs " + sb.str());
  Tensor out(Shape{sa.n, sa.c + sb.c, sa.h, sa.w});
  const std::size_t plane = sa.plane();
  for (int n = 0; n < sa.n; ++n) {
    std::copy_n(a.plane(n, 0), plane * sa.c, out.plane(n, 0));
    std::copy_n(b.plane(n, 0), plane * sb.c, out.plane(n, sa.c));
  }
  return out;
}

Var concat_channels(Tape& tape, Var a, Var b) {
  Tensor out = concat_channels(tape.value(a), tape.value(b));
  return tape.record(
      OpKind::concat, std::move(out), {a, b}, [](const BackwardArgs& args) {
        const Shape& s = args.grad_output.shape();
        const int ca = args.inputs[0]->channels();
        const std::size_t plane = s.plane();
        for (int k = 0; k < 2; ++k) {
          Tensor* g = args.grad_inputs[k];
          if (!g)
            continue;
          const int first = k == 0 ? 0 : ca;
          const std::size_t len = plane * g->channels();
          for (int n = 0; n < s.n; ++n) {
            const Real* src = args.grad_output.plane(n, first);
            Real* dst = g->plane(n, 0);
            for (std::size_t i = 0; i < len; ++i)
              dst[i] += src[i];
          }
        }
      });
}

Tensor region_mean(const Tensor& x, int region) {
  const Shape& s = x.shape();
  check_region(s, region);
  const int oh = s.h / region;
  const int ow = s.w / region;
  Tensor out(Shape{s.n, s.c, oh, ow});
  const double inv = 1.0 / (static_cast<double>(region) * region);
  for (int n = 0; n < s.n; ++n)
    for (int c = 0; c < s.c; ++c) {
      const Real* src = x.plane(n, c);
      Real* dst = out.plane(n, c);
      for (int by = 0; by < oh; ++by)
        for (int bx = 0; bx < ow; ++bx) {
          double acc = 0.0;
          for (int y = by * region; y < (by + 1) * region; ++y)
            for (int xx = bx * region; xx < (bx + 1) * region; ++xx)
              acc += src[static_cast<std::size_t>(y) * s.w + xx];
          dst[by * ow + bx] = static_cast<Real>(acc * inv);
        }
    }
  return out;
}

Var region_mean(Tape& tape, Var x, int region) {
  Tensor out = region_mean(tape.value(x), region);
  return tape.record(
      OpKind::region_mean, std::move(out), {x},
      [region](const BackwardArgs& a) {
        Tensor& gx = *a.grad_inputs[0];
        const Shape& s = gx.shape();
        const int oh = a.output.height();
        const int ow = a.output.width();
        const Real inv = Real(1) / static_cast<Real>(region * region);
        for (int n = 0; n < s.n; ++n)
          for (int c = 0; c < s.c; ++c) {
            const Real* g = a.grad_output.plane(n, c);
            Real* dst = gx.plane(n, c);
            for (int y = 0; y < oh * region; ++y)
              for (int xx = 0; xx < ow * region; ++xx)
                dst[static_cast<std::size_t>(y) * s.w + xx] +=
                    g[(y / region) * ow + xx / region] * inv;
          }
      });
}

Tensor channel_mean(const Tensor& x) {
  const Shape& s = x.shape();
  if (s.c < 1)
    throw ShapeError("channel_mean: no channels");
  Tensor out(Shape{s.n, 1, s.h, s.w});
  const std::size_t plane = s.plane();
  const Real inv = Real(1) / static_cast<Real>(s.c);
  for (int n = 0; n < s.n; ++n) {
    Real* dst = out.plane(n, 0);
    for (std::size_t i = 0; i < plane; ++i) {
      Real acc = 0;
      for (int c = 0; c < s.c; ++c)
        acc += x.plane(n, c)[i];
      dst[i] = acc * inv;
    }
  }
  return out;
}

Var channel_mean(Tape& tape, Var x) {
  Tensor out = channel_mean(tape.value(x));
  return tape.record(OpKind::channel_mean, std::move(out), {x},
                     [](const BackwardArgs& a) {
                       Tensor& gx = *a.grad_inputs[0];
                       const Shape& s = gx.shape();
                       const std::size_t plane = s.plane();
                       const Real inv = Real(1) / static_cast<Real>(s.c);
                       for (int n = 0; n < s.n; ++n) {
                         const Real* g = a.grad_output.plane(n, 0);
                         for (int c = 0; c < s.c; ++c) {
                           Real* dst = gx.plane(n, c);
                           for (std::size_t i = 0; i < plane; ++i)
                             dst[i] += g[i] * inv;
                         }
                       }
                     });
}

Var sum(Tape& tape, Var x) {
  double acc = 0.0;
  for (Real v : tape.value(x).data())
    acc += v;
  return tape.record_scalar(OpKind::scalar_reduce, acc, {x},
                     [](const BackwardArgs& a) {
                       const Real g = a.grad_output[0];
                       for (Real& v : a.grad_inputs[0]->data())
                         v += g;
                     });
}

Var dot(Tape& tape, Var x, const Tensor& weights) {
  const Tensor& xv = tape.value(x);
  require_same_shape(xv, weights, "dot");
  double acc = 0.0;
  for (std::size_t i = 0; i < xv.size(); ++i)
    acc += static_cast<double>(xv[i]) * weights[i];
  return tape.record_scalar(OpKind::scalar_reduce, acc, {x},
                     [weights](const BackwardArgs& a) {
                       const Real g = a.grad_output[0];
                       Tensor& gx = *a.grad_inputs[0];
                       for (std::size_t i = 0; i < gx.size(); ++i)
                         gx[i] += g * weights[i];
                     });
}

Var weighted_sum(Tape& tape, std::span<const Var> terms,
                 std::span<const double> coeffs) {
  if (terms.size() != coeffs.size())
    throw ContractError("weighted_sum: terms/coefficients length mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < terms.size(); ++i)
    acc += coeffs[i] * tape.scalar(terms[i]);
  std::vector<double> w(coeffs.begin(), coeffs.end());
  return tape.record_scalar(OpKind::scalar_reduce, acc,
                     std::vector<Var>(terms.begin(), terms.end()),
                     [w](const BackwardArgs& a) {
                       const double g = a.grad_output[0];
                       for (std::size_t i = 0; i < w.size(); ++i)
                         if (a.grad_inputs[i])
                           (*a.grad_inputs[i])[0] +=
                               static_cast<Real>(g * w[i]);
                     });
}

} // namespace zdce
