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

#pragma once

// Differentiable tensor operations. Each op comes in two forms: a plain
// tensor function used on the inference path, and a recorded form that
// appends a node to a Tape.

#include "zdce/tape.hpp"
#include "zdce/tensor.hpp"

namespace zdce {

// Thrown when a reduction would produce a tensor with no elements.
class EmptyOutputError : public ShapeError {
public:
  using ShapeError::ShapeError;
};

// 3x3 stride-1 cross-correlation with zero padding 1; spatial size preserved.
// kernel (out_c, in_c, 3, 3), bias (out_c, 1, 1, 1).
Tensor conv2d(const Tensor& input, const Tensor& kernel, const Tensor& bias);
Var conv2d(Tape& tape, Var input, Var kernel, Var bias);

Tensor relu(const Tensor& x);
Var relu(Tape& tape, Var x);

Tensor tanh_act(const Tensor& x);
Var tanh_act(Tape& tape, Var x);

// Channels of a followed by channels of b.
Tensor concat_channels(const Tensor& a, const Tensor& b);
Var concat_channels(Tape& tape, Var a, Var b);

// Means over non-overlapping region x region blocks, per channel. Trailing
// rows/columns that do not fill a whole block are dropped.
Tensor region_mean(const Tensor& x, int region);
Var region_mean(Tape& tape, Var x, int region);

// Per-pixel mean over channels: (N, C, H, W) -> (N, 1, H, W).
Tensor channel_mean(const Tensor& x);
Var channel_mean(Tape& tape, Var x);

// Sum of all elements.
Var sum(Tape& tape, Var x);

// Sum of x * weights elementwise; weights is a fixed tensor of x's shape.
Var dot(Tape& tape, Var x, const Tensor& weights);

// Sum_i coeffs[i] * terms[i] over scalar terms.
Var weighted_sum(Tape& tape, std::span<const Var> terms,
                 std::span<const double> coeffs);

} // namespace zdce
