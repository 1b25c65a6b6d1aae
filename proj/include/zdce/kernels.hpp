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

// OpenMP-parallel compute kernels. Every kernel partitions work so that each
// output element is produced by exactly one thread in a fixed summation order;
// results are bit-identical for any thread count.
//
// Serial reference versions live in zdce/reference.hpp.

#include <span>
#include <vector>

#include "zdce/tensor.hpp"

namespace zdce::kernels {

// 3x3 cross-correlation, stride 1, zero padding 1.
// input (N, C, H, W), kernel (O, C, 3, 3), bias (O, 1, 1, 1) or null.
// Returns (N, O, H, W).
Tensor conv3x3(const Tensor& input, const Tensor& kernel, const Tensor* bias);

enum class Activation { none, relu, tanh };

// Inference form: convolves the channel concatenation of inputs and applies
// act to every output. scratch holds the padded input and can be reused
// across calls to avoid reallocating it.
Tensor conv3x3_fused(std::span<const Tensor* const> inputs,
                     const Tensor& kernel, const Tensor* bias, Activation act,
                     std::vector<Real>& scratch);

// grad_input += dL/dinput given dL/doutput.
void conv3x3_backward_input(const Tensor& grad_output, const Tensor& kernel,
                            Tensor& grad_input);

// grad_kernel += dL/dkernel, grad_bias += dL/dbias (grad_bias may be null).
void conv3x3_backward_weights(const Tensor& input, const Tensor& grad_output,
                              Tensor& grad_kernel, Tensor* grad_bias);

Tensor relu(const Tensor& x);
Tensor tanh(const Tensor& x);

// Number of threads OpenMP kernels will use (1 without OpenMP).
int max_threads();
void set_threads(int n);

} // namespace zdce::kernels
