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

// Serial, straightforward implementations of the hot kernels. They exist as
// test oracles and as the baseline in the kernel benchmark; production code
// uses zdce/kernels.hpp.

#include "zdce/tensor.hpp"

namespace zdce::reference {

// Seven nested loops, double accumulation.
Tensor conv3x3(const Tensor& input, const Tensor& kernel, const Tensor* bias);

Tensor conv3x3_backward_input(const Tensor& grad_output, const Tensor& kernel);

// Returns dL/dkernel; bias gradient is the per-channel sum of grad_output.
Tensor conv3x3_backward_weights(const Tensor& input, const Tensor& grad_output);

Tensor relu(const Tensor& x);
Tensor tanh(const Tensor& x);

} // namespace zdce::reference
