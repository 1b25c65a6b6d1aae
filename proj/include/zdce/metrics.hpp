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

#include "zdce/tensor.hpp"

namespace zdce {

inline constexpr double kPsnrCapDb = 99.0;

// 10 log10(1 / mse) for data in [0, 1]; kPsnrCapDb when mse < 1e-10.
double psnr(const Tensor& a, const Tensor& b);

// Mean absolute error scaled to 8-bit units (x 255).
double mae(const Tensor& a, const Tensor& b);

} // namespace zdce
