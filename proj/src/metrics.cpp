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

#include "zdce/metrics.hpp"

#include <cmath>

namespace zdce {

namespace {

void check(const Tensor& a, const Tensor& b, const char* what) {
  require_same_shape(a, b, what);
  if (a.empty())
    throw ShapeError(std::string(what) + ": empty images");
}

} // namespace

double psnr(const Tensor& a, const Tensor& b) {
  check(a, b, "psnr");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = static_cast<double>(a[i]) - b[i];
    acc += d * d;
  }
  const double mse = acc / static_cast<double>(a.size());
  if (mse < 1e-10)
    return kPsnrCapDb;
  return std::min(kPsnrCapDb, 10.0 * std::log10(1.0 / mse));
}

double mae(const Tensor& a, const Tensor& b) {
  check(a, b, "mae");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    acc += std::abs(static_cast<double>(a[i]) - b[i]);
  return 255.0 * acc / static_cast<double>(a.size());
}

} // namespace zdce
