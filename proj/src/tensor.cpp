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

#include "zdce/tensor.hpp"

#include <algorithm>

namespace zdce {

const char* to_string(FormatErrc code) {
  switch (code) {
  case FormatErrc::bad_magic:
    return "bad magic";
  case FormatErrc::bad_version:
    return "unsupported version";
  case FormatErrc::shape_mismatch:
    return "shape mismatch";
  case FormatErrc::bad_header:
    return "bad header";
  }
  return "format error";
}

std::string Shape::str() const {
  return "(" + std::to_string(n) + "," + std::to_string(c) + "," +
         std::to_string(h) + "," + std::to_string(w) + ")";
}

Tensor::Tensor(Shape shape, Real fill) : shape_(shape) {
  if (shape.n < 0 || shape.c < 0 || shape.h < 0 || shape.w < 0)
    throw ShapeError("negative dimension in " + shape.str());
  data_.assign(shape.numel(), fill);
}

Tensor::Tensor(Shape shape, std::vector<Real> data)
    : shape_(shape), data_(std::move(data)) {
  if (data_.size() != shape.numel())
    throw ShapeError("data length " + std::to_string(data_.size()) +
                     " does not match shape " + shape.str());
}

Real Tensor::item() const {
  if (data_.size() != 1)
    throw ContractError("item() on tensor of shape " + shape_.str());
  return data_[0];
}

void Tensor::fill(Real v) { std::fill(data_.begin(), data_.end(), v); }

void Tensor::add(const Tensor& other) {
  require_same_shape(*this, other, "add");
  const Real* src = other.ptr();
  Real* dst = ptr();
  const std::size_t n = data_.size();
  for (std::size_t i = 0; i < n; ++i)
    dst[i] += src[i];
}

Tensor Tensor::channel_slice(int first, int count) const {
  if (first < 0 || count < 0 || first + count > shape_.c)
    throw ShapeError("channel slice [" + std::to_string(first) + "," +
                     std::to_string(first + count) + ") out of range for " +
                     shape_.str());
  Tensor out(Shape{shape_.n, count, shape_.h, shape_.w});
  const std::size_t plane = shape_.plane();
  for (int n = 0; n < shape_.n; ++n)
    std::copy_n(this->plane(n, first), plane * count, out.plane(n, 0));
  return out;
}

void require_same_shape(const Tensor& a, const Tensor& b, const char* what) {
  if (a.shape() != b.shape())
    throw ShapeError(std::string(what) + ": shape " + a.shape().str() +
                     " vs " + b.shape().str());
}

} // namespace zdce
