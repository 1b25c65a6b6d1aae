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

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "zdce/errors.hpp"

namespace zdce {

#ifdef ZDCE_DOUBLE
using Real = double;
#else
using Real = float;
#endif

// (batch, channels, height, width); width is the fastest-moving index.
struct Shape {
  int n = 0;
  int c = 0;
  int h = 0;
  int w = 0;

  std::size_t numel() const {
    return static_cast<std::size_t>(n) * c * h * w;
  }
  std::size_t plane() const { return static_cast<std::size_t>(h) * w; }
  bool operator==(const Shape&) const = default;
  std::string str() const;
};

// Dense 4-D array of Real. Value type: copies are deep.
class Tensor {
public:
  Tensor() = default;
  explicit Tensor(Shape shape, Real fill = Real(0));
  Tensor(Shape shape, std::vector<Real> data);

  static Tensor scalar(Real v) { return Tensor(Shape{1, 1, 1, 1}, v); }

  const Shape& shape() const { return shape_; }
  int batch() const { return shape_.n; }
  int channels() const { return shape_.c; }
  int height() const { return shape_.h; }
  int width() const { return shape_.w; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  std::span<Real> data() { return data_; }
  std::span<const Real> data() const { return data_; }
  Real* ptr() { return data_.data(); }
  const Real* ptr() const { return data_.data(); }

  Real* plane(int n, int c) { return data_.data() + offset(n, c, 0, 0); }
  const Real* plane(int n, int c) const {
    return data_.data() + offset(n, c, 0, 0);
  }

  Real& at(int n, int c, int y, int x) { return data_[offset(n, c, y, x)]; }
  Real at(int n, int c, int y, int x) const {
    return data_[offset(n, c, y, x)];
  }
  Real& operator[](std::size_t i) { return data_[i]; }
  Real operator[](std::size_t i) const { return data_[i]; }

  // Value of a 1x1x1x1 tensor.
  Real item() const;

  void fill(Real v);
  // this += other, elementwise; shapes must match.
  void add(const Tensor& other);

  // Channels [first, first + count) of every batch item.
  Tensor channel_slice(int first, int count) const;

  bool operator==(const Tensor&) const = default;

private:
  std::size_t offset(int n, int c, int y, int x) const {
    return ((static_cast<std::size_t>(n) * shape_.c + c) * shape_.h + y) *
               shape_.w +
           x;
  }

  Shape shape_{};
  std::vector<Real> data_;
};

void require_same_shape(const Tensor& a, const Tensor& b, const char* what);

} // namespace zdce
