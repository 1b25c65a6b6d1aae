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

#include <cstdint>
#include <filesystem>
#include <vector>

#include "zdce/tensor.hpp"

namespace zdce {

// Interleaved 8-bit RGB.
struct Image8 {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> rgb;

  bool operator==(const Image8&) const = default;
};

// Decodes PNG (8/16-bit, gray/RGB, alpha dropped) or baseline JPEG, chosen by
// file signature. Throws IoError on failure.
Image8 read_image(const std::filesystem::path& path);
void write_png(const std::filesystem::path& path, const Image8& image);

// (1, 3, H, W) tensor with values v / 255.
Tensor to_tensor(const Image8& image);
// Batch item n of a 3-channel tensor; values are clamped to [0, 1], scaled by
// 255 and rounded to nearest.
Image8 to_image8(const Tensor& t, int n = 0);
// Single-channel tensor rendered as gray.
Image8 gray_to_image8(const Tensor& t, int n = 0);

// Bilinear resampling with pixel-centre alignment and edge clamping.
Tensor resize_bilinear(const Tensor& t, int height, int width);

} // namespace zdce
