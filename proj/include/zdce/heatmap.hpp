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

#include <array>
#include <cstdint>

#include "zdce/curve.hpp"
#include "zdce/image_io.hpp"

namespace zdce {

using Rgb8 = std::array<std::uint8_t, 3>;

// 256-entry jet lookup table (data/jet_colormap.csv); entry i colours value
// i / 255.
const std::array<Rgb8, 256>& jet_colormap();

// Rescales to [0, 1] by min and max; a constant tensor maps to all 0.5.
Tensor normalize_minmax(const Tensor& t);

// For colour channel c (0 = R, 1 = G, 2 = B) of batch item n: the mean over
// all iterations' maps, min-max normalised. Shape (1, 1, H, W).
Tensor averaged_channel_map(const ParamMaps& maps, int c, int n = 0);

// Colours a single-channel [0, 1] map through the lookup table; values are
// rounded to the nearest table index.
Image8 colorize(const Tensor& unit_map);

} // namespace zdce
