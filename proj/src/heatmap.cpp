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

#include "zdce/heatmap.hpp"

#include <algorithm>
#include <cmath>

namespace zdce {

const std::array<Rgb8, 256>& jet_colormap() {
  static const std::array<Rgb8, 256> table{{
#include "colormap_jet.inc"
  }};
  return table;
}

Tensor normalize_minmax(const Tensor& t) {
  Tensor out(t.shape());
  if (t.empty())
    return out;
  const auto [lo, hi] = std::minmax_element(t.data().begin(), t.data().end());
  const Real min = *lo, max = *hi;
  if (!(max > min)) {
    out.fill(Real(0.5));
    return out;
  }
  const Real range = max - min;
  for (std::size_t i = 0; i < t.size(); ++i)
    out[i] = (t[i] - min) / range;
  return out;
}

Tensor averaged_channel_map(const ParamMaps& maps, int c, int n) {
  const Tensor& m = maps.tensor();
  if (c < 0 || c > 2)
    throw ShapeError("colour channel must be 0, 1 or 2");
  if (n < 0 || n >= m.batch())
    throw ShapeError("batch index out of range");
  Tensor mean(Shape{1, 1, m.height(), m.width()});
  const std::size_t plane = m.shape().plane();
  for (std::size_t i = 0; i < plane; ++i) {
    double acc = 0.0;
    for (int k = 0; k < maps.n_iter(); ++k)
      acc += m.plane(n, 3 * k + c)[i];
    mean[i] = static_cast<Real>(acc / maps.n_iter());
  }
  return normalize_minmax(mean);
}

Image8 colorize(const Tensor& unit_map) {
  if (unit_map.channels() != 1 || unit_map.batch() != 1)
    throw ShapeError("colorize expects a (1, 1, H, W) map");
  const auto& lut = jet_colormap();
  Image8 img;
  img.width = unit_map.width();
  img.height = unit_map.height();
  img.rgb.resize(unit_map.size() * 3);
  for (std::size_t i = 0; i < unit_map.size(); ++i) {
    const double v = std::clamp(static_cast<double>(unit_map[i]), 0.0, 1.0);
    const Rgb8& rgb = lut[static_cast<std::size_t>(std::lround(v * 255.0))];
    std::copy(rgb.begin(), rgb.end(), img.rgb.begin() + i * 3);
  }
  return img;
}

} // namespace zdce
