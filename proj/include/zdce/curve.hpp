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

#include "zdce/tape.hpp"
#include "zdce/tensor.hpp"

namespace zdce {

struct CurveConfig {
  int n_iter = 8;

  void validate() const;
};

// Per-pixel curve parameters for n_iter iterations over 3 color channels.
// Channels are iteration-major: [3k, 3k+1, 3k+2] hold the R, G, B maps used
// by iteration k (0-based).
class ParamMaps {
public:
  ParamMaps(Tensor maps, int n_iter);

  const Tensor& tensor() const { return maps_; }
  int n_iter() const { return n_iter_; }
  // (N, 3, H, W) maps for iteration k.
  Tensor iteration(int k) const { return maps_.channel_slice(3 * k, 3); }

private:
  Tensor maps_;
  int n_iter_;
};

// LE(I; A) = I + A * I * (1 - I), elementwise. Shapes must match.
Tensor le_curve_step(const Tensor& image, const Tensor& alpha);

// n_iter successive curve steps, iteration k reading channels [3k, 3k+3).
// No clamping: the output stays in [0, 1] whenever the inputs are in range.
Tensor apply_curves(const Tensor& image, const ParamMaps& maps);

// Recorded step using the C maps of iteration k, where C = image channels
// and maps holds C * n channels.
Var le_curve_step(Tape& tape, Var image, Var maps, int iteration);

Var apply_curves(Tape& tape, Var image, Var maps, int n_iter);

} // namespace zdce
