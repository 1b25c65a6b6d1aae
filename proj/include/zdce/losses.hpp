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

#include "zdce/curve.hpp"
#include "zdce/tape.hpp"
#include "zdce/tensor.hpp"

namespace zdce {

struct LossConfig {
  double E = 0.6;       // well-exposedness gray level
  int spa_region = 4;   // block size for spatial consistency
  int exp_region = 16;  // block size for exposure control
  double W_col = 0.5;
  double W_tv = 20.0;
  double W_spa = 1.0;
  double W_exp = 1.0;

  void validate() const;
};

struct LossBreakdown {
  double l_spa = 0;
  double l_exp = 0;
  double l_col = 0;
  double l_tv = 0;
  double total = 0;

  bool operator==(const LossBreakdown&) const = default;
};

// Weighted total of the four components under cfg's weights.
double combine(const LossConfig& cfg, double l_spa, double l_exp,
               double l_col, double l_tv);

// All losses average over the batch.
//
// Spatial consistency: gray = channel mean, then region means. For every
// region i and each existing 4-neighbour j (both directions counted),
// (|Y_i - Y_j| - |I_i - I_j|)^2, summed and divided by the region count.
Var spatial_consistency(Tape& tape, Var enhanced, Var input, int region);

// Exposure control: mean over regions of |gray region mean - E|.
// The derivative of |.| at 0 is taken as 0.
Var exposure_control(Tape& tape, Var enhanced, double E, int region);

// Colour constancy: sum over (R,G), (R,B), (G,B) of squared differences of
// whole-image channel means.
Var color_constancy(Tape& tape, Var enhanced);

// Illumination smoothness of the parameter maps:
//   (1/N) sum_n sum_c mean_p (|dx A| + |dy A|)^2
// where dx, dy are forward differences and p runs over the (H-1) x (W-1)
// positions at which both exist. Maps smaller than 2x2 contribute 0.
// N = n_iter; maps holds any multiple of n_iter channels.
Var illumination_smoothness(Tape& tape, Var maps, int n_iter);

struct LossVars {
  Var l_spa;
  Var l_exp;
  Var l_col;
  Var l_tv;
  Var total;

  LossBreakdown values(const Tape& tape) const;
};

LossVars total_loss(Tape& tape, Var enhanced, Var input, Var maps, int n_iter,
                    const LossConfig& cfg);

// Tensor forms; evaluated through the same code as the recorded ones.
double spatial_consistency(const Tensor& enhanced, const Tensor& input,
                           int region);
double exposure_control(const Tensor& enhanced, double E, int region);
double color_constancy(const Tensor& enhanced);
double illumination_smoothness(const Tensor& maps, int n_iter);
LossBreakdown total_loss(const Tensor& enhanced, const Tensor& input,
                         const ParamMaps& maps, const LossConfig& cfg);

} // namespace zdce
