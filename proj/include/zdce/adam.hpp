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
#include <span>

#include "zdce/dce_net.hpp"

namespace zdce {

// "Default" Adam hyperparameters with the fixed learning rate used for
// training.
struct AdamConfig {
  double lr = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;

  void validate() const;
  bool operator==(const AdamConfig&) const = default;
};

struct AdamState {
  AdamConfig config;
  std::uint64_t step = 0;
  std::vector<ConvLayer> m; // first moments, shaped like the weights
  std::vector<ConvLayer> v; // second moments

  static AdamState fresh(const NetworkWeights& w, AdamConfig config = {});
  bool operator==(const AdamState&) const = default;
};

// One bias-corrected Adam update over flat arrays. step is the 1-based index
// of this update.
void adam_update(std::span<Real> params, std::span<const Real> grads,
                 std::span<Real> m, std::span<Real> v, std::uint64_t step,
                 const AdamConfig& config);

// Increments state.step, then updates every kernel and bias of w.
void adam_step(NetworkWeights& w, const GradRecord& g, AdamState& state);

} // namespace zdce
