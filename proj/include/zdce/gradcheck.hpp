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
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "zdce/tape.hpp"

namespace zdce {

struct GradCheckOptions {
  // Central-difference step and pass threshold on relative error; defaults
  // depend on the precision of the build (1e-3 / 1e-2 for 32-bit reals,
  // 1e-5 / 1e-4 for 64-bit).
  double step = 0;
  double threshold = 0;
  std::uint64_t seed = 7;
  // Elements probed per input tensor (all of them if the tensor is smaller).
  int samples_per_tensor = 24;
  // Central differences per probed element, taken around centres spread
  // over [x - step/2, x + step/2] and averaged.
  int centres = 1;
  // Scales the analytic gradient of the curve component by 1.1, emulating a
  // broken backward. Used as a negative control.
  bool inject_fault = false;
};

GradCheckOptions default_gradcheck_options();

// Builds a scalar from the given input leaves.
using GraphFn = std::function<Var(Tape&, std::span<const Var>)>;

// Relative error ||analytic - numeric|| / max(||analytic||, ||numeric||)
// over the probed elements, one value per input tensor. analytic_hook, if
// set, may alter the analytic gradients before comparison.
std::vector<double> gradient_errors(
    const std::vector<Tensor>& inputs, const GraphFn& fn,
    const GradCheckOptions& options,
    const std::function<void(std::vector<Tensor>&)>& analytic_hook = {});

struct ComponentResult {
  std::string name;
  double max_rel_error = 0;
  bool passed = false;
};

struct GradCheckReport {
  std::vector<ComponentResult> components;
  double threshold = 0;

  bool passed() const;
};

// Finite-difference suite over the ops, the curve engine, the four losses,
// the total loss, and every layer of a default-architecture network on a
// 1x3x8x8 input.
GradCheckReport run_gradcheck(const GradCheckOptions& options);

} // namespace zdce
