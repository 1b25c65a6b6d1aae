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
#include <vector>

#include "zdce/curve.hpp"
#include "zdce/tape.hpp"
#include "zdce/tensor.hpp"

namespace zdce {

// Architecture triple "depth-width-iterations", e.g. 7-32-8.
struct ArchConfig {
  int depth = 7;
  int width = 32;
  int n_iter = 8;

  void validate() const;
  std::string str() const;
  bool operator==(const ArchConfig&) const = default;
};

// One conv layer of the estimator. sources name where its input comes from:
// 0 is the input image, k >= 1 is the output of layer k (1-based). Two
// sources mean channel concatenation in that order.
struct LayerSpec {
  int in_channels = 0;
  int out_channels = 0;
  std::vector<int> sources;
  bool final = false; // tanh instead of relu
};

// Layers 1..h form a plain chain (h = (depth + 1) / 2). Each later layer j
// concatenates the mirror layer (depth - j + 1) with layer j - 1, so for
// 7 layers: L5 <- [L3, L4], L6 <- [L2, L5], L7 <- [L1, L6].
std::vector<LayerSpec> topology(const ArchConfig& arch);

struct ConvLayer {
  Tensor kernel; // (out, in, 3, 3)
  Tensor bias;   // (out, 1, 1, 1)

  bool operator==(const ConvLayer&) const = default;
};

struct NetworkWeights {
  ArchConfig arch;
  std::vector<ConvLayer> layers;

  bool operator==(const NetworkWeights&) const = default;
};

// Gradient accumulators, one per kernel and bias of a NetworkWeights.
struct GradRecord {
  std::vector<ConvLayer> layers;

  static GradRecord zeros_like(const NetworkWeights& w);
  void zero();
};

// Kernels ~ N(0, 0.02) via Box-Muller over std::mt19937_64(seed); biases 0.
NetworkWeights init_weights(const ArchConfig& arch, std::uint64_t seed,
                            double stddev = 0.02);

// Zeroed layers of the right shapes.
NetworkWeights zero_weights(const ArchConfig& arch);

std::size_t param_count(const NetworkWeights& w);
std::size_t param_count(const ArchConfig& arch);

// Multiply-accumulates of all convolutions for an h x w input, plus one add
// per output element for the bias.
std::uint64_t mac_count(const ArchConfig& arch, std::uint64_t h,
                        std::uint64_t w);

// Inference path: image (N, 3, H, W) -> maps (N, 3 * n_iter, H, W).
ParamMaps forward(const NetworkWeights& w, const Tensor& image);

// Weights placed on a tape, in layer order.
struct BoundWeights {
  ArchConfig arch;
  std::vector<Var> kernels;
  std::vector<Var> biases;
};

// Parameters feed their gradients into grads; with grads == nullptr the
// weights are recorded as constants.
BoundWeights bind(Tape& tape, const NetworkWeights& w, GradRecord* grads);

Var forward(Tape& tape, const BoundWeights& w, Var image);

} // namespace zdce
