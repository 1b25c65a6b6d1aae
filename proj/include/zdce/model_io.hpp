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

// Binary formats, all little-endian.
//
// Weights file (.zdce):
//   "ZDCE" | u32 version (=1) | u32 depth | u32 width | u32 n_iter |
//   u32 layer_count | layer_count x layer record
// Layer record:
//   u32 out | u32 in | u32 3 | u32 3 | f32 kernel[out*in*9] |
//   u32 bias_len | f32 bias[bias_len]
//
// Optimizer-state file (.adam), same header shape and layer records:
//   "ZDCA" | u32 version (=1) | u32 depth | u32 width | u32 n_iter |
//   u32 layer_count | u64 adam_step | f64 lr | f64 beta1 | f64 beta2 |
//   f64 eps | layer_count x (m record, v record) |
//   u64 checkpoint_step | f64 l_spa | f64 l_exp | f64 l_col | f64 l_tv |
//   f64 total

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "zdce/adam.hpp"
#include "zdce/dce_net.hpp"
#include "zdce/losses.hpp"

namespace zdce {

inline constexpr std::uint32_t kWeightsFormatVersion = 1;

std::vector<std::uint8_t> encode_weights(const NetworkWeights& w);
NetworkWeights decode_weights(std::span<const std::uint8_t> bytes);

void save_weights(const NetworkWeights& w, const std::filesystem::path& path);
NetworkWeights load_weights(const std::filesystem::path& path);

// Training snapshot: weights plus optimizer state and the trailing-average
// loss breakdown at that step.
struct Checkpoint {
  std::uint64_t step = 0;
  NetworkWeights weights;
  AdamState adam;
  LossBreakdown running;

  bool operator==(const Checkpoint&) const = default;
};

std::vector<std::uint8_t> encode_optimizer_state(const Checkpoint& ckpt);
// Fills step, adam and running; weights are left untouched.
void decode_optimizer_state(std::span<const std::uint8_t> bytes,
                            Checkpoint& ckpt);

// Path of the optimizer-state file that accompanies a weights file.
std::filesystem::path optimizer_state_path(const std::filesystem::path& weights);

// Writes <path> (weights) and optimizer_state_path(path).
void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

std::vector<std::uint8_t> read_bytes(const std::filesystem::path& path);
void write_bytes(const std::filesystem::path& path,
                 std::span<const std::uint8_t> bytes);

} // namespace zdce
