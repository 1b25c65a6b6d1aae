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
#include <filesystem>
#include <optional>
#include <vector>

#include "zdce/dce_net.hpp"

namespace zdce {

// Estimate curve maps and apply them. Output is unclamped.
Tensor enhance_tensor(const NetworkWeights& w, const Tensor& image);

struct EnhanceReport {
  std::filesystem::path input;
  std::filesystem::path output;
  double seconds = 0;
  std::optional<double> psnr;
  std::optional<double> mae;
};

// Decode, enhance, clamp and quantise to 8 bits, write PNG. With a reference
// image, also reports PSNR and MAE of the written result against it.
EnhanceReport enhance(const NetworkWeights& w,
                      const std::filesystem::path& input,
                      const std::filesystem::path& output,
                      const std::optional<std::filesystem::path>& reference =
                          std::nullopt);

// Writes <stem>_R.png, <stem>_G.png, <stem>_B.png into out_dir and returns
// their paths: per colour channel, the iteration-averaged parameter map,
// min-max normalised and coloured with the jet table.
std::array<std::filesystem::path, 3>
export_heatmaps(const NetworkWeights& w, const std::filesystem::path& input,
                const std::filesystem::path& out_dir);

struct LatencyStats {
  std::vector<double> samples; // seconds, one per timed repeat
  double min = 0;
  double median = 0;
  double mean = 0;
};

LatencyStats summarize(std::vector<double> samples);

// Times forward + apply_curves on a random width x height image, single
// threaded. One untimed warm-up run precedes the repeats (>= 3).
LatencyStats benchmark_inference(const NetworkWeights& w, int width,
                                 int height, int repeats,
                                 std::uint64_t seed = 1);

} // namespace zdce
