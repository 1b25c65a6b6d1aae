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
#include <iosfwd>
#include <string>
#include <vector>

#include "zdce/adam.hpp"
#include "zdce/dce_net.hpp"
#include "zdce/losses.hpp"
#include "zdce/model_io.hpp"

namespace zdce {

struct TrainConfig {
  std::string data_dir;
  int image_size = 512;
  int batch_size = 8;
  int max_steps = 1000;
  std::uint64_t seed = 0;
  int checkpoint_every = 0;    // 0: only the final checkpoint
  std::string checkpoint_dir;  // empty: no files written
  double val_fraction = 0.2;
  // > 0: train on this many procedurally generated scenes instead of data_dir.
  int synthetic_images = 0;
  // Apply a random gamma in [gamma_min, gamma_max] to every training image.
  bool degrade = false;
  double gamma_min = 0.4;
  double gamma_max = 3.0;
  ArchConfig arch;
  LossConfig loss;
  AdamConfig optimizer;

  void validate() const;
};

// JSON object whose keys mirror the TrainConfig field names; "arch", "loss"
// and "optimizer" are nested objects. Missing keys keep their defaults,
// unknown keys are a ConfigError.
TrainConfig parse_train_config(const std::string& json_text);
TrainConfig load_train_config(const std::filesystem::path& path);
std::string to_json(const TrainConfig& cfg);

// Decodes every image in dir (sorted by filename) and resizes it to
// size x size. Undecodable files are reported on warnings and skipped; a
// directory with no usable image is an IoError.
std::vector<Tensor> load_dataset(const std::filesystem::path& dir, int size,
                                 std::ostream* warnings = nullptr);

// out = in^gamma.
Tensor apply_gamma(const Tensor& image, double gamma);

// apply_gamma with gamma ~ U[gamma_min, gamma_max] drawn from seed.
Tensor synth_degrade(const Tensor& image, std::uint64_t seed,
                     double gamma_min = 0.4, double gamma_max = 3.0);

// Smooth, well-exposed random RGB scene of size x size: colour gradients
// plus soft blobs and a little texture. Values in [0, 1].
Tensor synth_scene(int size, std::uint64_t seed);

// Training images per cfg: synthetic scenes or data_dir, then the optional
// degradation.
std::vector<Tensor> build_dataset(const TrainConfig& cfg,
                                  std::ostream* warnings = nullptr);

struct TrainResult {
  Checkpoint checkpoint;
  std::vector<LossBreakdown> history; // one entry per step
  std::vector<std::pair<int, LossBreakdown>> validation;
};

// Runs cfg.max_steps optimisation steps on images (each (1, 3, S, S)).
// log receives one tab-separated line per step:
//   step, l_spa, l_exp, l_col, l_tv, total
// Throws NonFiniteLossError if a loss is NaN or infinite.
TrainResult train(const TrainConfig& cfg, std::vector<Tensor> images,
                  std::ostream* log = nullptr);

// build_dataset + train.
TrainResult train(const TrainConfig& cfg, std::ostream* log = nullptr,
                  std::ostream* warnings = nullptr);

// Seeded Fisher-Yates permutation of 0..n-1 (stable across platforms).
std::vector<int> seeded_permutation(int n, std::uint64_t seed);

} // namespace zdce
