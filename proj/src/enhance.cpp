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

#include "zdce/enhance.hpp"

#include <algorithm>
#include <chrono>
#include <numeric>
#include <random>

#include "zdce/curve.hpp"
#include "zdce/heatmap.hpp"
#include "zdce/image_io.hpp"
#include "zdce/kernels.hpp"
#include "zdce/metrics.hpp"

namespace zdce {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

Tensor enhance_tensor(const NetworkWeights& w, const Tensor& image) {
  const ParamMaps maps = forward(w, image);
  return apply_curves(image, maps);
}

EnhanceReport enhance(const NetworkWeights& w, const fs::path& input,
                      const fs::path& output,
                      const std::optional<fs::path>& reference) {
  EnhanceReport report;
  report.input = input;
  report.output = output;
  const auto start = Clock::now();
  const Tensor image = to_tensor(read_image(input));
  const Image8 result = to_image8(enhance_tensor(w, image));
  if (output.has_parent_path())
    fs::create_directories(output.parent_path());
  write_png(output, result);
  report.seconds =
      std::chrono::duration<double>(Clock::now() - start).count();
  if (reference) {
    const Tensor ref = to_tensor(read_image(*reference));
    const Tensor got = to_tensor(result);
    report.psnr = psnr(got, ref);
    report.mae = mae(got, ref);
  }
  return report;
}

std::array<fs::path, 3> export_heatmaps(const NetworkWeights& w,
                                        const fs::path& input,
                                        const fs::path& out_dir) {
  const Tensor image = to_tensor(read_image(input));
  const ParamMaps maps = forward(w, image);
  fs::create_directories(out_dir);
  static constexpr const char* kSuffix[3] = {"_R.png", "_G.png", "_B.png"};
  std::array<fs::path, 3> paths;
  for (int c = 0; c < 3; ++c) {
    paths[c] = out_dir / (input.stem().string() + kSuffix[c]);
    write_png(paths[c], colorize(averaged_channel_map(maps, c)));
  }
  return paths;
}

LatencyStats summarize(std::vector<double> samples) {
  LatencyStats s;
  s.samples = samples;
  if (samples.empty())
    return s;
  std::sort(samples.begin(), samples.end());
  s.min = samples.front();
  const std::size_t n = samples.size();
  s.median = n % 2 ? samples[n / 2]
                   : 0.5 * (samples[n / 2 - 1] + samples[n / 2]);
  s.mean = std::accumulate(samples.begin(), samples.end(), 0.0) /
           static_cast<double>(n);
  return s;
}

LatencyStats benchmark_inference(const NetworkWeights& w, int width,
                                 int height, int repeats, std::uint64_t seed) {
  if (repeats < 3)
    throw ConfigError("benchmark needs at least 3 repeats");
  if (width < 1 || height < 1)
    throw ConfigError("benchmark image size must be positive");
  Tensor image(Shape{1, 3, height, width});
  std::mt19937_64 rng(seed);
  for (Real& v : image.data())
    v = static_cast<Real>(static_cast<double>(rng() >> 11) * 0x1.0p-53);

  const int saved_threads = kernels::max_threads();
  kernels::set_threads(1);
  volatile Real sink = 0;
  sink = enhance_tensor(w, image)[0]; // warm-up
  std::vector<double> samples;
  for (int r = 0; r < repeats; ++r) {
    const auto start = Clock::now();
    const Tensor out = enhance_tensor(w, image);
    samples.push_back(
        std::chrono::duration<double>(Clock::now() - start).count());
    sink = out[0];
  }
  (void)sink;
  kernels::set_threads(saved_threads);
  return summarize(std::move(samples));
}

} // namespace zdce
