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

#include "zdce/dce_net.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "zdce/kernels.hpp"
#include "zdce/ops.hpp"

namespace zdce {

void ArchConfig::validate() const {
  if (depth != 3 && depth != 7)
    throw ConfigError("unsupported depth " + std::to_string(depth) +
                      " (supported: 3, 7)");
  if (width < 1)
    throw ConfigError("width must be >= 1, got " + std::to_string(width));
  CurveConfig{n_iter}.validate();
}

std::string ArchConfig::str() const {
  return std::to_string(depth) + "-" + std::to_string(width) + "-" +
         std::to_string(n_iter);
}

std::vector<LayerSpec> topology(const ArchConfig& arch) {
  arch.validate();
  const int half = (arch.depth + 1) / 2;
  std::vector<LayerSpec> layers;
  for (int j = 1; j <= arch.depth; ++j) {
    LayerSpec spec;
    if (j == 1) {
      spec.in_channels = 3;
      spec.sources = {0};
    } else if (j <= half) {
      spec.in_channels = arch.width;
      spec.sources = {j - 1};
    } else {
      spec.in_channels = 2 * arch.width;
      spec.sources = {arch.depth - j + 1, j - 1};
    }
    spec.final = j == arch.depth;
    spec.out_channels = spec.final ? 3 * arch.n_iter : arch.width;
    layers.push_back(std::move(spec));
  }
  return layers;
}

GradRecord GradRecord::zeros_like(const NetworkWeights& w) {
  GradRecord g;
  for (const ConvLayer& l : w.layers)
    g.layers.push_back({Tensor(l.kernel.shape()), Tensor(l.bias.shape())});
  return g;
}

void GradRecord::zero() {
  for (ConvLayer& l : layers) {
    l.kernel.fill(0);
    l.bias.fill(0);
  }
}

NetworkWeights zero_weights(const ArchConfig& arch) {
  NetworkWeights w;
  w.arch = arch;
  for (const LayerSpec& spec : topology(arch))
    w.layers.push_back(
        {Tensor(Shape{spec.out_channels, spec.in_channels, 3, 3}),
         Tensor(Shape{spec.out_channels, 1, 1, 1})});
  return w;
}

NetworkWeights init_weights(const ArchConfig& arch, std::uint64_t seed,
                            double stddev) {
  NetworkWeights w = zero_weights(arch);
  std::mt19937_64 rng(seed);
  // 53-bit uniform in [0, 1).
  auto uniform = [&rng] {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
  };
  bool have_spare = false;
  double spare = 0.0;
  auto gaussian = [&] {
    if (have_spare) {
      have_spare = false;
      return spare;
    }
    const double u1 = 1.0 - uniform(); // (0, 1]
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    spare = r * std::sin(theta);
    have_spare = true;
    return r * std::cos(theta);
  };
  for (ConvLayer& l : w.layers)
    for (Real& v : l.kernel.data())
      v = static_cast<Real>(stddev * gaussian());
  return w;
}

std::size_t param_count(const NetworkWeights& w) {
  std::size_t total = 0;
  for (const ConvLayer& l : w.layers)
    total += l.kernel.size() + l.bias.size();
  return total;
}

std::size_t param_count(const ArchConfig& arch) {
  std::size_t total = 0;
  for (const LayerSpec& s : topology(arch))
    total += static_cast<std::size_t>(s.out_channels) * s.in_channels * 9 +
             s.out_channels;
  return total;
}

std::uint64_t mac_count(const ArchConfig& arch, std::uint64_t h,
                        std::uint64_t w) {
  std::uint64_t per_pixel = 0;
  for (const LayerSpec& s : topology(arch))
    per_pixel += static_cast<std::uint64_t>(s.in_channels) * s.out_channels *
                     9 +
                 s.out_channels;
  return per_pixel * h * w;
}

namespace {

void check_weights(const NetworkWeights& w,
                   const std::vector<LayerSpec>& specs) {
  if (w.layers.size() != specs.size())
    throw ShapeError("network has " + std::to_string(w.layers.size()) +
                     " layers, architecture " + w.arch.str() + " needs " +
                     std::to_string(specs.size()));
  for (std::size_t i = 0; i < specs.size(); ++i) {
    const Shape want{specs[i].out_channels, specs[i].in_channels, 3, 3};
    if (w.layers[i].kernel.shape() != want ||
        static_cast<int>(w.layers[i].bias.size()) != specs[i].out_channels)
      throw ShapeError("layer " + std::to_string(i + 1) + " kernel " +
                       w.layers[i].kernel.shape().str() + ", expected " +
                       want.str());
  }
}

void check_image(const Tensor& image) {
  if (image.channels() != 3)
    throw ShapeError("DCE-Net expects a 3-channel image, got " +
                     image.shape().str());
}

} // namespace

ParamMaps forward(const NetworkWeights& w, const Tensor& image) {
  const std::vector<LayerSpec> specs = topology(w.arch);
  check_weights(w, specs);
  check_image(image);
  std::vector<Tensor> outputs(specs.size() + 1);
  outputs[0] = image;
  std::vector<Real> scratch;
  for (std::size_t i = 0; i < specs.size(); ++i) {
    const LayerSpec& s = specs[i];
    std::vector<const Tensor*> in;
    for (int src : s.sources)
      in.push_back(&outputs[src]);
    outputs[i + 1] = kernels::conv3x3_fused(
        in, w.layers[i].kernel, &w.layers[i].bias,
        s.final ? kernels::Activation::tanh : kernels::Activation::relu,
        scratch);
  }
  return ParamMaps(std::move(outputs.back()), w.arch.n_iter);
}

BoundWeights bind(Tape& tape, const NetworkWeights& w, GradRecord* grads) {
  check_weights(w, topology(w.arch));
  if (grads && grads->layers.size() != w.layers.size())
    throw ShapeError("gradient record does not match network");
  BoundWeights b;
  b.arch = w.arch;
  for (std::size_t i = 0; i < w.layers.size(); ++i) {
    if (grads) {
      b.kernels.push_back(
          tape.parameter(w.layers[i].kernel, &grads->layers[i].kernel));
      b.biases.push_back(
          tape.parameter(w.layers[i].bias, &grads->layers[i].bias));
    } else {
      b.kernels.push_back(tape.constant(w.layers[i].kernel));
      b.biases.push_back(tape.constant(w.layers[i].bias));
    }
  }
  return b;
}

Var forward(Tape& tape, const BoundWeights& w, Var image) {
  const std::vector<LayerSpec> specs = topology(w.arch);
  check_image(tape.value(image));
  std::vector<Var> outputs(specs.size() + 1);
  outputs[0] = image;
  for (std::size_t i = 0; i < specs.size(); ++i) {
    const LayerSpec& s = specs[i];
    Var in = outputs[s.sources[0]];
    if (s.sources.size() == 2)
      in = concat_channels(tape, outputs[s.sources[0]], outputs[s.sources[1]]);
    Var pre = conv2d(tape, in, w.kernels[i], w.biases[i]);
    outputs[i + 1] = s.final ? tanh_act(tape, pre) : relu(tape, pre);
  }
  return outputs.back();
}

} // namespace zdce
