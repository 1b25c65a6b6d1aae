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

#include "zdce/adam.hpp"

#include <cmath>

namespace zdce {

void AdamConfig::validate() const {
  if (!(lr > 0))
    throw ConfigError("learning rate must be > 0");
  if (!(beta1 >= 0 && beta1 < 1) || !(beta2 >= 0 && beta2 < 1))
    throw ConfigError("Adam betas must lie in [0, 1)");
  if (!(eps > 0))
    throw ConfigError("Adam eps must be > 0");
}

AdamState AdamState::fresh(const NetworkWeights& w, AdamConfig config) {
  config.validate();
  AdamState s;
  s.config = config;
  for (const ConvLayer& l : w.layers) {
    s.m.push_back({Tensor(l.kernel.shape()), Tensor(l.bias.shape())});
    s.v.push_back({Tensor(l.kernel.shape()), Tensor(l.bias.shape())});
  }
  return s;
}

void adam_update(std::span<Real> params, std::span<const Real> grads,
                 std::span<Real> m, std::span<Real> v, std::uint64_t step,
                 const AdamConfig& c) {
  if (grads.size() != params.size() || m.size() != params.size() ||
      v.size() != params.size())
    throw ContractError("adam_update: array lengths differ");
  if (step == 0)
    throw ContractError("adam_update: step is 1-based");
  const double correction1 = 1.0 - std::pow(c.beta1, static_cast<double>(step));
  const double correction2 = 1.0 - std::pow(c.beta2, static_cast<double>(step));
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double g = grads[i];
    const double mi = c.beta1 * m[i] + (1.0 - c.beta1) * g;
    const double vi = c.beta2 * v[i] + (1.0 - c.beta2) * g * g;
    m[i] = static_cast<Real>(mi);
    v[i] = static_cast<Real>(vi);
    const double mhat = mi / correction1;
    const double vhat = vi / correction2;
    params[i] =
        static_cast<Real>(params[i] - c.lr * mhat / (std::sqrt(vhat) + c.eps));
  }
}

void adam_step(NetworkWeights& w, const GradRecord& g, AdamState& state) {
  const std::size_t layers = w.layers.size();
  if (g.layers.size() != layers || state.m.size() != layers ||
      state.v.size() != layers)
    throw ContractError("adam_step: layer counts differ");
  for (std::size_t i = 0; i < layers; ++i) {
    const auto same = [](const Tensor& a, const Tensor& b) {
      return a.shape() == b.shape();
    };
    if (!same(w.layers[i].kernel, g.layers[i].kernel) ||
        !same(w.layers[i].kernel, state.m[i].kernel) ||
        !same(w.layers[i].kernel, state.v[i].kernel) ||
        !same(w.layers[i].bias, g.layers[i].bias) ||
        !same(w.layers[i].bias, state.m[i].bias) ||
        !same(w.layers[i].bias, state.v[i].bias))
      throw ContractError("adam_step: shape mismatch in layer " +
                          std::to_string(i + 1));
  }
  ++state.step;
  for (std::size_t i = 0; i < layers; ++i) {
    adam_update(w.layers[i].kernel.data(), g.layers[i].kernel.data(),
                state.m[i].kernel.data(), state.v[i].kernel.data(), state.step,
                state.config);
    adam_update(w.layers[i].bias.data(), g.layers[i].bias.data(),
                state.m[i].bias.data(), state.v[i].bias.data(), state.step,
                state.config);
  }
}

} // namespace zdce
