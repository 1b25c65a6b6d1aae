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

#include "zdce/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <random>

#include "zdce/curve.hpp"
#include "zdce/dce_net.hpp"
#include "zdce/losses.hpp"
#include "zdce/ops.hpp"

namespace zdce {

namespace {

Tensor random_tensor(Shape s, double lo, double hi, std::mt19937_64& rng) {
  Tensor t(s);
  for (Real& v : t.data())
    v = static_cast<Real>(lo + (hi - lo) * (static_cast<double>(rng() >> 11) *
                                            0x1.0p-53));
  return t;
}

// Uniform magnitude in [lo, hi] with random sign: keeps values off a kink at 0.
Tensor signed_away_from_zero(Shape s, double lo, double hi,
                             std::mt19937_64& rng) {
  Tensor t = random_tensor(s, lo, hi, rng);
  for (Real& v : t.data())
    if (rng() & 1)
      v = -v;
  return t;
}

struct Evaluation {
  double value = 0;
  std::vector<bool> branches; // kink sides of every piecewise op on the tape
};

Evaluation evaluate(const std::vector<Tensor>& inputs, const GraphFn& fn) {
  Tape tape;
  tape.track_branches(true);
  std::vector<Var> vars;
  for (const Tensor& t : inputs)
    vars.push_back(tape.constant(t));
  Evaluation e;
  e.value = tape.scalar(fn(tape, vars));
  for (std::size_t i = 0; i < tape.size(); ++i) {
    const std::vector<bool>& b = tape.branches(tape.at(i));
    e.branches.insert(e.branches.end(), b.begin(), b.end());
  }
  return e;
}

// d fn / d probe[i][e], or nothing if every probed interval crossed a kink.
//
// Central differences around centres spread over [x - h/2, x + h/2] that lie
// on the same smooth piece as x are averaged: each centre sees different
// rounding in the forward pass. A kink inside a probed interval makes that
// side unusable and the other side gives a one-sided difference; kinks on
// both sides of every centre trigger a retry with h/4, then h/16. Steps are
// the ones actually taken after rounding to Real. probe is restored.
std::optional<double> numeric_derivative(std::vector<Tensor>& probe,
                                         std::size_t i, std::size_t e,
                                         const Evaluation& base,
                                         const GraphFn& fn,
                                         const GradCheckOptions& options) {
  const Real orig = probe[i][e];
  for (int shrink = 0; shrink <= 2; ++shrink) {
    const double h = std::ldexp(options.step, -2 * shrink);
    double sum = 0;
    int count = 0;
    for (int j = 0; j < options.centres; ++j) {
      const double offset =
          options.centres == 1
              ? 0.0
              : h * (static_cast<double>(j) / (options.centres - 1) - 0.5);
      const Real c = static_cast<Real>(orig + offset);
      probe[i][e] = c;
      const Evaluation mid = c == orig ? base : evaluate(probe, fn);
      const Real hi = static_cast<Real>(c + h);
      const Real lo = static_cast<Real>(c - h);
      probe[i][e] = hi;
      const Evaluation up = evaluate(probe, fn);
      probe[i][e] = lo;
      const Evaluation down = evaluate(probe, fn);
      probe[i][e] = orig;
      if (mid.branches != base.branches)
        continue;
      const bool up_ok = up.branches == base.branches;
      const bool down_ok = down.branches == base.branches;
      if (up_ok && down_ok)
        sum += (up.value - down.value) /
               (static_cast<double>(hi) - static_cast<double>(lo));
      else if (up_ok)
        sum += (up.value - mid.value) /
               (static_cast<double>(hi) - static_cast<double>(c));
      else if (down_ok)
        sum += (mid.value - down.value) /
               (static_cast<double>(c) - static_cast<double>(lo));
      else
        continue;
      ++count;
    }
    if (count > 0)
      return sum / count;
  }
  return std::nullopt;
}

} // namespace

GradCheckOptions default_gradcheck_options() {
  GradCheckOptions o;
  if constexpr (sizeof(Real) == sizeof(double)) {
    o.step = 1e-5;
    o.threshold = 1e-4;
    o.centres = 1;
  } else {
    o.step = 1e-3;
    o.threshold = 1e-2;
    o.centres = 16;
  }
  return o;
}

std::vector<double> gradient_errors(
    const std::vector<Tensor>& inputs, const GraphFn& fn,
    const GradCheckOptions& options,
    const std::function<void(std::vector<Tensor>&)>& analytic_hook) {
  std::vector<Tensor> analytic;
  for (const Tensor& t : inputs)
    analytic.emplace_back(t.shape());
  {
    Tape tape;
    std::vector<Var> vars;
    for (std::size_t i = 0; i < inputs.size(); ++i)
      vars.push_back(tape.parameter(inputs[i], &analytic[i]));
    tape.backward(fn(tape, vars));
  }
  if (analytic_hook)
    analytic_hook(analytic);

  std::mt19937_64 rng(options.seed);
  std::vector<double> errors;
  std::vector<Tensor> probe = inputs;
  const Evaluation base = evaluate(inputs, fn);
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    std::vector<std::size_t> idx(inputs[i].size());
    for (std::size_t k = 0; k < idx.size(); ++k)
      idx[k] = k;
    // Seeded shuffle; elements are probed in this order until enough of them
    // gave a usable difference.
    for (std::size_t k = 0; k + 1 < idx.size(); ++k) {
      const std::size_t j = k + rng() % (idx.size() - k);
      std::swap(idx[k], idx[j]);
    }
    const std::size_t want =
        static_cast<std::size_t>(std::max(1, options.samples_per_tensor));
    double diff2 = 0, a2 = 0, n2 = 0;
    std::size_t used = 0;
    for (std::size_t k = 0; k < idx.size() && used < want; ++k) {
      const std::size_t e = idx[k];
      const std::optional<double> numeric =
          numeric_derivative(probe, i, e, base, fn, options);
      if (!numeric)
        continue;
      ++used;
      const double a = analytic[i][e];
      diff2 += (a - *numeric) * (a - *numeric);
      a2 += a * a;
      n2 += *numeric * *numeric;
    }
    const double denom = std::max({std::sqrt(a2), std::sqrt(n2), 1e-12});
    // Nothing probed means nothing verified.
    errors.push_back(used == 0 ? std::numeric_limits<double>::infinity()
                               : std::sqrt(diff2) / denom);
  }
  return errors;
}

bool GradCheckReport::passed() const {
  return std::all_of(components.begin(), components.end(),
                     [](const ComponentResult& c) { return c.passed; });
}

GradCheckReport run_gradcheck(const GradCheckOptions& options) {
  GradCheckReport report;
  report.threshold = options.threshold;
  std::mt19937_64 rng(options.seed);

  auto add = [&](const std::string& name, const std::vector<double>& errs) {
    const double worst =
        errs.empty() ? 0.0 : *std::max_element(errs.begin(), errs.end());
    report.components.push_back(
        {name, worst, std::isfinite(worst) && worst < options.threshold});
  };

  {
    const Tensor x = random_tensor({1, 2, 5, 5}, -1, 1, rng);
    const Tensor k = random_tensor({3, 2, 3, 3}, -0.5, 0.5, rng);
    const Tensor b = random_tensor({3, 1, 1, 1}, -0.5, 0.5, rng);
    const Tensor r = random_tensor({1, 3, 5, 5}, -1, 1, rng);
    add("conv2d", gradient_errors({x, k, b},
                                  [&](Tape& t, std::span<const Var> v) {
                                    return dot(t, conv2d(t, v[0], v[1], v[2]),
                                               r);
                                  },
                                  options));
  }
  {
    const Tensor x = signed_away_from_zero({1, 2, 4, 4}, 0.1, 1.0, rng);
    const Tensor r = random_tensor({1, 2, 4, 4}, -1, 1, rng);
    add("relu", gradient_errors({x},
                                [&](Tape& t, std::span<const Var> v) {
                                  return dot(t, relu(t, v[0]), r);
                                },
                                options));
    add("tanh", gradient_errors({x},
                                [&](Tape& t, std::span<const Var> v) {
                                  return dot(t, tanh_act(t, v[0]), r);
                                },
                                options));
  }
  {
    const Tensor a = random_tensor({1, 2, 3, 3}, -1, 1, rng);
    const Tensor b = random_tensor({1, 1, 3, 3}, -1, 1, rng);
    const Tensor r = random_tensor({1, 3, 3, 3}, -1, 1, rng);
    add("concat", gradient_errors({a, b},
                                  [&](Tape& t, std::span<const Var> v) {
                                    return dot(t,
                                               concat_channels(t, v[0], v[1]),
                                               r);
                                  },
                                  options));
  }
  {
    const Tensor x = random_tensor({2, 3, 5, 5}, 0, 1, rng);
    const Tensor r = random_tensor({2, 3, 2, 2}, -1, 1, rng);
    const Tensor rc = random_tensor({2, 1, 5, 5}, -1, 1, rng);
    add("region_mean", gradient_errors({x},
                                       [&](Tape& t, std::span<const Var> v) {
                                         return dot(t, region_mean(t, v[0], 2),
                                                    r);
                                       },
                                       options));
    add("channel_mean", gradient_errors({x},
                                        [&](Tape& t, std::span<const Var> v) {
                                          return dot(t, channel_mean(t, v[0]),
                                                     rc);
                                        },
                                        options));
  }
  {
    const int n_iter = 3;
    const Tensor img = random_tensor({1, 3, 4, 4}, 0.05, 0.95, rng);
    const Tensor maps = random_tensor({1, 3 * n_iter, 4, 4}, -0.9, 0.9, rng);
    const Tensor r = random_tensor({1, 3, 4, 4}, -1, 1, rng);
    std::function<void(std::vector<Tensor>&)> hook;
    if (options.inject_fault)
      hook = [](std::vector<Tensor>& g) {
        for (Real& v : g[0].data())
          v *= Real(1.1);
      };
    add("curve", gradient_errors({img, maps},
                                 [&](Tape& t, std::span<const Var> v) {
                                   return dot(t,
                                              apply_curves(t, v[0], v[1],
                                                           n_iter),
                                              r);
                                 },
                                 options, hook));
  }
  {
    const Tensor y = random_tensor({2, 3, 8, 8}, 0, 1, rng);
    const Tensor i = random_tensor({2, 3, 8, 8}, 0, 1, rng);
    add("loss_spa", gradient_errors({y, i},
                                    [](Tape& t, std::span<const Var> v) {
                                      return spatial_consistency(t, v[0], v[1],
                                                                 2);
                                    },
                                    options));
    // Region means of a dark image stay well below E, away from the kink.
    const Tensor dark = random_tensor({2, 3, 8, 8}, 0, 0.6, rng);
    add("loss_exp", gradient_errors({dark},
                                    [](Tape& t, std::span<const Var> v) {
                                      return exposure_control(t, v[0], 0.6, 4);
                                    },
                                    options));
    add("loss_col", gradient_errors({y},
                                    [](Tape& t, std::span<const Var> v) {
                                      return color_constancy(t, v[0]);
                                    },
                                    options));
    const Tensor maps = random_tensor({2, 6, 5, 5}, -1, 1, rng);
    add("loss_tv", gradient_errors({maps},
                                   [](Tape& t, std::span<const Var> v) {
                                     return illumination_smoothness(t, v[0], 2);
                                   },
                                   options));
  }

  // Network end to end: total loss w.r.t. every kernel and bias.
  {
    LossConfig loss;
    loss.spa_region = 2;
    loss.exp_region = 4;
    const ArchConfig arch{};
    // Unit normal weights rescaled per layer to 1.5 * sqrt(2 / fan_in): the
    // signal neither dies nor saturates over seven layers, so every layer's
    // gradient stands clear of 32-bit rounding in the loss.
    const NetworkWeights w = init_weights(arch, options.seed, 1.0);
    std::vector<Tensor> params;
    for (const ConvLayer& l : w.layers) {
      Tensor k = l.kernel;
      const double scale = 1.5 * std::sqrt(2.0 / (k.shape().c * 9.0));
      for (Real& v : k.data())
        v = static_cast<Real>(v * scale);
      params.push_back(k);
      Tensor b = random_tensor(l.bias.shape(), -0.1, 0.1, rng);
      params.push_back(b);
    }
    const Tensor image = random_tensor({1, 3, 8, 8}, 0.0, 0.5, rng);
    const GraphFn fn = [&](Tape& t, std::span<const Var> v) {
      BoundWeights bw;
      bw.arch = arch;
      for (std::size_t k = 0; k < v.size(); k += 2) {
        bw.kernels.push_back(v[k]);
        bw.biases.push_back(v[k + 1]);
      }
      Var x = t.constant(image);
      Var maps = forward(t, bw, x);
      Var y = apply_curves(t, x, maps, arch.n_iter);
      return total_loss(t, y, x, maps, arch.n_iter, loss).total;
    };
    const std::vector<double> errs = gradient_errors(params, fn, options);
    for (std::size_t l = 0; l < w.layers.size(); ++l)
      add("layer" + std::to_string(l + 1),
          {errs[2 * l], errs[2 * l + 1]});
  }
  return report;
}

} // namespace zdce
