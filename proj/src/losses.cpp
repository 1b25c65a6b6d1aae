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

#include "zdce/losses.hpp"

#include <array>
#include <cmath>

#include "zdce/ops.hpp"

namespace zdce {

namespace {

Real sign(Real v) { return v > 0 ? Real(1) : (v < 0 ? Real(-1) : Real(0)); }

constexpr std::array<std::array<int, 2>, 4> kNeighbours{
    {{-1, 0}, {1, 0}, {0, -1}, {0, 1}}};

// Loss over two (N, 1, gh, gw) grids of region means.
Var spatial_reduce(Tape& tape, Var enhanced_means, Var input_means) {
  const Tensor& ym = tape.value(enhanced_means);
  const Tensor& im = tape.value(input_means);
  require_same_shape(ym, im, "spatial_consistency");
  const Shape s = ym.shape();
  const double regions = static_cast<double>(ym.size());

  double acc = 0.0;
  std::vector<bool> sides;
  for (int n = 0; n < s.n; ++n)
    for (int y = 0; y < s.h; ++y)
      for (int x = 0; x < s.w; ++x)
        for (const auto& [dy, dx] : kNeighbours) {
          const int ny = y + dy, nx = x + dx;
          if (ny < 0 || ny >= s.h || nx < 0 || nx >= s.w)
            continue;
          if (tape.tracks_branches()) {
            sides.push_back(ym.at(n, 0, y, x) > ym.at(n, 0, ny, nx));
            sides.push_back(im.at(n, 0, y, x) > im.at(n, 0, ny, nx));
          }
          const double d =
              std::abs(static_cast<double>(ym.at(n, 0, y, x)) -
                       ym.at(n, 0, ny, nx)) -
              std::abs(static_cast<double>(im.at(n, 0, y, x)) -
                       im.at(n, 0, ny, nx));
          acc += d * d;
        }

  Var out = tape.record_scalar(OpKind::scalar_reduce, acc / regions,
      {enhanced_means, input_means}, [s, regions](const BackwardArgs& a) {
        const Tensor& ym = *a.inputs[0];
        const Tensor& im = *a.inputs[1];
        Tensor* gy = a.grad_inputs[0];
        Tensor* gi = a.grad_inputs[1];
        const double g = a.grad_output[0] / regions;
        for (int n = 0; n < s.n; ++n)
          for (int y = 0; y < s.h; ++y)
            for (int x = 0; x < s.w; ++x)
              for (const auto& [dy, dx] : kNeighbours) {
                const int ny = y + dy, nx = x + dx;
                if (ny < 0 || ny >= s.h || nx < 0 || nx >= s.w)
                  continue;
                const Real ey = ym.at(n, 0, y, x) - ym.at(n, 0, ny, nx);
                const Real ei = im.at(n, 0, y, x) - im.at(n, 0, ny, nx);
                const double d = std::abs(static_cast<double>(ey)) -
                                 std::abs(static_cast<double>(ei));
                const Real coef = static_cast<Real>(2.0 * d * g);
                if (gy) {
                  gy->at(n, 0, y, x) += coef * sign(ey);
                  gy->at(n, 0, ny, nx) -= coef * sign(ey);
                }
                if (gi) {
                  gi->at(n, 0, y, x) -= coef * sign(ei);
                  gi->at(n, 0, ny, nx) += coef * sign(ei);
                }
              }
      });
  if (tape.tracks_branches())
    tape.set_branches(out, std::move(sides));
  return out;
}

Var exposure_reduce(Tape& tape, Var means, double E) {
  const Tensor& m = tape.value(means);
  const double count = static_cast<double>(m.size());
  // The target is compared at working precision so an image sitting exactly
  // at E scores exactly zero.
  const Real target = static_cast<Real>(E);
  double acc = 0.0;
  for (Real v : m.data())
    acc += std::abs(static_cast<double>(v - target));
  Var out = tape.record_scalar(OpKind::scalar_reduce, acc / count, {means},
                     [target, count](const BackwardArgs& a) {
                       const Tensor& m = *a.inputs[0];
                       Tensor& gm = *a.grad_inputs[0];
                       const Real g =
                           static_cast<Real>(a.grad_output[0] / count);
                       for (std::size_t i = 0; i < m.size(); ++i)
                         gm[i] += g * sign(m[i] - target);
                     });
  if (tape.tracks_branches()) {
    std::vector<bool> sides;
    for (Real v : m.data())
      sides.push_back(v > target);
    tape.set_branches(out, std::move(sides));
  }
  return out;
}

constexpr std::array<std::array<int, 2>, 3> kChannelPairs{
    {{0, 1}, {0, 2}, {1, 2}}};

} // namespace

void LossConfig::validate() const {
  if (!(E >= 0.0 && E <= 1.0))
    throw ConfigError("E must lie in [0, 1]");
  if (spa_region < 1 || exp_region < 1)
    throw ConfigError("region sizes must be >= 1");
  if (W_col < 0 || W_tv < 0 || W_spa < 0 || W_exp < 0)
    throw ConfigError("loss weights must be >= 0");
}

double combine(const LossConfig& cfg, double l_spa, double l_exp,
               double l_col, double l_tv) {
  return cfg.W_spa * l_spa + cfg.W_exp * l_exp + cfg.W_col * l_col +
         cfg.W_tv * l_tv;
}

Var spatial_consistency(Tape& tape, Var enhanced, Var input, int region) {
  require_same_shape(tape.value(enhanced), tape.value(input),
                     "spatial_consistency");
  if (tape.value(enhanced).channels() != 3)
    throw ShapeError("spatial_consistency expects 3-channel images");
  Var ym = region_mean(tape, channel_mean(tape, enhanced), region);
  Var im = region_mean(tape, channel_mean(tape, input), region);
  return spatial_reduce(tape, ym, im);
}

Var exposure_control(Tape& tape, Var enhanced, double E, int region) {
  Var m = region_mean(tape, channel_mean(tape, enhanced), region);
  return exposure_reduce(tape, m, E);
}

Var color_constancy(Tape& tape, Var enhanced) {
  const Tensor& y = tape.value(enhanced);
  const Shape s = y.shape();
  if (s.c != 3)
    throw ShapeError("color_constancy expects 3 channels, got " + s.str());
  const std::size_t plane = s.plane();
  if (plane == 0 || s.n == 0)
    throw EmptyOutputError("color_constancy on empty image");

  // Whole-image channel means, per batch item.
  std::vector<std::array<double, 3>> means(s.n);
  for (int n = 0; n < s.n; ++n)
    for (int c = 0; c < 3; ++c) {
      double acc = 0.0;
      const Real* p = y.plane(n, c);
      for (std::size_t i = 0; i < plane; ++i)
        acc += p[i];
      means[n][c] = acc / static_cast<double>(plane);
    }
  double loss = 0.0;
  for (const auto& j : means)
    for (const auto& [p, q] : kChannelPairs)
      loss += (j[p] - j[q]) * (j[p] - j[q]);
  loss /= s.n;

  return tape.record_scalar(OpKind::scalar_reduce, loss,
      {enhanced}, [means, s, plane](const BackwardArgs& a) {
        Tensor& gy = *a.grad_inputs[0];
        const double scale =
            a.grad_output[0] / (static_cast<double>(s.n) * plane);
        for (int n = 0; n < s.n; ++n) {
          std::array<double, 3> dj{0, 0, 0};
          for (const auto& [p, q] : kChannelPairs) {
            const double d = 2.0 * (means[n][p] - means[n][q]);
            dj[p] += d;
            dj[q] -= d;
          }
          for (int c = 0; c < 3; ++c) {
            const Real g = static_cast<Real>(dj[c] * scale);
            Real* dst = gy.plane(n, c);
            for (std::size_t i = 0; i < plane; ++i)
              dst[i] += g;
          }
        }
      });
}

Var illumination_smoothness(Tape& tape, Var maps, int n_iter) {
  const Tensor& a = tape.value(maps);
  const Shape s = a.shape();
  if (n_iter < 1 || s.c % n_iter != 0)
    throw ShapeError("illumination_smoothness: " + std::to_string(s.c) +
                     " channels for " + std::to_string(n_iter) +
                     " iterations");
  const bool has_interior = s.h >= 2 && s.w >= 2 && s.n > 0;
  const double valid =
      has_interior ? static_cast<double>(s.h - 1) * (s.w - 1) : 1.0;
  const double norm = valid * n_iter * std::max(s.n, 1);

  double acc = 0.0;
  std::vector<bool> sides;
  if (has_interior)
    for (int n = 0; n < s.n; ++n)
      for (int c = 0; c < s.c; ++c) {
        const Real* p = a.plane(n, c);
        for (int y = 0; y < s.h - 1; ++y)
          for (int x = 0; x < s.w - 1; ++x) {
            const Real v = p[y * s.w + x];
            if (tape.tracks_branches()) {
              sides.push_back(p[y * s.w + x + 1] > v);
              sides.push_back(p[(y + 1) * s.w + x] > v);
            }
            const double t =
                std::abs(static_cast<double>(p[y * s.w + x + 1]) - v) +
                std::abs(static_cast<double>(p[(y + 1) * s.w + x]) - v);
            acc += t * t;
          }
      }

  Var out = tape.record_scalar(OpKind::scalar_reduce, acc / norm,
      {maps}, [s, norm, has_interior](const BackwardArgs& args) {
        if (!has_interior)
          return;
        const Tensor& a = *args.inputs[0];
        Tensor& ga = *args.grad_inputs[0];
        const double g = args.grad_output[0] / norm;
        for (int n = 0; n < s.n; ++n)
          for (int c = 0; c < s.c; ++c) {
            const Real* p = a.plane(n, c);
            Real* d = ga.plane(n, c);
            for (int y = 0; y < s.h - 1; ++y)
              for (int x = 0; x < s.w - 1; ++x) {
                const int i = y * s.w + x;
                const Real dx = p[i + 1] - p[i];
                const Real dy = p[i + s.w] - p[i];
                const double t = std::abs(static_cast<double>(dx)) +
                                 std::abs(static_cast<double>(dy));
                const Real coef = static_cast<Real>(2.0 * t * g);
                d[i + 1] += coef * sign(dx);
                d[i] -= coef * sign(dx);
                d[i + s.w] += coef * sign(dy);
                d[i] -= coef * sign(dy);
              }
          }
      });
  if (tape.tracks_branches())
    tape.set_branches(out, std::move(sides));
  return out;
}

LossBreakdown LossVars::values(const Tape& tape) const {
  LossBreakdown b;
  b.l_spa = tape.scalar(l_spa);
  b.l_exp = tape.scalar(l_exp);
  b.l_col = tape.scalar(l_col);
  b.l_tv = tape.scalar(l_tv);
  b.total = tape.scalar(total);
  return b;
}

LossVars total_loss(Tape& tape, Var enhanced, Var input, Var maps, int n_iter,
                    const LossConfig& cfg) {
  cfg.validate();
  LossVars v;
  v.l_spa = spatial_consistency(tape, enhanced, input, cfg.spa_region);
  v.l_exp = exposure_control(tape, enhanced, cfg.E, cfg.exp_region);
  v.l_col = color_constancy(tape, enhanced);
  v.l_tv = illumination_smoothness(tape, maps, n_iter);
  const std::array<Var, 4> terms{v.l_spa, v.l_exp, v.l_col, v.l_tv};
  const std::array<double, 4> weights{cfg.W_spa, cfg.W_exp, cfg.W_col,
                                      cfg.W_tv};
  v.total = weighted_sum(tape, terms, weights);
  return v;
}

double spatial_consistency(const Tensor& enhanced, const Tensor& input,
                           int region) {
  Tape tape;
  Var y = tape.constant(enhanced);
  Var i = tape.constant(input);
  return tape.scalar(spatial_consistency(tape, y, i, region));
}

double exposure_control(const Tensor& enhanced, double E, int region) {
  Tape tape;
  Var y = tape.constant(enhanced);
  return tape.scalar(exposure_control(tape, y, E, region));
}

double color_constancy(const Tensor& enhanced) {
  Tape tape;
  Var y = tape.constant(enhanced);
  return tape.scalar(color_constancy(tape, y));
}

double illumination_smoothness(const Tensor& maps, int n_iter) {
  Tape tape;
  Var m = tape.constant(maps);
  return tape.scalar(illumination_smoothness(tape, m, n_iter));
}

LossBreakdown total_loss(const Tensor& enhanced, const Tensor& input,
                         const ParamMaps& maps, const LossConfig& cfg) {
  Tape tape;
  Var y = tape.constant(enhanced);
  Var i = tape.constant(input);
  Var m = tape.constant(maps.tensor());
  return total_loss(tape, y, i, m, maps.n_iter(), cfg).values(tape);
}

} // namespace zdce
