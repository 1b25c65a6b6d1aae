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

#include <doctest.h>

#include <array>
#include <cmath>

#include "test_util.hpp"
#include "zdce/errors.hpp"
#include "zdce/losses.hpp"
#include "zdce/ops.hpp"

using namespace zdce;
using zdce::test::uniform;

namespace {

// Straight-loop versions of the four losses in double precision.
namespace oracle {

std::vector<double> gray_regions(const Tensor& t, int n, int r, int& gh,
                                 int& gw) {
  gh = t.height() / r;
  gw = t.width() / r;
  std::vector<double> out(gh * gw, 0.0);
  for (int by = 0; by < gh; ++by)
    for (int bx = 0; bx < gw; ++bx) {
      double acc = 0;
      for (int y = by * r; y < (by + 1) * r; ++y)
        for (int x = bx * r; x < (bx + 1) * r; ++x)
          acc += (double(t.at(n, 0, y, x)) + t.at(n, 1, y, x) +
                  t.at(n, 2, y, x)) / 3.0;
      out[by * gw + bx] = acc / (r * r);
    }
  return out;
}

double spatial(const Tensor& Y, const Tensor& I, int r) {
  double total = 0;
  int regions = 0;
  for (int n = 0; n < Y.batch(); ++n) {
    int gh, gw;
    const auto ym = gray_regions(Y, n, r, gh, gw);
    const auto im = gray_regions(I, n, r, gh, gw);
    regions += gh * gw;
    for (int y = 0; y < gh; ++y)
      for (int x = 0; x < gw; ++x) {
        const int i = y * gw + x;
        std::vector<int> nb;
        if (y > 0) nb.push_back(i - gw);
        if (y + 1 < gh) nb.push_back(i + gw);
        if (x > 0) nb.push_back(i - 1);
        if (x + 1 < gw) nb.push_back(i + 1);
        for (int j : nb) {
          const double d =
              std::abs(ym[i] - ym[j]) - std::abs(im[i] - im[j]);
          total += d * d;
        }
      }
  }
  return total / regions;
}

double exposure(const Tensor& Y, double E, int r) {
  double total = 0;
  int count = 0;
  for (int n = 0; n < Y.batch(); ++n) {
    int gh, gw;
    for (double m : gray_regions(Y, n, r, gh, gw)) {
      total += std::abs(m - E);
      ++count;
    }
  }
  return total / count;
}

double color(const Tensor& Y) {
  double total = 0;
  for (int n = 0; n < Y.batch(); ++n) {
    std::array<double, 3> j{};
    for (int c = 0; c < 3; ++c) {
      for (int y = 0; y < Y.height(); ++y)
        for (int x = 0; x < Y.width(); ++x)
          j[c] += Y.at(n, c, y, x);
      j[c] /= Y.height() * Y.width();
    }
    total += (j[0] - j[1]) * (j[0] - j[1]) + (j[0] - j[2]) * (j[0] - j[2]) +
             (j[1] - j[2]) * (j[1] - j[2]);
  }
  return total / Y.batch();
}

double smoothness(const Tensor& A, int n_iter) {
  double total = 0;
  for (int n = 0; n < A.batch(); ++n)
    for (int c = 0; c < A.channels(); ++c) {
      double acc = 0;
      for (int y = 0; y + 1 < A.height(); ++y)
        for (int x = 0; x + 1 < A.width(); ++x) {
          const double gx = A.at(n, c, y, x + 1) - double(A.at(n, c, y, x));
          const double gy = A.at(n, c, y + 1, x) - double(A.at(n, c, y, x));
          acc += (std::abs(gx) + std::abs(gy)) * (std::abs(gx) + std::abs(gy));
        }
      total += acc / ((A.height() - 1) * (A.width() - 1));
    }
  return total / (n_iter * A.batch());
}

} // namespace oracle

Tensor gray(Shape s, Real v) { return Tensor({s.n, 3, s.h, s.w}, v); }

} // namespace

TEST_SUITE("losses") {

TEST_CASE("zero cases are exact") {
  const Tensor img = uniform({2, 3, 16, 16}, 0, 1, 1);
  CHECK(spatial_consistency(img, img, 4) <= 1e-12);
  CHECK(exposure_control(gray({1, 3, 32, 32}, Real(0.6)), 0.6, 16) <= 1e-12);

  Tensor g({2, 3, 7, 5});
  const Tensor one = uniform({2, 1, 7, 5}, 0, 1, 2);
  for (int n = 0; n < 2; ++n)
    for (int c = 0; c < 3; ++c)
      std::copy_n(one.plane(n, 0), 35, g.plane(n, c));
  CHECK(color_constancy(g) <= 1e-12);

  CHECK(illumination_smoothness(Tensor({2, 24, 9, 9}, Real(0.3)), 8) <= 1e-12);

  const Tensor c = gray({1, 3, 32, 32}, Real(0.6));
  const LossBreakdown b = total_loss(c, c, ParamMaps(Tensor({1, 24, 32, 32}), 8),
                                     LossConfig{});
  CHECK(b.total <= 1e-12);
}

TEST_CASE("spatial consistency: two-column example") {
  Tensor i({1, 3, 8, 8});
  for (int c = 0; c < 3; ++c)
    for (int y = 0; y < 8; ++y)
      for (int x = 0; x < 8; ++x)
        i.at(0, c, y, x) = x < 4 ? Real(0.2) : Real(0.4);
  const Tensor y = gray({1, 3, 8, 8}, Real(0.5));
  const double want = oracle::spatial(y, i, 4);
  CHECK(std::abs(want - 0.04) < 1e-6);
  CHECK(std::abs(spatial_consistency(y, i, 4) - 0.04) < 1e-6);
}

TEST_CASE("spatial consistency matches the oracle and is negation invariant") {
  const Tensor y = uniform({2, 3, 12, 20}, 0, 1, 3);
  const Tensor i = uniform({2, 3, 12, 20}, 0, 1, 4);
  for (int r : {1, 3, 4}) {
    const double got = spatial_consistency(y, i, r);
    CHECK(got == doctest::Approx(oracle::spatial(y, i, r)).epsilon(1e-5));
  }
  Tensor ny = y, ni = i;
  for (Real& v : ny.data()) v = 1 - v;
  for (Real& v : ni.data()) v = 1 - v;
  CHECK(spatial_consistency(ny, ni, 4) ==
        doctest::Approx(spatial_consistency(y, i, 4)).epsilon(1e-5));

  // Y = 1 - I on non-uniform regions
  CHECK(spatial_consistency(ni, i, 4) < 1e-10);
  CHECK_THROWS_AS(spatial_consistency(y, Tensor({2, 3, 12, 19}), 4), ShapeError);
}

TEST_CASE("exposure control examples") {
  CHECK(std::abs(exposure_control(gray({1, 3, 16, 16}, Real(0.2)), 0.6, 16) -
                 0.4) < 1e-6);

  Tensor half({1, 3, 16, 32});
  for (int c = 0; c < 3; ++c)
    for (int y = 0; y < 16; ++y)
      for (int x = 0; x < 32; ++x)
        half.at(0, c, y, x) = x < 16 ? Real(0.6) : Real(0.8);
  CHECK(std::abs(oracle::exposure(half, 0.6, 16) - 0.1) < 1e-6);
  CHECK(std::abs(exposure_control(half, 0.6, 16) - 0.1) < 1e-6);

  const Tensor r = uniform({2, 3, 40, 33}, 0, 1, 5);
  CHECK(exposure_control(r, 0.6, 16) ==
        doctest::Approx(oracle::exposure(r, 0.6, 16)).epsilon(1e-5));
  CHECK_THROWS_AS(exposure_control(uniform({1, 3, 8, 8}, 0, 1, 6), 0.6, 16),
                  EmptyOutputError);
}

TEST_CASE("color constancy examples") {
  Tensor red({1, 3, 4, 4});
  std::fill_n(red.plane(0, 0), 16, Real(1));
  CHECK(color_constancy(red) == doctest::Approx(2.0));

  Tensor m({1, 3, 5, 5});
  const Real means[3] = {0.5f, 0.3f, 0.1f};
  for (int c = 0; c < 3; ++c)
    std::fill_n(m.plane(0, c), 25, means[c]);
  CHECK(std::abs(oracle::color(m) - 0.24) < 1e-6);
  CHECK(std::abs(color_constancy(m) - 0.24) < 1e-6);

  const Tensor r = uniform({3, 3, 6, 7}, 0, 1, 7);
  CHECK(color_constancy(r) == doctest::Approx(oracle::color(r)).epsilon(1e-6));

  // Any channel permutation leaves the value unchanged.
  Tensor p(r.shape());
  const int perm[3] = {2, 0, 1};
  for (int n = 0; n < 3; ++n)
    for (int c = 0; c < 3; ++c)
      std::copy_n(r.plane(n, perm[c]), 42, p.plane(n, c));
  CHECK(color_constancy(p) == doctest::Approx(color_constancy(r)).epsilon(1e-6));
  CHECK_THROWS_AS(color_constancy(Tensor({1, 2, 4, 4})), ShapeError);
}

TEST_CASE("illumination smoothness examples") {
  Tensor a({1, 3, 2, 2});
  a.at(0, 0, 0, 1) = 1;
  a.at(0, 0, 1, 1) = 1;
  // One valid position, dx = 1, dy = 0.
  CHECK(oracle::smoothness(a, 1) == 1.0);
  CHECK(illumination_smoothness(a, 1) == 1.0);

  const Tensor r = uniform({2, 24, 7, 9}, -1, 1, 8);
  CHECK(illumination_smoothness(r, 8) ==
        doctest::Approx(oracle::smoothness(r, 8)).epsilon(1e-6));

  Tensor lin({1, 3, 5, 6});
  for (int c = 0; c < 3; ++c)
    for (int y = 0; y < 5; ++y)
      for (int x = 0; x < 6; ++x)
        lin.at(0, c, y, x) = Real(0.1) * x;
  Tensor lin3 = lin;
  for (Real& v : lin3.data()) v *= 3;
  CHECK(illumination_smoothness(lin3, 1) ==
        doctest::Approx(9 * illumination_smoothness(lin, 1)).epsilon(1e-5));

  CHECK(illumination_smoothness(Tensor({1, 3, 1, 5}, 1), 1) == 0.0);
  CHECK_THROWS_AS(illumination_smoothness(Tensor({1, 5, 3, 3}), 2), ShapeError);
}

TEST_CASE("total loss weighting") {
  CHECK(std::abs(combine(LossConfig{}, 0.04, 0.1, 0.24, 0.5) - 10.26) < 1e-12);

  const Tensor y = uniform({1, 3, 32, 32}, 0, 1, 9);
  const Tensor i = uniform({1, 3, 32, 32}, 0, 1, 10);
  const ParamMaps smooth(Tensor({1, 24, 32, 32}, Real(0.1)), 8);
  const ParamMaps rough(uniform({1, 24, 32, 32}, -1, 1, 11), 8);
  LossConfig cfg;
  const LossBreakdown b = total_loss(y, i, rough, cfg);
  CHECK(b.total == doctest::Approx(combine(cfg, b.l_spa, b.l_exp, b.l_col,
                                           b.l_tv)));
  CHECK(b.l_spa >= 0);
  CHECK(b.l_exp >= 0);
  CHECK(b.l_col >= 0);
  CHECK(b.l_tv > 0);

  cfg.W_tv = 0;
  CHECK(total_loss(y, i, rough, cfg).total ==
        total_loss(y, i, smooth, cfg).total);

  LossConfig bad;
  bad.E = 1.5;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("recorded losses match the tensor forms") {
  const Tensor y = uniform({2, 3, 32, 32}, 0, 1, 12);
  const Tensor i = uniform({2, 3, 32, 32}, 0, 1, 13);
  const Tensor m = uniform({2, 24, 32, 32}, -1, 1, 14);
  Tape tape;
  const LossVars v = total_loss(tape, tape.constant(y), tape.constant(i),
                                tape.constant(m), 8, LossConfig{});
  CHECK(v.values(tape) == total_loss(y, i, ParamMaps(m, 8), LossConfig{}));
}

} // TEST_SUITE
