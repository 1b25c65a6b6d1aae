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

#include <cmath>

#include "test_util.hpp"
#include "zdce/dce_net.hpp"
#include "zdce/errors.hpp"

using namespace zdce;
using zdce::test::uniform;

TEST_SUITE("dce-net") {

TEST_CASE("parameter counts") {
  CHECK(param_count(ArchConfig{}) == 79416);
  CHECK(param_count(init_weights(ArchConfig{}, 0)) == 79416);
  CHECK(param_count(ArchConfig{}) == 896 + 9248 * 3 + 18464 * 2 + 13848);
  // 3-32-8: L1 3->32, L2 32->32, L3 concat(L1, L2) 64->24.
  const std::size_t shallow = (3 * 9 + 1) * 32 + (32 * 9 + 1) * 32 +
                              (64 * 9 + 1) * 24;
  CHECK(shallow == 23992);
  CHECK(param_count(ArchConfig{3, 32, 8}) == shallow);
  CHECK(param_count(init_weights(ArchConfig{3, 32, 8}, 0)) == shallow);
  for (int f : {1, 8, 16})
    for (int n : {1, 4})
      for (int l : {3, 7}) {
        const ArchConfig a{l, f, n};
        CHECK(param_count(init_weights(a, 1)) == param_count(a));
      }
}

TEST_CASE("unsupported architectures are rejected") {
  CHECK_THROWS_AS(param_count(ArchConfig{0, 32, 8}), ConfigError);
  CHECK_THROWS_AS(init_weights(ArchConfig{5, 32, 8}, 0), ConfigError);
  CHECK_THROWS_AS(init_weights(ArchConfig{7, 0, 8}, 0), ConfigError);
  CHECK_THROWS_AS(init_weights(ArchConfig{7, 32, 0}, 0), ConfigError);
}

TEST_CASE("topology of the default network") {
  const auto t = topology(ArchConfig{});
  REQUIRE(t.size() == 7);
  CHECK(t[0].in_channels == 3);
  CHECK(t[0].sources == std::vector<int>{0});
  CHECK(t[3].sources == std::vector<int>{3});
  CHECK(t[4].sources == std::vector<int>{3, 4});
  CHECK(t[5].sources == std::vector<int>{2, 5});
  CHECK(t[6].sources == std::vector<int>{1, 6});
  CHECK(t[6].out_channels == 24);
  CHECK(t[6].final);
}

TEST_CASE("mac counts") {
  const ArchConfig a{};
  CHECK(mac_count(a, 256, 256) == 5204606976ULL);
  CHECK(mac_count(a, 1, 1) == 79200 + 216);
  CHECK(mac_count(a, 512, 256) == 2 * mac_count(a, 256, 256));
  const double paper = 5.21e9;
  CHECK(std::abs(mac_count(a, 256, 256) - paper) / paper < 0.01);
}

TEST_CASE("init is seeded and has the requested statistics") {
  const NetworkWeights a = init_weights(ArchConfig{}, 42);
  CHECK(a == init_weights(ArchConfig{}, 42));
  CHECK_FALSE(a == init_weights(ArchConfig{}, 43));
  double s = 0, s2 = 0;
  std::size_t n = 0;
  for (const ConvLayer& l : a.layers) {
    for (Real v : l.kernel.data()) {
      s += v;
      s2 += static_cast<double>(v) * v;
      ++n;
    }
    for (Real v : l.bias.data())
      CHECK(v == Real(0));
  }
  const double mean = s / n;
  const double sd = std::sqrt(s2 / n - mean * mean);
  CHECK(std::abs(mean) < 0.001);
  CHECK(std::abs(sd - 0.02) < 0.002);
}

TEST_CASE("zero final layer gives zero maps") {
  NetworkWeights w = init_weights(ArchConfig{}, 3);
  w.layers.back().kernel.fill(0);
  w.layers.back().bias.fill(0);
  const ParamMaps m = forward(w, uniform({1, 3, 9, 7}, 0, 1, 4));
  for (Real v : m.tensor().data())
    CHECK(v == Real(0));
}

TEST_CASE("forward keeps spatial size and stays inside (-1, 1)") {
  const NetworkWeights w = init_weights(ArchConfig{}, 5, 0.05);
  for (auto [h, wd] : {std::pair{1, 1}, {5, 3}, {13, 17}}) {
    const ParamMaps m = forward(w, uniform({2, 3, h, wd}, 0, 1, 6));
    CHECK(m.tensor().shape() == Shape{2, 24, h, wd});
    CHECK(m.n_iter() == 8);
    for (Real v : m.tensor().data())
      CHECK(std::abs(v) < Real(1));
  }
  const ParamMaps m3 =
      forward(init_weights(ArchConfig{3, 8, 2}, 1), Tensor({1, 3, 4, 4}));
  CHECK(m3.tensor().shape() == Shape{1, 6, 4, 4});
}

TEST_CASE("forward rejects non-RGB input") {
  CHECK_THROWS_AS(forward(init_weights(ArchConfig{}, 0), Tensor({1, 1, 4, 4})),
                  ShapeError);
}

TEST_CASE("constant input gives maps constant away from the border") {
  NetworkWeights w = init_weights(ArchConfig{}, 8, 0.1);
  for (ConvLayer& l : w.layers)
    l.bias.fill(Real(0.01));
  const ParamMaps m = forward(w, Tensor({1, 3, 20, 20}, Real(0.3)));
  // Seven 3x3 layers: the border influence reaches 7 pixels in.
  for (int c = 0; c < 24; ++c) {
    const Real ref = m.tensor().at(0, c, 10, 10);
    for (int y = 7; y < 13; ++y)
      for (int x = 7; x < 13; ++x)
        CHECK(m.tensor().at(0, c, y, x) == doctest::Approx(ref).epsilon(1e-5));
  }
}

TEST_CASE("recorded forward matches the tensor forward") {
  const NetworkWeights w = init_weights(ArchConfig{}, 9, 0.1);
  const Tensor x = uniform({2, 3, 6, 5}, 0, 1, 10);
  GradRecord g = GradRecord::zeros_like(w);
  Tape tape;
  Var maps = forward(tape, bind(tape, w, &g), tape.constant(x));
  CHECK(tape.value(maps) == forward(w, x).tensor());
}

} // TEST_SUITE
