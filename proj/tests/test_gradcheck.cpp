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

#include "test_util.hpp"
#include "zdce/gradcheck.hpp"
#include "zdce/ops.hpp"

using namespace zdce;

TEST_SUITE("gradcheck") {

TEST_CASE("finite differences agree with a hand-written gradient") {
  const Tensor x = test::uniform({1, 2, 3, 3}, 0.1, 1, 1);
  const Tensor r = test::uniform({1, 2, 3, 3}, -1, 1, 2);
  GradCheckOptions opt = default_gradcheck_options();
  const auto err = gradient_errors(
      {x},
      [&](Tape& t, std::span<const Var> in) {
        return dot(t, tanh_act(t, in[0]), r);
      },
      opt);
  REQUIRE(err.size() == 1);
  CHECK(err[0] < opt.threshold);

  const auto broken = gradient_errors(
      {x},
      [&](Tape& t, std::span<const Var> in) {
        return dot(t, tanh_act(t, in[0]), r);
      },
      opt, [](std::vector<Tensor>& g) {
        for (Real& v : g[0].data()) v *= Real(1.2);
      });
  CHECK(broken[0] > opt.threshold);
}

TEST_CASE("full suite passes and the fault injection fails") {
  const GradCheckReport ok = run_gradcheck(default_gradcheck_options());
  for (const ComponentResult& c : ok.components) {
    CAPTURE(c.name);
    CAPTURE(c.max_rel_error);
    CHECK(c.passed);
  }
  CHECK(ok.passed());

  GradCheckOptions bad = default_gradcheck_options();
  bad.inject_fault = true;
  const GradCheckReport fail = run_gradcheck(bad);
  CHECK_FALSE(fail.passed());
}

} // TEST_SUITE
