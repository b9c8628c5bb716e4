// Copyright 2026 The QNC Gather Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cmath>
#include <random>

#include "qnc/quantizer.hpp"
#include "support.hpp"

using namespace qnc;

TEST_CASE("step sizes") {
  CHECK(Quantizer::for_edge(2, 1, 1.0).step() == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(Quantizer::for_edge(4, 1, 1.0).step() == doctest::Approx(2.0 / 15.0).epsilon(1e-15));
  CHECK(Quantizer::for_edge(3, 2, 0.5).step() == doctest::Approx(1.0 / 63.0).epsilon(1e-15));
  CHECK(Quantizer(2, 1.0).level_count() == 3);
  CHECK(Quantizer(8, 1.0).level_count() == 255);
}

TEST_CASE("two-bit grid") {
  const Quantizer q(2, 1.0);
  CHECK(q(0.5) == doctest::Approx(2.0 / 3.0));
  CHECK(q(-0.5) == doctest::Approx(-2.0 / 3.0));
  CHECK(q(1.0 / 3.0) == 0.0);
  CHECK(q(-1.0 / 3.0) == 0.0);
  CHECK(q(2.0 / 3.0) == 2.0 / 3.0);
  CHECK(q(1.0) == 2.0 / 3.0);
}

TEST_CASE("zero and exact levels are fixed points") {
  for (int bits = 2; bits <= 20; ++bits) {
    const Quantizer q(bits, 1.0);
    CHECK(q(0.0) == 0.0);
    for (std::int64_t i : {std::int64_t{1}, q.max_index() / 2, -q.max_index()})
      CHECK(q(q.level(i)) == q.level(i));
  }
}

TEST_CASE("overflow is a hard failure") {
  const Quantizer q(4, 1.0);
  CHECK_CODE(q(1.0000001), ErrorCode::kOverflow);
  CHECK_CODE(q(-2.0), ErrorCode::kOverflow);
  CHECK_CODE(q(std::nan("")), ErrorCode::kOverflow);
  CHECK_CODE(Quantizer(1, 1.0), ErrorCode::kInvalidArgument);
  CHECK_CODE(Quantizer(53, 1.0), ErrorCode::kInvalidArgument);
  CHECK_CODE(Quantizer(4, 0.0), ErrorCode::kInvalidArgument);
}

TEST_CASE("codes fit in the bit budget and decode back") {
  std::mt19937_64 rng(5);
  for (int bits = 2; bits <= 12; ++bits) {
    const Quantizer q(bits, 2.0);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int i = 0; i < 2000; ++i) {
      const double v = u(rng);
      const std::uint64_t code = q.encode(v);
      CHECK(code < (std::uint64_t{1} << bits));
      CHECK(q.decode(code) == q(v));
      CHECK(std::abs(q(v) - v) <= q.step() / 2 * (1 + 1e-12));
    }
  }
}
