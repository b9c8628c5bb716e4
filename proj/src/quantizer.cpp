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

#include "qnc/quantizer.hpp"

#include <cmath>
#include <string>

#include "qnc/error.hpp"
#include "qnc/textio.hpp"

namespace qnc {

Quantizer::Quantizer(int bits, double q_max) : bits_(bits), q_max_(q_max) {
  require(bits >= kMinBits,
          "quantizer needs at least 2 bits (block length x capacity), got " +
              std::to_string(bits));
  require(bits <= kMaxBits, "quantizer resolution above 52 bits is not representable");
  require(q_max > 0 && std::isfinite(q_max), "q_max must be positive and finite");
  const double levels = std::ldexp(1.0, bits) - 1.0;
  step_ = 2.0 * q_max / levels;
  max_index_ = (std::int64_t{1} << (bits - 1)) - 1;
}

Quantizer Quantizer::for_edge(int block_length, int capacity, double q_max) {
  require(block_length >= 1, "block length must be at least 1");
  require(capacity >= 1, "edge capacity must be at least 1");
  return Quantizer(block_length * capacity, q_max);
}

std::int64_t Quantizer::index(double u) const {
  if (!(std::abs(u) <= q_max_))
    fail(ErrorCode::kOverflow, "quantizer input " + textio::format_double(u) +
                                   " outside [-q_max, q_max] with q_max = " +
                                   textio::format_double(q_max_));
  const double r = std::abs(u) / step_;
  auto i = static_cast<std::int64_t>(std::ceil(r - 0.5));
  if (i > max_index_) i = max_index_;  // only reachable through rounding at |u| = q_max
  return u < 0 ? -i : i;
}

}  // namespace qnc
