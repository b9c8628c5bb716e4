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

#pragma once

#include <cstdint>

namespace qnc {

/// Midtread uniform quantizer on [-q_max, q_max] with `bits` bits.
///
/// Step is 2 q_max / (2^bits - 1); the reconstruction levels are i * step for
/// |i| <= 2^(bits-1) - 1, so there are 2^bits - 1 levels and zero is one of
/// them. Inputs halfway between two levels round toward zero.
class Quantizer {
 public:
  static constexpr int kMinBits = 2;
  static constexpr int kMaxBits = 52;

  Quantizer(int bits, double q_max);

  /// Quantizer for an edge carrying `capacity` bits per use over a block of
  /// `block_length` channel uses.
  static Quantizer for_edge(int block_length, int capacity, double q_max);

  int bits() const { return bits_; }
  double q_max() const { return q_max_; }
  double step() const { return step_; }
  std::int64_t max_index() const { return max_index_; }
  std::uint64_t level_count() const { return 2 * static_cast<std::uint64_t>(max_index_) + 1; }

  /// Signed level index of the nearest level. Throws kOverflow if |u| > q_max.
  std::int64_t index(double u) const;
  double level(std::int64_t i) const { return static_cast<double>(i) * step_; }
  double operator()(double u) const { return level(index(u)); }

  /// Offset-binary code in [0, 2^bits - 2]; fits in `bits` bits.
  std::uint64_t encode(double u) const {
    return static_cast<std::uint64_t>(index(u) + max_index_);
  }
  double decode(std::uint64_t code) const {
    return level(static_cast<std::int64_t>(code) - max_index_);
  }

 private:
  int bits_;
  double q_max_;
  double step_;
  std::int64_t max_index_;
};

}  // namespace qnc
