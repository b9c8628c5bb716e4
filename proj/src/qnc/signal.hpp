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

#include <Eigen/Dense>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>

namespace qnc {
namespace textio {
class Tokenizer;
}

/// Messages x = phi * s with s exactly k-sparse and |x_v| < q_max.
struct MessageEnsemble {
  Eigen::VectorXd s;
  Eigen::MatrixXd phi;
  Eigen::VectorXd x;
  double q_max = 1.0;
  std::size_t k = 0;

  std::size_t size() const { return static_cast<std::size_t>(x.size()); }

  /// Text dump: `qnc-messages 1`, then `n k q_max`, then the vectors s and x,
  /// then phi row by row. Numbers use shortest round-trip formatting.
  std::string to_text() const;
  static MessageEnsemble from_text(std::string_view text);
  static MessageEnsemble read_text(textio::Tokenizer& tok);
};

/// Haar-distributed orthonormal matrix: QR of an i.i.d. N(0,1) matrix with
/// the column signs fixed by diag(R) > 0.
Eigen::MatrixXd random_orthonormal_basis(std::size_t n, std::uint64_t seed);

/// Fraction of q_max that the largest |x_v| is scaled to.
inline constexpr double kMessagePeakFraction = 0.99;

/// Uniform size-k support, non-zeros i.i.d. U(-1/2, 1/2), random orthonormal
/// basis; then s and x are scaled together so max|x_v| = 0.99 q_max.
MessageEnsemble generate_sparse_messages(std::size_t n, std::size_t k,
                                         double q_max, std::uint64_t seed);

}  // namespace qnc
