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
#include <vector>

namespace qnc {

struct OracleResult {
  Eigen::VectorXd s;
  std::vector<std::size_t> support;
  double residual = 0.0;  // ||z - Theta s||
  bool feasible = false;
};

inline constexpr std::size_t kOracleMaxColumns = 20;
inline constexpr std::size_t kOracleMaxSparsity = 3;

/// Brute-force reference for small instances: least-squares fit on every
/// support of size <= k. Among fits with residual <= eps, returns the one of
/// least l1 norm (ties go to the smaller support, then the earlier one in
/// lexicographic order). If none is feasible, returns the smallest-residual
/// fit with `feasible = false`. Throws kBudgetExceeded beyond n = 20 or k = 3.
OracleResult exhaustive_sparse_oracle(const Eigen::VectorXd& z, const Eigen::MatrixXd& theta,
                                      std::size_t k, double eps);

struct RipEstimate {
  std::size_t k = 0;
  double delta = 0.0;
  std::vector<std::size_t> worst_support;
  /// False for sampled estimates, which only bound delta_k from below.
  bool exhaustive = true;
};

inline constexpr std::size_t kRipMaxColumns = 20;
inline constexpr std::size_t kRipMaxOrder = 4;

/// delta_k = max over size-k column subsets S of
/// max(1 - sigma_min(Theta_S)^2, sigma_max(Theta_S)^2 - 1), by enumeration.
/// Throws kBudgetExceeded beyond n = 20 or k = 4; use rip_constant_sampled.
RipEstimate rip_constant(const Eigen::MatrixXd& theta, std::size_t k);

/// Same statistic over `samples` uniformly drawn supports; a lower bound.
RipEstimate rip_constant_sampled(const Eigen::MatrixXd& theta, std::size_t k,
                                 std::size_t samples, std::uint64_t seed);

/// c1 = 4 sqrt(1 + d) / (1 - (1 + sqrt 2) d). Throws kInvalidArgument unless
/// 0 <= d < sqrt(2) - 1.
double recovery_constant(double delta_2k);

/// c1 * eps^2, the bound on ||x - x_hat||^2.
double error_bound(double delta_2k, double eps);

}  // namespace qnc
