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

namespace qnc {

/// min ||s||_1 subject to ||z - Theta s||_2^2 <= eps^2, reported in the
/// message domain as x = phi s. An empty `phi` means the identity.
struct DecodeProblem {
  Eigen::VectorXd z;
  Eigen::MatrixXd theta;
  Eigen::MatrixXd phi;
  double eps = 0.0;
};

struct DecodeOptions {
  /// A point is feasible when ||r||^2 <= eps^2 (1 + slack) + (slack ||z||)^2.
  double constraint_slack = 1e-6;
  /// Stop once (primal - dual) <= gap_tolerance * primal.
  double gap_tolerance = 1e-7;
  int max_iterations = 20000;
  int check_interval = 10;
};

struct DecodeResult {
  Eigen::VectorXd s_hat;
  Eigen::VectorXd x_hat;
  double l1_norm = 0.0;
  double residual_sq = 0.0;
  /// Certified lower bound on the optimal l1 norm (a dual objective value).
  double dual_bound = 0.0;
  int iterations = 0;
  /// True when the returned point came from re-solving on a detected support.
  bool polished = false;
};

/// Solves the constrained l1 problem with ADMM (splitting s = u, u confined to
/// the residual ball by an exact SVD projection). Every `check_interval`
/// iterations the current support is re-solved exactly and a duality gap is
/// evaluated; the result is returned once that gap is within tolerance.
///
/// Throws kInfeasible when eps is below the least-squares residual and
/// kNotConverged (with the residual and gap) when the iteration budget runs
/// out.
DecodeResult l1_min_decode(const DecodeProblem& problem, const DecodeOptions& options = {});

bool is_feasible(double residual_sq, double eps, double z_norm, double slack);

}  // namespace qnc
