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
#include <span>
#include <vector>

#include "qnc/coding.hpp"
#include "qnc/graph.hpp"
#include "qnc/quantizer.hpp"
#include "qnc/transmission.hpp"

namespace qnc {

/// Marginal measurement matrices Psi(2), ..., Psi(t_end) (element i is
/// Psi(i + 2)), where
///
///     Psi(t) = B * sum_{t'=2..t} F(t) F(t-1) ... F(t'+1) A(t')
///
/// with an empty product for t' = t. Built with the recursion
/// P(2) = A(2), P(t) = F(t) P(t-1) + A(t), Psi(t) = B P(t).
std::vector<Eigen::MatrixXd> psi_sequence(const CoefficientSchedule& sched,
                                          const NetworkGraph& g, int t_end);

Eigen::MatrixXd compute_psi(const CoefficientSchedule& sched, const NetworkGraph& g, int t);

/// Effective noise n_eff(2), ..., n_eff(t_end) rebuilt from the logged
/// quantization errors: N(2) = n(2), N(t) = F(t) N(t-1) + n(t), n_eff = B N.
std::vector<Eigen::VectorXd> effective_noise_sequence(const RunTranscript& run,
                                                      const CoefficientSchedule& sched,
                                                      const NetworkGraph& g, int t_end);

/// Entry t' - 2 holds || B sum_{s=2..t'} |F(t') ... F(s+1)| Delta/2 ||^2, the
/// squared bound on |n_eff(t')| obtained from |n_e| <= Delta_e / 2. Summing
/// the first t - 1 entries gives epsilon^2(t).
std::vector<double> epsilon_sq_terms(const CoefficientSchedule& sched, const NetworkGraph& g,
                                     std::span<const Quantizer> quantizers, int t_end);

/// epsilon^2(t): the per-time noise bound, squared and summed over t' = 2..t.
double compute_epsilon_sq(const CoefficientSchedule& sched, const NetworkGraph& g,
                          std::span<const Quantizer> quantizers, int t);

/// The alternative reading of the same bound in which the left factor of each
/// quadratic form runs its products up to t instead of t':
///
///     sum_{t'} <B sum_s |F(t)...F(s+1)| Delta/2, B sum_s |F(t')...F(s+1)| Delta/2>
///
/// with s = 2..t' in both sums. Kept for comparison against compute_epsilon_sq.
double compute_epsilon_sq_as_printed(const CoefficientSchedule& sched, const NetworkGraph& g,
                                     std::span<const Quantizer> quantizers, int t);

/// Stacked measurements z(2..t), matrices Psi(2..t) and effective noise, plus
/// the noise bound. m = (t - 1) |In(v0)|.
struct MeasurementRecord {
  Eigen::VectorXd z_tot;
  Eigen::MatrixXd psi_tot;
  Eigen::VectorXd n_eff_tot;
  double eps_sq = 0.0;
  int t = 2;

  Eigen::Index m() const { return z_tot.size(); }
};

MeasurementRecord assemble_measurements(const RunTranscript& run, const NetworkGraph& g,
                                        const CoefficientSchedule& sched,
                                        std::span<const Quantizer> quantizers, int t);

/// Stacks the first `count` blocks of `blocks` vertically.
Eigen::MatrixXd stack_rows(std::span<const Eigen::MatrixXd> blocks, std::size_t count);
Eigen::VectorXd stack_rows(std::span<const Eigen::VectorXd> blocks, std::size_t count);

}  // namespace qnc
