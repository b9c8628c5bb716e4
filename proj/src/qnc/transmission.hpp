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

namespace qnc {

/// Edge contents y(t) and the quantization error n(t) = y(t) - (pre-quantized
/// value) logged while producing them.
struct EdgeState {
  Eigen::VectorXd y;
  Eigen::VectorXd quant_err;
  int t = 1;

  /// All-zero contents at t = 1.
  static EdgeState initial_rest(std::size_t edge_count);
};

/// One quantizer per edge, resolution block_length * C_e bits.
std::vector<Quantizer> edge_quantizers(const NetworkGraph& g, int block_length,
                                       double q_max);

/// The un-quantized edge inputs for time state.t + 1:
/// sum_{e' in In(tail e)} beta_{e,e'} y_e'(t) + alpha_e x_tail(e).
Eigen::VectorXd relay_inputs(const EdgeState& state, const NetworkGraph& g,
                             const CoefficientSchedule& sched, const Eigen::VectorXd& x);

/// Advances one time step, quantizing every edge with its own quantizer.
/// A pre-quantization magnitude above q_max means the overflow condition was
/// broken upstream and throws kOverflow.
EdgeState step_network(const EdgeState& state, const NetworkGraph& g,
                       const CoefficientSchedule& sched, const Eigen::VectorXd& x,
                       std::span<const Quantizer> quantizers);

/// States for t = 1..t_end (index t - 1).
class RunTranscript {
 public:
  RunTranscript() = default;
  explicit RunTranscript(std::vector<EdgeState> states) : states_(std::move(states)) {}

  int t_end() const { return static_cast<int>(states_.size()); }
  const EdgeState& at(int t) const { return states_.at(static_cast<std::size_t>(t - 1)); }
  const Eigen::VectorXd& y(int t) const { return at(t).y; }
  const Eigen::VectorXd& noise(int t) const { return at(t).quant_err; }
  std::span<const EdgeState> states() const { return states_; }

 private:
  std::vector<EdgeState> states_;
};

RunTranscript simulate_qnc(const NetworkGraph& g, const CoefficientSchedule& sched,
                           const Eigen::VectorXd& x, std::span<const Quantizer> quantizers,
                           int t_end);

/// Same recursion with quantization switched off; the logged errors are zero.
RunTranscript simulate_unquantized(const NetworkGraph& g, const CoefficientSchedule& sched,
                                   const Eigen::VectorXd& x, int t_end);

}  // namespace qnc
