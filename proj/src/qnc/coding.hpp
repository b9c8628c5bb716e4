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

#include <Eigen/Sparse>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "qnc/graph.hpp"

namespace qnc {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

/// Time-indexed network-coding coefficients for t = 1..t_max.
///
/// alpha(e, t) is the weight of the local message x_tail(e) on edge e.
/// beta(e, t) holds one weight per incoming edge of tail(e), in the order of
/// `g.in_edges(g.tail(e))`. Every coefficient starts at zero; t = 1 is the
/// rest state and is never driven.
class CoefficientSchedule {
 public:
  CoefficientSchedule(const NetworkGraph& g, int t_max);

  int t_max() const { return t_max_; }
  std::size_t edge_count() const { return edge_count_; }

  double alpha(EdgeIndex e, int t) const { return alpha_[slot(t) * edge_count_ + e]; }
  void set_alpha(EdgeIndex e, int t, double v) { alpha_[slot(t) * edge_count_ + e] = v; }

  std::span<const double> beta(EdgeIndex e, int t) const;
  std::span<double> beta(EdgeIndex e, int t);

  friend bool operator==(const CoefficientSchedule&, const CoefficientSchedule&) = default;

 private:
  std::size_t slot(int t) const;

  int t_max_;
  std::size_t edge_count_;
  std::vector<std::size_t> beta_offsets_;
  std::size_t beta_per_t_;
  std::vector<double> alpha_;
  std::vector<double> beta_;
};

/// How the deterministic relay weights beta are chosen.
enum class BetaRule {
  /// beta = 1/(|In(v)|+1) for every t >= 2. The t = 2 row then caps
  /// |alpha(2)| at 1/(|In(v)|+1).
  kAveraging,
  /// beta(2) = 0 (it only ever multiplies the all-zero rest state, so alpha(2)
  /// gets the whole unit budget) and beta = 1/|In(v)| for t >= 3, where
  /// alpha = 0 leaves the full budget to the relays.
  kUnitGain,
  /// kUnitGain magnitudes with a fixed pseudo-random sign per (t, e, e').
  /// The signs come from a seedless hash, so they depend on the graph only.
  kSignedUnitGain,
};

struct CoefficientOptions {
  BetaRule beta_rule = BetaRule::kSignedUnitGain;
  /// Lower clamp on |alpha| in the rescaling divisor.
  double alpha_floor = 1e-12;
};

/// alpha(2) i.i.d. N(0,1) per edge, alpha(t) = 0 for t > 2, beta deterministic
/// per `options.beta_rule`. Any alpha(2) that would break
/// sum|beta| + |alpha| <= 1 on its edge is shrunk onto the boundary.
CoefficientSchedule generate_coefficients(const NetworkGraph& g, int t_max,
                                          std::uint64_t seed,
                                          const CoefficientOptions& options = {});

/// Number of (edge, t) pairs breaking sum|beta| + |alpha| <= 1 + tol.
std::size_t count_overflow_violations(const NetworkGraph& g,
                                      const CoefficientSchedule& sched,
                                      double tol = 1e-12);

/// F(t): |E| x |E| relay map, A(t): |E| x n injection map, B: |In(v0)| x |E|
/// gateway selector (rows in ascending edge id).
struct TransferMatrices {
  SparseMatrix F;
  SparseMatrix A;
  SparseMatrix B;
};

SparseMatrix relay_matrix(const CoefficientSchedule& sched, const NetworkGraph& g, int t);
SparseMatrix injection_matrix(const CoefficientSchedule& sched, const NetworkGraph& g, int t);
SparseMatrix gateway_selector(const NetworkGraph& g);

TransferMatrices build_transfer_matrices(const CoefficientSchedule& sched,
                                         const NetworkGraph& g, int t);

}  // namespace qnc
