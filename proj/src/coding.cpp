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

#include "qnc/coding.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qnc/error.hpp"
#include "qnc/random.hpp"

namespace qnc {
namespace {

constexpr std::uint64_t kBetaSignKey = 0x51c0'de5a'7e11'a9f3ULL;

bool beta_sign_negative(int t, EdgeIndex e, EdgeIndex from) {
  return derive_seed(kBetaSignKey, {static_cast<std::uint64_t>(t), e, from}) >> 63;
}

}  // namespace

CoefficientSchedule::CoefficientSchedule(const NetworkGraph& g, int t_max)
    : t_max_(t_max), edge_count_(g.edge_count()) {
  require(t_max >= 2, "coefficient horizon t_max must be at least 2");
  beta_offsets_.resize(edge_count_ + 1, 0);
  for (EdgeIndex e = 0; e < edge_count_; ++e)
    beta_offsets_[e + 1] = beta_offsets_[e] + g.in_edges(g.tail(e)).size();
  beta_per_t_ = beta_offsets_.back();
  const auto slots = static_cast<std::size_t>(t_max) + 1;
  alpha_.assign(slots * edge_count_, 0.0);
  beta_.assign(slots * beta_per_t_, 0.0);
}

std::size_t CoefficientSchedule::slot(int t) const {
  if (t < 1 || t > t_max_)
    fail(ErrorCode::kInvalidArgument,
         "time " + std::to_string(t) + " outside schedule horizon [1, " +
             std::to_string(t_max_) + "]");
  return static_cast<std::size_t>(t);
}

std::span<const double> CoefficientSchedule::beta(EdgeIndex e, int t) const {
  const std::size_t base = slot(t) * beta_per_t_;
  return std::span<const double>(beta_).subspan(base + beta_offsets_[e],
                                                beta_offsets_[e + 1] - beta_offsets_[e]);
}

std::span<double> CoefficientSchedule::beta(EdgeIndex e, int t) {
  const std::size_t base = slot(t) * beta_per_t_;
  return std::span<double>(beta_).subspan(base + beta_offsets_[e],
                                          beta_offsets_[e + 1] - beta_offsets_[e]);
}

CoefficientSchedule generate_coefficients(const NetworkGraph& g, int t_max,
                                          std::uint64_t seed,
                                          const CoefficientOptions& options) {
  CoefficientSchedule sched(g, t_max);
  Rng rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  for (EdgeIndex e = 0; e < g.edge_count(); ++e) {
    const std::size_t fan_in = g.in_edges(g.tail(e)).size();
    for (int t = 2; t <= t_max; ++t) {
      double w = 0.0;
      if (fan_in > 0) {
        switch (options.beta_rule) {
          case BetaRule::kAveraging:
            w = 1.0 / static_cast<double>(fan_in + 1);
            break;
          case BetaRule::kUnitGain:
          case BetaRule::kSignedUnitGain:
            w = t == 2 ? 0.0 : 1.0 / static_cast<double>(fan_in);
            break;
        }
      }
      auto row = sched.beta(e, t);
      std::fill(row.begin(), row.end(), w);
      if (options.beta_rule == BetaRule::kSignedUnitGain) {
        const auto in = g.in_edges(g.tail(e));
        for (std::size_t j = 0; j < row.size(); ++j)
          if (beta_sign_negative(t, e, in[j])) row[j] = -row[j];
      }
    }

    double a = normal(rng);
    double beta_sum = 0.0;
    for (double b : sched.beta(e, 2)) beta_sum += std::abs(b);
    const double headroom = 1.0 - beta_sum;
    if (std::abs(a) > headroom)
      a *= headroom / std::max(std::abs(a), options.alpha_floor);
    sched.set_alpha(e, 2, a);
  }
  return sched;
}

std::size_t count_overflow_violations(const NetworkGraph& g,
                                      const CoefficientSchedule& sched, double tol) {
  std::size_t violations = 0;
  for (int t = 2; t <= sched.t_max(); ++t) {
    for (EdgeIndex e = 0; e < g.edge_count(); ++e) {
      double sum = std::abs(sched.alpha(e, t));
      for (double b : sched.beta(e, t)) sum += std::abs(b);
      if (sum > 1.0 + tol) ++violations;
    }
  }
  return violations;
}

SparseMatrix relay_matrix(const CoefficientSchedule& sched, const NetworkGraph& g, int t) {
  const auto m = static_cast<Eigen::Index>(g.edge_count());
  std::vector<Eigen::Triplet<double>> entries;
  for (EdgeIndex e = 0; e < g.edge_count(); ++e) {
    auto in = g.in_edges(g.tail(e));
    auto row = sched.beta(e, t);
    for (std::size_t j = 0; j < in.size(); ++j)
      if (row[j] != 0.0)
        entries.emplace_back(static_cast<Eigen::Index>(e),
                             static_cast<Eigen::Index>(in[j]), row[j]);
  }
  SparseMatrix f(m, m);
  f.setFromTriplets(entries.begin(), entries.end());
  return f;
}

SparseMatrix injection_matrix(const CoefficientSchedule& sched, const NetworkGraph& g, int t) {
  std::vector<Eigen::Triplet<double>> entries;
  for (EdgeIndex e = 0; e < g.edge_count(); ++e) {
    double a = sched.alpha(e, t);
    if (a != 0.0)
      entries.emplace_back(static_cast<Eigen::Index>(e),
                           static_cast<Eigen::Index>(g.tail(e)), a);
  }
  SparseMatrix a(static_cast<Eigen::Index>(g.edge_count()),
                 static_cast<Eigen::Index>(g.node_count()));
  a.setFromTriplets(entries.begin(), entries.end());
  return a;
}

SparseMatrix gateway_selector(const NetworkGraph& g) {
  auto in = g.in_edges(g.gateway());
  std::vector<Eigen::Triplet<double>> entries;
  for (std::size_t i = 0; i < in.size(); ++i)
    entries.emplace_back(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(in[i]), 1.0);
  SparseMatrix b(static_cast<Eigen::Index>(in.size()),
                 static_cast<Eigen::Index>(g.edge_count()));
  b.setFromTriplets(entries.begin(), entries.end());
  return b;
}

TransferMatrices build_transfer_matrices(const CoefficientSchedule& sched,
                                         const NetworkGraph& g, int t) {
  require(t >= 2 && t <= sched.t_max(), "transfer matrices need 2 <= t <= t_max");
  return TransferMatrices{relay_matrix(sched, g, t), injection_matrix(sched, g, t),
                          gateway_selector(g)};
}

}  // namespace qnc
