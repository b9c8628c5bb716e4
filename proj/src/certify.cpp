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

#include "qnc/certify.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "qnc/error.hpp"
#include "qnc/random.hpp"
#include "qnc/textio.hpp"

namespace qnc {
namespace {

// Visits every k-subset of {0..n-1} in lexicographic order.
template <typename Fn>
void for_each_subset(std::size_t n, std::size_t k, Fn&& fn) {
  if (k > n) return;
  std::vector<std::size_t> idx(k);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  for (;;) {
    fn(idx);
    std::size_t i = k;
    while (i > 0 && idx[i - 1] == n - k + i - 1) --i;
    if (i == 0) return;
    ++idx[i - 1];
    for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

Eigen::MatrixXd columns(const Eigen::MatrixXd& theta, const std::vector<std::size_t>& idx) {
  Eigen::MatrixXd sub(theta.rows(), static_cast<Eigen::Index>(idx.size()));
  for (std::size_t j = 0; j < idx.size(); ++j)
    sub.col(static_cast<Eigen::Index>(j)) = theta.col(static_cast<Eigen::Index>(idx[j]));
  return sub;
}

double support_deviation(const Eigen::MatrixXd& theta, const std::vector<std::size_t>& idx) {
  const Eigen::MatrixXd sub = columns(theta, idx);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sub.transpose() * sub,
                                                    Eigen::EigenvaluesOnly);
  const auto& ev = es.eigenvalues();  // ascending; squared singular values
  return std::max(1.0 - ev(0), ev(ev.size() - 1) - 1.0);
}

}  // namespace

OracleResult exhaustive_sparse_oracle(const Eigen::VectorXd& z, const Eigen::MatrixXd& theta,
                                      std::size_t k, double eps) {
  const auto n = static_cast<std::size_t>(theta.cols());
  require(z.size() == theta.rows(), "measurement length does not match Theta");
  require(eps >= 0, "eps must be non-negative");
  if (n > kOracleMaxColumns || k > kOracleMaxSparsity)
    fail(ErrorCode::kBudgetExceeded,
         "exhaustive oracle limited to n <= 20 and k <= 3 (got n = " + std::to_string(n) +
             ", k = " + std::to_string(k) + ")");

  // Relative tolerance for comparing l1 norms and residuals.
  constexpr double kTie = 1e-12;
  OracleResult best_feasible, best_any;
  bool have_feasible = false, have_any = false;
  double best_l1 = 0.0;

  auto offer = [&](const std::vector<std::size_t>& idx, Eigen::VectorXd s, double res) {
    const bool ok = res <= eps * (1.0 + kTie) + kTie * z.norm();
    if (ok) {
      const double l1 = s.lpNorm<1>();
      if (!have_feasible || l1 < best_l1 - kTie * std::max(1.0, best_l1)) {
        have_feasible = true;
        best_l1 = l1;
        best_feasible = OracleResult{std::move(s), idx, res, true};
      }
    } else if (!have_any || res < best_any.residual) {
      have_any = true;
      best_any = OracleResult{std::move(s), idx, res, false};
    }
  };

  offer({}, Eigen::VectorXd::Zero(theta.cols()), z.norm());
  for (std::size_t size = 1; size <= std::min(k, n); ++size) {
    for_each_subset(n, size, [&](const std::vector<std::size_t>& idx) {
      const Eigen::MatrixXd sub = columns(theta, idx);
      const Eigen::VectorXd coef = sub.colPivHouseholderQr().solve(z);
      Eigen::VectorXd s = Eigen::VectorXd::Zero(theta.cols());
      for (std::size_t j = 0; j < idx.size(); ++j)
        s(static_cast<Eigen::Index>(idx[j])) = coef(static_cast<Eigen::Index>(j));
      offer(idx, std::move(s), (z - sub * coef).norm());
    });
  }
  return have_feasible ? best_feasible : best_any;
}

RipEstimate rip_constant(const Eigen::MatrixXd& theta, std::size_t k) {
  const auto n = static_cast<std::size_t>(theta.cols());
  require(k >= 1 && k <= n, "RIP order must satisfy 1 <= k <= n");
  if (n > kRipMaxColumns || k > kRipMaxOrder)
    fail(ErrorCode::kBudgetExceeded,
         "exhaustive RIP limited to n <= 20 and k <= 4 (got n = " + std::to_string(n) +
             ", k = " + std::to_string(k) + "); use the sampled estimate, which gives a "
             "lower bound on delta_k");
  RipEstimate est;
  est.k = k;
  est.delta = -std::numeric_limits<double>::infinity();
  for_each_subset(n, k, [&](const std::vector<std::size_t>& idx) {
    const double d = support_deviation(theta, idx);
    if (d > est.delta) {
      est.delta = d;
      est.worst_support = idx;
    }
  });
  est.delta = std::max(est.delta, 0.0);
  return est;
}

RipEstimate rip_constant_sampled(const Eigen::MatrixXd& theta, std::size_t k,
                                 std::size_t samples, std::uint64_t seed) {
  const auto n = static_cast<std::size_t>(theta.cols());
  require(k >= 1 && k <= n, "RIP order must satisfy 1 <= k <= n");
  require(samples >= 1, "need at least one sampled support");
  Rng rng(seed);
  std::vector<std::size_t> pool(n);
  RipEstimate est;
  est.k = k;
  est.exhaustive = false;
  for (std::size_t i = 0; i < samples; ++i) {
    std::iota(pool.begin(), pool.end(), std::size_t{0});
    for (std::size_t j = 0; j < k; ++j) {
      std::uniform_int_distribution<std::size_t> pick(j, n - 1);
      std::swap(pool[j], pool[pick(rng)]);
    }
    std::vector<std::size_t> idx(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(k));
    std::sort(idx.begin(), idx.end());
    const double d = support_deviation(theta, idx);
    if (i == 0 || d > est.delta) {
      est.delta = d;
      est.worst_support = std::move(idx);
    }
  }
  est.delta = std::max(est.delta, 0.0);
  return est;
}

double recovery_constant(double delta_2k) {
  const double limit = std::sqrt(2.0) - 1.0;
  if (!(delta_2k >= 0.0 && delta_2k < limit))
    fail(ErrorCode::kInvalidArgument,
         "error bound needs 0 <= delta_2k < sqrt(2) - 1, got " +
             textio::format_double(delta_2k));
  return 4.0 * std::sqrt(1.0 + delta_2k) / (1.0 - (1.0 + std::sqrt(2.0)) * delta_2k);
}

double error_bound(double delta_2k, double eps) {
  require(eps >= 0, "eps must be non-negative");
  return recovery_constant(delta_2k) * eps * eps;
}

}  // namespace qnc
