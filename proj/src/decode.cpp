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

#include "qnc/decode.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "qnc/error.hpp"
#include "qnc/textio.hpp"

namespace qnc {
namespace {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

// Euclidean projection onto {u : ||Theta u - z|| <= eps} using the thin SVD
// Theta = U S V^T. With c = U^T z, the constraint reads
// ||S V^T u - c||^2 <= rho2 where rho2 = eps^2 - ||z - U c||^2.
class ResidualBallProjector {
 public:
  ResidualBallProjector(const MatrixXd& v, const VectorXd& sv, const VectorXd& c, double rho2)
      : v_(v), sv_(sv), c_(c), rho2_(rho2) {}

  VectorXd operator()(const VectorXd& point) const {
    const VectorXd a = v_.transpose() * point;
    const VectorXd g = sv_.cwiseProduct(a) - c_;
    const double f0 = g.squaredNorm();
    if (f0 <= rho2_) return point;
    VectorXd b(a.size());
    if (rho2_ <= 0.0) {
      b = c_.cwiseQuotient(sv_);
    } else {
      const double lambda = solve_multiplier(g);
      const VectorXd denom = (1.0 + lambda * sv_.array().square()).matrix();
      b = (a + lambda * sv_.cwiseProduct(c_)).cwiseQuotient(denom);
    }
    return point + v_ * (b - a);
  }

 private:
  // Root of ||g ./ (1 + lambda s^2)||^2 = rho2 for lambda > 0. Newton on
  // 1/||p(lambda)|| - 1/rho, which is concave, so iterates from 0 increase
  // monotonically towards the root; bisection guards against stalls.
  double solve_multiplier(const VectorXd& g) const {
    const double rho = std::sqrt(rho2_);
    const VectorXd s2 = sv_.array().square().matrix();
    double lo = 0.0, hi = std::numeric_limits<double>::infinity();
    double lambda = 0.0;
    for (int it = 0; it < 200; ++it) {
      const VectorXd inv = (1.0 + lambda * s2.array()).inverse().matrix();
      const VectorXd p = g.cwiseProduct(inv);
      const double norm = p.norm();
      if (std::abs(norm - rho) <= 1e-14 * rho) break;
      if (norm > rho) lo = lambda; else hi = lambda;
      const double fprime =
          -2.0 * (g.array().square() * s2.array() * inv.array().cube()).sum();
      const double f = norm * norm;
      const double h = 1.0 / norm - 1.0 / rho;
      const double hprime = -0.5 * fprime / (f * norm);
      double next = hprime > 0 ? lambda - h / hprime : lo * 2 + 1;
      if (!(next > lo && next < hi)) next = std::isfinite(hi) ? 0.5 * (lo + hi) : 2.0 * lo + 1.0;
      if (next == lambda) break;
      lambda = next;
    }
    return lambda;
  }

  const MatrixXd& v_;
  const VectorXd& sv_;
  const VectorXd& c_;
  double rho2_;
};

VectorXd soft_threshold(const VectorXd& v, double tau) {
  return v.unaryExpr([tau](double e) {
    if (e > tau) return e - tau;
    if (e < -tau) return e + tau;
    return 0.0;
  });
}

struct Context {
  const MatrixXd& theta;
  const VectorXd& z;
  double eps;
  double eps2;
  double z_norm;
  double slack;
};

// Dual objective of max z^T y - eps ||y|| s.t. ||Theta^T y||_inf <= 1 at the
// best feasible rescaling of direction y. Always a valid lower bound.
double dual_value(const Context& ctx, const VectorXd& y) {
  const double scale = (ctx.theta.transpose() * y).cwiseAbs().maxCoeff();
  if (!(scale > 0) || !std::isfinite(scale)) return 0.0;
  const double num = ctx.z.dot(y) - ctx.eps * y.norm();
  return num > 0 ? num / scale : 0.0;
}

struct Polished {
  VectorXd s;
  VectorXd certificate;  // y with Theta_T^T y = sign(s_T)
};

// Exact minimiser of sign^T v subject to ||z - Theta_T v||^2 <= eps^2 on the
// support T; nullopt when Theta_T is rank deficient or the support cannot
// reach the residual ball.
std::optional<Polished> polish(const Context& ctx, const std::vector<Index>& support,
                               const VectorXd& signs) {
  const Index k = static_cast<Index>(support.size());
  if (k == 0 || k > ctx.theta.rows()) return std::nullopt;
  MatrixXd sub(ctx.theta.rows(), k);
  VectorXd sigma(k);
  for (Index j = 0; j < k; ++j) {
    sub.col(j) = ctx.theta.col(support[static_cast<std::size_t>(j)]);
    sigma(j) = signs(support[static_cast<std::size_t>(j)]);
  }
  Eigen::ColPivHouseholderQR<MatrixXd> qr(sub);
  qr.setThreshold(1e-13);
  if (qr.rank() < k) return std::nullopt;
  VectorXd v = qr.solve(ctx.z);
  const double r0 = (ctx.z - sub * v).squaredNorm();
  if (!is_feasible(r0, ctx.eps, ctx.z_norm, ctx.slack)) return std::nullopt;

  // G^{-1} sigma with G = sub^T sub = P R^T R P^T.
  const auto r = qr.matrixR().topLeftCorner(k, k).template triangularView<Eigen::Upper>();
  VectorXd q = qr.colsPermutation().transpose() * sigma;
  r.transpose().solveInPlace(q);
  r.solveInPlace(q);
  const VectorXd ginv_sigma = qr.colsPermutation() * q;
  const double quad = sigma.dot(ginv_sigma);
  const double rho2 = ctx.eps2 - r0;
  if (rho2 > 0 && quad > 0) v -= std::sqrt(rho2 / quad) * ginv_sigma;

  Polished out{VectorXd::Zero(ctx.theta.cols()), sub * ginv_sigma};
  for (Index j = 0; j < k; ++j) out.s(support[static_cast<std::size_t>(j)]) = v(j);
  return out;
}

}  // namespace

bool is_feasible(double residual_sq, double eps, double z_norm, double slack) {
  return residual_sq <= eps * eps * (1.0 + slack) + (slack * z_norm) * (slack * z_norm);
}

DecodeResult l1_min_decode(const DecodeProblem& problem, const DecodeOptions& options) {
  const MatrixXd& theta = problem.theta;
  const VectorXd& z = problem.z;
  const Index m = theta.rows();
  const Index n = theta.cols();
  require(m >= 1 && n >= 1, "decode problem needs a non-empty Theta");
  require(z.size() == m, "measurement vector length does not match Theta rows");
  require(problem.phi.size() == 0 || (problem.phi.rows() == n && problem.phi.cols() == n),
          "phi must be n x n");
  require(problem.eps >= 0 && std::isfinite(problem.eps), "eps must be finite and >= 0");
  require(options.max_iterations >= 1 && options.check_interval >= 1,
          "iteration settings must be positive");

  const double eps2 = problem.eps * problem.eps;
  const Context ctx{theta, z, problem.eps, eps2, z.norm(), options.constraint_slack};
  auto finish = [&](VectorXd s, double dual, int iterations, bool polished) {
    DecodeResult res;
    res.l1_norm = s.lpNorm<1>();
    res.residual_sq = (z - theta * s).squaredNorm();
    res.x_hat = problem.phi.size() == 0 ? s : VectorXd(problem.phi * s);
    res.s_hat = std::move(s);
    res.dual_bound = std::min(dual, res.l1_norm);
    res.iterations = iterations;
    res.polished = polished;
    return res;
  };

  if (z.squaredNorm() <= eps2) return finish(VectorXd::Zero(n), 0.0, 0, false);

  Eigen::BDCSVD<MatrixXd> svd(theta, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const VectorXd& all_sv = svd.singularValues();
  Index rank = 0;
  while (rank < all_sv.size() && all_sv(rank) > all_sv(0) * 1e-13) ++rank;
  const MatrixXd u_r = svd.matrixU().leftCols(rank);
  const MatrixXd v_r = svd.matrixV().leftCols(rank);
  const VectorXd sv = all_sv.head(rank);
  const VectorXd c = u_r.transpose() * z;
  const double perp2 = (z - u_r * c).squaredNorm();
  if (!is_feasible(perp2, problem.eps, ctx.z_norm, options.constraint_slack))
    fail(ErrorCode::kInfeasible,
         "eps^2 = " + textio::format_double(eps2) +
             " is below the least-squares residual " + textio::format_double(perp2));
  const ResidualBallProjector project(v_r, sv, c, std::max(0.0, eps2 - perp2));

  VectorXd u = project(VectorXd::Zero(n));
  VectorXd w = VectorXd::Zero(n);
  VectorXd s = VectorXd::Zero(n);
  const double mean_abs = u.lpNorm<1>() / static_cast<double>(n);
  double rho = mean_abs > 0 ? 1.0 / mean_abs : 1.0;
  constexpr double kRelax = 1.6;

  VectorXd best = u;
  double best_obj = u.lpNorm<1>();
  bool best_polished = false;
  double dual = 0.0;

  auto consider = [&](const VectorXd& cand, bool polished) {
    const double r2 = (z - theta * cand).squaredNorm();
    if (!is_feasible(r2, problem.eps, ctx.z_norm, options.constraint_slack)) return;
    dual = std::max(dual, dual_value(ctx, z - theta * cand));
    const double obj = cand.lpNorm<1>();
    if (obj < best_obj) {
      best_obj = obj;
      best = cand;
      best_polished = polished;
    }
  };

  for (int it = 1; it <= options.max_iterations; ++it) {
    s = soft_threshold(u - w, 1.0 / rho);
    const VectorXd relaxed = kRelax * s + (1.0 - kRelax) * u;
    const VectorXd u_old = u;
    u = project(relaxed + w);
    w += relaxed - u;

    if (it % options.check_interval != 0 && it != options.max_iterations) continue;

    consider(u, false);
    // ADMM dual: -rho w = Theta^T y at a fixed point.
    const VectorXd y_admm =
        u_r * (v_r.transpose() * (-rho * w)).cwiseQuotient(sv);
    dual = std::max(dual, dual_value(ctx, y_admm));

    std::vector<Index> support;
    for (Index i = 0; i < n; ++i)
      if (s(i) != 0.0) support.push_back(i);
    const VectorXd signs = s.unaryExpr([](double e) { return e > 0 ? 1.0 : (e < 0 ? -1.0 : 0.0); });
    std::vector<Index> pruned;
    const double cut = 1e-3 * s.cwiseAbs().maxCoeff();
    for (Index i : support)
      if (std::abs(s(i)) > cut) pruned.push_back(i);
    for (const auto* cand : {&support, &pruned}) {
      if (cand == &pruned && pruned.size() == support.size()) break;
      if (auto p = polish(ctx, *cand, signs)) {
        consider(p->s, true);
        dual = std::max(dual, dual_value(ctx, p->certificate));
      }
    }

    if (best_obj - dual <= options.gap_tolerance * best_obj)
      return finish(best, dual, it, best_polished);

    const double primal_res = (s - u).norm();
    const double dual_res = rho * (u - u_old).norm();
    if (primal_res > 10.0 * dual_res) {
      rho *= 2.0;
      w *= 0.5;
    } else if (dual_res > 10.0 * primal_res) {
      rho *= 0.5;
      w *= 2.0;
    }
  }
  fail(ErrorCode::kNotConverged,
       "l1 decoder did not converge in " + std::to_string(options.max_iterations) +
           " iterations: objective " + textio::format_double(best_obj) + ", dual bound " +
           textio::format_double(dual) + ", residual^2 " +
           textio::format_double((z - theta * best).squaredNorm()) + " vs eps^2 " +
           textio::format_double(eps2));
}

}  // namespace qnc
