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

#include <cmath>

#include "qnc/measurements.hpp"
#include "qnc/signal.hpp"
#include "support.hpp"

using namespace qnc;

namespace {

// Dense product F(hi) F(hi-1) ... F(lo); identity when lo > hi.
Eigen::MatrixXd relay_product(const CoefficientSchedule& s, const NetworkGraph& g, int hi,
                              int lo) {
  const auto m = static_cast<Eigen::Index>(g.edge_count());
  Eigen::MatrixXd p = Eigen::MatrixXd::Identity(m, m);
  for (int t = hi; t >= lo; --t) p = p * Eigen::MatrixXd(relay_matrix(s, g, t));
  return p;
}

Eigen::VectorXd half_steps(const std::vector<Quantizer>& qs) {
  Eigen::VectorXd d(static_cast<Eigen::Index>(qs.size()));
  for (std::size_t e = 0; e < qs.size(); ++e) d(static_cast<Eigen::Index>(e)) = qs[e].step() / 2;
  return d;
}

double eps_sq_oracle(const CoefficientSchedule& s, const NetworkGraph& g,
                     const std::vector<Quantizer>& qs, int t, bool as_printed) {
  const Eigen::MatrixXd b(gateway_selector(g));
  const Eigen::VectorXd d = half_steps(qs);
  double sum = 0.0;
  for (int tp = 2; tp <= t; ++tp) {
    Eigen::VectorXd right = Eigen::VectorXd::Zero(b.rows());
    Eigen::VectorXd left = Eigen::VectorXd::Zero(b.rows());
    for (int s2 = 2; s2 <= tp; ++s2) {
      right += (b * relay_product(s, g, tp, s2 + 1)).cwiseAbs() * d;
      left += (b * relay_product(s, g, t, s2 + 1)).cwiseAbs() * d;
    }
    sum += as_printed ? left.dot(right) : right.squaredNorm();
  }
  return sum;
}

}  // namespace

TEST_CASE("Psi recursion equals the explicit sum of products") {
  const NetworkGraph g = generate_random_network(8, 24, 1, 3);
  for (BetaRule rule : {BetaRule::kAveraging, BetaRule::kSignedUnitGain}) {
    CoefficientOptions o;
    o.beta_rule = rule;
    const auto s = generate_coefficients(g, 6, 7, o);
    const auto psi = psi_sequence(s, g, 6);
    const Eigen::MatrixXd b(gateway_selector(g));
    for (int t = 2; t <= 6; ++t) {
      Eigen::MatrixXd want = Eigen::MatrixXd::Zero(b.rows(), 8);
      for (int tp = 2; tp <= t; ++tp)
        want += b * relay_product(s, g, t, tp + 1) * Eigen::MatrixXd(injection_matrix(s, g, tp));
      CHECK((psi[static_cast<std::size_t>(t - 2)] - want).cwiseAbs().maxCoeff() < 1e-14);
      CHECK((compute_psi(s, g, t) - want).cwiseAbs().maxCoeff() < 1e-14);
    }
  }
}

TEST_CASE("epsilon^2 matches a dense evaluation, both readings") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const NetworkGraph g = generate_random_network(7, 20, 1 + static_cast<int>(seed % 2), seed);
    const auto s = generate_coefficients(g, 6, seed);
    const auto qs = edge_quantizers(g, 3, 1.0);
    for (int t = 2; t <= 6; ++t) {
      const double want = eps_sq_oracle(s, g, qs, t, false);
      CHECK(compute_epsilon_sq(s, g, qs, t) == doctest::Approx(want).epsilon(1e-12));
      CHECK(compute_epsilon_sq_as_printed(s, g, qs, t) ==
            doctest::Approx(eps_sq_oracle(s, g, qs, t, true)).epsilon(1e-12));
    }
  }
}

TEST_CASE("epsilon^2 grows with t and scales with the squared step") {
  const NetworkGraph g = generate_random_network(10, 30, 1, 6);
  const auto s = generate_coefficients(g, 8, 1);
  const auto q3 = edge_quantizers(g, 3, 1.0);
  const auto q5 = edge_quantizers(g, 5, 1.0);
  double prev = 0.0;
  for (int t = 2; t <= 8; ++t) {
    const double e3 = compute_epsilon_sq(s, g, q3, t);
    CHECK(e3 > prev);
    prev = e3;
    const double ratio = std::pow(q3[0].step() / q5[0].step(), 2);
    CHECK(e3 / compute_epsilon_sq(s, g, q5, t) == doctest::Approx(ratio).epsilon(1e-12));
  }
}

TEST_CASE("assembled measurements satisfy the identity and the noise bound") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const NetworkGraph g = generate_random_network(12, 36, 1, seed);
    const auto s = generate_coefficients(g, 7, seed + 1);
    const auto m = generate_sparse_messages(12, 3, 1.0, seed + 2);
    const auto qs = edge_quantizers(g, 2 + static_cast<int>(seed % 3) * 2, 1.0);
    const RunTranscript run = simulate_qnc(g, s, m.x, qs, 7);
    for (int t = 2; t <= 7; ++t) {
      const MeasurementRecord rec = assemble_measurements(run, g, s, qs, t);
      CHECK(rec.m() == (t - 1) * static_cast<Eigen::Index>(g.in_edges(g.gateway()).size()));
      CHECK(rec.psi_tot.rows() == rec.m());
      CHECK((rec.z_tot - rec.psi_tot * m.x - rec.n_eff_tot).cwiseAbs().maxCoeff() < 1e-12);
      CHECK(rec.n_eff_tot.squaredNorm() <= rec.eps_sq);
    }
  }
}

TEST_CASE("stack_rows concatenates a prefix") {
  std::vector<Eigen::VectorXd> v{Eigen::VectorXd::Constant(2, 1.0), Eigen::VectorXd::Constant(1, 2.0),
                                 Eigen::VectorXd::Constant(3, 3.0)};
  const Eigen::VectorXd s = stack_rows(std::span<const Eigen::VectorXd>(v), 2);
  CHECK(s.size() == 3);
  CHECK(s(2) == 2.0);
  CHECK_CODE(stack_rows(std::span<const Eigen::VectorXd>(v), 4), ErrorCode::kInvalidArgument);
}
