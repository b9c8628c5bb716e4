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

#include "qnc/coding.hpp"
#include "support.hpp"

using namespace qnc;

namespace {

const BetaRule kRules[] = {BetaRule::kAveraging, BetaRule::kUnitGain, BetaRule::kSignedUnitGain};

CoefficientOptions with_rule(BetaRule rule) {
  CoefficientOptions o;
  o.beta_rule = rule;
  return o;
}

}  // namespace

TEST_CASE("coefficient budget holds for every rule") {
  for (BetaRule rule : kRules) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const NetworkGraph g = generate_random_network(15, 45, 1, seed);
      const CoefficientSchedule s = generate_coefficients(g, 7, seed, with_rule(rule));
      CHECK(count_overflow_violations(g, s) == 0);
      for (int t = 3; t <= 7; ++t)
        for (EdgeIndex e = 0; e < g.edge_count(); ++e) CHECK(s.alpha(e, t) == 0.0);
    }
  }
}

TEST_CASE("node without in-edges gets alpha within [-1, 1] and an empty beta row") {
  // Node 0 has no in-edges.
  const NetworkGraph g(3, {{0, 1, 1}, {1, 2, 1}, {2, 1, 1}}, 2);
  for (BetaRule rule : kRules) {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
      const CoefficientSchedule s = generate_coefficients(g, 4, seed, with_rule(rule));
      CHECK(s.beta(0, 2).empty());
      CHECK(std::abs(s.alpha(0, 2)) <= 1.0);
    }
  }
}

TEST_CASE("beta depends on the graph only, alpha on the seed") {
  const NetworkGraph g = generate_random_network(10, 30, 1, 3);
  for (BetaRule rule : kRules) {
    const CoefficientSchedule a = generate_coefficients(g, 5, 1, with_rule(rule));
    const CoefficientSchedule b = generate_coefficients(g, 5, 2, with_rule(rule));
    bool alpha_differs = false;
    for (int t = 2; t <= 5; ++t)
      for (EdgeIndex e = 0; e < g.edge_count(); ++e) {
        const auto ba = a.beta(e, t);
        const auto bb = b.beta(e, t);
        CHECK(std::equal(ba.begin(), ba.end(), bb.begin(), bb.end()));
        alpha_differs |= a.alpha(e, t) != b.alpha(e, t);
      }
    CHECK(alpha_differs);
    CHECK(generate_coefficients(g, 5, 1, with_rule(rule)) == a);
  }
}

TEST_CASE("beta rules") {
  const NetworkGraph g = generate_random_network(12, 40, 1, 8);
  SUBCASE("averaging: 1/(|In|+1) at every t") {
    const auto s = generate_coefficients(g, 4, 1, with_rule(BetaRule::kAveraging));
    for (int t = 2; t <= 4; ++t)
      for (EdgeIndex e = 0; e < g.edge_count(); ++e) {
        const double want = 1.0 / static_cast<double>(g.in_edges(g.tail(e)).size() + 1);
        for (double b : s.beta(e, t)) CHECK(b == doctest::Approx(want));
      }
  }
  SUBCASE("unit gain: zero at t = 2, 1/|In| later") {
    const auto s = generate_coefficients(g, 4, 1, with_rule(BetaRule::kUnitGain));
    for (EdgeIndex e = 0; e < g.edge_count(); ++e) {
      for (double b : s.beta(e, 2)) CHECK(b == 0.0);
      const double want = 1.0 / static_cast<double>(g.in_edges(g.tail(e)).size());
      for (double b : s.beta(e, 3)) CHECK(b == doctest::Approx(want));
    }
  }
  SUBCASE("signed unit gain: same magnitudes, both signs present") {
    const auto plain = generate_coefficients(g, 6, 1, with_rule(BetaRule::kUnitGain));
    const auto s = generate_coefficients(g, 6, 1, with_rule(BetaRule::kSignedUnitGain));
    std::size_t negative = 0, total = 0;
    for (int t = 2; t <= 6; ++t)
      for (EdgeIndex e = 0; e < g.edge_count(); ++e) {
        const auto a = plain.beta(e, t);
        const auto b = s.beta(e, t);
        for (std::size_t j = 0; j < a.size(); ++j) {
          CHECK(std::abs(b[j]) == a[j]);
          if (t > 2) {
            ++total;
            negative += b[j] < 0;
          }
        }
      }
    CHECK(negative > total / 4);
    CHECK(negative < 3 * total / 4);
  }
}

TEST_CASE("transfer matrices") {
  SUBCASE("chain 1 -> 2 -> 3 has one relay entry") {
    const NetworkGraph g(3, {{0, 1, 1}, {1, 2, 1}}, 2);
    const auto s = generate_coefficients(g, 3, 4);
    const SparseMatrix f = relay_matrix(s, g, 3);
    CHECK(f.nonZeros() == 1);
    CHECK(f.coeff(1, 0) == 1.0);
    const SparseMatrix b = gateway_selector(g);
    CHECK(b.rows() == 1);
    CHECK(b.coeff(0, 1) == 1.0);
  }
  SUBCASE("structure, budget and A(t > 2) = 0") {
    const NetworkGraph g = generate_random_network(10, 35, 1, 2);
    for (BetaRule rule : kRules) {
      const auto s = generate_coefficients(g, 5, 9, with_rule(rule));
      for (int t = 2; t <= 5; ++t) {
        const TransferMatrices m = build_transfer_matrices(s, g, t);
        for (Eigen::Index r = 0; r < m.F.outerSize(); ++r) {
          double row = 0.0;
          for (SparseMatrix::InnerIterator it(m.F, r); it; ++it) {
            CHECK(g.tail(static_cast<EdgeIndex>(it.row())) ==
                  g.head(static_cast<EdgeIndex>(it.col())));
            row += std::abs(it.value());
          }
          for (SparseMatrix::InnerIterator it(m.A, r); it; ++it) {
            CHECK(g.tail(static_cast<EdgeIndex>(it.row())) == static_cast<NodeIndex>(it.col()));
            row += std::abs(it.value());
          }
          CHECK(row <= 1.0 + 1e-12);
        }
        if (t > 2) CHECK(Eigen::MatrixXd(m.A).isZero(0.0));
        CHECK(m.B.rows() == static_cast<Eigen::Index>(g.in_edges(g.gateway()).size()));
        for (Eigen::Index r = 0; r < m.B.outerSize(); ++r) {
          int ones = 0;
          for (SparseMatrix::InnerIterator it(m.B, r); it; ++it) ones += it.value() == 1.0;
          CHECK(ones == 1);
        }
      }
    }
  }
  CHECK_CODE(generate_coefficients(NetworkGraph(2, {{0, 1, 1}}, 1), 1, 1),
             ErrorCode::kInvalidArgument);
}
