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
#include <limits>

#include "qnc/harness.hpp"
#include "support.hpp"

using namespace qnc;

namespace {

ResultRow row(std::string scheme, int L, double t, double snr, double delay) {
  return ResultRow{std::move(scheme), 100, 0.1, L, t, snr, delay, 5};
}

ExperimentConfig tiny_config() {
  ExperimentConfig cfg;
  cfg.n_nodes = 12;
  cfg.edge_counts = {40};
  cfg.sparsity_ratios = {0.2};
  cfg.block_lengths = {4, 8};
  cfg.realizations = 2;
  cfg.t_max = 5;
  cfg.threads = 1;
  return cfg;
}

}  // namespace

TEST_CASE("SNR formula") {
  const Eigen::VectorXd x = Eigen::VectorXd::Unit(4, 0);
  SUBCASE("exact estimate is +inf") {
    std::vector<Eigen::VectorXd> xs{x}, hats{x};
    CHECK(std::isinf(compute_snr(xs, hats)));
  }
  SUBCASE("unit signal with 0.1 error is 10 dB") {
    std::vector<Eigen::VectorXd> xs{x}, hats{x + 0.1 * Eigen::VectorXd::Unit(4, 2)};
    CHECK(compute_snr(xs, hats) == doctest::Approx(10.0));
  }
  SUBCASE("ten times the error loses 10 dB") {
    std::vector<Eigen::VectorXd> xs{x, 2 * x};
    std::vector<Eigen::VectorXd> a{x * 0.9, x * 1.95}, b{x * 0.0, x * 1.5};
    CHECK(compute_snr(xs, a) - compute_snr(xs, b) == doctest::Approx(10.0));
  }
  SUBCASE("means, not per-run ratios") {
    std::vector<Eigen::VectorXd> xs{x, 3 * x}, hats{0.5 * x, 3 * x};
    CHECK(compute_snr(xs, hats) == doctest::Approx(10 * std::log10(2.0 / 0.25)));
  }
  std::vector<Eigen::VectorXd> none;
  CHECK_CODE(compute_snr(none, none), ErrorCode::kInvalidArgument);
}

TEST_CASE("config text") {
  const ExperimentConfig cfg = ExperimentConfig::from_text(
      "# comment\n n_nodes = 30\nedge_counts = 90, 120\nsparsity_ratios=0.1,0.3\n"
      "block_lengths = 2,5\nrealizations = 3 # trailing\nq_max = 2\nt_max = 7\nseed = 99\n"
      "beta_rule = averaging\nthreads = 2\noutput = out.csv\n");
  CHECK(cfg.n_nodes == 30);
  CHECK(cfg.edge_counts == std::vector<std::size_t>{90, 120});
  CHECK(cfg.sparsity_ratios == std::vector<double>{0.1, 0.3});
  CHECK(cfg.block_lengths == std::vector<int>{2, 5});
  CHECK(cfg.realizations == 3);
  CHECK(cfg.q_max == 2.0);
  CHECK(cfg.t_max == 7);
  CHECK(cfg.seed == 99);
  CHECK(cfg.beta_rule == BetaRule::kAveraging);
  CHECK(cfg.output == "out.csv");
  CHECK(cfg.sparsity(0.1) == 3);
  const ExperimentConfig back = ExperimentConfig::from_text(cfg.to_text());
  CHECK(back.to_text() == cfg.to_text());

  CHECK_CODE(ExperimentConfig::from_text("bogus = 1\n"), ErrorCode::kParse);
  CHECK_CODE(ExperimentConfig::from_text("n_nodes 5\n"), ErrorCode::kParse);
  CHECK_CODE(ExperimentConfig::from_text("realizations = x\n"), ErrorCode::kParse);
  CHECK_CODE(ExperimentConfig::from_text("realizations = 0\n"), ErrorCode::kInvalidArgument);
  CHECK_CODE(ExperimentConfig::from_text("sparsity_ratios = 1.5\n"), ErrorCode::kInvalidArgument);
  CHECK_CODE(ExperimentConfig::from_text("block_lengths = 1\n"), ErrorCode::kInvalidArgument);
}

TEST_CASE("one cell yields a row per t plus a forwarding row") {
  ExperimentConfig cfg = tiny_config();
  cfg.block_lengths = {6};
  cfg.realizations = 1;
  const ExperimentResult r = run_experiment(cfg);
  CHECK(r.rows.size() == static_cast<std::size_t>(cfg.t_max - 1) + 1);
  CHECK(r.decode_attempts == 4);
  std::size_t fwd = 0;
  for (const ResultRow& row : r.rows) {
    if (row.scheme == kSchemeForwarding) {
      ++fwd;
      CHECK(row.delay == doctest::Approx(6 * row.t));
    } else {
      CHECK(row.delay == 6 * (row.t - 1));
      CHECK(!std::isnan(row.snr_db));
    }
  }
  CHECK(fwd == 1);
}

TEST_CASE("experiments are deterministic and thread-count independent") {
  ExperimentConfig cfg = tiny_config();
  const std::string a = emit_csv(run_experiment(cfg).rows);
  CHECK(emit_csv(run_experiment(cfg).rows) == a);
  cfg.threads = 3;
  CHECK(emit_csv(run_experiment(cfg).rows) == a);
  cfg.seed = 2;
  CHECK(emit_csv(run_experiment(cfg).rows) != a);
}

TEST_CASE("forwarding SNR does not depend on the topology") {
  ExperimentConfig cfg = tiny_config();
  cfg.edge_counts = {40, 60};
  const ExperimentResult r = run_experiment(cfg);
  std::vector<ResultRow> fwd;
  for (const ResultRow& row : r.rows)
    if (row.scheme == kSchemeForwarding) fwd.push_back(row);
  REQUIRE(fwd.size() == 4);
  // Rows sort by edges then L; same L at different edge counts share messages.
  CHECK(fwd[0].snr_db == doctest::Approx(fwd[2].snr_db).epsilon(0.05));
  CHECK(fwd[1].snr_db > fwd[0].snr_db);
}

TEST_CASE("CSV emission and parsing") {
  CHECK(emit_csv({}) == std::string(kCsvHeader) + "\n");
  std::vector<ResultRow> rows{row("qnc", 4, 3, 1.25, 8), row("forwarding", 2, 45.5, 3, 91),
                              row("qnc", 2, 2, std::numeric_limits<double>::infinity(), 2)};
  const std::string csv = emit_csv(rows);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
  CHECK(csv.find("forwarding,100,0.1,2,45.5,3,91,5\n") == std::string(kCsvHeader).size() + 1);
  auto back = parse_csv(csv);
  sort_rows(rows);
  CHECK(back == rows);
  CHECK(emit_csv(back) == csv);
  CHECK_CODE(parse_csv("nope\n"), ErrorCode::kParse);
  CHECK_CODE(parse_csv(std::string(kCsvHeader) + "\nqnc,1,2\n"), ErrorCode::kParse);
}

TEST_CASE("block-length frontier") {
  SUBCASE("single L reduces to per-bin minima") {
    std::vector<ResultRow> rows{row("qnc", 4, 2, 1.1, 4), row("qnc", 4, 3, 1.3, 8),
                                row("qnc", 4, 4, 2.2, 12)};
    const auto f = optimize_block_length(rows);
    REQUIRE(f.size() == 2);
    CHECK(f[0].delay == 4);
    CHECK(f[1].delay == 12);
  }
  SUBCASE("dominated rows disappear") {
    std::vector<ResultRow> rows{row("qnc", 2, 3, 5.0, 10), row("qnc", 3, 3, 4.0, 12)};
    const auto f = optimize_block_length(rows);
    REQUIRE(f.size() == 1);
    CHECK(f[0].block_length == 2);
  }
  SUBCASE("constructed crossover between two block lengths") {
    // L = 2 climbs fast then saturates at 3 dB; L = 4 starts later and
    // reaches 6 dB. Above 3 dB the frontier must switch to L = 4.
    std::vector<ResultRow> rows;
    for (int t = 2; t <= 6; ++t) {
      rows.push_back(row("qnc", 2, t, std::min(3.0, 1.0 * (t - 1)), 2.0 * (t - 1)));
      rows.push_back(row("qnc", 4, t, 1.5 * (t - 1) - 0.4, 4.0 * (t - 1)));
    }
    const auto f = optimize_block_length(rows);
    for (const ResultRow& r : f) {
      if (r.snr_db <= 3.0) CHECK(r.block_length == 2);
      else CHECK(r.block_length == 4);
    }
    CHECK(f.back().snr_db == doctest::Approx(7.1));
    CHECK(frontier_snr_at(f, 5.0) == doctest::Approx(2.0));
    CHECK(std::isinf(frontier_snr_at(f, 1.0)));
  }
  SUBCASE("groups are independent") {
    std::vector<ResultRow> rows{row("qnc", 2, 2, 1.0, 10), row("forwarding", 2, 40, 3.0, 80)};
    CHECK(optimize_block_length(rows).size() == 2);
  }
  CHECK_CODE(optimize_block_length({}), ErrorCode::kInvalidArgument);
}
