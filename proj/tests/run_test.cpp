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

#include "qnc/run.hpp"
#include "support.hpp"

using namespace qnc;

namespace {

QncRun small_run(std::uint64_t seed, int L = 4, int t_max = 6) {
  NetworkGraph g = generate_random_network(10, 30, 1, seed);
  MessageEnsemble m = generate_sparse_messages(10, 2, 1.0, seed + 1);
  return simulate_run(std::move(g), std::move(m), L, t_max, seed + 2);
}

}  // namespace

TEST_CASE("transcript text round-trips") {
  const QncRun run = small_run(3);
  const std::string text = run.to_text();
  const QncRun back = QncRun::from_text(text);
  CHECK(back.to_text() == text);
  CHECK(back.graph == run.graph);
  CHECK(back.schedule == run.schedule);
  CHECK(back.block_length == run.block_length);
  CHECK(back.stored_z.size() == 5);
  CHECK(back.stored_psi.size() == 5);
  for (int t = 1; t <= 6; ++t) {
    CHECK(back.transcript.y(t) == run.transcript.y(t));
    CHECK(back.transcript.noise(t) == run.transcript.noise(t));
  }
}

TEST_CASE("verification passes on fresh and reloaded runs") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const QncRun run = small_run(seed, 2 + static_cast<int>(seed));
    const QncRun back = QncRun::from_text(run.to_text());
    for (int t = 2; t <= 6; ++t) {
      const VerifyReport a = verify_run(run, t);
      CHECK(a.passed);
      CHECK(a.max_identity_error < kIdentityTolerance);
      CHECK(a.noise_norm_sq <= a.eps_sq);
      const VerifyReport b = verify_run(back, t);
      CHECK(b.passed);
      CHECK(b.stored_mismatch == 0.0);
    }
  }
}

TEST_CASE("verification catches tampering") {
  QncRun run = small_run(2);
  SUBCASE("edge contents") {
    run.transcript = RunTranscript([&] {
      std::vector<EdgeState> states(run.transcript.states().begin(), run.transcript.states().end());
      states[3].y(0) += 1e-3;
      return states;
    }());
    CHECK(!verify_run(run, 6).passed);
    CHECK(verify_run(run, 6).max_replay_error > 1e-4);
  }
  SUBCASE("stored measurements") {
    QncRun back = QncRun::from_text(run.to_text());
    back.stored_z[1](0) += 1e-6;
    const VerifyReport r = verify_run(back, 6);
    CHECK(!r.passed);
    CHECK(r.stored_mismatch > 0.0);
  }
  SUBCASE("coefficient budget") {
    run.schedule.set_alpha(0, 3, 0.5);
    const VerifyReport r = verify_run(run, 6);
    CHECK(r.overflow_violations > 0);
    CHECK(!r.passed);
  }
  CHECK_CODE(verify_run(run, 7), ErrorCode::kInvalidArgument);
}

TEST_CASE("malformed transcripts are parse errors") {
  const std::string text = small_run(1).to_text();
  CHECK_CODE(QncRun::from_text(text.substr(0, text.size() / 2)), ErrorCode::kParse);
  CHECK_CODE(QncRun::from_text("qnc-transcript 2\n"), ErrorCode::kParse);
  CHECK_CODE(QncRun::from_text(text + "extra\n"), ErrorCode::kParse);
}

TEST_CASE("decode report") {
  const QncRun run = small_run(5, 10, 8);
  const DecodeReport r = decode_run(run, 8);
  CHECK(r.n == 10);
  CHECK(r.m == 7 * run.graph.in_edges(run.graph.gateway()).size());
  CHECK(r.delta_2k.has_value());
  CHECK(r.signal_sq == doctest::Approx(run.messages.x.squaredNorm()));
  CHECK(r.error_sq == doctest::Approx((run.messages.x - r.result.x_hat).squaredNorm()));
  if (r.bound) CHECK(r.bound_holds());
  CHECK(r.to_text().find("x_hat:") != std::string::npos);
}
