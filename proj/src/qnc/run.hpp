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

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qnc/coding.hpp"
#include "qnc/decode.hpp"
#include "qnc/graph.hpp"
#include "qnc/measurements.hpp"
#include "qnc/quantizer.hpp"
#include "qnc/signal.hpp"
#include "qnc/transmission.hpp"

namespace qnc {

/// Everything needed to replay and decode one QNC transmission: the
/// deployment, the messages, the coefficients, the block length and the
/// simulated edge contents with their quantization-error log.
///
/// Text dump (`to_text`), all numbers in shortest round-trip form:
///
///     qnc-transcript 1
///     block_length L
///     t_max T
///     graph               followed by the edge list (see NetworkGraph)
///     messages            followed by the message dump (see MessageEnsemble)
///     alpha t a_1 .. a_|E|                 t = 2..T
///     beta t e w_1 .. w_|In(tail e)|        t = 2..T, e = 1..|E|
///     y t y_1 .. y_|E|                     t = 1..T
///     noise t n_1 .. n_|E|                 t = 1..T
///     z t z_1 .. z_|In(v0)|                t = 2..T
///     psi t i p_1 .. p_n                   t = 2..T, i = 1..|In(v0)|
///     end
///
/// Edge and row indices in the dump are 1-based. `z` and `psi` are derived
/// data; `verify_run` checks them against a recomputation.
struct QncRun {
  NetworkGraph graph;
  MessageEnsemble messages;
  CoefficientSchedule schedule;
  int block_length;
  std::vector<Quantizer> quantizers;
  RunTranscript transcript;
  std::vector<Eigen::VectorXd> stored_z;    // filled by from_text
  std::vector<Eigen::MatrixXd> stored_psi;  // filled by from_text

  int t_max() const { return schedule.t_max(); }

  std::string to_text() const;
  static QncRun from_text(std::string_view text);
};

QncRun simulate_run(NetworkGraph graph, MessageEnsemble messages, int block_length, int t_max,
                    std::uint64_t coefficient_seed, const CoefficientOptions& options = {});

struct VerifyReport {
  int t = 0;
  double max_identity_error = 0.0;  // max |z_tot - Psi_tot x - n_eff_tot|
  double max_replay_error = 0.0;    // max |y(t) - F(t) y(t-1) - A(t) x - n(t)|
  double noise_norm_sq = 0.0;       // ||n_eff_tot||^2
  double eps_sq = 0.0;
  double eps_sq_as_printed = 0.0;
  std::size_t overflow_violations = 0;    // coefficient budget sum|beta|+|alpha| > 1
  std::size_t magnitude_violations = 0;   // |y_e(t)| > q_max
  std::size_t quantizer_violations = 0;   // |n_e(t)| > Delta_e / 2
  std::size_t structural_violations = 0;  // F, A entries off the graph pattern
  std::size_t rest_violations = 0;        // y(1) != 0
  double stored_mismatch = 0.0;           // max deviation of dumped z / psi
  bool passed = false;

  std::string to_text() const;
};

inline constexpr double kIdentityTolerance = 1e-9;

VerifyReport verify_run(const QncRun& run, int t);

struct DecodeReport {
  int t = 0;
  std::size_t n = 0;
  std::size_t m = 0;
  double eps_sq = 0.0;
  DecodeResult result;
  double error_sq = 0.0;  // ||x - x_hat||^2
  double signal_sq = 0.0;
  std::optional<double> delta_2k;
  std::optional<double> bound;  // c1 eps^2 when delta_2k < sqrt(2) - 1

  bool bound_holds() const { return bound && error_sq <= *bound; }
  std::string to_text() const;
};

/// Decodes the run at time t with eps^2 from the noise bound. The RIP check of
/// order 2k is attempted only when it is small enough to enumerate.
DecodeReport decode_run(const QncRun& run, int t, const DecodeOptions& options = {});

}  // namespace qnc
