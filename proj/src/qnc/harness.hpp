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

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qnc/coding.hpp"
#include "qnc/decode.hpp"

namespace qnc {

/// Flat `key = value` experiment description. Lists are comma separated and
/// `#` starts a comment. Recognised keys:
///
///   n_nodes          node count of every deployment (default 100)
///   edge_counts      directed edges per deployment (default 400,500)
///   sparsity_ratios  k/n values; k = round(ratio * n_nodes) (default 0.1,0.2,0.3)
///   block_lengths    channel uses per timestep L (default 2,3,4,5,6,8,10,12)
///   realizations     random deployments per cell (default 30)
///   q_max            message and edge range (default 1)
///   t_max            last QNC timestep decoded (default 12)
///   capacity         bits per channel use on every edge (default 1)
///   seed             base seed (default 1)
///   beta_rule        signed_unit_gain, unit_gain or averaging
///                    (default signed_unit_gain)
///   threads          worker count, 0 = hardware concurrency (default 0)
///   output           CSV path used by the command line tool (default qnc.csv)
struct ExperimentConfig {
  std::size_t n_nodes = 100;
  std::vector<std::size_t> edge_counts = {400, 500};
  std::vector<double> sparsity_ratios = {0.1, 0.2, 0.3};
  std::vector<int> block_lengths = {2, 3, 4, 5, 6, 8, 10, 12};
  std::size_t realizations = 30;
  double q_max = 1.0;
  int t_max = 12;
  int capacity = 1;
  std::uint64_t seed = 1;
  BetaRule beta_rule = BetaRule::kSignedUnitGain;
  std::size_t threads = 0;
  std::string output = "qnc.csv";

  /// Throws kInvalidArgument on out-of-range values.
  void validate() const;
  std::size_t sparsity(double ratio) const;

  std::string to_text() const;
  static ExperimentConfig from_text(std::string_view text);
};

inline constexpr std::string_view kSchemeQnc = "qnc";
inline constexpr std::string_view kSchemeForwarding = "forwarding";

/// One aggregate over realizations. For QNC rows t is the decoding timestep
/// and delay = L (t - 1); for forwarding rows t is the mean timestep of the
/// last arrival and delay = L t.
struct ResultRow {
  std::string scheme;
  std::size_t edges = 0;
  double k_over_n = 0.0;
  int block_length = 0;
  double t = 0.0;
  double snr_db = 0.0;
  double delay = 0.0;
  std::size_t realizations = 0;

  friend bool operator==(const ResultRow&, const ResultRow&) = default;
};

struct ExperimentResult {
  std::vector<ResultRow> rows;
  std::size_t decode_attempts = 0;
  std::size_t decode_failures = 0;
};

/// 10 log10(mean ||x|| / mean ||x - x_hat||); +inf when every error is zero.
double compute_snr(std::span<const Eigen::VectorXd> x, std::span<const Eigen::VectorXd> x_hat);

using LogSink = std::function<void(std::string_view)>;

struct ExperimentOptions {
  DecodeOptions decode;
  LogSink log;  // receives progress and per-cell failures; may be empty
};

/// Seeds per realization r (0-based), with E the edge count and k the
/// sparsity: graph derive_seed(seed, {1, E, r}), coefficients
/// derive_seed(seed, {2, E, r}), messages derive_seed(seed, {3, k, r}).
/// A deployment is therefore shared across sparsities and block lengths.
ExperimentResult run_experiment(const ExperimentConfig& cfg, const ExperimentOptions& options = {});

inline constexpr double kSnrBinWidth = 0.5;

/// Within each (scheme, edges, k/n) group, buckets rows into 0.5 dB SNR bins
/// (floor(snr / 0.5); +inf gets its own bin), keeps the smallest-delay row of
/// each bin and then drops rows beaten in both SNR and delay.
std::vector<ResultRow> optimize_block_length(std::span<const ResultRow> rows);

/// Best SNR reachable with delay <= d on a frontier; -inf when none.
double frontier_snr_at(std::span<const ResultRow> frontier, double delay);

void sort_rows(std::vector<ResultRow>& rows);
std::string emit_csv(std::vector<ResultRow> rows);
std::vector<ResultRow> parse_csv(std::string_view text);

inline constexpr std::string_view kCsvHeader =
    "scheme,edges,k_over_n,L,t,snr_db,delay,realizations";

}  // namespace qnc
