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

#include "qnc/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <limits>
#include <map>
#include <mutex>
#include <thread>
#include <tuple>

#include "qnc/error.hpp"
#include "qnc/forward.hpp"
#include "qnc/graph.hpp"
#include "qnc/measurements.hpp"
#include "qnc/random.hpp"
#include "qnc/signal.hpp"
#include "qnc/textio.hpp"
#include "qnc/transmission.hpp"

namespace qnc {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos) return out;
    start = pos + 1;
  }
}

template <typename T>
T parse_number(std::string_view key, std::string_view text) {
  T v{};
  auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size())
    fail(ErrorCode::kParse, "bad value '" + std::string(text) + "' for " + std::string(key));
  return v;
}

template <typename T>
std::vector<T> parse_list(std::string_view key, std::string_view text) {
  std::vector<T> out;
  for (auto item : split(text, ',')) out.push_back(parse_number<T>(key, item));
  return out;
}

template <typename T>
std::string join(const std::vector<T>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ',';
    if constexpr (std::is_floating_point_v<T>)
      textio::append_double(out, values[i]);
    else
      out += std::to_string(values[i]);
  }
  return out;
}

std::string_view beta_rule_name(BetaRule rule) {
  switch (rule) {
    case BetaRule::kAveraging:
      return "averaging";
    case BetaRule::kUnitGain:
      return "unit_gain";
    case BetaRule::kSignedUnitGain:
      return "signed_unit_gain";
  }
  return "unknown";
}

double snr_from_norms(double x_norm_sum, double err_norm_sum) {
  if (err_norm_sum == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(x_norm_sum / err_norm_sum);
}

auto row_key(const ResultRow& r) {
  return std::tie(r.scheme, r.edges, r.k_over_n, r.block_length, r.t);
}

struct CellId {
  std::size_t edges_index;
  std::size_t ratio_index;
  std::size_t realization;
};

struct CellOutput {
  double x_norm = 0.0;
  // [L index][t - 2]; NaN marks a failed decode.
  std::vector<std::vector<double>> qnc_error;
  std::vector<double> forward_error;
  std::vector<int> forward_last;
};

CellOutput run_cell(const ExperimentConfig& cfg, const ExperimentOptions& options,
                    const CellId& id, std::size_t& failures, std::size_t& attempts) {
  const std::size_t edges = cfg.edge_counts[id.edges_index];
  const std::size_t k = cfg.sparsity(cfg.sparsity_ratios[id.ratio_index]);
  const std::uint64_t r = id.realization;

  const NetworkGraph g =
      generate_random_network(cfg.n_nodes, edges, cfg.capacity, derive_seed(cfg.seed, {1, edges, r}));
  const CoefficientSchedule sched =
      generate_coefficients(g, cfg.t_max, derive_seed(cfg.seed, {2, edges, r}),
                            CoefficientOptions{.beta_rule = cfg.beta_rule});
  const MessageEnsemble msg =
      generate_sparse_messages(cfg.n_nodes, k, cfg.q_max, derive_seed(cfg.seed, {3, k, r}));
  const RoutingTable routes = shortest_paths_to_gateway(g);

  const auto psi = psi_sequence(sched, g, cfg.t_max);
  const auto steps = static_cast<std::size_t>(cfg.t_max - 1);
  const Eigen::MatrixXd theta_all = stack_rows(std::span<const Eigen::MatrixXd>(psi), steps) * msg.phi;
  const Eigen::Index block_rows = psi.front().rows();
  const SparseMatrix b = gateway_selector(g);

  CellOutput out;
  out.x_norm = msg.x.norm();
  for (int L : cfg.block_lengths) {
    const auto quantizers = edge_quantizers(g, L, cfg.q_max);
    const RunTranscript run = simulate_qnc(g, sched, msg.x, quantizers, cfg.t_max);
    const auto terms = epsilon_sq_terms(sched, g, quantizers, cfg.t_max);
    Eigen::VectorXd z_all(theta_all.rows());
    for (int t = 2; t <= cfg.t_max; ++t)
      z_all.segment((t - 2) * block_rows, block_rows) = b * run.y(t);

    std::vector<double> errors;
    double eps_sq = 0.0;
    for (int t = 2; t <= cfg.t_max; ++t) {
      eps_sq += terms[static_cast<std::size_t>(t - 2)];
      const Eigen::Index rows = (t - 1) * block_rows;
      DecodeProblem problem{z_all.head(rows), theta_all.topRows(rows), msg.phi, std::sqrt(eps_sq)};
      ++attempts;
      try {
        errors.push_back((msg.x - l1_min_decode(problem, options.decode).x_hat).norm());
      } catch (const Error& e) {
        ++failures;
        errors.push_back(std::numeric_limits<double>::quiet_NaN());
        if (options.log)
          options.log("decode failed: edges=" + std::to_string(edges) + " k=" + std::to_string(k) +
                      " realization=" + std::to_string(r) + " L=" + std::to_string(L) +
                      " t=" + std::to_string(t) + ": " + e.what());
      }
    }
    out.qnc_error.push_back(std::move(errors));

    const ForwardingRun fwd = simulate_forwarding(g, routes, msg.x, L, cfg.q_max);
    out.forward_error.push_back((msg.x - fwd.estimate()).norm());
    out.forward_last.push_back(fwd.last_arrival);
  }
  return out;
}

}  // namespace

void ExperimentConfig::validate() const {
  require(n_nodes >= 2, "n_nodes must be at least 2");
  require(!edge_counts.empty(), "edge_counts is empty");
  for (auto e : edge_counts)
    require(e >= 1 && e <= n_nodes * (n_nodes - 1), "edge count out of range");
  require(!sparsity_ratios.empty(), "sparsity_ratios is empty");
  for (double r : sparsity_ratios) {
    require(r > 0.0 && r <= 1.0, "sparsity ratio must lie in (0, 1]");
    require(sparsity(r) >= 1, "sparsity ratio gives k = 0");
  }
  require(!block_lengths.empty(), "block_lengths is empty");
  for (int L : block_lengths) require(L >= 1, "block length must be positive");
  require(capacity >= 1, "capacity must be positive");
  for (int L : block_lengths)
    require(L * capacity >= 2 && L * capacity <= 52, "L * capacity must lie in [2, 52]");
  require(realizations >= 1, "realizations must be at least 1");
  require(q_max > 0.0 && std::isfinite(q_max), "q_max must be positive");
  require(t_max >= 2, "t_max must be at least 2");
}

std::size_t ExperimentConfig::sparsity(double ratio) const {
  return static_cast<std::size_t>(std::lround(ratio * static_cast<double>(n_nodes)));
}

std::string ExperimentConfig::to_text() const {
  std::string out;
  out += "n_nodes = " + std::to_string(n_nodes) + '\n';
  out += "edge_counts = " + join(edge_counts) + '\n';
  out += "sparsity_ratios = " + join(sparsity_ratios) + '\n';
  out += "block_lengths = " + join(block_lengths) + '\n';
  out += "realizations = " + std::to_string(realizations) + '\n';
  out += "q_max = " + textio::format_double(q_max) + '\n';
  out += "t_max = " + std::to_string(t_max) + '\n';
  out += "capacity = " + std::to_string(capacity) + '\n';
  out += "seed = " + std::to_string(seed) + '\n';
  out += "beta_rule = " + std::string(beta_rule_name(beta_rule)) + '\n';
  out += "threads = " + std::to_string(threads) + '\n';
  out += "output = " + output + '\n';
  return out;
}

ExperimentConfig ExperimentConfig::from_text(std::string_view text) {
  ExperimentConfig cfg;
  int line_no = 0;
  for (auto raw : split(text, '\n')) {
    ++line_no;
    auto line = trim(raw.substr(0, raw.find('#')));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      fail(ErrorCode::kParse, "line " + std::to_string(line_no) + ": expected key = value");
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    if (key == "n_nodes") cfg.n_nodes = parse_number<std::size_t>(key, value);
    else if (key == "edge_counts") cfg.edge_counts = parse_list<std::size_t>(key, value);
    else if (key == "sparsity_ratios") cfg.sparsity_ratios = parse_list<double>(key, value);
    else if (key == "block_lengths") cfg.block_lengths = parse_list<int>(key, value);
    else if (key == "realizations") cfg.realizations = parse_number<std::size_t>(key, value);
    else if (key == "q_max") cfg.q_max = parse_number<double>(key, value);
    else if (key == "t_max") cfg.t_max = parse_number<int>(key, value);
    else if (key == "capacity") cfg.capacity = parse_number<int>(key, value);
    else if (key == "seed") cfg.seed = parse_number<std::uint64_t>(key, value);
    else if (key == "threads") cfg.threads = parse_number<std::size_t>(key, value);
    else if (key == "output") cfg.output = std::string(value);
    else if (key == "beta_rule") {
      if (value == "unit_gain") cfg.beta_rule = BetaRule::kUnitGain;
      else if (value == "averaging") cfg.beta_rule = BetaRule::kAveraging;
      else if (value == "signed_unit_gain") cfg.beta_rule = BetaRule::kSignedUnitGain;
      else fail(ErrorCode::kParse, "unknown beta_rule '" + std::string(value) + "'");
    } else {
      fail(ErrorCode::kParse, "line " + std::to_string(line_no) + ": unknown key '" +
                                  std::string(key) + "'");
    }
  }
  cfg.validate();
  return cfg;
}

double compute_snr(std::span<const Eigen::VectorXd> x, std::span<const Eigen::VectorXd> x_hat) {
  require(!x.empty() && x.size() == x_hat.size(), "need equal, non-empty run lists");
  double xs = 0.0, es = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    require(x[i].size() == x_hat[i].size(), "message and estimate sizes differ");
    xs += x[i].norm();
    es += (x[i] - x_hat[i]).norm();
  }
  return snr_from_norms(xs, es);
}

ExperimentResult run_experiment(const ExperimentConfig& cfg, const ExperimentOptions& options) {
  cfg.validate();
  std::vector<CellId> cells;
  for (std::size_t e = 0; e < cfg.edge_counts.size(); ++e)
    for (std::size_t s = 0; s < cfg.sparsity_ratios.size(); ++s)
      for (std::size_t r = 0; r < cfg.realizations; ++r) cells.push_back({e, s, r});

  std::vector<CellOutput> outputs(cells.size());
  std::vector<std::exception_ptr> errors(cells.size());
  std::vector<std::size_t> failures(cells.size()), attempts(cells.size());
  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> finished{0};
  std::mutex log_mutex;
  ExperimentOptions worker_options = options;
  if (options.log)
    worker_options.log = [&](std::string_view msg) {
      std::lock_guard lock(log_mutex);
      options.log(msg);
    };

  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < cells.size();) {
      try {
        outputs[i] = run_cell(cfg, worker_options, cells[i], failures[i], attempts[i]);
      } catch (...) {
        errors[i] = std::current_exception();
      }
      const std::size_t done = ++finished;
      if (worker_options.log && (done % 10 == 0 || done == cells.size()))
        worker_options.log("cells " + std::to_string(done) + "/" + std::to_string(cells.size()));
    }
  };
  std::size_t threads = cfg.threads ? cfg.threads : std::thread::hardware_concurrency();
  threads = std::clamp<std::size_t>(threads, 1, cells.size());
  {
    std::vector<std::jthread> pool;
    for (std::size_t i = 1; i < threads; ++i) pool.emplace_back(worker);
    worker();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);

  ExperimentResult result;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    result.decode_failures += failures[i];
    result.decode_attempts += attempts[i];
  }
  const std::size_t per_group = cfg.realizations;
  for (std::size_t e = 0; e < cfg.edge_counts.size(); ++e) {
    for (std::size_t s = 0; s < cfg.sparsity_ratios.size(); ++s) {
      const std::size_t base = (e * cfg.sparsity_ratios.size() + s) * per_group;
      for (std::size_t li = 0; li < cfg.block_lengths.size(); ++li) {
        const int L = cfg.block_lengths[li];
        ResultRow proto{std::string(kSchemeQnc), cfg.edge_counts[e], cfg.sparsity_ratios[s], L};
        for (int t = 2; t <= cfg.t_max; ++t) {
          double xs = 0.0, es = 0.0;
          std::size_t ok = 0;
          for (std::size_t r = 0; r < per_group; ++r) {
            const CellOutput& c = outputs[base + r];
            const double err = c.qnc_error[li][static_cast<std::size_t>(t - 2)];
            if (std::isnan(err)) continue;
            xs += c.x_norm;
            es += err;
            ++ok;
          }
          if (ok == 0) continue;
          ResultRow row = proto;
          row.t = t;
          row.snr_db = snr_from_norms(xs, es);
          row.delay = static_cast<double>(L) * (t - 1);
          row.realizations = ok;
          result.rows.push_back(std::move(row));
        }
        double xs = 0.0, es = 0.0, last = 0.0;
        for (std::size_t r = 0; r < per_group; ++r) {
          const CellOutput& c = outputs[base + r];
          xs += c.x_norm;
          es += c.forward_error[li];
          last += c.forward_last[li];
        }
        ResultRow row = proto;
        row.scheme = std::string(kSchemeForwarding);
        row.t = last / static_cast<double>(per_group);
        row.snr_db = snr_from_norms(xs, es);
        row.delay = static_cast<double>(L) * row.t;
        row.realizations = per_group;
        result.rows.push_back(std::move(row));
      }
    }
  }
  sort_rows(result.rows);
  if (options.log)
    options.log("decodes " + std::to_string(result.decode_attempts) + ", failures " +
                std::to_string(result.decode_failures));
  return result;
}

std::vector<ResultRow> optimize_block_length(std::span<const ResultRow> rows) {
  require(!rows.empty(), "no rows to optimize");
  using Group = std::tuple<std::string, std::size_t, double>;
  constexpr long long kInfBin = std::numeric_limits<long long>::max();
  std::map<Group, std::map<long long, ResultRow>> bins;
  for (const ResultRow& r : rows) {
    require(!std::isnan(r.snr_db) && !std::isnan(r.delay), "row with NaN values");
    const long long bin =
        std::isinf(r.snr_db)
            ? (r.snr_db > 0 ? kInfBin : std::numeric_limits<long long>::min())
            : static_cast<long long>(std::floor(r.snr_db / kSnrBinWidth));
    auto& slot = bins[{r.scheme, r.edges, r.k_over_n}];
    auto it = slot.find(bin);
    if (it == slot.end()) {
      slot.emplace(bin, r);
      continue;
    }
    const ResultRow& cur = it->second;
    if (std::tuple(r.delay, -r.snr_db, r.block_length, r.t) <
        std::tuple(cur.delay, -cur.snr_db, cur.block_length, cur.t))
      it->second = r;
  }

  std::vector<ResultRow> out;
  for (auto& [group, slot] : bins) {
    std::vector<ResultRow> cand;
    for (auto& [bin, row] : slot) cand.push_back(row);
    std::sort(cand.begin(), cand.end(), [](const ResultRow& a, const ResultRow& b) {
      return std::tuple(a.delay, -a.snr_db) < std::tuple(b.delay, -b.snr_db);
    });
    double best = -std::numeric_limits<double>::infinity();
    for (const ResultRow& r : cand) {
      if (r.snr_db > best) {
        best = r.snr_db;
        out.push_back(r);
      }
    }
  }
  sort_rows(out);
  return out;
}

double frontier_snr_at(std::span<const ResultRow> frontier, double delay) {
  double best = -std::numeric_limits<double>::infinity();
  for (const ResultRow& r : frontier)
    if (r.delay <= delay) best = std::max(best, r.snr_db);
  return best;
}

void sort_rows(std::vector<ResultRow>& rows) {
  std::stable_sort(rows.begin(), rows.end(),
                   [](const ResultRow& a, const ResultRow& b) { return row_key(a) < row_key(b); });
}

std::string emit_csv(std::vector<ResultRow> rows) {
  sort_rows(rows);
  std::string out(kCsvHeader);
  out += '\n';
  for (const ResultRow& r : rows) {
    out += r.scheme;
    out += ',' + std::to_string(r.edges) + ',';
    textio::append_double(out, r.k_over_n);
    out += ',' + std::to_string(r.block_length) + ',';
    textio::append_double(out, r.t);
    out += ',';
    textio::append_double(out, r.snr_db);
    out += ',';
    textio::append_double(out, r.delay);
    out += ',' + std::to_string(r.realizations) + '\n';
  }
  return out;
}

std::vector<ResultRow> parse_csv(std::string_view text) {
  auto lines = split(text, '\n');
  if (lines.empty() || lines.front() != kCsvHeader)
    fail(ErrorCode::kParse, "missing CSV header '" + std::string(kCsvHeader) + "'");
  std::vector<ResultRow> rows;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    auto f = split(lines[i], ',');
    if (f.size() != 8)
      fail(ErrorCode::kParse, "line " + std::to_string(i + 1) + ": expected 8 fields");
    ResultRow r;
    r.scheme = std::string(f[0]);
    r.edges = parse_number<std::size_t>("edges", f[1]);
    r.k_over_n = parse_number<double>("k_over_n", f[2]);
    r.block_length = parse_number<int>("L", f[3]);
    r.t = parse_number<double>("t", f[4]);
    r.snr_db = parse_number<double>("snr_db", f[5]);
    r.delay = parse_number<double>("delay", f[6]);
    r.realizations = parse_number<std::size_t>("realizations", f[7]);
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace qnc
