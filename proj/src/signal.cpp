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

#include "qnc/signal.hpp"

#include <algorithm>
#include <numeric>
#include <vector>

#include "qnc/error.hpp"
#include "qnc/random.hpp"
#include "qnc/textio.hpp"

namespace qnc {

Eigen::MatrixXd random_orthonormal_basis(std::size_t n, std::uint64_t seed) {
  require(n >= 1, "basis dimension must be at least 1");
  Rng rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const auto dim = static_cast<Eigen::Index>(n);
  Eigen::MatrixXd g(dim, dim);
  for (Eigen::Index j = 0; j < dim; ++j)
    for (Eigen::Index i = 0; i < dim; ++i) g(i, j) = normal(rng);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(dim, dim);
  const Eigen::MatrixXd& r = qr.matrixQR();
  for (Eigen::Index j = 0; j < dim; ++j)
    if (r(j, j) < 0) q.col(j) = -q.col(j);
  return q;
}

MessageEnsemble generate_sparse_messages(std::size_t n, std::size_t k,
                                         double q_max, std::uint64_t seed) {
  require(n >= 1, "message count must be at least 1");
  require(k >= 1 && k <= n, "sparsity k must satisfy 1 <= k <= n");
  require(q_max > 0, "q_max must be positive");

  Rng rng(seed);
  MessageEnsemble m;
  m.k = k;
  m.q_max = q_max;
  m.phi = random_orthonormal_basis(n, rng());

  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  for (std::size_t i = 0; i < k; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, n - 1);
    std::swap(idx[i], idx[pick(rng)]);
  }
  std::uniform_real_distribution<double> coeff(-0.5, 0.5);
  const auto dim = static_cast<Eigen::Index>(n);
  for (;;) {
    m.s = Eigen::VectorXd::Zero(dim);
    for (std::size_t i = 0; i < k; ++i) {
      double c = 0.0;
      while (c == 0.0) c = coeff(rng);
      m.s(static_cast<Eigen::Index>(idx[i])) = c;
    }
    m.x = m.phi * m.s;
    if (m.x.cwiseAbs().maxCoeff() > 0) break;
  }
  const double scale = kMessagePeakFraction * q_max / m.x.cwiseAbs().maxCoeff();
  m.s *= scale;
  m.x *= scale;
  return m;
}

std::string MessageEnsemble::to_text() const {
  std::string out = "qnc-messages 1\n";
  out += std::to_string(size()) + ' ' + std::to_string(k) + ' ';
  textio::append_double(out, q_max);
  auto vec = [&](const char* tag, const Eigen::VectorXd& v) {
    out += '\n';
    out += tag;
    for (double e : v) {
      out += ' ';
      textio::append_double(out, e);
    }
  };
  vec("s", s);
  vec("x", x);
  for (Eigen::Index i = 0; i < phi.rows(); ++i) vec("phi", phi.row(i).transpose());
  out += '\n';
  return out;
}

MessageEnsemble MessageEnsemble::from_text(std::string_view text) {
  textio::Tokenizer tok(text);
  MessageEnsemble m = read_text(tok);
  if (!tok.done()) fail(ErrorCode::kParse, "trailing data after message ensemble");
  return m;
}

MessageEnsemble MessageEnsemble::read_text(textio::Tokenizer& tok) {
  tok.expect("qnc-messages");
  tok.expect("1");
  MessageEnsemble m;
  auto n = tok.next_int<std::size_t>();
  if (n == 0) fail(ErrorCode::kParse, "message ensemble must not be empty");
  m.k = tok.next_int<std::size_t>();
  m.q_max = tok.next_double();
  const auto dim = static_cast<Eigen::Index>(n);
  auto vec = [&](const char* tag, Eigen::Ref<Eigen::VectorXd> v) {
    tok.expect(tag);
    for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = tok.next_double();
  };
  m.s.resize(dim);
  m.x.resize(dim);
  m.phi.resize(dim, dim);
  vec("s", m.s);
  vec("x", m.x);
  for (Eigen::Index i = 0; i < dim; ++i) {
    Eigen::VectorXd row(dim);
    vec("phi", row);
    m.phi.row(i) = row.transpose();
  }
  return m;
}

}  // namespace qnc
