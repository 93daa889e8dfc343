// Copyright 2026 The adsdp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef ADSDP_WORKLOAD_HPP_
#define ADSDP_WORKLOAD_HPP_

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "adsdp/common.hpp"

namespace adsdp {

// m linear queries over n days with positive importance weights.
struct QueryWorkload {
  Eigen::MatrixXd queries;
  Eigen::VectorXd gamma;

  QueryWorkload(Eigen::MatrixXd q, Eigen::VectorXd g)
      : queries(std::move(q)), gamma(std::move(g)) {
    if (queries.rows() < 1 || queries.cols() < 1) {
      throw std::invalid_argument("workload needs at least one query and day");
    }
    if (gamma.size() != queries.rows()) {
      throw std::invalid_argument("one weight per query required");
    }
    if (!queries.allFinite() || !gamma.allFinite()) {
      throw std::domain_error("workload entries must be finite");
    }
    if ((gamma.array() <= 0.0).any()) {
      throw std::domain_error("query weights must be positive");
    }
  }

  Eigen::Index query_count() const { return queries.rows(); }
  Eigen::Index days() const { return queries.cols(); }

  // Last day a query reads; the query can be answered at the end of it.
  // Returns -1 for an all-zero row.
  Eigen::Index last_day(Eigen::Index j) const {
    for (Eigen::Index t = days() - 1; t >= 0; --t) {
      if (queries(j, t) != 0.0) return t;
    }
    return -1;
  }

  QueryWorkload with_gamma(Eigen::VectorXd g) const {
    return QueryWorkload(queries, std::move(g));
  }
};

inline QueryWorkload prefix_sum_workload(Eigen::Index n) {
  if (n < 1) throw std::invalid_argument("n must be positive");
  Eigen::MatrixXd q = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) q.row(i).head(i + 1).setOnes();
  return QueryWorkload(std::move(q), Eigen::VectorXd::Ones(n));
}

// Row i sums days max(0, i-K+1)..i.
inline QueryWorkload sliding_window_workload(Eigen::Index n, Eigen::Index window) {
  if (n < 1 || window < 1) throw std::invalid_argument("n and K must be positive");
  Eigen::MatrixXd q = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::Index start = std::max<Eigen::Index>(0, i - window + 1);
    q.row(i).segment(start, i - start + 1).setOnes();
  }
  return QueryWorkload(std::move(q), Eigen::VectorXd::Ones(n));
}

// Variance of q^T (x + z) with independent z_i ~ N(0, sigma_i^2).
inline double query_variance(const Eigen::VectorXd& q, const Eigen::VectorXd& sigma) {
  if (q.size() != sigma.size()) throw std::invalid_argument("length mismatch");
  return (q.array().square() * sigma.array().square()).sum();
}

struct AnswerSet {
  Eigen::VectorXd estimates;
  Eigen::VectorXd truth;

  AnswerSet(Eigen::VectorXd est, Eigen::VectorXd tru)
      : estimates(std::move(est)), truth(std::move(tru)) {
    if (estimates.size() != truth.size()) {
      throw std::invalid_argument("estimates and truth differ in length");
    }
  }

  // m x k answer matrices flattened column by column (publisher-major).
  static AnswerSet from_matrices(const Eigen::MatrixXd& est,
                                 const Eigen::MatrixXd& tru) {
    if (est.rows() != tru.rows() || est.cols() != tru.cols()) {
      throw std::invalid_argument("answer matrices differ in shape");
    }
    return AnswerSet(Eigen::Map<const Eigen::VectorXd>(est.data(), est.size()),
                     Eigen::Map<const Eigen::VectorXd>(tru.data(), tru.size()));
  }
};

// Query weights repeated for each of `publishers` flattened columns.
inline Eigen::VectorXd repeat_weights(const Eigen::VectorXd& gamma,
                                      Eigen::Index publishers) {
  return gamma.replicate(publishers, 1);
}

// sqrt( sum_j gamma_j^2 (est_j - truth_j)^2 / sum_j gamma_j^2 ).
inline double wrmse(const AnswerSet& answers, const Eigen::VectorXd& gamma) {
  if (gamma.size() != answers.truth.size()) {
    throw std::invalid_argument("one weight per answer required");
  }
  const Eigen::ArrayXd g2 = gamma.array().square();
  const Eigen::ArrayXd err2 = (answers.estimates - answers.truth).array().square();
  return std::sqrt((g2 * err2).sum() / g2.sum());
}

// Largest per-query mean squared error across trials.
inline double max_mse(std::span<const AnswerSet> trials) {
  if (trials.empty()) throw std::invalid_argument("no trials");
  const Eigen::Index m = trials.front().truth.size();
  Eigen::ArrayXd sum = Eigen::ArrayXd::Zero(m);
  for (const auto& t : trials) {
    if (t.truth.size() != m) throw std::invalid_argument("trial shape mismatch");
    sum += (t.estimates - t.truth).array().square();
  }
  return (sum / static_cast<double>(trials.size())).maxCoeff();
}

// Row-major CSV, one query per line, optional trailing weight column.
inline void write_workload_csv(std::ostream& out, const QueryWorkload& w) {
  out.precision(17);
  for (Eigen::Index j = 0; j < w.query_count(); ++j) {
    for (Eigen::Index t = 0; t < w.days(); ++t) {
      out << w.queries(j, t) << ',';
    }
    out << w.gamma(j) << '\n';
  }
}

inline QueryWorkload read_workload_csv(std::istream& in) {
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto text = detail::strip_cr(line);
    if (text.empty()) continue;
    std::vector<double> row;
    for (auto field : detail::split_csv_line(text)) {
      double v = 0.0;
      if (!detail::parse_double(field, v)) {
        throw ParseError(line_no, "bad number '" + std::string(field) + "'");
      }
      row.push_back(v);
    }
    if (row.size() < 2) throw ParseError(line_no, "need days and a weight");
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw ParseError(line_no, "ragged workload row");
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ParseError(line_no, "empty workload");
  const auto m = static_cast<Eigen::Index>(rows.size());
  const auto n = static_cast<Eigen::Index>(rows.front().size()) - 1;
  Eigen::MatrixXd q(m, n);
  Eigen::VectorXd g(m);
  for (Eigen::Index j = 0; j < m; ++j) {
    for (Eigen::Index t = 0; t < n; ++t) q(j, t) = rows[j][t];
    g(j) = rows[j][n];
  }
  return QueryWorkload(std::move(q), std::move(g));
}

}  // namespace adsdp

#endif  // ADSDP_WORKLOAD_HPP_
