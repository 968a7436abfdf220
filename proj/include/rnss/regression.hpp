/*
 * Copyright 2026 The rnss Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Linear regression with a Gaussian prior N(mu_w, Sigma_w). The estimate is
// the mode of the Gibbs posterior, i.e. the solution of
//
//   ((2 lambda / N) sum_i X_i + Sigma_w^-1) w
//       = (2 lambda / N) sum_i z_i + Sigma_w^-1 mu_w
//
// with X_i = sum_j x_ij x_ij^T and z_i = sum_j x_ij y_ij held by party i.

#ifndef RNSS_REGRESSION_HPP_
#define RNSS_REGRESSION_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "rnss/engine.hpp"
#include "rnss/errors.hpp"
#include "rnss/linalg.hpp"
#include "rnss/sharing.hpp"
#include "rnss/solver.hpp"

namespace rnss {

struct PartyDataset {
  Eigen::MatrixXd features;  // one row per sample
  Eigen::VectorXd targets;

  std::size_t rows() const { return static_cast<std::size_t>(features.rows()); }
  std::size_t dim() const { return static_cast<std::size_t>(features.cols()); }
};

struct PriorSpec {
  Eigen::VectorXd mean;
  Eigen::MatrixXd covariance;

  static PriorSpec standard(std::size_t d) {
    const auto n = static_cast<Eigen::Index>(d);
    return {Eigen::VectorXd::Zero(n), Eigen::MatrixXd::Identity(n, n)};
  }

  void validate() const {
    if (covariance.rows() != mean.size() || covariance.cols() != mean.size()) {
      throw Error(ErrorCode::kShapeMismatch, "prior mean/covariance mismatch");
    }
    if (!is_symmetric_positive_definite(covariance)) {
      throw Error(ErrorCode::kNotPositiveDefinite,
                  "prior covariance must be symmetric positive definite");
    }
  }

  // Sigma_w^-1, computed in the clear since the prior is public.
  Eigen::MatrixXd precision() const {
    validate();
    const auto n = covariance.rows();
    return covariance.llt().solve(Eigen::MatrixXd::Identity(n, n));
  }
};

struct RegressionConfig {
  double lambda = 1.0;
  std::size_t total_samples = 0;  // N
  PriorSpec prior;
  double sigma_r_sq = 1e4;
  double sigma_beta_sq = 1e5;
};

struct Aggregates {
  Eigen::MatrixXd gram;    // X_i
  Eigen::VectorXd moment;  // z_i
};

struct SharedAggregates {
  SharedMatrix gram;
  SharedVector moment;
};

struct SharedSystem {
  SharedMatrix a;
  SharedVector b;
};

// Appends a constant-1 column, the intercept feature.
inline Eigen::MatrixXd with_intercept(const Eigen::MatrixXd& features) {
  Eigen::MatrixXd out(features.rows(), features.cols() + 1);
  out.leftCols(features.cols()) = features;
  out.col(features.cols()).setOnes();
  return out;
}

inline Aggregates local_aggregate(const PartyDataset& data) {
  if (data.rows() == 0) {
    throw Error(ErrorCode::kEmptyDataset, "party holds no samples");
  }
  if (data.targets.size() != data.features.rows()) {
    throw Error(ErrorCode::kShapeMismatch, "feature/target row mismatch");
  }
  const Eigen::Index d = data.features.cols();
  Aggregates agg{Eigen::MatrixXd::Zero(d, d), Eigen::VectorXd::Zero(d)};
  for (Eigen::Index r = 0; r < data.features.rows(); ++r) {
    const auto x = data.features.row(r);
    for (Eigen::Index i = 0; i < d; ++i) {
      for (Eigen::Index j = i; j < d; ++j) agg.gram(i, j) += x(i) * x(j);
      agg.moment(i) += x(i) * data.targets(r);
    }
  }
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < i; ++j) agg.gram(i, j) = agg.gram(j, i);
  }
  return agg;
}

// The party's input step: X_i and z_i become shared.
inline SharedAggregates share_aggregates(const Aggregates& agg,
                                         Session& session) {
  return {session.share(agg.gram), session.share(Eigen::MatrixXd(agg.moment))};
}

namespace detail {
inline void check_config(const RegressionConfig& config, Eigen::Index d) {
  if (!(config.lambda >= 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "lambda must be >= 0");
  }
  if (config.total_samples == 0) {
    throw Error(ErrorCode::kInvalidArgument, "total sample count N must be > 0");
  }
  if (config.prior.mean.size() != d) {
    throw Error(ErrorCode::kShapeMismatch, "prior dimension mismatch");
  }
}
}  // namespace detail

// [A] = (2 lambda/N) sum [X_i] + Sigma_w^-1,
// [b] = (2 lambda/N) sum [z_i] + Sigma_w^-1 mu_w. Local operations only.
inline SharedSystem assemble_system(std::span<const SharedAggregates> parties,
                                    const RegressionConfig& config) {
  if (parties.empty()) {
    throw Error(ErrorCode::kEmptyDataset, "no party aggregates");
  }
  const std::size_t d = parties.front().gram.rows();
  detail::check_config(config, static_cast<Eigen::Index>(d));
  SharedMatrix gram_sum = parties.front().gram;
  SharedVector moment_sum = parties.front().moment;
  for (std::size_t p = 1; p < parties.size(); ++p) {
    if (parties[p].gram.rows() != d || parties[p].moment.rows() != d) {
      throw Error(ErrorCode::kShapeMismatch, "party aggregates differ in size");
    }
    gram_sum = add_shared(gram_sum, parties[p].gram);
    moment_sum = add_shared(moment_sum, parties[p].moment);
  }
  const Eigen::MatrixXd precision = config.prior.precision();
  const double scale =
      2.0 * config.lambda / static_cast<double>(config.total_samples);
  return {add_const(precision, mul_const(scale, gram_sum)),
          add_const(Eigen::MatrixXd(precision * config.prior.mean),
                    mul_const(scale, moment_sum))};
}

// The same system in the clear.
inline std::pair<Eigen::MatrixXd, Eigen::VectorXd> plaintext_system(
    std::span<const Aggregates> parties, const RegressionConfig& config) {
  if (parties.empty()) {
    throw Error(ErrorCode::kEmptyDataset, "no party aggregates");
  }
  const Eigen::Index d = parties.front().gram.rows();
  detail::check_config(config, d);
  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(d, d);
  Eigen::VectorXd moment = Eigen::VectorXd::Zero(d);
  for (const auto& p : parties) {
    if (p.gram.rows() != d || p.moment.size() != d) {
      throw Error(ErrorCode::kShapeMismatch, "party aggregates differ in size");
    }
    gram += p.gram;
    moment += p.moment;
  }
  const Eigen::MatrixXd precision = config.prior.precision();
  const double scale =
      2.0 * config.lambda / static_cast<double>(config.total_samples);
  return {scale * gram + precision,
          scale * moment + precision * config.prior.mean};
}

// Ground-truth solve by Cholesky factorization.
inline Eigen::VectorXd closed_form_solve(std::span<const Aggregates> parties,
                                         const RegressionConfig& config) {
  const auto [a, b] = plaintext_system(parties, config);
  Eigen::LLT<Eigen::MatrixXd> llt(a);
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorCode::kNumericalBreakdown,
                "Cholesky factorization of the system matrix failed");
  }
  return llt.solve(b);
}

inline double predict(const Eigen::VectorXd& w, const Eigen::VectorXd& x) {
  if (w.size() != x.size()) {
    throw Error(ErrorCode::kShapeMismatch, "weight/feature length mismatch");
  }
  return w.dot(x);
}

inline double mse(const Eigen::VectorXd& w, const PartyDataset& test) {
  if (test.rows() == 0) {
    throw Error(ErrorCode::kEmptyDataset, "empty test set");
  }
  if (static_cast<Eigen::Index>(test.dim()) != w.size()) {
    throw Error(ErrorCode::kShapeMismatch, "weight/feature length mismatch");
  }
  const Eigen::VectorXd residual = test.features * w - test.targets;
  return residual.squaredNorm() / static_cast<double>(test.rows());
}

// Full protocol: local aggregation, sharing, assembly and a solve. Plaintext
// methods skip the sharing and return an empty ledger.
inline SolveReport run_regression(std::span<const PartyDataset> parties,
                                  const RegressionConfig& config,
                                  SolveMethod method, PolicyHandle policy,
                                  std::uint64_t seed) {
  std::vector<Aggregates> aggregates;
  aggregates.reserve(parties.size());
  for (const auto& p : parties) aggregates.push_back(local_aggregate(p));

  if (!is_secure(method)) {
    const auto [a, b] = plaintext_system(aggregates, config);
    Eigen::VectorXd w = method == SolveMethod::kInsecureGauss
                            ? insecure_gauss(a, b)
                            : insecure_inverse(a, b);
    return {std::move(w), method, {}, 0};
  }

  if (!policy || policy->n() != parties.size()) {
    throw Error(ErrorCode::kInvalidArgument,
                "share policy must have one party per dataset");
  }
  if (policy->sigma_beta_sq() != config.sigma_beta_sq) {
    throw Error(ErrorCode::kInvalidArgument,
                "policy sigma_beta^2 differs from the regression config");
  }
  SessionOptions options;
  options.sigma_r_sq = config.sigma_r_sq;
  Session session(std::move(policy), options, seed);
  std::vector<SharedAggregates> shared;
  shared.reserve(aggregates.size());
  for (const auto& agg : aggregates) {
    shared.push_back(share_aggregates(agg, session));
  }
  const SharedSystem system = assemble_system(shared, config);
  return method == SolveMethod::kSecureGauss
             ? solve_gauss(system.a, system.b, session)
             : solve_inverse_method(system.a, system.b, session);
}

}  // namespace rnss

#endif  // RNSS_REGRESSION_HPP_
