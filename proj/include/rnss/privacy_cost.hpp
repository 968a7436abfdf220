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

// Communication cost of the two secure solvers and an upper bound on what a
// t-party coalition learns about one entry x of a party's Gram matrix.
//
// Leakage model. Every opening is pessimistically taken to be x - r_j with
// r_j ~ N(0, sigma_r^2), j = 1..O. The coalition also holds its shares of x
// and of every r_j. A share at point a of a value with variance s^2 is
// modelled as L_0(a) * value + noise, where the noise has variance
// sum_{j>=1} L_j(a)^2 sigma_beta^2 and is independent across coalition
// members. Under that model
//
//   gamma = sigma_r^4 * L0^T C^-1 L0,
//   C     = sigma_r^2 L0 L0^T + sigma_beta^2 diag(sum_j L_j(a_k)^2),
//
// is the variance of r_j explained by the coalition's shares of r_j, and
//
//   I(x; view) <= 1/2 ln[ (s_r - gamma + s_x O) det(C_xs - B)
//                         / ((s_r - gamma) prod_k sum_j L_j(a_k)^2 s_b) ]
//
// with C_xs = s_x L0 L0^T + s_b diag(sum_j L_j(a_k)^2) and
// B = O s_x^2 L0 L0^T / (s_r - gamma + O s_x). No O-sized matrix is built.

#ifndef RNSS_PRIVACY_COST_HPP_
#define RNSS_PRIVACY_COST_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rnss/errors.hpp"
#include "rnss/sharing.hpp"
#include "rnss/solver.hpp"

namespace rnss {

struct CostBreakdown {
  std::uint64_t multiplications = 0;  // standalone Beaver products
  std::uint64_t inversions = 0;
  std::uint64_t direct_openings = 0;

  // 2 per multiplication, 3 per inversion, 1 per direct opening.
  std::uint64_t openings() const {
    return 2 * multiplications + 3 * inversions + direct_openings;
  }
};

inline void require_dimension(std::uint64_t d) {
  if (d == 0) throw Error(ErrorCode::kInvalidArgument, "dimension must be >= 1");
}

inline CostBreakdown cost_inverse(std::uint64_t d) {
  require_dimension(d);
  return {d * d * d + d * d, 0, d * d + d};
}

inline CostBreakdown cost_gauss(std::uint64_t d) {
  require_dimension(d);
  // (d^3 + 3d^2 - d)/3 multiplications; the numerator is divisible by 3
  // for every integer d.
  const std::uint64_t mult_numerator = d * d * d + 3 * d * d - d;
  return {mult_numerator / 3, (d * d + d) / 2, d};
}

// 2d^3 + 3d^2 + d
inline std::uint64_t openings_inverse(std::uint64_t d) {
  return cost_inverse(d).openings();
}

// (2/3)d^3 + (7/2)d^2 + (11/6)d, an integer for every d >= 1.
inline std::uint64_t openings_gauss(std::uint64_t d) {
  require_dimension(d);
  const std::uint64_t numerator = 4 * d * d * d + 21 * d * d + 11 * d;
  if (numerator % 6 != 0) {
    throw Error(ErrorCode::kNumericalBreakdown,
                "opening count is not integral for d = " + std::to_string(d));
  }
  return numerator / 6;
}

inline CostBreakdown cost_for(SolveMethod method, std::uint64_t d) {
  switch (method) {
    case SolveMethod::kSecureInverse: return cost_inverse(d);
    case SolveMethod::kSecureGauss: return cost_gauss(d);
    default: return {};
  }
}

struct LeakageScenario {
  std::uint64_t openings = 1;          // O
  std::size_t threshold = 1;           // t
  std::vector<double> basis_nodes;     // t+1 nodes, the first being 0
  std::vector<double> adversary_alphas;  // one point per coalition member
  double sigma_r_sq = 1e4;
  double sigma_beta_sq = 1e5;
  double sigma_x_sq = 4.0;

  void validate() const {
    if (openings < 1) {
      throw Error(ErrorCode::kInvalidScenario, "need at least one opening");
    }
    if (threshold < 1 || basis_nodes.size() != threshold + 1) {
      throw Error(ErrorCode::kInvalidScenario, "basis must have t+1 nodes");
    }
    if (basis_nodes.front() != 0.0) {
      throw Error(ErrorCode::kInvalidScenario, "first basis node must be 0");
    }
    if (adversary_alphas.size() != threshold) {
      throw Error(ErrorCode::kInvalidScenario, "coalition must have t members");
    }
    for (std::size_t i = 0; i < adversary_alphas.size(); ++i) {
      if (adversary_alphas[i] == 0.0) {
        throw Error(ErrorCode::kInvalidScenario,
                    "coalition point coincides with the secret's node");
      }
      for (std::size_t j = 0; j < i; ++j) {
        if (adversary_alphas[i] == adversary_alphas[j]) {
          throw Error(ErrorCode::kInvalidScenario,
                      "coincident coalition points");
        }
      }
    }
    if (!(sigma_r_sq > 0.0) || !(sigma_beta_sq > 0.0) || !(sigma_x_sq > 0.0)) {
      throw Error(ErrorCode::kInvalidScenario, "variances must be positive");
    }
  }
};

// n = 5, t = 3, alpha_i = 0.2 i - 0.1, basis on parties 1..3 and the
// coalition {3, 4, 5} (1-based).
inline LeakageScenario reference_scenario(std::uint64_t openings,
                                          double sigma_r_sq,
                                          double sigma_beta_sq,
                                          double sigma_x_sq = 4.0) {
  LeakageScenario s;
  s.openings = openings;
  s.threshold = 3;
  s.basis_nodes = {0.0, 0.1, 0.3, 0.5};
  s.adversary_alphas = {0.2 * 3 - 0.1, 0.2 * 4 - 0.1, 0.2 * 5 - 0.1};
  s.sigma_r_sq = sigma_r_sq;
  s.sigma_beta_sq = sigma_beta_sq;
  s.sigma_x_sq = sigma_x_sq;
  return s;
}

// The t parties most informative to a coalition: those outside the basis
// first, then basis parties from the highest index down.
inline std::vector<std::size_t> worst_case_adversary(const SharePolicy& policy) {
  std::vector<std::size_t> outside;
  std::vector<std::size_t> inside;
  const auto basis = policy.basis_parties();
  for (std::size_t i = 0; i < policy.n(); ++i) {
    const bool in_basis = std::find(basis.begin(), basis.end(), i) != basis.end();
    (in_basis ? inside : outside).push_back(i);
  }
  std::vector<std::size_t> chosen;
  for (std::size_t i : outside) {
    if (chosen.size() < policy.t()) chosen.push_back(i);
  }
  for (auto it = inside.rbegin();
       it != inside.rend() && chosen.size() < policy.t(); ++it) {
    chosen.push_back(*it);
  }
  std::sort(chosen.begin(), chosen.end());
  return chosen;
}

inline LeakageScenario scenario_for_policy(
    const SharePolicy& policy, const std::vector<std::size_t>& adversary,
    std::uint64_t openings, double sigma_r_sq, double sigma_x_sq) {
  LeakageScenario s;
  s.openings = openings;
  s.threshold = policy.t();
  const auto nodes = policy.basis().nodes();
  s.basis_nodes.assign(nodes.begin(), nodes.end());
  for (std::size_t party : adversary) {
    s.adversary_alphas.push_back(policy.alpha(party));
  }
  s.sigma_r_sq = sigma_r_sq;
  s.sigma_beta_sq = policy.sigma_beta_sq();
  s.sigma_x_sq = sigma_x_sq;
  return s;
}

namespace detail {
struct CoalitionBasis {
  Eigen::VectorXd l0;          // L_0 at each coalition point
  Eigen::VectorXd noise_gain;  // sum_{j>=1} L_j(a_k)^2
};

inline CoalitionBasis coalition_basis(const LeakageScenario& s) {
  s.validate();
  const LagrangeBasis basis(s.basis_nodes);
  const auto t = static_cast<Eigen::Index>(s.threshold);
  CoalitionBasis out{Eigen::VectorXd(t), Eigen::VectorXd(t)};
  for (Eigen::Index k = 0; k < t; ++k) {
    const auto values =
        basis.evaluate_all(s.adversary_alphas[static_cast<std::size_t>(k)]);
    out.l0(k) = values[0];
    double gain = 0.0;
    for (std::size_t j = 1; j < values.size(); ++j) gain += values[j] * values[j];
    out.noise_gain(k) = gain;
  }
  return out;
}

inline double gamma_from(const LeakageScenario& s, const CoalitionBasis& cb) {
  const Eigen::MatrixXd cov =
      s.sigma_r_sq * cb.l0 * cb.l0.transpose() +
      Eigen::MatrixXd((s.sigma_beta_sq * cb.noise_gain).asDiagonal());
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorCode::kInvalidScenario,
                "covariance of the coalition's mask shares is singular");
  }
  return s.sigma_r_sq * s.sigma_r_sq * cb.l0.dot(llt.solve(cb.l0));
}
}  // namespace detail

inline double gamma(const LeakageScenario& scenario) {
  return detail::gamma_from(scenario, detail::coalition_basis(scenario));
}

// Upper bound on I(x; view) in nats.
inline double leakage_bound(const LeakageScenario& s) {
  const detail::CoalitionBasis cb = detail::coalition_basis(s);
  const double g = detail::gamma_from(s, cb);
  const double residual = s.sigma_r_sq - g;
  if (!(residual > 0.0)) {
    throw Error(ErrorCode::kInvalidScenario,
                "sigma_r^2 must exceed gamma for the bound to exist");
  }
  const double o = static_cast<double>(s.openings);

  const Eigen::MatrixXd l0l0 = cb.l0 * cb.l0.transpose();
  const Eigen::MatrixXd c_xs =
      s.sigma_x_sq * l0l0 +
      Eigen::MatrixXd((s.sigma_beta_sq * cb.noise_gain).asDiagonal());
  const Eigen::MatrixXd b =
      (o * s.sigma_x_sq * s.sigma_x_sq / (residual + s.sigma_x_sq * o)) * l0l0;
  Eigen::LLT<Eigen::MatrixXd> llt(c_xs - b);
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorCode::kNumericalBreakdown,
                "C_xs - B is not positive definite");
  }
  const Eigen::MatrixXd factor = llt.matrixL();
  const double log_det = 2.0 * factor.diagonal().array().log().sum();
  const double log_noise =
      (s.sigma_beta_sq * cb.noise_gain).array().log().sum();

  const double nats = 0.5 * (std::log(residual + s.sigma_x_sq * o) -
                             std::log(residual) + log_det - log_noise);
  if (!std::isfinite(nats)) {
    throw Error(ErrorCode::kNumericalBreakdown, "leakage bound is not finite");
  }
  return nats;
}

// Variance of a sum of n products of two independent U[0,1] variables.
inline double sigma_x_estimate(std::uint64_t rows) {
  return static_cast<double>(rows) * 7.0 / 144.0;
}

// I(X; X - R) for independent Gaussians.
inline double reference_leak(double sigma_x_sq, double sigma_r_sq) {
  if (!(sigma_x_sq > 0.0) || !(sigma_r_sq > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "variances must be positive");
  }
  return 0.5 * std::log1p(sigma_x_sq / sigma_r_sq);
}

}  // namespace rnss

#endif  // RNSS_PRIVACY_COST_HPP_
