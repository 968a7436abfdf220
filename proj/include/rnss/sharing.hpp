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

// Shamir-style secret sharing over the reals.
//
// A secret s is embedded as the value at 0 of a degree-<=t polynomial
// written in a Lagrange basis over t+1 nodes {0} u {alpha_k : k in basis}.
// The values at the t non-zero nodes are Gaussian with variance
// sigma_beta^2. Party i holds the polynomial evaluated at alpha_i.
//
// Party indices are 0-based throughout the library.

#ifndef RNSS_SHARING_HPP_
#define RNSS_SHARING_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <memory>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "rnss/errors.hpp"

namespace rnss {

using Rng = std::mt19937_64;

// Lagrange polynomials L_0..L_m over a fixed set of distinct nodes.
class LagrangeBasis {
 public:
  explicit LagrangeBasis(std::vector<double> nodes) : nodes_(std::move(nodes)) {
    if (nodes_.empty()) {
      throw Error(ErrorCode::kDegenerateBasis, "basis needs at least one node");
    }
    denominators_.assign(nodes_.size(), 1.0);
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      for (std::size_t j = 0; j < nodes_.size(); ++j) {
        if (i == j) continue;
        const double gap = nodes_[i] - nodes_[j];
        if (gap == 0.0) {
          throw Error(ErrorCode::kDegenerateBasis,
                      "coincident interpolation nodes at " +
                          std::to_string(nodes_[i]));
        }
        denominators_[i] *= gap;
      }
    }
  }

  std::size_t size() const { return nodes_.size(); }
  std::span<const double> nodes() const { return nodes_; }

  // L_i(x)
  double operator()(std::size_t i, double x) const {
    double numerator = 1.0;
    for (std::size_t j = 0; j < nodes_.size(); ++j) {
      if (j != i) numerator *= x - nodes_[j];
    }
    return numerator / denominators_[i];
  }

  std::vector<double> evaluate_all(double x) const {
    std::vector<double> values(nodes_.size());
    for (std::size_t i = 0; i < nodes_.size(); ++i) values[i] = (*this)(i, x);
    return values;
  }

 private:
  std::vector<double> nodes_;
  std::vector<double> denominators_;
};

class SharePolicy;

// Basis over {0} u {alpha_k : k in chosen_subset}. The subset must hold
// exactly t distinct party indices.
LagrangeBasis make_basis(const SharePolicy& policy,
                         std::span<const std::size_t> chosen_subset);

class SharePolicy {
 public:
  SharePolicy(std::size_t parties, std::size_t threshold,
              std::vector<double> alphas, double sigma_beta_sq,
              std::vector<std::size_t> basis_parties)
      : n_(parties),
        t_(threshold),
        alphas_(std::move(alphas)),
        sigma_beta_sq_(sigma_beta_sq),
        basis_parties_(std::move(basis_parties)) {
    if (n_ < 2) {
      throw Error(ErrorCode::kInvalidArgument, "need at least 2 parties");
    }
    if (t_ < 1 || t_ >= n_) {
      throw Error(ErrorCode::kInvalidArgument,
                  "threshold must satisfy 1 <= t < n");
    }
    if (alphas_.size() != n_) {
      throw Error(ErrorCode::kInvalidArgument,
                  "expected one evaluation point per party");
    }
    for (std::size_t i = 0; i < n_; ++i) {
      if (!std::isfinite(alphas_[i]) || alphas_[i] == 0.0) {
        throw Error(ErrorCode::kInvalidArgument,
                    "evaluation points must be finite and nonzero");
      }
      for (std::size_t j = 0; j < i; ++j) {
        if (alphas_[i] == alphas_[j]) {
          throw Error(ErrorCode::kInvalidArgument,
                      "evaluation points must be distinct");
        }
      }
    }
    if (!(sigma_beta_sq_ > 0.0) || !std::isfinite(sigma_beta_sq_)) {
      throw Error(ErrorCode::kInvalidArgument, "sigma_beta^2 must be positive");
    }
    basis_ = std::make_shared<const LagrangeBasis>(
        make_basis(*this, basis_parties_));
    weights_.resize(n_ * (t_ + 1));
    for (std::size_t i = 0; i < n_; ++i) {
      for (std::size_t k = 0; k <= t_; ++k) {
        weights_[i * (t_ + 1) + k] = (*basis_)(k, alphas_[i]);
      }
    }
    choose_opening_subset();
  }

  // alpha_i = 0.2*(i+1) - 0.1 and basis parties {0, ..., t-1}.
  static SharePolicy with_fixed_points(std::size_t parties,
                                       std::size_t threshold,
                                       double sigma_beta_sq) {
    std::vector<double> alphas(parties);
    for (std::size_t i = 0; i < parties; ++i) {
      alphas[i] = 0.2 * static_cast<double>(i + 1) - 0.1;
    }
    std::vector<std::size_t> basis(threshold);
    for (std::size_t k = 0; k < threshold; ++k) basis[k] = k;
    return SharePolicy(parties, threshold, std::move(alphas), sigma_beta_sq,
                       std::move(basis));
  }

  // Evaluation points uniform on [0,1) and a uniformly random basis subset.
  static SharePolicy random(std::size_t parties, std::size_t threshold,
                            double sigma_beta_sq, Rng& rng) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<double> alphas;
    alphas.reserve(parties);
    while (alphas.size() < parties) {
      const double a = unit(rng);
      if (a == 0.0 ||
          std::find(alphas.begin(), alphas.end(), a) != alphas.end()) {
        continue;
      }
      alphas.push_back(a);
    }
    std::vector<std::size_t> order(parties);
    for (std::size_t i = 0; i < parties; ++i) order[i] = i;
    std::shuffle(order.begin(), order.end(), rng);
    order.resize(std::min(threshold, parties));
    std::sort(order.begin(), order.end());
    return SharePolicy(parties, threshold, std::move(alphas), sigma_beta_sq,
                       std::move(order));
  }

  std::size_t n() const { return n_; }
  std::size_t t() const { return t_; }
  std::span<const double> alphas() const { return alphas_; }
  double alpha(std::size_t party) const { return alphas_.at(party); }
  double sigma_beta_sq() const { return sigma_beta_sq_; }
  std::span<const std::size_t> basis_parties() const { return basis_parties_; }
  const LagrangeBasis& basis() const { return *basis_; }

  // L_k(alpha_party) for k = 0..t, k = 0 being the secret's node.
  std::span<const double> share_weights(std::size_t party) const {
    return std::span<const double>(weights_).subspan(party * (t_ + 1), t_ + 1);
  }

  // Weights w_i with secret = sum_i w_i * share_i, nonzero on t+1 parties.
  // The subset minimizes sum |L_i(0)|, which bounds rounding growth when
  // extrapolating to 0 from clustered points.
  std::span<const double> opening_weights() const { return opening_weights_; }

  friend bool operator==(const SharePolicy& a, const SharePolicy& b) {
    return a.n_ == b.n_ && a.t_ == b.t_ && a.alphas_ == b.alphas_ &&
           a.sigma_beta_sq_ == b.sigma_beta_sq_ &&
           a.basis_parties_ == b.basis_parties_;
  }

 private:
  // Subsets are searched exhaustively up to this many; beyond it the t+1
  // points closest to 0 are used.
  static constexpr std::size_t kMaxSubsetSearch = 20000;

  void choose_opening_subset() {
    const std::size_t m = t_ + 1;
    auto lebesgue = [&](const std::vector<std::size_t>& subset,
                        std::vector<double>* weights) {
      double total = 0.0;
      for (std::size_t a = 0; a < m; ++a) {
        double w = 1.0;
        for (std::size_t b = 0; b < m; ++b) {
          if (a == b) continue;
          w *= alphas_[subset[b]] / (alphas_[subset[b]] - alphas_[subset[a]]);
        }
        if (weights) (*weights)[subset[a]] = w;
        total += std::abs(w);
      }
      return total;
    };

    double combos = 1.0;
    for (std::size_t k = 0; k < m; ++k) {
      combos = combos * static_cast<double>(n_ - k) / static_cast<double>(k + 1);
    }
    std::vector<std::size_t> best;
    if (combos <= static_cast<double>(kMaxSubsetSearch)) {
      double best_score = INFINITY;
      std::vector<bool> pick(n_, false);
      std::fill(pick.begin(), pick.begin() + static_cast<std::ptrdiff_t>(m), true);
      do {
        std::vector<std::size_t> subset;
        for (std::size_t i = 0; i < n_; ++i) {
          if (pick[i]) subset.push_back(i);
        }
        const double score = lebesgue(subset, nullptr);
        if (score < best_score) {
          best_score = score;
          best = std::move(subset);
        }
      } while (std::prev_permutation(pick.begin(), pick.end()));
    } else {
      std::vector<std::size_t> order(n_);
      for (std::size_t i = 0; i < n_; ++i) order[i] = i;
      std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return std::abs(alphas_[a]) < std::abs(alphas_[b]);
      });
      best.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(m));
    }
    opening_weights_.assign(n_, 0.0);
    lebesgue(best, &opening_weights_);
  }

  std::size_t n_;
  std::size_t t_;
  std::vector<double> alphas_;
  double sigma_beta_sq_;
  std::vector<std::size_t> basis_parties_;
  std::shared_ptr<const LagrangeBasis> basis_;
  std::vector<double> weights_;
  std::vector<double> opening_weights_;
};

using PolicyHandle = std::shared_ptr<const SharePolicy>;

inline LagrangeBasis make_basis(const SharePolicy& policy,
                                std::span<const std::size_t> chosen_subset) {
  if (chosen_subset.size() != policy.t()) {
    throw Error(ErrorCode::kInvalidSubset,
                "basis subset must hold exactly t party indices");
  }
  std::vector<double> nodes{0.0};
  for (std::size_t k = 0; k < chosen_subset.size(); ++k) {
    const std::size_t party = chosen_subset[k];
    if (party >= policy.n()) {
      throw Error(ErrorCode::kInvalidSubset, "party index out of range");
    }
    for (std::size_t j = 0; j < k; ++j) {
      if (chosen_subset[j] == party) {
        throw Error(ErrorCode::kInvalidSubset, "duplicate party index");
      }
    }
    nodes.push_back(policy.alpha(party));
  }
  return LagrangeBasis(std::move(nodes));
}

// [s]: one share per party, all under the same policy.
class SharedScalar {
 public:
  SharedScalar(PolicyHandle policy, std::vector<double> shares)
      : policy_(std::move(policy)), shares_(std::move(shares)) {
    if (!policy_ || shares_.size() != policy_->n()) {
      throw Error(ErrorCode::kIncompatibleSharing,
                  "share vector does not match the policy");
    }
  }

  const SharePolicy& policy() const { return *policy_; }
  const PolicyHandle& policy_handle() const { return policy_; }
  std::span<const double> shares() const { return shares_; }
  double share(std::size_t party) const { return shares_.at(party); }

 private:
  PolicyHandle policy_;
  std::vector<double> shares_;
};

struct IndexedShare {
  std::size_t party;
  double value;
};

inline bool compatible(const PolicyHandle& a, const PolicyHandle& b) {
  return a == b || (a && b && *a == *b);
}

// Shares of s given explicit interpolation values beta_1..beta_t.
inline SharedScalar share_with_betas(double secret, const PolicyHandle& policy,
                                     std::span<const double> betas) {
  if (betas.size() != policy->t()) {
    throw Error(ErrorCode::kInvalidArgument, "expected t interpolation values");
  }
  std::vector<double> shares(policy->n());
  for (std::size_t i = 0; i < policy->n(); ++i) {
    const auto w = policy->share_weights(i);
    double value = secret * w[0];
    for (std::size_t k = 0; k < betas.size(); ++k) value += betas[k] * w[k + 1];
    shares[i] = value;
  }
  return SharedScalar(policy, std::move(shares));
}

// Draws t values beta ~ N(0, sigma_beta^2), in order, from rng.
inline SharedScalar share_secret(double secret, const PolicyHandle& policy,
                                 Rng& rng) {
  std::normal_distribution<double> gauss(0.0,
                                         std::sqrt(policy->sigma_beta_sq()));
  std::vector<double> betas(policy->t());
  for (double& b : betas) b = gauss(rng);
  return share_with_betas(secret, policy, betas);
}

// Deterministic sharing of a public value: every beta is zero.
inline SharedScalar share_constant(double value, const PolicyHandle& policy) {
  const std::vector<double> zeros(policy->t(), 0.0);
  return share_with_betas(value, policy, zeros);
}

// Interpolates through the given points and evaluates at 0.
inline double reconstruct(std::span<const IndexedShare> points,
                          const SharePolicy& policy) {
  if (points.size() < policy.t() + 1) {
    throw Error(ErrorCode::kInsufficientShares,
                "need at least t+1 shares, got " +
                    std::to_string(points.size()));
  }
  std::vector<double> xs;
  xs.reserve(points.size());
  for (const auto& p : points) {
    if (p.party >= policy.n()) {
      throw Error(ErrorCode::kInvalidArgument, "party index out of range");
    }
    xs.push_back(policy.alpha(p.party));
  }
  LagrangeBasis basis(std::move(xs));  // rejects repeated parties
  double secret = 0.0;
  for (std::size_t k = 0; k < points.size(); ++k) {
    secret += points[k].value * basis(k, 0.0);
  }
  return secret;
}

// Reconstruction once every party's share is known, through the policy's
// best-conditioned t+1 of them.
inline double reconstruct(const SharedScalar& x) {
  const auto weights = x.policy().opening_weights();
  double secret = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] != 0.0) secret += weights[i] * x.share(i);
  }
  return secret;
}

namespace detail {
inline void require_compatible(const SharedScalar& x, const SharedScalar& y) {
  if (!compatible(x.policy_handle(), y.policy_handle())) {
    throw Error(ErrorCode::kIncompatibleSharing,
                "operands are shared under different policies");
  }
}
}  // namespace detail

inline SharedScalar add_shared(const SharedScalar& x, const SharedScalar& y) {
  detail::require_compatible(x, y);
  std::vector<double> out(x.shares().begin(), x.shares().end());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += y.share(i);
  return SharedScalar(x.policy_handle(), std::move(out));
}

inline SharedScalar subtract_shared(const SharedScalar& x,
                                    const SharedScalar& y) {
  detail::require_compatible(x, y);
  std::vector<double> out(x.shares().begin(), x.shares().end());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] -= y.share(i);
  return SharedScalar(x.policy_handle(), std::move(out));
}

inline SharedScalar mul_const(double a, const SharedScalar& x) {
  std::vector<double> out(x.shares().begin(), x.shares().end());
  for (double& v : out) v *= a;
  return SharedScalar(x.policy_handle(), std::move(out));
}

// a + [x]: adds the zero-randomness sharing of a, so the result stays on
// the session basis.
inline SharedScalar add_const(double a, const SharedScalar& x) {
  std::vector<double> out(x.shares().begin(), x.shares().end());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] += a * x.policy().share_weights(i)[0];
  }
  return SharedScalar(x.policy_handle(), std::move(out));
}

inline SharedScalar operator+(const SharedScalar& x, const SharedScalar& y) {
  return add_shared(x, y);
}
inline SharedScalar operator-(const SharedScalar& x, const SharedScalar& y) {
  return subtract_shared(x, y);
}
inline SharedScalar operator*(double a, const SharedScalar& x) {
  return mul_const(a, x);
}
inline SharedScalar operator*(const SharedScalar& x, double a) {
  return mul_const(a, x);
}
inline SharedScalar operator+(double a, const SharedScalar& x) {
  return add_const(a, x);
}
inline SharedScalar operator+(const SharedScalar& x, double a) {
  return add_const(a, x);
}

// Entrywise-shared matrix, row major. A vector is a single column.
class SharedMatrix {
 public:
  // All entries are the zero sharing of 0.
  SharedMatrix(std::size_t rows, std::size_t cols, const PolicyHandle& policy)
      : rows_(rows),
        cols_(cols),
        entries_(rows * cols,
                 SharedScalar(policy, std::vector<double>(policy->n(), 0.0))) {}

  SharedMatrix(std::size_t rows, std::size_t cols,
               std::vector<SharedScalar> entries)
      : rows_(rows), cols_(cols), entries_(std::move(entries)) {
    if (entries_.size() != rows_ * cols_ || entries_.empty()) {
      throw Error(ErrorCode::kShapeMismatch, "entry count does not match shape");
    }
    for (const auto& e : entries_) {
      detail::require_compatible(entries_.front(), e);
    }
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return entries_.size(); }

  SharedScalar& operator()(std::size_t r, std::size_t c) {
    return entries_[r * cols_ + c];
  }
  const SharedScalar& operator()(std::size_t r, std::size_t c) const {
    return entries_[r * cols_ + c];
  }
  // Vector-style access for single-column matrices.
  SharedScalar& operator[](std::size_t i) { return entries_[i]; }
  const SharedScalar& operator[](std::size_t i) const { return entries_[i]; }

  const SharePolicy& policy() const { return entries_.front().policy(); }
  const PolicyHandle& policy_handle() const {
    return entries_.front().policy_handle();
  }

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<SharedScalar> entries_;
};

using SharedVector = SharedMatrix;

inline SharedMatrix share_matrix(const Eigen::MatrixXd& m,
                                 const PolicyHandle& policy, Rng& rng) {
  std::vector<SharedScalar> entries;
  entries.reserve(static_cast<std::size_t>(m.size()));
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      entries.push_back(share_secret(m(r, c), policy, rng));
    }
  }
  return SharedMatrix(static_cast<std::size_t>(m.rows()),
                      static_cast<std::size_t>(m.cols()), std::move(entries));
}

inline SharedVector share_vector(const Eigen::VectorXd& v,
                                 const PolicyHandle& policy, Rng& rng) {
  return share_matrix(Eigen::MatrixXd(v), policy, rng);
}

inline Eigen::MatrixXd reconstruct_matrix(const SharedMatrix& m) {
  Eigen::MatrixXd out(m.rows(), m.cols());
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = 0; c < m.cols(); ++c) {
      out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          reconstruct(m(r, c));
    }
  }
  return out;
}

inline Eigen::VectorXd reconstruct_vector(const SharedVector& v) {
  return reconstruct_matrix(v).reshaped();
}

inline SharedMatrix add_shared(const SharedMatrix& x, const SharedMatrix& y) {
  if (x.rows() != y.rows() || x.cols() != y.cols()) {
    throw Error(ErrorCode::kShapeMismatch, "cannot add matrices of different shape");
  }
  std::vector<SharedScalar> out;
  out.reserve(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out.push_back(x[i] + y[i]);
  return SharedMatrix(x.rows(), x.cols(), std::move(out));
}

inline SharedMatrix mul_const(double a, const SharedMatrix& x) {
  std::vector<SharedScalar> out;
  out.reserve(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out.push_back(a * x[i]);
  return SharedMatrix(x.rows(), x.cols(), std::move(out));
}

// Public matrix plus shared matrix, entrywise.
inline SharedMatrix add_const(const Eigen::MatrixXd& a, const SharedMatrix& x) {
  if (static_cast<std::size_t>(a.rows()) != x.rows() ||
      static_cast<std::size_t>(a.cols()) != x.cols()) {
    throw Error(ErrorCode::kShapeMismatch, "cannot add matrices of different shape");
  }
  std::vector<SharedScalar> out;
  out.reserve(x.size());
  for (std::size_t r = 0; r < x.rows(); ++r) {
    for (std::size_t c = 0; c < x.cols(); ++c) {
      out.push_back(add_const(
          a(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)),
          x(r, c)));
    }
  }
  return SharedMatrix(x.rows(), x.cols(), std::move(out));
}

// Public matrix times shared matrix; local, no communication.
inline SharedMatrix public_mat_mul(const Eigen::MatrixXd& a,
                                   const SharedMatrix& x) {
  if (static_cast<std::size_t>(a.cols()) != x.rows()) {
    throw Error(ErrorCode::kShapeMismatch, "inner dimensions differ");
  }
  const std::size_t n = x.policy().n();
  std::vector<SharedScalar> out;
  out.reserve(static_cast<std::size_t>(a.rows()) * x.cols());
  for (Eigen::Index r = 0; r < a.rows(); ++r) {
    for (std::size_t c = 0; c < x.cols(); ++c) {
      std::vector<double> acc(n, 0.0);
      for (std::size_t k = 0; k < x.rows(); ++k) {
        const double coeff = a(r, static_cast<Eigen::Index>(k));
        const auto s = x(k, c).shares();
        for (std::size_t p = 0; p < n; ++p) acc[p] += coeff * s[p];
      }
      out.emplace_back(x.policy_handle(), std::move(acc));
    }
  }
  return SharedMatrix(static_cast<std::size_t>(a.rows()), x.cols(),
                      std::move(out));
}

}  // namespace rnss

#endif  // RNSS_SHARING_HPP_
