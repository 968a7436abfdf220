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

// In-process MPC session over real-number shares.
//
// Preprocessing material (Beaver triples, masks, random matrices) comes from
// a trusted dealer that shares the session RNG. Only the online phase
// communicates, and all of its communication is openings: a multiplication
// opens d = x - a and e = y - b, an inversion additionally opens r*x.

#ifndef RNSS_ENGINE_HPP_
#define RNSS_ENGINE_HPP_

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <memory>
#include <random>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "rnss/errors.hpp"
#include "rnss/sharing.hpp"

namespace rnss {

// Communication tally of the online phase.
//
// `multiplications` counts standalone Beaver products. Every inversion runs
// one more Beaver product internally; that product is attributed to the
// inversion, not to `multiplications`.
struct OpeningLedger {
  std::uint64_t openings = 0;
  std::uint64_t multiplications = 0;
  std::uint64_t inversions = 0;
  std::uint64_t direct_openings = 0;

  std::uint64_t beaver_products() const { return multiplications + inversions; }

  // openings = 2*(beaver products) + inversions + direct openings
  bool consistent() const {
    return openings == 2 * beaver_products() + inversions + direct_openings;
  }

  // Each opening broadcasts every party's 8-byte share to the other parties.
  std::uint64_t bytes(std::size_t parties) const {
    return openings * parties * (parties - 1) * 8;
  }

  OpeningLedger operator-(const OpeningLedger& before) const {
    return {openings - before.openings,
            multiplications - before.multiplications,
            inversions - before.inversions,
            direct_openings - before.direct_openings};
  }

  friend bool operator==(const OpeningLedger&, const OpeningLedger&) = default;
};

struct BeaverTriple {
  SharedScalar a;
  SharedScalar b;
  SharedScalar c;
};

struct RandomMask {
  SharedScalar r;
};

struct SessionOptions {
  double sigma_r_sq = 1e4;
  // Opened masked values below this magnitude are treated as zero.
  double eps_singular = 1e-12;
  // Attempts per inversion / random matrix before giving up.
  int max_attempts = 3;
};

class Session {
 public:
  Session(PolicyHandle policy, SessionOptions options, std::uint64_t seed)
      : policy_(std::move(policy)), options_(options), rng_(seed) {
    if (!policy_) {
      throw Error(ErrorCode::kInvalidArgument, "session needs a share policy");
    }
    if (!(options_.sigma_r_sq > 0.0) || !std::isfinite(options_.sigma_r_sq)) {
      throw Error(ErrorCode::kInvalidArgument, "sigma_r^2 must be positive");
    }
    if (options_.max_attempts < 1) {
      throw Error(ErrorCode::kInvalidArgument, "max_attempts must be >= 1");
    }
  }

  const SharePolicy& policy() const { return *policy_; }
  const PolicyHandle& policy_handle() const { return policy_; }
  const SessionOptions& options() const { return options_; }
  double sigma_r_sq() const { return options_.sigma_r_sq; }
  const OpeningLedger& ledger() const { return ledger_; }
  // Failed inversion / random-matrix attempts so far.
  std::uint64_t retries() const { return retries_; }
  void record_retry() { ++retries_; }
  Rng& rng() { return rng_; }

  // Input phase: a party shares a private value. Not an opening.
  SharedScalar share(double secret) {
    return share_secret(secret, policy_, rng_);
  }
  SharedMatrix share(const Eigen::MatrixXd& m) {
    return share_matrix(m, policy_, rng_);
  }

  // Queues dealer output to be consumed before fresh material is drawn.
  void preload_triple(BeaverTriple triple) {
    triples_.push_back(std::move(triple));
  }
  void preload_mask(RandomMask mask) { masks_.push_back(std::move(mask)); }

  BeaverTriple deal_triple() {
    if (!triples_.empty()) {
      BeaverTriple t = std::move(triples_.front());
      triples_.pop_front();
      return t;
    }
    const double a = draw_mask_value();
    const double b = draw_mask_value();
    SharedScalar sa = share(a);
    SharedScalar sb = share(b);
    SharedScalar sc = share(a * b);
    return {std::move(sa), std::move(sb), std::move(sc)};
  }

  RandomMask deal_mask() {
    if (!masks_.empty()) {
      RandomMask m = std::move(masks_.front());
      masks_.pop_front();
      return m;
    }
    return {share(draw_mask_value())};
  }

  SharedMatrix deal_random_matrix(std::size_t d) {
    std::vector<SharedScalar> entries;
    entries.reserve(d * d);
    for (std::size_t i = 0; i < d * d; ++i) {
      entries.push_back(share(draw_mask_value()));
    }
    return SharedMatrix(d, d, std::move(entries));
  }

 private:
  friend double open(const SharedScalar& x, Session& session);
  friend SharedScalar beaver_multiply(const SharedScalar& x,
                                      const SharedScalar& y, Session& session);
  friend SharedScalar secure_invert(const SharedScalar& x, Session& session);

  double draw_mask_value() {
    std::normal_distribution<double> gauss(0.0, std::sqrt(options_.sigma_r_sq));
    return gauss(rng_);
  }

  // Broadcast of all shares; counted as one opening.
  double broadcast(const SharedScalar& x) {
    ++ledger_.openings;
    return reconstruct(x);
  }

  // d*[b] + e*[a] + [c] + d*e with d = x - a, e = y - b opened.
  SharedScalar beaver_product(const SharedScalar& x, const SharedScalar& y) {
    detail::require_compatible(x, y);
    BeaverTriple triple = deal_triple();
    const double d = broadcast(x - triple.a);
    const double e = broadcast(y - triple.b);
    return add_const(d * e, d * triple.b + e * triple.a + triple.c);
  }

  PolicyHandle policy_;
  SessionOptions options_;
  Rng rng_;
  OpeningLedger ledger_;
  std::uint64_t retries_ = 0;
  std::deque<BeaverTriple> triples_;
  std::deque<RandomMask> masks_;
};

inline double open(const SharedScalar& x, Session& session) {
  ++session.ledger_.direct_openings;
  return session.broadcast(x);
}

inline SharedScalar beaver_multiply(const SharedScalar& x,
                                    const SharedScalar& y, Session& session) {
  ++session.ledger_.multiplications;
  return session.beaver_product(x, y);
}

// [1/x] = (1/(r*x)) * [r] with r*x opened. Retries with a fresh mask while
// |r*x| < eps_singular.
inline SharedScalar secure_invert(const SharedScalar& x, Session& session) {
  for (int attempt = 0; attempt < session.options_.max_attempts; ++attempt) {
    RandomMask mask = session.deal_mask();
    ++session.ledger_.inversions;
    const SharedScalar masked = session.beaver_product(mask.r, x);
    const double opened = session.broadcast(masked);
    if (std::abs(opened) >= session.options_.eps_singular &&
        std::isfinite(opened)) {
      return (1.0 / opened) * mask.r;
    }
    ++session.retries_;
  }
  throw Error(ErrorCode::kNearSingularMask,
              "masked value stayed below eps_singular after all attempts");
}

// Schoolbook product: rows(X) * cols(X) * cols(Y) Beaver multiplications.
inline SharedMatrix secure_mat_mul(const SharedMatrix& x, const SharedMatrix& y,
                                   Session& session) {
  if (x.cols() != y.rows()) {
    throw Error(ErrorCode::kShapeMismatch, "inner dimensions differ");
  }
  std::vector<SharedScalar> out;
  out.reserve(x.rows() * y.cols());
  for (std::size_t i = 0; i < x.rows(); ++i) {
    for (std::size_t j = 0; j < y.cols(); ++j) {
      SharedScalar acc = beaver_multiply(x(i, 0), y(0, j), session);
      for (std::size_t k = 1; k < x.cols(); ++k) {
        acc = acc + beaver_multiply(x(i, k), y(k, j), session);
      }
      out.push_back(std::move(acc));
    }
  }
  return SharedMatrix(x.rows(), y.cols(), std::move(out));
}

inline BeaverTriple deal_triple(Session& session) {
  return session.deal_triple();
}
inline RandomMask deal_mask(Session& session) { return session.deal_mask(); }
inline SharedMatrix deal_random_matrix(Session& session, std::size_t d) {
  return session.deal_random_matrix(d);
}

}  // namespace rnss

#endif  // RNSS_ENGINE_HPP_
