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

#include "rnss/engine.hpp"

#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "rnss/errors.hpp"
#include "rnss/sharing.hpp"
#include "test_util.hpp"

namespace rnss {
namespace {

using testing::fixed_policy;

Session make_session(std::uint64_t seed = 1, double sigma_r_sq = 1e4) {
  SessionOptions options;
  options.sigma_r_sq = sigma_r_sq;
  return Session(fixed_policy(), options, seed);
}

TEST(OpenTest, CountsEveryOpening) {
  Session s = make_session();
  EXPECT_NEAR(open(s.share(5.0), s), 5.0, 1e-6);
  EXPECT_EQ(s.ledger().openings, 1u);
  EXPECT_NEAR(open(s.share(std::numbers::pi), s), std::numbers::pi, 1e-6);
  EXPECT_EQ(s.ledger().openings, 2u);
  EXPECT_EQ(s.ledger().direct_openings, 2u);
  EXPECT_TRUE(s.ledger().consistent());
}

TEST(OpenTest, SharingIsNotAnOpening) {
  Session s = make_session();
  s.share(Eigen::MatrixXd::Ones(3, 3));
  deal_triple(s);
  deal_mask(s);
  deal_random_matrix(s, 4);
  EXPECT_EQ(s.ledger(), OpeningLedger{});
}

TEST(BeaverTest, ForcedTriple) {
  Session s = make_session();
  s.preload_triple({s.share(1.0), s.share(1.0), s.share(1.0)});
  // d = 2 - 1 = 1, e = 3 - 1 = 2: 1*[1] + 2*[1] + [1] + 2 = 6
  const SharedScalar z = beaver_multiply(s.share(2.0), s.share(3.0), s);
  EXPECT_NEAR(reconstruct(z), 6.0, 1e-9);
  EXPECT_EQ(s.ledger().multiplications, 1u);
  EXPECT_EQ(s.ledger().openings, 2u);
}

TEST(BeaverTest, ZeroFactor) {
  Session s = make_session();
  const SharedScalar z = beaver_multiply(s.share(0.0), s.share(7.25), s);
  const double tol = 1e-9 * std::max(1.0, std::sqrt(1e4) * 7.25);
  EXPECT_NEAR(reconstruct(z), 0.0, tol);
}

TEST(BeaverTest, RandomPairsAgainstDirectProduct) {
  Session s = make_session(77);
  std::uniform_real_distribution<double> value(-10.0, 10.0);
  Rng rng(78);
  double worst_rel = 0.0;
  double worst_scaled = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const double x = value(rng), y = value(rng);
    const double got = reconstruct(beaver_multiply(s.share(x), s.share(y), s));
    const double err = std::abs(got - x * y);
    worst_rel = std::max(worst_rel, err / std::abs(x * y));
    worst_scaled = std::max(
        worst_scaled,
        err / std::max({std::abs(x * y), 100.0 * (std::abs(x) + std::abs(y)), 1.0}));
  }
  EXPECT_LT(worst_rel, 1e-6);
  EXPECT_LT(worst_scaled, 1e-9);
  EXPECT_EQ(s.ledger().multiplications, 1000u);
  EXPECT_EQ(s.ledger().openings, 2000u);
}

TEST(InvertTest, ForcedMask) {
  Session s = make_session();
  s.preload_mask({s.share(2.0)});
  s.preload_triple({s.share(0.0), s.share(0.0), s.share(0.0)});
  // r x = 8 is opened; (1/8) [2] = [0.25].
  const SharedScalar inv = secure_invert(s.share(4.0), s);
  EXPECT_NEAR(reconstruct(inv), 0.25, 1e-12);
  EXPECT_EQ(s.ledger().inversions, 1u);
  EXPECT_EQ(s.ledger().multiplications, 0u);
  EXPECT_EQ(s.ledger().beaver_products(), 1u);
  EXPECT_EQ(s.ledger().openings, 3u);
}

TEST(InvertTest, Values) {
  Session s = make_session(3);
  EXPECT_NEAR(reconstruct(secure_invert(s.share(1.0), s)), 1.0, 1e-9);
  EXPECT_NEAR(reconstruct(secure_invert(s.share(-0.5), s)), -2.0, 1e-6);
  const double tiny = 1e-6;
  EXPECT_NEAR(reconstruct(secure_invert(s.share(tiny), s)) * tiny, 1.0, 1e-6);
  EXPECT_EQ(s.ledger().openings, 9u);
  EXPECT_TRUE(s.ledger().consistent());
}

TEST(InvertTest, ZeroExhaustsRetries) {
  // Opened r*0 carries rounding noise near sigma_r^2 * 1e-16, so the
  // threshold sits above it here.
  SessionOptions options;
  options.eps_singular = 1e-6;
  Session s(fixed_policy(), options, 4);
  try {
    secure_invert(share_constant(0.0, s.policy_handle()), s);
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNearSingularMask);
    EXPECT_EQ(e.category(), ErrorCategory::kNumerical);
  }
  EXPECT_EQ(s.retries(), 3u);
  EXPECT_EQ(s.ledger().inversions, 3u);
  EXPECT_EQ(s.ledger().openings, 9u);
}

TEST(MatMulTest, IdentityAndOracle) {
  Session s = make_session(5);
  Rng rng(6);
  Eigen::MatrixXd m = Eigen::MatrixXd::Random(3, 3);
  const SharedMatrix prod =
      secure_mat_mul(s.share(Eigen::MatrixXd::Identity(3, 3)), s.share(m), s);
  EXPECT_TRUE(reconstruct_matrix(prod).isApprox(m, 1e-6));

  const Eigen::MatrixXd x = Eigen::MatrixXd::Random(2, 2);
  const Eigen::MatrixXd y = Eigen::MatrixXd::Random(2, 2);
  const Eigen::MatrixXd want = x * y;
  const Eigen::MatrixXd got =
      reconstruct_matrix(secure_mat_mul(s.share(x), s.share(y), s));
  for (Eigen::Index i = 0; i < 2; ++i) {
    for (Eigen::Index j = 0; j < 2; ++j) {
      EXPECT_NEAR(got(i, j), want(i, j), 1e-6 * std::max(1.0, std::abs(want(i, j))));
    }
  }
}

TEST(MatMulTest, CubicMultiplicationCount) {
  Session s = make_session(7);
  const Eigen::MatrixXd m = Eigen::MatrixXd::Random(3, 3);
  secure_mat_mul(s.share(m), s.share(m), s);
  EXPECT_EQ(s.ledger().multiplications, 27u);
  EXPECT_EQ(s.ledger().openings, 54u);

  const OpeningLedger before = s.ledger();
  secure_mat_mul(s.share(m), s.share(Eigen::MatrixXd(Eigen::VectorXd::Ones(3))), s);
  EXPECT_EQ((s.ledger() - before).multiplications, 9u);
}

TEST(MatMulTest, ShapeMismatch) {
  Session s = make_session();
  try {
    secure_mat_mul(s.share(Eigen::MatrixXd::Ones(2, 3)),
                   s.share(Eigen::MatrixXd::Ones(2, 3)), s);
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kShapeMismatch);
  }
}

TEST(DealerTest, TripleIsConsistent) {
  Session s = make_session(8);
  for (int i = 0; i < 100; ++i) {
    const BeaverTriple t = deal_triple(s);
    const double a = reconstruct(t.a), b = reconstruct(t.b);
    EXPECT_NEAR(reconstruct(t.c), a * b, 1e-6 * std::max(1.0, std::abs(a * b)));
  }
}

TEST(DealerTest, MaskVariance) {
  Session s = make_session(9, 1e4);
  double sum = 0.0, sum_sq = 0.0;
  const int draws = 10000;
  for (int i = 0; i < draws; ++i) {
    const double r = reconstruct(deal_mask(s).r);
    sum += r;
    sum_sq += r * r;
  }
  const double mean = sum / draws;
  const double var = sum_sq / draws - mean * mean;
  EXPECT_NEAR(var, 1e4, 0.05 * 1e4);
}

TEST(DealerTest, RandomMatrixEntriesUncorrelated) {
  Session s = make_session(10, 1e4);
  const int draws = 10000;
  Eigen::MatrixXd samples(draws, 4);
  for (int i = 0; i < draws; ++i) {
    const Eigen::MatrixXd r = reconstruct_matrix(deal_random_matrix(s, 2));
    samples.row(i) = r.reshaped().transpose();
  }
  const Eigen::MatrixXd centered = samples.rowwise() - samples.colwise().mean();
  const Eigen::MatrixXd cov = centered.transpose() * centered / (draws - 1);
  for (int i = 0; i < 4; ++i) {
    EXPECT_NEAR(cov(i, i), 1e4, 0.05 * 1e4);
    for (int j = 0; j < i; ++j) {
      EXPECT_LT(std::abs(cov(i, j) / std::sqrt(cov(i, i) * cov(j, j))), 0.05);
    }
  }
}

TEST(LedgerTest, BytesAndDifference) {
  OpeningLedger a;
  a.openings = 10;
  a.multiplications = 5;
  EXPECT_EQ(a.bytes(5), 10u * 5u * 4u * 8u);
  OpeningLedger b = a;
  b.openings = 13;
  b.inversions = 1;
  const OpeningLedger d = b - a;
  EXPECT_EQ(d.openings, 3u);
  EXPECT_EQ(d.inversions, 1u);
  EXPECT_EQ(d.multiplications, 0u);
}

TEST(SessionTest, RejectsBadOptions) {
  SessionOptions bad;
  bad.sigma_r_sq = 0.0;
  EXPECT_THROW(Session(fixed_policy(), bad, 1), Error);
  bad = SessionOptions{};
  bad.max_attempts = 0;
  EXPECT_THROW(Session(fixed_policy(), bad, 1), Error);
  EXPECT_THROW(Session(nullptr, SessionOptions{}, 1), Error);
}

TEST(SessionTest, Deterministic) {
  auto run = [](std::uint64_t seed) {
    Session s = make_session(seed);
    const SharedScalar x = s.share(3.0);
    const SharedScalar y = secure_invert(beaver_multiply(x, s.share(2.0), s), s);
    return std::make_pair(reconstruct(y), s.ledger());
  };
  const auto a = run(99);
  const auto b = run(99);
  EXPECT_EQ(a.first, b.first);
  EXPECT_EQ(a.second, b.second);
}

// Random expression trees over add / scale / multiply / invert evaluated in
// the clear and over shares.
struct TreeValue {
  SharedScalar shared;
  double plain;
};

class TreeBuilder {
 public:
  TreeBuilder(Session& session, Rng& rng) : s_(session), rng_(rng) {}

  TreeValue build(int depth) {
    std::uniform_real_distribution<double> operand(0.1, 10.0);
    std::uniform_int_distribution<int> pick(0, 4);
    const int op = depth == 0 ? 0 : pick(rng_);
    switch (op) {
      case 0: {
        const double v = operand(rng_);
        return {s_.share(v), v};
      }
      case 1: {
        TreeValue a = build(depth - 1), b = build(depth - 1);
        return {a.shared + b.shared, a.plain + b.plain};
      }
      case 2: {
        const double c = operand(rng_);
        TreeValue a = build(depth - 1);
        return {c * a.shared, c * a.plain};
      }
      case 3: {
        TreeValue a = build(depth - 1), b = build(depth - 1);
        return {beaver_multiply(a.shared, b.shared, s_), a.plain * b.plain};
      }
      default: {
        TreeValue a = build(depth - 1);
        return {secure_invert(a.shared, s_), 1.0 / a.plain};
      }
    }
  }

 private:
  Session& s_;
  Rng& rng_;
};

TEST(EnginePropertyTest, ExpressionTreesMatchPlaintext) {
  Rng rng(2024);
  std::uniform_int_distribution<int> depth(1, 5);
  double worst = 0.0;
  for (int trial = 0; trial < 500; ++trial) {
    SessionOptions options;
    Session s(testing::random_policy(rng), options, rng());
    TreeBuilder builder(s, rng);
    const TreeValue v = builder.build(depth(rng));
    const double got = reconstruct(v.shared);
    worst = std::max(worst, std::abs(got - v.plain) / std::max(1.0, std::abs(v.plain)));
    ASSERT_TRUE(s.ledger().consistent());
  }
  EXPECT_LT(worst, 1e-6);
}

}  // namespace
}  // namespace rnss
