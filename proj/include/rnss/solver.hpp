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

// Secure solvers for A w = b with A symmetric positive definite, and their
// plaintext twins that follow the same arithmetic without masking.

#ifndef RNSS_SOLVER_HPP_
#define RNSS_SOLVER_HPP_

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "rnss/engine.hpp"
#include "rnss/errors.hpp"
#include "rnss/linalg.hpp"
#include "rnss/sharing.hpp"

namespace rnss {

enum class SolveMethod {
  kSecureGauss,
  kSecureInverse,
  kInsecureGauss,
  kInsecureInverse,
};

inline constexpr std::array<SolveMethod, 4> kAllMethods = {
    SolveMethod::kSecureGauss, SolveMethod::kSecureInverse,
    SolveMethod::kInsecureGauss, SolveMethod::kInsecureInverse};

inline std::string_view to_string(SolveMethod method) {
  switch (method) {
    case SolveMethod::kSecureGauss: return "secure-gauss";
    case SolveMethod::kSecureInverse: return "secure-inverse";
    case SolveMethod::kInsecureGauss: return "insecure-gauss";
    case SolveMethod::kInsecureInverse: return "insecure-inverse";
  }
  return "unknown";
}

inline std::optional<SolveMethod> parse_method(std::string_view name) {
  for (SolveMethod m : kAllMethods) {
    if (to_string(m) == name) return m;
  }
  return std::nullopt;
}

inline bool is_secure(SolveMethod method) {
  return method == SolveMethod::kSecureGauss ||
         method == SolveMethod::kSecureInverse;
}

struct SolveReport {
  Eigen::VectorXd w;
  SolveMethod method;
  OpeningLedger ledger;  // delta consumed by this solve
  std::uint64_t retries = 0;
};

namespace detail {
inline std::size_t require_square_system(const SharedMatrix& a,
                                         const SharedVector& b) {
  if (a.rows() != a.cols() || a.rows() == 0) {
    throw Error(ErrorCode::kShapeMismatch, "system matrix must be square");
  }
  if (b.rows() != a.rows() || b.cols() != 1) {
    throw Error(ErrorCode::kShapeMismatch, "right-hand side length mismatch");
  }
  if (!compatible(a.policy_handle(), b.policy_handle())) {
    throw Error(ErrorCode::kIncompatibleSharing,
                "system and right-hand side use different policies");
  }
  return a.rows();
}

inline void require_square_system(const Eigen::MatrixXd& a,
                                  const Eigen::VectorXd& b) {
  if (a.rows() != a.cols() || a.rows() == 0 || b.size() != a.rows()) {
    throw Error(ErrorCode::kShapeMismatch, "malformed linear system");
  }
}
}  // namespace detail

// Masked-inverse method:
//   [RA] = [R][A], open RA, invert locally, [A^-1] = (RA)^-1 [R],
//   [w] = [A^-1][b], open w.
// Costs d^3 + d^2 multiplications and d^2 + d direct openings.
inline SolveReport solve_inverse_method(const SharedMatrix& a,
                                        const SharedVector& b,
                                        Session& session) {
  const std::size_t d = detail::require_square_system(a, b);
  const OpeningLedger before = session.ledger();
  const std::uint64_t retries_before = session.retries();

  for (int attempt = 0; attempt < session.options().max_attempts; ++attempt) {
    const SharedMatrix r = deal_random_matrix(session, d);
    const SharedMatrix ra = secure_mat_mul(r, a, session);
    Eigen::MatrixXd ra_open(d, d);
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t j = 0; j < d; ++j) {
        ra_open(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
            open(ra(i, j), session);
      }
    }
    const auto ra_inv = lu_inverse(ra_open, session.options().eps_singular);
    if (!ra_inv) {
      session.record_retry();
      continue;
    }
    const SharedMatrix a_inv = public_mat_mul(*ra_inv, r);
    const SharedVector w_shared = secure_mat_mul(a_inv, b, session);
    Eigen::VectorXd w(static_cast<Eigen::Index>(d));
    for (std::size_t i = 0; i < d; ++i) {
      w(static_cast<Eigen::Index>(i)) = open(w_shared[i], session);
    }
    return {std::move(w), SolveMethod::kSecureInverse,
            session.ledger() - before, session.retries() - retries_before};
  }
  throw Error(ErrorCode::kSingularMaskMatrix,
              "masked matrix RA was singular for every random R");
}

// Pivoting-free Gaussian elimination on [A | b] followed by back
// substitution; every division is a secure inversion plus a multiplication.
inline SolveReport solve_gauss(const SharedMatrix& a, const SharedVector& b,
                               Session& session) {
  const std::size_t d = detail::require_square_system(a, b);
  const OpeningLedger before = session.ledger();
  const std::uint64_t retries_before = session.retries();

  SharedMatrix c(d, d + 1, a.policy_handle());
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) c(i, j) = a(i, j);
    c(i, d) = b[i];
  }

  auto invert_pivot = [&](const SharedScalar& pivot, std::size_t k) {
    try {
      return secure_invert(pivot, session);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kNearSingularMask) throw;
      throw Error(ErrorCode::kDegeneratePivot,
                  "pivot " + std::to_string(k) + " is numerically zero");
    }
  };

  for (std::size_t k = 0; k < d; ++k) {
    for (std::size_t i = k + 1; i < d; ++i) {
      const SharedScalar frac =
          beaver_multiply(c(i, k), invert_pivot(c(k, k), k), session);
      for (std::size_t j = k; j <= d; ++j) {
        c(i, j) = c(i, j) - beaver_multiply(frac, c(k, j), session);
      }
    }
  }

  Eigen::VectorXd w = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(d));
  for (std::size_t step = 0; step < d; ++step) {
    const std::size_t row = d - 1 - step;
    SharedScalar numerator = c(row, d);
    for (std::size_t j = row + 1; j < d; ++j) {
      numerator = numerator - w(static_cast<Eigen::Index>(j)) * c(row, j);
    }
    const SharedScalar w_row =
        beaver_multiply(numerator, invert_pivot(c(row, row), row), session);
    w(static_cast<Eigen::Index>(row)) = open(w_row, session);
  }
  return {std::move(w), SolveMethod::kSecureGauss, session.ledger() - before,
          session.retries() - retries_before};
}

// Plaintext twin of solve_gauss. Pivots encountered are appended to
// `pivots` when given.
inline Eigen::VectorXd insecure_gauss(const Eigen::MatrixXd& a,
                                      const Eigen::VectorXd& b,
                                      std::vector<double>* pivots = nullptr) {
  detail::require_square_system(a, b);
  const Eigen::Index d = a.rows();
  Eigen::MatrixXd c(d, d + 1);
  c.leftCols(d) = a;
  c.col(d) = b;

  auto reciprocal = [&](Eigen::Index k) {
    const double pivot = c(k, k);
    if (pivot == 0.0 || !std::isfinite(pivot)) {
      throw Error(ErrorCode::kDegeneratePivot,
                  "zero pivot at row " + std::to_string(k));
    }
    if (pivots) pivots->push_back(pivot);
    return 1.0 / pivot;
  };

  for (Eigen::Index k = 0; k < d; ++k) {
    for (Eigen::Index i = k + 1; i < d; ++i) {
      const double frac = c(i, k) * reciprocal(k);
      for (Eigen::Index j = k; j <= d; ++j) c(i, j) -= frac * c(k, j);
    }
  }
  Eigen::VectorXd w = Eigen::VectorXd::Zero(d);
  for (Eigen::Index row = d - 1; row >= 0; --row) {
    double numerator = c(row, d);
    for (Eigen::Index j = row + 1; j < d; ++j) numerator -= c(row, j) * w(j);
    w(row) = numerator * reciprocal(row);
  }
  return w;
}

// Plaintext twin of solve_inverse_method: w = A^-1 b.
inline Eigen::VectorXd insecure_inverse(const Eigen::MatrixXd& a,
                                        const Eigen::VectorXd& b) {
  detail::require_square_system(a, b);
  const auto inv = lu_inverse(a);
  if (!inv) {
    throw Error(ErrorCode::kNumericalBreakdown, "system matrix is singular");
  }
  return *inv * b;
}

}  // namespace rnss

#endif  // RNSS_SOLVER_HPP_
