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

// Plaintext linear algebra run locally by each party.

#ifndef RNSS_LINALG_HPP_
#define RNSS_LINALG_HPP_

#include <cmath>
#include <optional>
#include <utility>

#include <Eigen/Dense>

namespace rnss {

// Inverse via Doolittle LU with partial pivoting. Returns nullopt when a
// pivot falls below rel_eps times the largest entry of `m`.
inline std::optional<Eigen::MatrixXd> lu_inverse(const Eigen::MatrixXd& m,
                                                 double rel_eps = 1e-12) {
  const Eigen::Index d = m.rows();
  if (d == 0 || m.cols() != d) return std::nullopt;
  const double scale = m.cwiseAbs().maxCoeff();
  if (!(scale > 0.0) || !std::isfinite(scale)) return std::nullopt;

  Eigen::MatrixXd lu = m;
  Eigen::VectorXi perm(d);
  for (Eigen::Index i = 0; i < d; ++i) perm(i) = static_cast<int>(i);

  for (Eigen::Index k = 0; k < d; ++k) {
    Eigen::Index pivot_row = k;
    for (Eigen::Index i = k + 1; i < d; ++i) {
      if (std::abs(lu(i, k)) > std::abs(lu(pivot_row, k))) pivot_row = i;
    }
    if (std::abs(lu(pivot_row, k)) < rel_eps * scale) return std::nullopt;
    if (pivot_row != k) {
      lu.row(k).swap(lu.row(pivot_row));
      std::swap(perm(k), perm(pivot_row));
    }
    for (Eigen::Index i = k + 1; i < d; ++i) {
      lu(i, k) /= lu(k, k);
      for (Eigen::Index j = k + 1; j < d; ++j) lu(i, j) -= lu(i, k) * lu(k, j);
    }
  }

  // Solve L U x = P e_c for every unit column.
  Eigen::MatrixXd inv(d, d);
  for (Eigen::Index c = 0; c < d; ++c) {
    Eigen::VectorXd x(d);
    for (Eigen::Index i = 0; i < d; ++i) {
      double v = perm(i) == c ? 1.0 : 0.0;
      for (Eigen::Index j = 0; j < i; ++j) v -= lu(i, j) * x(j);
      x(i) = v;
    }
    for (Eigen::Index i = d - 1; i >= 0; --i) {
      double v = x(i);
      for (Eigen::Index j = i + 1; j < d; ++j) v -= lu(i, j) * x(j);
      x(i) = v / lu(i, i);
    }
    inv.col(c) = x;
  }
  return inv;
}

inline bool is_symmetric_positive_definite(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols() || m.rows() == 0) return false;
  if (!m.isApprox(m.transpose(), 1e-12)) return false;
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  return llt.info() == Eigen::Success;
}

}  // namespace rnss

#endif  // RNSS_LINALG_HPP_
