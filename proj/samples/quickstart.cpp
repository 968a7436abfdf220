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

// Three parties with one private row each solve a ridge-style system over
// shares and compare against the plaintext solution.

#include <iostream>
#include <memory>
#include <vector>

#include "rnss/rnss.hpp"

int main() {
  std::vector<rnss::PartyDataset> parties(3);
  const double rows[3][3] = {{0.1, 0.9, 0.4}, {0.5, 0.2, 0.7}, {0.8, 0.6, 0.3}};
  for (int p = 0; p < 3; ++p) {
    parties[p].features = Eigen::MatrixXd(1, 2);
    parties[p].features << rows[p][0], rows[p][1];
    parties[p].targets = Eigen::VectorXd::Constant(1, rows[p][2]);
  }

  rnss::RegressionConfig config;
  config.lambda = 10.0;
  config.total_samples = 3;
  config.prior = rnss::PriorSpec::standard(2);

  auto policy = std::make_shared<const rnss::SharePolicy>(
      rnss::SharePolicy::with_fixed_points(3, 1, config.sigma_beta_sq));
  for (auto method : rnss::kAllMethods) {
    const rnss::SolveReport r =
        rnss::run_regression(parties, config, method, policy, 7);
    std::cout << rnss::to_string(method) << ": w = " << r.w.transpose()
              << ", openings = " << r.ledger.openings << "\n";
  }
  return 0;
}
