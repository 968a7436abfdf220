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

// rnss: command-line front end.
//
//   rnss regress --data data/boston_housing.csv --lambda 1 --lambda 1000
//   rnss cost --dim 14
//   rnss leak --dim 14 --method secure-inverse
//   echo "3.5 -1" | rnss demo
//
// Exit codes: 0 success, 1 usage error, 2 data error, 3 numerical breakdown.

#include <cstdint>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "rnss/rnss.hpp"

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitNumerical = 3;

int exit_code(const rnss::Error& e) {
  switch (e.category()) {
    case rnss::ErrorCategory::kUsage: return kExitUsage;
    case rnss::ErrorCategory::kData: return kExitData;
    case rnss::ErrorCategory::kNumerical: return kExitNumerical;
  }
  return kExitUsage;
}

rnss::SolveMethod require_method(const std::string& name) {
  const auto m = rnss::parse_method(name);
  if (!m) {
    throw rnss::Error(rnss::ErrorCode::kInvalidArgument,
                      "unknown method '" + name + "'");
  }
  return *m;
}

std::vector<rnss::SolveMethod> secure_methods(const std::string& name) {
  if (name == "all") {
    return {rnss::SolveMethod::kSecureInverse, rnss::SolveMethod::kSecureGauss};
  }
  const auto m = require_method(name);
  if (!rnss::is_secure(m)) {
    throw rnss::Error(rnss::ErrorCode::kInvalidArgument,
                      "'" + name + "' has no opening cost");
  }
  return {m};
}

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) {
    throw rnss::Error(rnss::ErrorCode::kInvalidArgument,
                      "cannot write '" + out_path + "'");
  }
  out << text;
}

struct RegressArgs {
  std::string data;
  std::size_t parties = 5;
  std::size_t threshold = 3;
  std::vector<double> lambdas;
  std::vector<double> sigma_r2;
  std::vector<double> sigma_beta2;
  std::vector<std::string> methods;
  std::size_t repeats = 10;
  double train_fraction = 0.8;
  std::uint64_t seed = 1;
  std::string out;
  std::string format = "json";
  bool normalize_on_train = false;
  bool fixed_points = false;
};

int run_regress(const RegressArgs& args) {
  rnss::ExperimentSpec spec;
  spec.data_path = args.data;
  spec.parties = args.parties;
  spec.threshold = args.threshold;
  if (!args.lambdas.empty()) spec.lambdas = args.lambdas;
  const auto& r2 = args.sigma_r2;
  const auto& b2 = args.sigma_beta2;
  if (!r2.empty() || !b2.empty()) {
    if (r2.size() != b2.size()) {
      throw rnss::Error(rnss::ErrorCode::kInvalidArgument,
                        "--sigma-r2 and --sigma-beta2 must be given in pairs");
    }
    spec.sigmas.clear();
    for (std::size_t i = 0; i < r2.size(); ++i) spec.sigmas.emplace_back(r2[i], b2[i]);
  }
  if (!args.methods.empty()) {
    spec.methods.clear();
    for (const auto& m : args.methods) spec.methods.push_back(require_method(m));
  }
  spec.repeats = args.repeats;
  spec.train_fraction = args.train_fraction;
  spec.seed = args.seed;
  spec.normalize_on_train = args.normalize_on_train;
  spec.points = args.fixed_points ? rnss::EvaluationPoints::kFixed
                                  : rnss::EvaluationPoints::kRandom;
  spec.validate();

  const rnss::ExperimentReport report = rnss::run_grid(spec);
  emit(args.format == "csv" ? rnss::to_csv(report)
                            : rnss::to_json(report).dump(2) + "\n",
       args.out);
  return 0;
}

int run_cost(std::uint64_t dim, const std::string& method, std::size_t parties,
             bool json) {
  nlohmann::ordered_json out = nlohmann::ordered_json::array();
  for (const auto m : secure_methods(method)) {
    const rnss::CostBreakdown c = rnss::cost_for(m, dim);
    const std::uint64_t closed = m == rnss::SolveMethod::kSecureInverse
                                     ? rnss::openings_inverse(dim)
                                     : rnss::openings_gauss(dim);
    rnss::OpeningLedger as_ledger;
    as_ledger.openings = closed;
    if (json) {
      out.push_back({{"method", rnss::to_string(m)},
                     {"dim", dim},
                     {"multiplications", c.multiplications},
                     {"inversions", c.inversions},
                     {"direct_openings", c.direct_openings},
                     {"openings", closed},
                     {"parties", parties},
                     {"bytes", as_ledger.bytes(parties)}});
    } else {
      std::cout << rnss::to_string(m) << " d=" << dim << " openings=" << closed
                << " multiplications=" << c.multiplications
                << " inversions=" << c.inversions
                << " direct_openings=" << c.direct_openings
                << " bytes(n=" << parties << ")=" << as_ledger.bytes(parties)
                << "\n";
    }
  }
  if (json) std::cout << out.dump(2) << "\n";
  return 0;
}

struct LeakArgs {
  std::optional<std::uint64_t> openings;
  std::optional<std::uint64_t> dim;
  std::string method = "secure-inverse";
  std::size_t threshold = 3;
  std::vector<double> alphas;
  std::vector<std::size_t> adversary;  // 1-based
  double sigma_r2 = 1e4;
  double sigma_beta2 = 1e5;
  double sigma_x2 = 4.0;
};

int run_leak(const LeakArgs& args) {
  std::uint64_t openings = 0;
  std::string method = "given";
  if (args.openings) {
    openings = *args.openings;
  } else if (args.dim) {
    const auto m = secure_methods(args.method);
    if (m.size() != 1) {
      throw rnss::Error(rnss::ErrorCode::kInvalidArgument,
                        "--dim needs a single secure --method");
    }
    openings = rnss::cost_for(m.front(), *args.dim).openings();
    method = std::string(rnss::to_string(m.front()));
  } else {
    throw rnss::Error(rnss::ErrorCode::kInvalidArgument,
                      "give --openings or --dim with --method");
  }

  std::vector<double> alphas = args.alphas;
  if (alphas.empty()) {
    for (std::size_t i = 1; i <= args.threshold + 2; ++i) {
      alphas.push_back(0.2 * static_cast<double>(i) - 0.1);
    }
  }
  std::vector<std::size_t> basis(args.threshold);
  for (std::size_t k = 0; k < args.threshold; ++k) basis[k] = k;
  const rnss::SharePolicy policy(alphas.size(), args.threshold, alphas,
                                 args.sigma_beta2, basis);

  std::vector<std::size_t> adversary;
  if (args.adversary.empty()) {
    adversary = rnss::worst_case_adversary(policy);
  } else {
    for (std::size_t p : args.adversary) {
      if (p < 1 || p > alphas.size()) {
        throw rnss::Error(rnss::ErrorCode::kInvalidArgument,
                          "adversary index out of range");
      }
      adversary.push_back(p - 1);
    }
  }
  const rnss::LeakageScenario s = rnss::scenario_for_policy(
      policy, adversary, openings, args.sigma_r2, args.sigma_x2);
  const double bound = rnss::leakage_bound(s);

  nlohmann::ordered_json out;
  out["method"] = method;
  if (args.dim) out["dim"] = *args.dim;
  out["openings"] = openings;
  out["threshold"] = s.threshold;
  out["alphas"] = alphas;
  out["basis_nodes"] = s.basis_nodes;
  std::vector<std::size_t> one_based;
  for (std::size_t p : adversary) one_based.push_back(p + 1);
  out["adversary"] = one_based;
  out["adversary_alphas"] = s.adversary_alphas;
  out["sigma_r2"] = s.sigma_r_sq;
  out["sigma_beta2"] = s.sigma_beta_sq;
  out["sigma_x2"] = s.sigma_x_sq;
  out["variance_convention"] = rnss::kVarianceConvention;
  out["gamma"] = rnss::gamma(s);
  out["leakage_nats"] = bound;
  out["single_opening_nats"] = rnss::reference_leak(s.sigma_x_sq, s.sigma_r_sq);
  std::cout << out.dump(2) << "\n";
  return 0;
}

int run_demo(std::size_t parties, std::size_t threshold, double sigma_beta2,
             std::uint64_t seed) {
  auto policy = std::make_shared<const rnss::SharePolicy>(
      rnss::SharePolicy::with_fixed_points(parties, threshold, sigma_beta2));
  rnss::Rng rng(seed);
  std::cout << std::setprecision(12);
  std::cout << "parties " << parties << ", threshold " << threshold
            << ", points";
  for (double a : policy->alphas()) std::cout << ' ' << a;
  std::cout << "\n";

  std::string token;
  std::size_t count = 0;
  while (std::cin >> token) {
    double value = 0.0;
    std::istringstream parse(token);
    if (!(parse >> value) || !parse.eof()) {
      throw rnss::Error(rnss::ErrorCode::kParseError,
                        "not a number: '" + token + "'");
    }
    const rnss::SharedScalar x = rnss::share_secret(value, policy, rng);
    std::cout << "secret " << value << "\n  shares";
    for (double s : x.shares()) std::cout << ' ' << s;
    std::vector<rnss::IndexedShare> last;
    for (std::size_t i = parties - threshold - 1; i < parties; ++i) {
      last.push_back({i, x.shares()[i]});
    }
    std::cout << "\n  reconstructed (all)      " << rnss::reconstruct(x)
              << "\n  reconstructed (last t+1) " << rnss::reconstruct(last, *policy)
              << "\n";
    ++count;
  }
  if (count == 0) {
    throw rnss::Error(rnss::ErrorCode::kEmptyDataset, "no numbers on stdin");
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Secret-shared linear regression simulator"};
  app.require_subcommand(1);

  RegressArgs regress;
  auto* cmd_regress = app.add_subcommand("regress", "run the MSE grid");
  cmd_regress->add_option("--data", regress.data, "CSV with header, target last")
      ->required();
  cmd_regress->add_option("--parties", regress.parties, "number of parties n")
      ->capture_default_str();
  cmd_regress->add_option("--threshold", regress.threshold, "privacy threshold t")
      ->capture_default_str();
  cmd_regress->add_option("--lambda", regress.lambdas, "lambda values (repeatable)");
  cmd_regress->add_option("--sigma-r2", regress.sigma_r2,
                          "mask variance sigma_r^2 (repeatable, paired)");
  cmd_regress->add_option("--sigma-beta2", regress.sigma_beta2,
                          "share variance sigma_beta^2 (repeatable, paired)");
  cmd_regress->add_option("--method", regress.methods, "solver (repeatable)")
      ->check(CLI::IsMember({"secure-gauss", "secure-inverse", "insecure-gauss",
                             "insecure-inverse"}));
  cmd_regress->add_option("--repeats", regress.repeats)->capture_default_str();
  cmd_regress->add_option("--train-frac", regress.train_fraction)
      ->capture_default_str();
  cmd_regress->add_option("--seed", regress.seed)->capture_default_str();
  cmd_regress->add_option("--out", regress.out, "output file (default stdout)");
  cmd_regress->add_option("--format", regress.format)
      ->check(CLI::IsMember({"json", "csv"}))
      ->capture_default_str();
  cmd_regress->add_flag("--normalize-on-train", regress.normalize_on_train,
                        "fit min-max on the training rows only");
  cmd_regress->add_flag("--fixed-points", regress.fixed_points,
                        "use alpha_i = 0.2i - 0.1 instead of random points");

  std::uint64_t cost_dim = 14;
  std::string cost_method = "all";
  std::size_t cost_parties = 5;
  bool cost_json = false;
  auto* cmd_cost = app.add_subcommand("cost", "opening counts of the secure solvers");
  cmd_cost->add_option("--dim", cost_dim)->capture_default_str();
  cmd_cost->add_option("--method", cost_method, "secure-inverse, secure-gauss or all")
      ->capture_default_str();
  cmd_cost->add_option("--parties", cost_parties, "n used for the byte count")
      ->capture_default_str();
  cmd_cost->add_flag("--json", cost_json);

  LeakArgs leak;
  auto* cmd_leak = app.add_subcommand("leak", "leakage bound for a coalition");
  auto* opt_openings = cmd_leak->add_option("--openings", leak.openings);
  cmd_leak->add_option("--dim", leak.dim)->excludes(opt_openings);
  cmd_leak->add_option("--method", leak.method)->capture_default_str();
  cmd_leak->add_option("--threshold", leak.threshold)->capture_default_str();
  cmd_leak->add_option("--alphas", leak.alphas,
                       "evaluation points, one per party (default 0.2i - 0.1)");
  cmd_leak->add_option("--adversary", leak.adversary,
                       "1-based coalition members (default worst case)");
  cmd_leak->add_option("--sigma-r2", leak.sigma_r2)->capture_default_str();
  cmd_leak->add_option("--sigma-beta2", leak.sigma_beta2)->capture_default_str();
  cmd_leak->add_option("--sigma-x2", leak.sigma_x2)->capture_default_str();

  std::size_t demo_parties = 5;
  std::size_t demo_threshold = 3;
  double demo_sigma_beta2 = 1e5;
  std::uint64_t demo_seed = 1;
  auto* cmd_demo = app.add_subcommand("demo", "share and reconstruct stdin numbers");
  cmd_demo->add_option("--parties", demo_parties)->capture_default_str();
  cmd_demo->add_option("--threshold", demo_threshold)->capture_default_str();
  cmd_demo->add_option("--sigma-beta2", demo_sigma_beta2)->capture_default_str();
  cmd_demo->add_option("--seed", demo_seed)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*cmd_regress) return run_regress(regress);
    if (*cmd_cost) return run_cost(cost_dim, cost_method, cost_parties, cost_json);
    if (*cmd_leak) return run_leak(leak);
    if (*cmd_demo) {
      return run_demo(demo_parties, demo_threshold, demo_sigma_beta2, demo_seed);
    }
  } catch (const rnss::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
  return kExitUsage;
}
