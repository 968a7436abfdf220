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

// Batch experiments: dataset ingestion, preprocessing, train/test splits
// dealt across parties, and the (method x lambda x sigma) MSE grid.

#ifndef RNSS_EXPERIMENT_HPP_
#define RNSS_EXPERIMENT_HPP_

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <istream>
#include <numeric>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"
#include "rnss/errors.hpp"
#include "rnss/privacy_cost.hpp"
#include "rnss/regression.hpp"
#include "rnss/sharing.hpp"
#include "rnss/solver.hpp"

namespace rnss {

// Numeric table whose last column is the regression target.
struct Dataset {
  std::vector<std::string> columns;
  Eigen::MatrixXd features;
  Eigen::VectorXd target;

  std::size_t rows() const { return static_cast<std::size_t>(features.rows()); }
  std::size_t feature_count() const {
    return static_cast<std::size_t>(features.cols());
  }
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() &&
         (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

inline std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    cells.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return cells;
}

inline Error parse_error(std::size_t line, const std::string& what) {
  return Error(ErrorCode::kParseError,
               "line " + std::to_string(line) + ": " + what);
}

// Integers print without exponent; everything else as the shortest
// round-trip text.
inline std::string format_number(double v) {
  if (std::isfinite(v) && v == std::trunc(v) && std::abs(v) < 1e15) {
    return std::to_string(static_cast<long long>(v));
  }
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace detail

// Header row, then one numeric row per sample. Rows are numbered by file
// line in error messages.
inline Dataset parse_csv(std::istream& in,
                         std::optional<std::size_t> expected_features = {}) {
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    for (auto cell : detail::split_commas(line)) {
      if (cell.size() >= 2 && cell.front() == '"' && cell.back() == '"') {
        cell = cell.substr(1, cell.size() - 2);
      }
      header.emplace_back(cell);
    }
    break;
  }
  if (header.empty()) throw detail::parse_error(line_no, "missing header row");
  if (header.size() < 2) {
    throw detail::parse_error(line_no, "need at least one feature and a target");
  }
  const std::size_t cols = header.size();
  if (expected_features && *expected_features + 1 != cols) {
    throw detail::parse_error(
        line_no, "expected " + std::to_string(*expected_features + 1) +
                     " columns, header has " + std::to_string(cols));
  }

  std::vector<double> values;
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    const auto cells = detail::split_commas(line);
    if (cells.size() != cols) {
      throw detail::parse_error(
          line_no, "expected " + std::to_string(cols) + " columns, found " +
                       std::to_string(cells.size()));
    }
    for (const auto cell : cells) {
      double v = 0.0;
      const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (cell.empty() || res.ec != std::errc() ||
          res.ptr != cell.data() + cell.size() || !std::isfinite(v)) {
        throw detail::parse_error(line_no,
                                  "non-numeric cell '" + std::string(cell) + "'");
      }
      values.push_back(v);
    }
    ++rows;
  }
  if (rows == 0) throw detail::parse_error(line_no, "no data rows");

  Dataset data;
  data.columns = std::move(header);
  const auto r = static_cast<Eigen::Index>(rows);
  const auto f = static_cast<Eigen::Index>(cols - 1);
  data.features.resize(r, f);
  data.target.resize(r);
  for (Eigen::Index i = 0; i < r; ++i) {
    for (Eigen::Index j = 0; j < f; ++j) {
      data.features(i, j) = values[static_cast<std::size_t>(i) * cols +
                                   static_cast<std::size_t>(j)];
    }
    data.target(i) = values[static_cast<std::size_t>(i) * cols + cols - 1];
  }
  return data;
}

inline Dataset load_csv(const std::string& path,
                        std::optional<std::size_t> expected_features = {}) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::kParseError, "cannot open '" + path + "'");
  }
  return parse_csv(in, expected_features);
}

// Per-column min-max map onto [0,1]; constant columns map to 0.
struct MinMaxScaler {
  Eigen::VectorXd low;   // features then target
  Eigen::VectorXd high;

  static MinMaxScaler fit(const Dataset& data,
                          const std::vector<std::size_t>& rows) {
    const Eigen::Index cols = data.features.cols() + 1;
    MinMaxScaler s{Eigen::VectorXd::Constant(cols, INFINITY),
                   Eigen::VectorXd::Constant(cols, -INFINITY)};
    for (std::size_t r : rows) {
      const auto i = static_cast<Eigen::Index>(r);
      for (Eigen::Index j = 0; j < cols; ++j) {
        const double v =
            j + 1 < cols ? data.features(i, j) : data.target(i);
        s.low(j) = std::min(s.low(j), v);
        s.high(j) = std::max(s.high(j), v);
      }
    }
    return s;
  }

  static MinMaxScaler fit(const Dataset& data) {
    std::vector<std::size_t> rows(data.rows());
    std::iota(rows.begin(), rows.end(), std::size_t{0});
    return fit(data, rows);
  }

  double map(Eigen::Index col, double v) const {
    const double span = high(col) - low(col);
    return span > 0.0 ? (v - low(col)) / span : 0.0;
  }

  Dataset apply(const Dataset& data) const {
    Dataset out = data;
    const Eigen::Index f = data.features.cols();
    for (Eigen::Index i = 0; i < out.features.rows(); ++i) {
      for (Eigen::Index j = 0; j < f; ++j) {
        out.features(i, j) = map(j, data.features(i, j));
      }
      out.target(i) = map(f, data.target(i));
    }
    return out;
  }
};

// Min-max over the whole dataset, target included.
inline Dataset normalize(const Dataset& data) {
  return MinMaxScaler::fit(data).apply(data);
}

enum class EvaluationPoints { kRandom, kFixed };

struct ExperimentSpec {
  std::string data_path;
  std::size_t parties = 5;
  std::size_t threshold = 3;
  std::vector<double> lambdas = {0.01, 0.1, 1, 10, 100, 1000};
  // (sigma_r^2, sigma_beta^2) pairs; both are variances.
  std::vector<std::pair<double, double>> sigmas = {{1e4, 1e5}};
  std::vector<SolveMethod> methods = {kAllMethods.begin(), kAllMethods.end()};
  std::size_t repeats = 10;
  double train_fraction = 0.8;
  std::uint64_t seed = 1;
  bool normalize_on_train = false;
  bool intercept = true;
  EvaluationPoints points = EvaluationPoints::kRandom;

  void validate() const {
    if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
      throw Error(ErrorCode::kInvalidArgument, "train fraction must be in (0,1)");
    }
    if (repeats < 1) {
      throw Error(ErrorCode::kInvalidArgument, "repeats must be >= 1");
    }
    if (parties < 2 || threshold < 1 || threshold >= parties) {
      throw Error(ErrorCode::kInvalidArgument, "need 1 <= t < n and n >= 2");
    }
    if (lambdas.empty() || sigmas.empty() || methods.empty()) {
      throw Error(ErrorCode::kInvalidArgument, "empty experiment grid");
    }
    for (double l : lambdas) {
      if (!(l >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "lambda must be >= 0");
    }
    for (const auto& [r, b] : sigmas) {
      if (!(r > 0.0) || !(b > 0.0)) {
        throw Error(ErrorCode::kInvalidArgument, "variances must be positive");
      }
    }
  }
};

struct TrainTestSplit {
  std::vector<PartyDataset> parties;
  PartyDataset test;
  std::size_t train_rows = 0;
};

// Shuffles, keeps floor(train_fraction * rows) rows for training and deals
// them round-robin to the parties. Normalization on the training rows and
// the intercept column are applied here when the spec asks for them.
inline TrainTestSplit split_and_partition(const Dataset& data,
                                          const ExperimentSpec& spec, Rng& rng) {
  spec.validate();
  const std::size_t rows = data.rows();
  const auto train = static_cast<std::size_t>(
      std::floor(spec.train_fraction * static_cast<double>(rows)));
  if (train < spec.parties || train >= rows) {
    throw Error(ErrorCode::kTooFewRows,
                "dataset has too few rows for " + std::to_string(spec.parties) +
                    " parties and a non-empty test set");
  }
  std::vector<std::size_t> order(rows);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::shuffle(order.begin(), order.end(), rng);

  const std::vector<std::size_t> train_idx(order.begin(),
                                           order.begin() + train);
  const Dataset source =
      spec.normalize_on_train ? MinMaxScaler::fit(data, train_idx).apply(data)
                              : data;
  const Eigen::MatrixXd features =
      spec.intercept ? with_intercept(source.features) : source.features;

  auto gather = [&](const std::vector<std::size_t>& idx) {
    PartyDataset out{Eigen::MatrixXd(static_cast<Eigen::Index>(idx.size()),
                                     features.cols()),
                     Eigen::VectorXd(static_cast<Eigen::Index>(idx.size()))};
    for (std::size_t k = 0; k < idx.size(); ++k) {
      const auto dst = static_cast<Eigen::Index>(k);
      const auto src = static_cast<Eigen::Index>(idx[k]);
      out.features.row(dst) = features.row(src);
      out.targets(dst) = source.target(src);
    }
    return out;
  };

  std::vector<std::vector<std::size_t>> dealt(spec.parties);
  for (std::size_t k = 0; k < train; ++k) {
    dealt[k % spec.parties].push_back(order[k]);
  }
  TrainTestSplit split;
  split.train_rows = train;
  for (const auto& idx : dealt) split.parties.push_back(gather(idx));
  split.test = gather(std::vector<std::size_t>(order.begin() + train, order.end()));
  return split;
}

struct CellResult {
  SolveMethod method = SolveMethod::kInsecureInverse;
  double lambda = 0.0;
  double sigma_r_sq = 0.0;
  double sigma_beta_sq = 0.0;
  std::vector<double> mses;  // successful repeats only
  std::size_t failures = 0;
  std::string first_failure;
  OpeningLedger ledger_total;
  std::uint64_t openings_per_solve = 0;
  std::uint64_t retries = 0;
  std::optional<double> leakage_nats;
  double sigma_x_sq = 0.0;

  std::optional<double> mean() const {
    if (mses.empty()) return std::nullopt;
    return std::accumulate(mses.begin(), mses.end(), 0.0) /
           static_cast<double>(mses.size());
  }
  // Population standard deviation.
  std::optional<double> stddev() const {
    const auto m = mean();
    if (!m) return std::nullopt;
    double acc = 0.0;
    for (double v : mses) acc += (v - *m) * (v - *m);
    return std::sqrt(acc / static_cast<double>(mses.size()));
  }
};

struct ExperimentReport {
  ExperimentSpec spec;
  std::size_t rows = 0;
  std::size_t features = 0;
  std::size_t train_rows = 0;
  std::size_t test_rows = 0;
  std::vector<CellResult> cells;

  const CellResult* find(SolveMethod method, double lambda,
                         double sigma_r_sq = 1e4,
                         double sigma_beta_sq = 1e5) const {
    for (const auto& c : cells) {
      if (c.method == method && c.lambda == lambda &&
          (!is_secure(method) ||
           (c.sigma_r_sq == sigma_r_sq && c.sigma_beta_sq == sigma_beta_sq))) {
        return &c;
      }
    }
    return nullptr;
  }
};

inline constexpr std::string_view kVarianceConvention =
    "sigma_r2 and sigma_beta2 are variances (sigma squared)";

namespace detail {
inline std::uint64_t derive_seed(std::uint64_t base,
                                 std::initializer_list<std::uint64_t> parts) {
  std::vector<std::uint32_t> words{static_cast<std::uint32_t>(base),
                                   static_cast<std::uint32_t>(base >> 32)};
  for (std::uint64_t p : parts) {
    words.push_back(static_cast<std::uint32_t>(p));
    words.push_back(static_cast<std::uint32_t>(p >> 32));
  }
  std::seed_seq seq(words.begin(), words.end());
  std::uint32_t out[2];
  seq.generate(out, out + 2);
  return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}
}  // namespace detail

// Runs every (method, lambda, sigma) cell `repeats` times. Repeat r uses the
// same shuffled split in every cell. Plaintext methods ignore sigma and
// appear once per lambda. Solver failures are counted per cell.
inline ExperimentReport run_grid(const ExperimentSpec& spec,
                                 const Dataset& raw) {
  spec.validate();
  const Dataset data = spec.normalize_on_train ? raw : normalize(raw);

  std::vector<TrainTestSplit> splits;
  splits.reserve(spec.repeats);
  for (std::size_t r = 0; r < spec.repeats; ++r) {
    Rng rng(detail::derive_seed(spec.seed, {r, 0}));
    splits.push_back(split_and_partition(data, spec, rng));
  }

  ExperimentReport report;
  report.spec = spec;
  report.rows = raw.rows();
  report.features = raw.feature_count();
  report.train_rows = splits.front().train_rows;
  report.test_rows = splits.front().test.rows();

  const double mean_party_rows =
      static_cast<double>(report.train_rows) / static_cast<double>(spec.parties);
  const auto analysis_policy = SharePolicy::with_fixed_points(
      spec.parties, spec.threshold, spec.sigmas.front().second);
  const auto adversary = worst_case_adversary(analysis_policy);

  std::uint64_t cell_id = 0;
  for (SolveMethod method : spec.methods) {
    for (double lambda : spec.lambdas) {
      const std::size_t sigma_cells = is_secure(method) ? spec.sigmas.size() : 1;
      for (std::size_t s = 0; s < sigma_cells; ++s, ++cell_id) {
        CellResult cell;
        cell.method = method;
        cell.lambda = lambda;
        if (is_secure(method)) {
          cell.sigma_r_sq = spec.sigmas[s].first;
          cell.sigma_beta_sq = spec.sigmas[s].second;
        }
        for (std::size_t r = 0; r < spec.repeats; ++r) {
          const auto& split = splits[r];
          RegressionConfig config;
          config.lambda = lambda;
          config.total_samples = split.train_rows;
          config.prior = PriorSpec::standard(split.test.dim());
          config.sigma_r_sq = is_secure(method) ? cell.sigma_r_sq : 1e4;
          config.sigma_beta_sq = is_secure(method) ? cell.sigma_beta_sq : 1e5;

          PolicyHandle policy;
          if (is_secure(method)) {
            if (spec.points == EvaluationPoints::kFixed) {
              policy = std::make_shared<const SharePolicy>(
                  SharePolicy::with_fixed_points(spec.parties, spec.threshold,
                                                 cell.sigma_beta_sq));
            } else {
              Rng point_rng(detail::derive_seed(spec.seed, {r, cell_id + 1, 1}));
              policy = std::make_shared<const SharePolicy>(SharePolicy::random(
                  spec.parties, spec.threshold, cell.sigma_beta_sq, point_rng));
            }
          }
          try {
            const SolveReport solved = run_regression(
                split.parties, config, method, policy,
                detail::derive_seed(spec.seed, {r, cell_id + 1, 2}));
            cell.mses.push_back(mse(solved.w, split.test));
            cell.ledger_total.openings += solved.ledger.openings;
            cell.ledger_total.multiplications += solved.ledger.multiplications;
            cell.ledger_total.inversions += solved.ledger.inversions;
            cell.ledger_total.direct_openings += solved.ledger.direct_openings;
            cell.openings_per_solve =
                std::max(cell.openings_per_solve, solved.ledger.openings);
            cell.retries += solved.retries;
          } catch (const Error& e) {
            if (e.category() != ErrorCategory::kNumerical) throw;
            if (cell.failures++ == 0) cell.first_failure = e.what();
          }
        }
        if (is_secure(method) && cell.openings_per_solve > 0) {
          cell.sigma_x_sq =
              sigma_x_estimate(static_cast<std::uint64_t>(std::lround(mean_party_rows)));
          try {
            const auto policy_for_bound = SharePolicy::with_fixed_points(
                spec.parties, spec.threshold, cell.sigma_beta_sq);
            cell.leakage_nats = leakage_bound(scenario_for_policy(
                policy_for_bound, adversary, cell.openings_per_solve,
                cell.sigma_r_sq, cell.sigma_x_sq));
          } catch (const Error&) {
            cell.leakage_nats.reset();
          }
        }
        report.cells.push_back(std::move(cell));
      }
    }
  }
  return report;
}

inline ExperimentReport run_grid(const ExperimentSpec& spec) {
  return run_grid(spec, load_csv(spec.data_path));
}

inline nlohmann::ordered_json to_json(const ExperimentReport& report) {
  using nlohmann::ordered_json;
  const auto& spec = report.spec;
  ordered_json out;
  out["variance_convention"] = kVarianceConvention;
  out["std_convention"] = "population standard deviation over successful repeats";
  out["partitioning"] =
      "shuffle, floor(train_fraction*rows) training rows, dealt round-robin "
      "to parties";
  out["normalization"] = spec.normalize_on_train
                             ? "min-max fitted on training rows"
                             : "min-max over the full dataset";
  out["leakage_model"] =
      "fixed points alpha_i = 0.2i - 0.1, worst-case coalition of t parties, "
      "O = openings per solve, sigma_x2 = rows_per_party * 7/144";

  ordered_json config;
  config["data"] = spec.data_path;
  config["parties"] = spec.parties;
  config["threshold"] = spec.threshold;
  config["repeats"] = spec.repeats;
  config["train_fraction"] = spec.train_fraction;
  config["seed"] = spec.seed;
  config["intercept"] = spec.intercept;
  config["evaluation_points"] =
      spec.points == EvaluationPoints::kFixed ? "fixed" : "random";
  config["prior"] = "mu_w = 0, Sigma_w = I";
  out["config"] = config;

  out["dataset"] = {{"rows", report.rows},
                    {"features", report.features},
                    {"train_rows", report.train_rows},
                    {"test_rows", report.test_rows}};

  ordered_json results = ordered_json::object();
  for (const auto& c : report.cells) {
    ordered_json cell;
    cell["repeats"] = c.mses.size() + c.failures;
    cell["failures"] = c.failures;
    if (!c.first_failure.empty()) cell["first_failure"] = c.first_failure;
    const auto m = c.mean();
    const auto sd = c.stddev();
    cell["mean_mse"] = m ? ordered_json(*m) : ordered_json(nullptr);
    cell["std_mse"] = sd ? ordered_json(*sd) : ordered_json(nullptr);
    if (is_secure(c.method)) {
      cell["sigma_r2"] = c.sigma_r_sq;
      cell["sigma_beta2"] = c.sigma_beta_sq;
      cell["openings_per_solve"] = c.openings_per_solve;
      cell["ledger_total"] = {{"openings", c.ledger_total.openings},
                              {"multiplications", c.ledger_total.multiplications},
                              {"inversions", c.ledger_total.inversions},
                              {"direct_openings", c.ledger_total.direct_openings}};
      cell["retries"] = c.retries;
      cell["sigma_x2"] = c.sigma_x_sq;
      cell["leakage_nats"] =
          c.leakage_nats ? ordered_json(*c.leakage_nats) : ordered_json(nullptr);
    }
    const std::string method(to_string(c.method));
    const std::string lambda = detail::format_number(c.lambda);
    const std::string sigma =
        is_secure(c.method)
            ? "sigma_r2=" + detail::format_number(c.sigma_r_sq) +
                  ",sigma_beta2=" + detail::format_number(c.sigma_beta_sq)
            : "plaintext";
    results[method][lambda][sigma] = cell;
  }
  out["results"] = results;
  return out;
}

inline std::string to_csv(const ExperimentReport& report) {
  std::ostringstream out;
  out << "method,lambda,sigma_r2,sigma_beta2,repeats,failures,mean_mse,std_mse,"
         "openings_per_solve,total_openings,multiplications,inversions,"
         "direct_openings,leakage_nats,variance_convention\n";
  auto opt = [](const std::optional<double>& v) {
    return v ? detail::format_number(*v) : std::string();
  };
  for (const auto& c : report.cells) {
    const bool secure = is_secure(c.method);
    out << to_string(c.method) << ',' << detail::format_number(c.lambda) << ','
        << (secure ? detail::format_number(c.sigma_r_sq) : "") << ','
        << (secure ? detail::format_number(c.sigma_beta_sq) : "") << ','
        << c.mses.size() + c.failures << ',' << c.failures << ','
        << opt(c.mean()) << ',' << opt(c.stddev()) << ','
        << c.openings_per_solve << ',' << c.ledger_total.openings << ','
        << c.ledger_total.multiplications << ',' << c.ledger_total.inversions
        << ',' << c.ledger_total.direct_openings << ',' << opt(c.leakage_nats)
        << ",variances\n";
  }
  return out.str();
}

}  // namespace rnss

#endif  // RNSS_EXPERIMENT_HPP_
