/*
 * Copyright 2026 The wgp Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 *
 */

#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "wgp/gp.hpp"
#include "wgp/metrics.hpp"
#include "wgp/optimize.hpp"

namespace wgp {

// ---------------------------------------------------------------------------
// Data ingestion

/// Whitespace/tab separated rows of floats; every row must have the same width.
/// Blank lines are skipped. `source` names the input in error messages.
Eigen::MatrixXd parse_feature_rows(std::istream& in, const std::string& source);

/// One float per non-blank line.
Eigen::VectorXd parse_column(std::istream& in, const std::string& source);

/// Loads features and labels. With `lengths_path`, labels are raw post-editing
/// times and the response is time / length.
Dataset load_dataset(const std::string& features_path, const std::string& labels_path,
                     const std::optional<std::string>& lengths_path = std::nullopt);

/// Post-editing rate: time / length. Lengths must be positive.
Eigen::VectorXd normalize_rates(const Eigen::VectorXd& times, const Eigen::VectorXd& lengths);

// ---------------------------------------------------------------------------
// Cross-validation plumbing

/// Shuffled partition of 0..n-1 into k folds whose sizes differ by at most one.
/// Indices inside a fold are sorted.
std::vector<std::vector<std::size_t>> kfold_split(std::size_t n, std::size_t k, std::uint64_t seed);

/// Complement of `fold` in 0..n-1, sorted.
std::vector<std::size_t> complement(std::size_t n, const std::vector<std::size_t>& fold);

/// Per-column z-scoring with statistics from the training split.
struct Standardizer {
  Eigen::VectorXd mean;
  Eigen::VectorXd scale;

  /// Constant columns get scale 1.
  static Standardizer fit(const Eigen::MatrixXd& X);
  Eigen::MatrixXd apply(const Eigen::MatrixXd& X) const;
};

/// Floor applied to responses before log warping.
inline constexpr double kLogWarpFloor = 1e-6;

/// Raises responses below kLogWarpFloor to the floor; returns how many changed.
std::size_t clamp_for_log_warp(Eigen::VectorXd& responses);

/// 64-bit FNV-1a digest of hyperparameters, factor and weight vector.
std::uint64_t model_fingerprint(const TrainedModel& model);

// ---------------------------------------------------------------------------
// Synthetic data

/// X uniform in [-1, 1]^D, latent f from the GP prior, Gaussian noise with
/// variance hp.noise_variance (zero allowed), labels pushed through the inverse
/// of spec.warp.
Dataset generate_synthetic(std::size_t n, std::size_t dim, const ModelSpec& spec,
                           const Hyperparams& hp, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Experiments

struct ModelConfig {
  KernelFamily kernel = KernelFamily::EQ;
  WarpSpec warp = WarpSpec::identity();

  std::string name() const;
};

struct ExperimentConfig {
  std::string features_path;
  std::string labels_path;
  std::optional<std::string> lengths_path;

  std::vector<KernelFamily> kernels{KernelFamily::EQ};
  std::vector<WarpSpec> warps{WarpSpec::identity()};
  std::size_t folds = 10;
  OptimizeConfig optimizer;
  std::vector<double> al_weights{3.0, 1.0 / 3.0};
  std::vector<double> linex_weights{-0.75, 0.75};
  int quad_order = 50;
  std::uint64_t seed = 0;
  /// Worker threads over (model, fold) cells.
  int threads = 1;
  /// The experiment fails when more than this fraction of cells fail.
  double max_failed_fraction = 0.2;
  /// Record the order-100 quadrature discrepancy for every test instance.
  bool debug_quadrature = false;

  std::vector<ModelConfig> models() const;
  void validate() const;
};

struct InstancePrediction {
  std::size_t index;  // row in the full dataset
  double label;
  double latent_mean;
  double latent_variance;
  double median;
  double mean;
  double variance;
  double log_density;
  double quadrature_error;  // NaN unless debug_quadrature
};

struct FoldResult {
  std::size_t fold = 0;
  std::vector<std::size_t> test_indices;
  Standardizer standardizer;
  Hyperparams hyperparams;
  double train_nll = 0.0;
  bool isotropic_converged = false;
  bool ard_converged = false;
  std::size_t clamped_labels = 0;
  std::uint64_t model_fingerprint = 0;
  /// Fingerprint of the model used for each Bayes-estimator evaluation, in
  /// al_weights order followed by linex_weights order.
  std::vector<std::uint64_t> estimator_fingerprints;
  std::vector<InstancePrediction> instances;
  EvalRecord eval;

  bool failed = false;
  std::string error;
};

/// Unweighted mean over successful folds.
struct Aggregate {
  double nll = 0.0;
  double nlpd = 0.0;
  double mae = 0.0;
  double pearson_r = 0.0;
  std::vector<WeightedLoss> al;
  std::vector<WeightedLoss> linex;
};

struct ModelResult {
  ModelConfig model;
  std::vector<FoldResult> folds;
  Aggregate aggregate;
  std::size_t failed_folds = 0;
};

struct ExperimentReport {
  ExperimentConfig config;
  std::vector<std::vector<std::size_t>> partition;
  std::vector<ModelResult> models;
  std::size_t failed_cells = 0;
  std::size_t total_cells = 0;

  bool failed() const {
    return static_cast<double>(failed_cells) >
           config.max_failed_fraction * static_cast<double>(total_cells);
  }
};

/// Fits and evaluates one (model, fold) cell. Failures are recorded in the
/// result rather than thrown.
FoldResult run_fold(const Dataset& dataset, const ModelConfig& model,
                    const std::vector<std::size_t>& test_indices, std::size_t fold,
                    const ExperimentConfig& config);

/// Cross-validated grid over kernels × warps on an in-memory dataset.
ExperimentReport run_experiment(const Dataset& dataset, const ExperimentConfig& config);

/// Loads the dataset named in `config` and runs the experiment.
ExperimentReport run_experiment(const ExperimentConfig& config);

// ---------------------------------------------------------------------------
// Single-model fits

/// Hyperparameters fitted on a whole dataset, with the preprocessing needed to
/// reproduce the trained model from the same data.
struct FittedModel {
  ModelConfig model;
  Standardizer standardizer;
  Hyperparams hyperparams;
  double nll = 0.0;
  std::size_t clamped_labels = 0;
};

/// Standardizes features, clamps labels for the log warp, and runs two_pass_fit.
FittedModel fit_model(const Dataset& dataset, const ModelConfig& model, const OptimizeConfig& config);

/// Rebuilds the trained model from the data `fitted` was estimated on.
TrainedModel materialize(const Dataset& dataset, const FittedModel& fitted);

void write_model_json(std::ostream& out, const FittedModel& fitted);

/// Throws ParseError on malformed JSON and DataError on missing or invalid fields.
FittedModel read_model_json(std::istream& in, const std::string& source);

// ---------------------------------------------------------------------------
// Reports

/// One CSV row: model, fold, metric, weight, value.
struct ReportRow {
  std::string model;
  std::string fold;  // fold index or "mean"
  std::string metric;
  std::optional<double> weight;
  double value;
};

/// Per-fold rows followed by the fold-averaged rows.
std::vector<ReportRow> report_rows(const ExperimentReport& report);

/// Only the fold-averaged rows.
std::vector<ReportRow> summary_rows(const ExperimentReport& report);

void write_csv(std::ostream& out, const std::vector<ReportRow>& rows);

/// JSON-lines detail log: one config record, then one record per (model, fold).
void write_jsonl(std::ostream& out, const ExperimentReport& report);

/// Shortest decimal that round-trips to `value`; "inf", "-inf", "nan" otherwise.
std::string format_double(double value);

}  // namespace wgp
