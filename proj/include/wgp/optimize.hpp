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
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "wgp/gp.hpp"
#include "wgp/lbfgs.hpp"

namespace wgp {

/// Box for the tanh warp parameters, relative to the standard deviation s of
/// the training responses: a in [a_min s, a_max s], b in [b_min / s, b_max / s].
struct WarpBounds {
  double a_min = 1e-4;
  double a_max = 10.0;
  double b_min = 1e-3;
  double b_max = 10.0;

  void validate() const;
};

/// Absolute log-space limits for a and b.
struct WarpBox {
  double log_a_lo;
  double log_a_hi;
  double log_b_lo;
  double log_b_hi;
};

/// Scales `bounds` by the spread of the dataset's responses.
WarpBox warp_box(const Dataset& dataset, const WarpBounds& bounds);

struct OptimizeConfig {
  int restarts = 10;
  int max_iters = 1000;
  double grad_tol = 1e-5;
  double f_tol = 1e-9;
  std::uint64_t seed = 0;
  /// Second pass of two_pass_fit only moves the lengthscales.
  bool pass2_lengthscales_only = false;
  /// Worker threads for independent restarts. Results do not depend on it.
  int threads = 1;
  /// Keep tanh a_i and b_i inside `warp_bounds`. Without it the warped
  /// likelihood can decrease without limit as a step sharpens onto a label.
  bool bound_warp = true;
  WarpBounds warp_bounds;

  void validate() const;
};

/// Maps hyperparameters to the unconstrained optimization vector
/// [log σ_v, log l_1.., log σ_n², log a_1.., log b_1.., c_1..].
/// With a box, the a and b entries are instead u with
/// log a = lo + (hi - lo) · sigmoid(u).
class ParameterLayout {
 public:
  ParameterLayout(const ModelSpec& spec, Eigen::Index dim, std::optional<WarpBox> box = std::nullopt);

  Eigen::Index size() const { return 2 + num_lengthscales_ + 3 * terms_; }
  Eigen::Index lengthscale_offset() const { return 1; }
  Eigen::Index num_lengthscales() const { return num_lengthscales_; }
  Eigen::Index noise_offset() const { return 1 + num_lengthscales_; }
  Eigen::Index warp_offset() const { return 2 + num_lengthscales_; }

  Eigen::VectorXd encode(const Hyperparams& hp) const;
  Hyperparams decode(const Eigen::VectorXd& theta) const;
  /// Gradient of the NLL with respect to the encoded vector.
  Eigen::VectorXd encode_gradient(const NllGradient& g, const Hyperparams& hp) const;

 private:
  Eigen::Index num_lengthscales_;
  Eigen::Index terms_;
  std::optional<WarpBox> box_;
};

/// Random starting point: log σ_v and log σ_n² uniform in [-2, 1] around the
/// log-variance of the warped responses, log l uniform in [-1, 2], tanh a_i / s
/// and b_i · s log-uniform in [e^-2, 1] with s the response standard deviation,
/// c_i normal around the negated response mean.
Hyperparams random_initialization(const Dataset& dataset, const ModelSpec& spec,
                                  std::mt19937_64& rng);

struct RestartResult {
  Hyperparams hyperparams;
  double initial_nll = 0.0;
  double nll = 0.0;
  int iterations = 0;
  bool converged = false;
  StopReason reason = StopReason::MaxIterations;
  double gradient_norm = 0.0;  // ∞-norm in the encoded space
  std::vector<double> history;
  bool failed = false;
  std::string error;
};

struct OptimizeReport {
  Hyperparams best;
  double best_nll = 0.0;
  std::size_t best_restart = 0;
  std::vector<RestartResult> restarts;
};

OptimizeReport minimize_nll(const Dataset& dataset, const ModelSpec& spec,
                            const OptimizeConfig& config);

/// Single optimization run from `initial`. With `lengthscales_only` the other
/// parameters stay fixed.
OptimizeReport minimize_nll_from(const Dataset& dataset, const ModelSpec& spec,
                                 const Hyperparams& initial, const OptimizeConfig& config,
                                 bool lengthscales_only = false);

struct TwoPassResult {
  TrainedModel model;
  OptimizeReport isotropic;
  OptimizeReport ard;
};

/// Isotropic fit with random restarts followed by one ARD run warm-started at
/// the isotropic optimum.
TwoPassResult two_pass_fit(const Dataset& dataset, KernelFamily family, const WarpSpec& warp,
                           const OptimizeConfig& config);

}  // namespace wgp
