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

#include <Eigen/Dense>

#include "wgp/kernels.hpp"
#include "wgp/warping.hpp"

namespace wgp {

/// Training inputs X (n×D) and responses y (n).
struct Dataset {
  Eigen::MatrixXd features;
  Eigen::VectorXd responses;

  Eigen::Index size() const { return features.rows(); }
  Eigen::Index dim() const { return features.cols(); }

  /// Throws InvalidInput on shape mismatch, non-finite values or n < min_rows.
  void validate(Eigen::Index min_rows = 2) const;

  /// Rows selected by `indices`, in that order.
  Dataset subset(const std::vector<std::size_t>& indices) const;
};

struct ModelSpec {
  KernelSpec kernel;
  WarpSpec warp = WarpSpec::identity();
};

struct Hyperparams {
  KernelParams kernel;
  double noise_variance = 1.0;
  WarpParams warp;

  void validate(const ModelSpec& spec, Eigen::Index dim) const;
};

/// Gaussian (latent-space) predictive marginal at a single input.
struct LatentPredictive {
  double mean;
  double variance;
};

/// Cached factorization of K + σ_n² I over warped responses. Immutable.
class TrainedModel {
 public:
  TrainedModel(Dataset dataset, ModelSpec spec, Hyperparams hyperparams);

  const Dataset& dataset() const { return dataset_; }
  const ModelSpec& spec() const { return spec_; }
  const Hyperparams& hyperparams() const { return hyperparams_; }
  Warp warp() const { return Warp(spec_.warp, hyperparams_.warp); }

  /// Lower Cholesky factor of K + (σ_n² + jitter) I.
  const Eigen::MatrixXd& cholesky_factor() const { return chol_; }
  const Eigen::VectorXd& weight_vector() const { return alpha_; }
  const Eigen::VectorXd& warped_responses() const { return z_; }
  double jitter() const { return jitter_; }

  LatentPredictive predict_latent(const Eigen::Ref<const Eigen::VectorXd>& x) const;

 private:
  Dataset dataset_;
  ModelSpec spec_;
  Hyperparams hyperparams_;
  Eigen::VectorXd z_;
  Eigen::MatrixXd chol_;
  Eigen::VectorXd alpha_;
  double jitter_ = 0.0;
};

TrainedModel fit_cache(const Dataset& dataset, const ModelSpec& spec, const Hyperparams& hp);

double nll(const Dataset& dataset, const ModelSpec& spec, const Hyperparams& hp);

/// NLL and its partials with respect to the natural (untransformed) parameters.
struct NllGradient {
  double value = 0.0;
  double d_variance = 0.0;
  Eigen::VectorXd d_lengthscales;
  double d_noise_variance = 0.0;
  /// Ordered (a_1..a_I, b_1..b_I, c_1..c_I); empty without warp parameters.
  Eigen::VectorXd d_warp;
};

NllGradient nll_gradients(const Dataset& dataset, const ModelSpec& spec, const Hyperparams& hp);

inline LatentPredictive predict_latent(const TrainedModel& model,
                                       const Eigen::Ref<const Eigen::VectorXd>& x) {
  return model.predict_latent(x);
}

/// Lower Cholesky factor of `A`, adding jitter 1e-10·mean(diag) escalating by
/// ×10 up to 1e-4·mean(diag) on failure. Returns the jitter actually used.
double jittered_cholesky(const Eigen::MatrixXd& A, Eigen::MatrixXd& L);

}  // namespace wgp
