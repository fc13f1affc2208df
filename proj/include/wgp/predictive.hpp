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

#include <cmath>

#include <Eigen/Dense>

#include "wgp/gp.hpp"
#include "wgp/warping.hpp"

namespace wgp {

/// Gauss-Hermite rule for ∫ g(t) e^{-t²} dt ≈ Σ w_j g(t_j).
struct QuadratureRule {
  Eigen::VectorXd nodes;    // ascending
  Eigen::VectorXd weights;  // positive, Σ = √π

  int order() const { return static_cast<int>(nodes.size()); }
};

QuadratureRule gauss_hermite(int order = 50);

/// Standard normal quantile Φ^{-1}(q), 0 < q < 1.
double standard_normal_quantile(double q);

/// Observed-space predictive distribution: y = f^{-1}(z), z ~ N(μ*, σ*²).
class PredictiveDistribution {
 public:
  PredictiveDistribution(LatentPredictive latent, Warp warp);

  const LatentPredictive& latent() const { return latent_; }
  const Warp& warp() const { return warp_; }
  double latent_sd() const { return std::sqrt(latent_.variance); }

 private:
  LatentPredictive latent_;
  Warp warp_;
};

PredictiveDistribution predictive_distribution(const TrainedModel& model,
                                               const Eigen::Ref<const Eigen::VectorXd>& x);

/// log p(y*) = log f'(y*) + log N(f(y*); μ*, σ*²). Returns -∞ exactly when y*
/// is outside the support of the warp.
double log_density(const PredictiveDistribution& dist, double y);

double cdf(const PredictiveDistribution& dist, double y);

double median(const PredictiveDistribution& dist);

struct Moments {
  double mean;
  double variance;
};

Moments mean_and_variance(const PredictiveDistribution& dist, const QuadratureRule& rule);

/// Largest absolute change in mean or variance when the rule is replaced by an
/// order-100 rule.
double moment_error_estimate(const PredictiveDistribution& dist, const QuadratureRule& rule);

double quantile(const PredictiveDistribution& dist, double q);

/// Minimum-risk estimate under the asymmetric linear loss with weight w on
/// underestimates: the w/(w+1) quantile.
double bayes_estimate_al(const PredictiveDistribution& dist, double w);

/// Minimum-risk estimate under the linex loss, μ_y - w σ_y² / 2, using
/// observed-space moments from `rule`. Exact for Gaussian predictives.
double bayes_estimate_linex(const PredictiveDistribution& dist, double w,
                            const QuadratureRule& rule);

}  // namespace wgp
