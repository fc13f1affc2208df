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

#include <cstddef>
#include <span>
#include <vector>

namespace wgp {

/// Negative mean log predictive density. Throws SupportViolation listing the
/// indices of any -∞ entries.
double nlpd(std::span<const double> log_densities);

double mae(std::span<const double> predictions, std::span<const double> labels);

double pearson_r(std::span<const double> predictions, std::span<const double> labels);

/// Two-tailed p-value of a Pearson correlation under the t approximation.
double pearson_p_value(double r, std::size_t n);

/// Asymmetric linear loss: (ŷ - y) for overestimates, w (y - ŷ) for underestimates.
double al_loss(double prediction, double label, double w);
double al_loss(std::span<const double> predictions, std::span<const double> labels, double w);

/// Linex loss exp(wΔ) - wΔ - 1 with Δ = ŷ - y. Throws LossOverflow when wΔ > 700.
double linex_loss(double prediction, double label, double w);
double linex_loss(std::span<const double> predictions, std::span<const double> labels, double w);

/// Loss of a Bayes estimator evaluated with the matching loss and weight.
struct WeightedLoss {
  double weight = 0.0;
  double value = 0.0;
  /// Set when the loss overflowed; `value` is then +∞.
  bool diverged = false;
};

/// Per-instance predictions of one evaluation split and their aggregates.
struct EvalRecord {
  std::vector<double> labels;
  std::vector<double> predictions;  // point predictions (predictive medians)
  std::vector<double> log_densities;

  double nlpd = 0.0;
  double mae = 0.0;
  double pearson_r = 0.0;
  double pearson_p = 1.0;
  /// Set when NLPD hit a support violation; `nlpd` is then +∞.
  bool support_violation = false;
  std::vector<WeightedLoss> al;
  std::vector<WeightedLoss> linex;

  /// Fills nlpd, mae, pearson_r and pearson_p from the per-instance vectors.
  /// A constant prediction vector yields pearson_r = NaN.
  void compute_intrinsic();
};

}  // namespace wgp
