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

#include "wgp/predictive.hpp"

#include <cmath>
#include <limits>

#include <boost/math/special_functions/erf.hpp>

#include "wgp/error.hpp"

namespace wgp {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;
constexpr double kLog2Pi = 1.8378770664093454835606594728112;
constexpr double kSqrt2 = 1.4142135623730950488016887242097;

}  // namespace

QuadratureRule gauss_hermite(int order) {
  if (order < 1) throw InvalidInput("quadrature order must be positive");
  const int n = order;
  QuadratureRule rule{Eigen::VectorXd(n), Eigen::VectorXd(n)};
  const double pim4 = std::pow(kPi, -0.25);
  const int m = (n + 1) / 2;
  double z = 0.0;
  for (int i = 0; i < m; ++i) {
    // Initial guesses for the largest roots, then extrapolation from the previous ones.
    if (i == 0) {
      z = std::sqrt(2.0 * n + 1.0) - 1.85575 * std::pow(2.0 * n + 1.0, -0.16667);
    } else if (i == 1) {
      z -= 1.14 * std::pow(static_cast<double>(n), 0.426) / z;
    } else if (i == 2) {
      z = 1.86 * z - 0.86 * rule.nodes[0];
    } else if (i == 3) {
      z = 1.91 * z - 0.91 * rule.nodes[1];
    } else {
      z = 2.0 * z - rule.nodes[i - 2];
    }
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      // Orthonormal Hermite recurrence.
      double p1 = pim4;
      double p2 = 0.0;
      for (int j = 1; j <= n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = z * std::sqrt(2.0 / j) * p2 - std::sqrt((j - 1.0) / j) * p3;
      }
      pp = std::sqrt(2.0 * n) * p2;
      const double step = p1 / pp;
      z -= step;
      if (std::abs(step) <= 1e-15 * std::max(1.0, std::abs(z))) {
        // One more pass so that pp corresponds to the converged root.
        p1 = pim4;
        p2 = 0.0;
        for (int j = 1; j <= n; ++j) {
          const double p3 = p2;
          p2 = p1;
          p1 = z * std::sqrt(2.0 / j) * p2 - std::sqrt((j - 1.0) / j) * p3;
        }
        pp = std::sqrt(2.0 * n) * p2;
        break;
      }
    }
    rule.nodes[i] = z;
    rule.nodes[n - 1 - i] = -z;
    rule.weights[i] = rule.weights[n - 1 - i] = 2.0 / (pp * pp);
  }
  if (n % 2 == 1) rule.nodes[m - 1] = 0.0;
  rule.nodes.reverseInPlace();
  rule.weights.reverseInPlace();
  return rule;
}

double standard_normal_quantile(double q) {
  if (!(q > 0.0 && q < 1.0)) throw InvalidInput("quantile level must lie in (0, 1)");
  return -kSqrt2 * boost::math::erfc_inv(2.0 * q);
}

PredictiveDistribution::PredictiveDistribution(LatentPredictive latent, Warp warp)
    : latent_(latent), warp_(std::move(warp)) {
  if (!(latent_.variance > 0.0) || !std::isfinite(latent_.variance) || !std::isfinite(latent_.mean)) {
    throw InvalidInput("predictive distribution needs finite mean and positive variance");
  }
}

PredictiveDistribution predictive_distribution(const TrainedModel& model,
                                               const Eigen::Ref<const Eigen::VectorXd>& x) {
  return PredictiveDistribution(model.predict_latent(x), model.warp());
}

double log_density(const PredictiveDistribution& dist, double y) {
  if (!dist.warp().in_domain(y)) return -std::numeric_limits<double>::infinity();
  const double z = dist.warp()(y);
  const double var = dist.latent().variance;
  const double diff = z - dist.latent().mean;
  return std::log(dist.warp().deriv(y)) - 0.5 * (kLog2Pi + std::log(var)) - diff * diff / (2.0 * var);
}

double cdf(const PredictiveDistribution& dist, double y) {
  if (!dist.warp().in_domain(y)) return 0.0;
  const double t = (dist.warp()(y) - dist.latent().mean) / dist.latent_sd();
  return 0.5 * std::erfc(-t / kSqrt2);
}

double median(const PredictiveDistribution& dist) {
  return dist.warp().inverse(dist.latent().mean);
}

Moments mean_and_variance(const PredictiveDistribution& dist, const QuadratureRule& rule) {
  const double mu = dist.latent().mean;
  const double scale = kSqrt2 * dist.latent_sd();
  const double inv_sqrt_pi = 1.0 / std::sqrt(kPi);
  double m1 = 0.0;
  double m2 = 0.0;
  for (int j = 0; j < rule.order(); ++j) {
    const double y = dist.warp().inverse(mu + scale * rule.nodes[j]);
    const double w = rule.weights[j] * inv_sqrt_pi;
    m1 += w * y;
    m2 += w * y * y;
  }
  return {m1, std::max(m2 - m1 * m1, 1e-12)};
}

double moment_error_estimate(const PredictiveDistribution& dist, const QuadratureRule& rule) {
  static const QuadratureRule reference = gauss_hermite(100);
  const Moments a = mean_and_variance(dist, rule);
  const Moments b = mean_and_variance(dist, reference);
  return std::max(std::abs(a.mean - b.mean), std::abs(a.variance - b.variance));
}

double quantile(const PredictiveDistribution& dist, double q) {
  const double z = dist.latent().mean + dist.latent_sd() * standard_normal_quantile(q);
  return dist.warp().inverse(z);
}

double bayes_estimate_al(const PredictiveDistribution& dist, double w) {
  if (!(w > 0.0) || !std::isfinite(w)) throw InvalidInput("AL weight must be positive");
  if (w == 1.0) return median(dist);
  return quantile(dist, w / (w + 1.0));
}

double bayes_estimate_linex(const PredictiveDistribution& dist, double w,
                            const QuadratureRule& rule) {
  if (w == 0.0 || !std::isfinite(w)) throw InvalidInput("linex weight must be finite and nonzero");
  const Moments m = mean_and_variance(dist, rule);
  return m.mean - 0.5 * w * m.variance;
}

}  // namespace wgp
