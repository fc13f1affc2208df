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

#include "wgp/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include <boost/math/distributions/students_t.hpp>

#include "wgp/error.hpp"

namespace wgp {

namespace {

void check_lengths(std::span<const double> a, std::span<const double> b, std::size_t min_size) {
  if (a.size() != b.size()) {
    throw InvalidInput("prediction/label length mismatch (" + std::to_string(a.size()) + " vs " +
                       std::to_string(b.size()) + ")");
  }
  if (a.size() < min_size) {
    throw InvalidInput("need at least " + std::to_string(min_size) + " instances");
  }
}

}  // namespace

double nlpd(std::span<const double> log_densities) {
  if (log_densities.empty()) throw InvalidInput("nlpd needs at least one instance");
  std::vector<std::size_t> bad;
  double sum = 0.0;
  for (std::size_t i = 0; i < log_densities.size(); ++i) {
    const double v = log_densities[i];
    if (std::isinf(v) && v < 0.0) {
      bad.push_back(i);
    } else if (!std::isfinite(v)) {
      throw InvalidInput("non-finite log density at index " + std::to_string(i));
    }
    sum += v;
  }
  if (!bad.empty()) {
    std::string list;
    for (std::size_t k = 0; k < bad.size() && k < 10; ++k) list += (k ? "," : "") + std::to_string(bad[k]);
    if (bad.size() > 10) list += ",...";
    throw SupportViolation("zero predictive density at " + std::to_string(bad.size()) +
                               " label(s): indices " + list,
                           std::move(bad));
  }
  return -sum / static_cast<double>(log_densities.size());
}

double mae(std::span<const double> predictions, std::span<const double> labels) {
  check_lengths(predictions, labels, 1);
  double sum = 0.0;
  for (std::size_t i = 0; i < labels.size(); ++i) sum += std::abs(predictions[i] - labels[i]);
  return sum / static_cast<double>(labels.size());
}

double pearson_r(std::span<const double> predictions, std::span<const double> labels) {
  check_lengths(predictions, labels, 2);
  const double n = static_cast<double>(labels.size());
  double mp = 0.0;
  double ml = 0.0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    mp += predictions[i];
    ml += labels[i];
  }
  mp /= n;
  ml /= n;
  double spp = 0.0;
  double sll = 0.0;
  double spl = 0.0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const double dp = predictions[i] - mp;
    const double dl = labels[i] - ml;
    spp += dp * dp;
    sll += dl * dl;
    spl += dp * dl;
  }
  if (!(spp > 0.0) || !(sll > 0.0)) throw UndefinedCorrelation("correlation of a constant vector");
  return std::clamp(spl / std::sqrt(spp * sll), -1.0, 1.0);
}

double pearson_p_value(double r, std::size_t n) {
  if (n < 3) return 1.0;
  const double dof = static_cast<double>(n) - 2.0;
  if (std::abs(r) >= 1.0) return 0.0;
  const double t = r * std::sqrt(dof / (1.0 - r * r));
  const boost::math::students_t dist(dof);
  return 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t)));
}

double al_loss(double prediction, double label, double w) {
  if (!(w > 0.0)) throw InvalidInput("AL weight must be positive");
  return prediction > label ? prediction - label : w * (label - prediction);
}

double al_loss(std::span<const double> predictions, std::span<const double> labels, double w) {
  check_lengths(predictions, labels, 1);
  double sum = 0.0;
  for (std::size_t i = 0; i < labels.size(); ++i) sum += al_loss(predictions[i], labels[i], w);
  return sum / static_cast<double>(labels.size());
}

double linex_loss(double prediction, double label, double w) {
  if (w == 0.0 || !std::isfinite(w)) throw InvalidInput("linex weight must be finite and nonzero");
  const double wd = w * (prediction - label);
  if (wd > 700.0) {
    throw LossOverflow("linex loss overflows: w*(yhat - y) = " + std::to_string(wd) +
                       " (w = " + std::to_string(w) + ", yhat = " + std::to_string(prediction) +
                       ", y = " + std::to_string(label) + ")");
  }
  // expm1 keeps precision when wΔ is tiny.
  return std::expm1(wd) - wd;
}

double linex_loss(std::span<const double> predictions, std::span<const double> labels, double w) {
  check_lengths(predictions, labels, 1);
  double sum = 0.0;
  for (std::size_t i = 0; i < labels.size(); ++i) sum += linex_loss(predictions[i], labels[i], w);
  return sum / static_cast<double>(labels.size());
}

void EvalRecord::compute_intrinsic() {
  try {
    nlpd = wgp::nlpd(log_densities);
    support_violation = false;
  } catch (const SupportViolation&) {
    nlpd = std::numeric_limits<double>::infinity();
    support_violation = true;
  }
  mae = wgp::mae(predictions, labels);
  try {
    pearson_r = wgp::pearson_r(predictions, labels);
    pearson_p = pearson_p_value(pearson_r, labels.size());
  } catch (const UndefinedCorrelation&) {
    pearson_r = std::numeric_limits<double>::quiet_NaN();
    pearson_p = std::numeric_limits<double>::quiet_NaN();
  }
}

}  // namespace wgp
