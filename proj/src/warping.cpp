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

#include "wgp/warping.hpp"

#include <cmath>
#include <limits>

#include "wgp/error.hpp"

namespace wgp {

namespace {

void check_domain(const WarpSpec& spec, double y) {
  if (spec.family() == WarpFamily::Log && !(y > 0.0)) {
    throw DomainError("log warp requires a positive response, got " + std::to_string(y));
  }
}

double tanh_sum_value(const WarpParams& p, double y) {
  double f = y;
  for (Eigen::Index i = 0; i < p.a.size(); ++i) f += p.a[i] * std::tanh(p.b[i] * (y + p.c[i]));
  return f;
}

double tanh_sum_deriv(const WarpParams& p, double y) {
  double d = 1.0;
  for (Eigen::Index i = 0; i < p.a.size(); ++i) {
    const double t = std::tanh(p.b[i] * (y + p.c[i]));
    d += p.a[i] * p.b[i] * (1.0 - t * t);
  }
  return d;
}

}  // namespace

WarpSpec WarpSpec::tanh_sum(int terms) {
  if (terms < 1) throw InvalidInput("tanh warp needs at least one term");
  return WarpSpec(WarpFamily::TanhSum, terms);
}

WarpSpec WarpSpec::parse(const std::string& name) {
  if (name == "none" || name == "identity") return identity();
  if (name == "log") return log();
  if (name.rfind("tanh", 0) == 0 && name.size() > 4) {
    const std::string digits = name.substr(4);
    if (digits.find_first_not_of("0123456789") == std::string::npos) {
      return tanh_sum(std::stoi(digits));
    }
  }
  throw InvalidInput("unknown warp '" + name + "' (expected none, log or tanhN)");
}

std::string WarpSpec::name() const {
  switch (family_) {
    case WarpFamily::Identity:
      return "none";
    case WarpFamily::Log:
      return "log";
    case WarpFamily::TanhSum:
      return "tanh" + std::to_string(terms_);
  }
  return "unknown";
}

void WarpParams::validate(const WarpSpec& spec) const {
  const Eigen::Index expected = spec.has_params() ? spec.terms() : 0;
  if (a.size() != expected || b.size() != expected || c.size() != expected) {
    throw InvalidInput("warp '" + spec.name() + "' expects " + std::to_string(expected) +
                       " terms per parameter vector");
  }
  for (Eigen::Index i = 0; i < expected; ++i) {
    if (!(a[i] > 0.0) || !(b[i] > 0.0) || !std::isfinite(a[i]) || !std::isfinite(b[i]) ||
        !std::isfinite(c[i])) {
      throw InvalidInput("tanh warp requires finite a_i > 0, b_i > 0 and finite c_i");
    }
  }
}

double warp(const WarpSpec& spec, const WarpParams& params, double y) {
  switch (spec.family()) {
    case WarpFamily::Identity:
      return y;
    case WarpFamily::Log:
      check_domain(spec, y);
      return std::log(y);
    case WarpFamily::TanhSum:
      return tanh_sum_value(params, y);
  }
  return y;
}

double warp_deriv(const WarpSpec& spec, const WarpParams& params, double y) {
  switch (spec.family()) {
    case WarpFamily::Identity:
      return 1.0;
    case WarpFamily::Log:
      check_domain(spec, y);
      return 1.0 / y;
    case WarpFamily::TanhSum:
      return tanh_sum_deriv(params, y);
  }
  return 1.0;
}

double warp_inverse(const WarpSpec& spec, const WarpParams& params, double z,
                    const InverseOptions& options) {
  switch (spec.family()) {
    case WarpFamily::Identity:
      return z;
    case WarpFamily::Log:
      return std::exp(z);
    case WarpFamily::TanhSum:
      break;
  }
  if (!std::isfinite(z)) throw InvalidInput("cannot invert a warp at a non-finite value");

  // |f(y) - y| < Σ|a_i|, so the root lies in [z - Σ|a_i|, z + Σ|a_i|].
  const double spread = params.a.cwiseAbs().sum();
  double lo = z - spread;
  double hi = z + spread;
  const double tol = options.rel_tol * std::max(1.0, std::abs(z));

  double y = z;
  double best = y;
  double best_res = std::numeric_limits<double>::infinity();
  double step_before_last = hi - lo;
  double last_step = step_before_last;
  for (int it = 0; it < options.max_iters; ++it) {
    const double res = tanh_sum_value(params, y) - z;
    if (std::abs(res) < best_res) {
      best_res = std::abs(res);
      best = y;
    }
    if (std::abs(res) <= tol) return y;
    if (res > 0.0) {
      hi = y;
    } else {
      lo = y;
    }
    // Newton unless it leaves the bracket or fails to halve the step taken two
    // iterations ago; then bisect.
    double next = y - res / tanh_sum_deriv(params, y);
    if (!(next > lo && next < hi) || 2.0 * std::abs(next - y) > std::abs(step_before_last)) {
      next = 0.5 * (lo + hi);
    }
    step_before_last = last_step;
    last_step = next - y;
    if (next == y) break;
    y = next;
  }
  throw NumericError("warp inverse did not converge for z = " + std::to_string(z), best, best_res);
}

WarpParamGradients warp_param_gradients(const WarpSpec& spec, const WarpParams& params, double y) {
  check_domain(spec, y);
  const Eigen::Index I = spec.has_params() ? spec.terms() : 0;
  WarpParamGradients g{Eigen::VectorXd::Zero(3 * I), Eigen::VectorXd::Zero(3 * I)};
  if (I == 0) return g;

  const double fprime = tanh_sum_deriv(params, y);
  for (Eigen::Index i = 0; i < I; ++i) {
    const double a = params.a[i];
    const double b = params.b[i];
    const double shifted = y + params.c[i];
    const double t = std::tanh(b * shifted);
    const double s2 = 1.0 - t * t;
    g.d_value[i] = t;
    g.d_value[I + i] = a * s2 * shifted;
    g.d_value[2 * I + i] = a * b * s2;
    // d sech²(u)/du = -2 sech²(u) tanh(u)
    g.d_log_deriv[i] = b * s2 / fprime;
    g.d_log_deriv[I + i] = (a * s2 - 2.0 * a * b * s2 * t * shifted) / fprime;
    g.d_log_deriv[2 * I + i] = -2.0 * a * b * b * s2 * t / fprime;
  }
  return g;
}

Warp::Warp(WarpSpec spec, WarpParams params) : spec_(spec), params_(std::move(params)) {
  params_.validate(spec_);
}

bool Warp::in_domain(double y) const {
  return spec_.family() != WarpFamily::Log || y > 0.0;
}

}  // namespace wgp
