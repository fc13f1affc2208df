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

#include <string>

#include <Eigen/Dense>

namespace wgp {

enum class WarpFamily { Identity, Log, TanhSum };

/// Warping family plus the number of tanh terms (zero unless TanhSum).
class WarpSpec {
 public:
  static WarpSpec identity() { return WarpSpec(WarpFamily::Identity, 0); }
  static WarpSpec log() { return WarpSpec(WarpFamily::Log, 0); }
  static WarpSpec tanh_sum(int terms);

  /// Parses "none", "log" or "tanhI".
  static WarpSpec parse(const std::string& name);

  WarpFamily family() const { return family_; }
  int terms() const { return terms_; }
  bool has_params() const { return family_ == WarpFamily::TanhSum; }
  std::string name() const;

 private:
  WarpSpec(WarpFamily family, int terms) : family_(family), terms_(terms) {}

  WarpFamily family_;
  int terms_;
};

/// Parameters of f(y) = y + Σ a_i tanh(b_i (y + c_i)). Empty for Identity/Log.
struct WarpParams {
  Eigen::VectorXd a;
  Eigen::VectorXd b;
  Eigen::VectorXd c;

  void validate(const WarpSpec& spec) const;
};

double warp(const WarpSpec& spec, const WarpParams& params, double y);
double warp_deriv(const WarpSpec& spec, const WarpParams& params, double y);

struct InverseOptions {
  int max_iters = 100;
  double rel_tol = 1e-10;
};

/// Solves warp(y) = z. Newton steps are safeguarded by a bracket, falling back
/// to bisection whenever a step leaves it.
double warp_inverse(const WarpSpec& spec, const WarpParams& params, double z,
                    const InverseOptions& options = {});

/// Partials with respect to the parameters, ordered (a_1..a_I, b_1..b_I, c_1..c_I).
struct WarpParamGradients {
  Eigen::VectorXd d_value;
  Eigen::VectorXd d_log_deriv;
};

WarpParamGradients warp_param_gradients(const WarpSpec& spec, const WarpParams& params, double y);

/// A warp together with its parameters.
class Warp {
 public:
  Warp() : spec_(WarpSpec::identity()) {}
  Warp(WarpSpec spec, WarpParams params);

  const WarpSpec& spec() const { return spec_; }
  const WarpParams& params() const { return params_; }

  double operator()(double y) const { return warp(spec_, params_, y); }
  double deriv(double y) const { return warp_deriv(spec_, params_, y); }
  double inverse(double z) const { return warp_inverse(spec_, params_, z); }
  /// Whether y lies in the domain of the warp.
  bool in_domain(double y) const;

 private:
  WarpSpec spec_;
  WarpParams params_;
};

}  // namespace wgp
