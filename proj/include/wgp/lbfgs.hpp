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

#include <functional>
#include <vector>

#include <Eigen/Dense>

namespace wgp {

/// Objective returning f(x) and writing ∇f(x) into `grad`. May throw; any
/// exception or non-finite value is treated as f = +∞ by the line search.
using Objective = std::function<double(const Eigen::VectorXd& x, Eigen::VectorXd& grad)>;

enum class StopReason { GradientTolerance, FunctionTolerance, MaxIterations, LineSearchFailure };

const char* to_string(StopReason reason);

struct LbfgsOptions {
  int max_iters = 1000;
  int memory = 10;
  double grad_tol = 1e-5;  // on ‖∇f‖_∞
  double f_tol = 1e-9;     // on |Δf| / max(1, |f|)
  double c1 = 1e-4;
  double c2 = 0.9;
  int max_line_search_evals = 40;
};

struct LbfgsResult {
  Eigen::VectorXd x;
  double value = 0.0;
  Eigen::VectorXd gradient;
  int iterations = 0;
  int evaluations = 0;
  StopReason reason = StopReason::MaxIterations;
  /// Objective value after each accepted step, starting with f(x0).
  std::vector<double> history;

  bool converged() const { return reason == StopReason::GradientTolerance; }
};

/// Limited-memory BFGS with a strong-Wolfe line search. Throws NumericError if
/// the objective is not finite at the starting point.
LbfgsResult minimize_lbfgs(const Objective& objective, Eigen::VectorXd x0,
                           const LbfgsOptions& options = {});

}  // namespace wgp
