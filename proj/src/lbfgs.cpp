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

#include "wgp/lbfgs.hpp"

#include <cmath>
#include <deque>
#include <limits>
#include <optional>

#include "wgp/error.hpp"

namespace wgp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Trial {
  double alpha = 0.0;
  double value = kInf;
  double slope = 0.0;  // directional derivative along the search direction
  Eigen::VectorXd x;
  Eigen::VectorXd grad;

  bool finite() const { return std::isfinite(value) && std::isfinite(slope); }
};

class LineSearch {
 public:
  LineSearch(const Objective& objective, const Eigen::VectorXd& x, double f0,
             const Eigen::VectorXd& p, double slope0, const LbfgsOptions& options, int& evals)
      : objective_(objective), x_(x), f0_(f0), p_(p), slope0_(slope0), opt_(options), evals_(evals) {}

  std::optional<Trial> run(double alpha1) {
    Trial prev;
    prev.alpha = 0.0;
    prev.value = f0_;
    prev.slope = slope0_;
    double alpha = alpha1;
    for (int i = 0; budget_left(); ++i) {
      Trial cur = evaluate(alpha);
      if (!cur.finite() || cur.value > f0_ + opt_.c1 * alpha * slope0_ ||
          (i > 0 && cur.value >= prev.value)) {
        return zoom(prev, cur);
      }
      if (std::abs(cur.slope) <= -opt_.c2 * slope0_) return cur;
      if (cur.slope >= 0.0) return zoom(cur, prev);
      prev = std::move(cur);
      alpha *= 2.0;
    }
    return accept_if_decreasing(prev);
  }

 private:
  bool budget_left() const { return used_ < opt_.max_line_search_evals; }

  Trial evaluate(double alpha) {
    ++used_;
    ++evals_;
    Trial t;
    t.alpha = alpha;
    t.x = x_ + alpha * p_;
    t.grad.resize(x_.size());
    try {
      t.value = objective_(t.x, t.grad);
      t.slope = t.grad.dot(p_);
      if (!t.grad.allFinite()) t.value = kInf;
    } catch (const Error&) {
      t.value = kInf;
    }
    if (!std::isfinite(t.value)) t.value = kInf;
    return t;
  }

  // Minimizer of the cubic through (lo, hi) values and slopes, safeguarded to
  // the interior of the interval; bisection when the data are unusable.
  static double interpolate(const Trial& lo, const Trial& hi) {
    const double a = lo.alpha;
    const double b = hi.alpha;
    const double mid = 0.5 * (a + b);
    if (!lo.finite() || !hi.finite()) return mid;
    const double d1 = lo.slope + hi.slope - 3.0 * (lo.value - hi.value) / (a - b);
    const double disc = d1 * d1 - lo.slope * hi.slope;
    if (disc < 0.0) return mid;
    const double d2 = std::copysign(std::sqrt(disc), b - a);
    const double t = b - (b - a) * (hi.slope + d2 - d1) / (hi.slope - lo.slope + 2.0 * d2);
    const double left = std::min(a, b);
    const double right = std::max(a, b);
    const double margin = 0.1 * (right - left);
    if (!std::isfinite(t) || t < left + margin || t > right - margin) return mid;
    return t;
  }

  std::optional<Trial> zoom(Trial lo, Trial hi) {
    while (budget_left()) {
      const double alpha = interpolate(lo, hi);
      Trial cur = evaluate(alpha);
      if (!cur.finite() || cur.value > f0_ + opt_.c1 * alpha * slope0_ || cur.value >= lo.value) {
        hi = std::move(cur);
      } else {
        if (std::abs(cur.slope) <= -opt_.c2 * slope0_) return cur;
        if (cur.slope * (hi.alpha - lo.alpha) >= 0.0) hi = lo;
        lo = std::move(cur);
      }
      if (std::abs(hi.alpha - lo.alpha) <= 1e-16 * std::max(1.0, lo.alpha)) break;
    }
    return accept_if_decreasing(lo);
  }

  std::optional<Trial> accept_if_decreasing(const Trial& t) const {
    if (t.alpha > 0.0 && t.finite() && t.value <= f0_ + opt_.c1 * t.alpha * slope0_) return t;
    return std::nullopt;
  }

  const Objective& objective_;
  const Eigen::VectorXd& x_;
  double f0_;
  const Eigen::VectorXd& p_;
  double slope0_;
  const LbfgsOptions& opt_;
  int& evals_;
  int used_ = 0;
};

struct Correction {
  Eigen::VectorXd s;
  Eigen::VectorXd y;
  double rho;
};

Eigen::VectorXd two_loop(const std::deque<Correction>& mem, const Eigen::VectorXd& g) {
  Eigen::VectorXd q = g;
  std::vector<double> alphas(mem.size());
  for (std::size_t k = mem.size(); k-- > 0;) {
    alphas[k] = mem[k].rho * mem[k].s.dot(q);
    q -= alphas[k] * mem[k].y;
  }
  if (!mem.empty()) {
    const Correction& last = mem.back();
    q *= last.s.dot(last.y) / last.y.squaredNorm();
  }
  for (std::size_t k = 0; k < mem.size(); ++k) {
    const double beta = mem[k].rho * mem[k].y.dot(q);
    q += (alphas[k] - beta) * mem[k].s;
  }
  return -q;
}

}  // namespace

const char* to_string(StopReason reason) {
  switch (reason) {
    case StopReason::GradientTolerance:
      return "gradient_tolerance";
    case StopReason::FunctionTolerance:
      return "function_tolerance";
    case StopReason::MaxIterations:
      return "max_iterations";
    case StopReason::LineSearchFailure:
      return "line_search_failure";
  }
  return "unknown";
}

LbfgsResult minimize_lbfgs(const Objective& objective, Eigen::VectorXd x0,
                           const LbfgsOptions& options) {
  LbfgsResult r;
  r.x = std::move(x0);
  r.gradient.resize(r.x.size());
  r.value = objective(r.x, r.gradient);
  r.evaluations = 1;
  if (!std::isfinite(r.value) || !r.gradient.allFinite()) {
    throw NumericError("objective is not finite at the starting point", r.value, kInf);
  }
  r.history.push_back(r.value);

  std::deque<Correction> mem;
  while (true) {
    if (r.gradient.lpNorm<Eigen::Infinity>() < options.grad_tol) {
      r.reason = StopReason::GradientTolerance;
      return r;
    }
    if (r.iterations >= options.max_iters) {
      r.reason = StopReason::MaxIterations;
      return r;
    }

    Eigen::VectorXd p = two_loop(mem, r.gradient);
    double slope = r.gradient.dot(p);
    if (!(slope < 0.0)) {
      mem.clear();
      p = -r.gradient;
      slope = r.gradient.dot(p);
    }
    double alpha1 = mem.empty() ? std::min(1.0, 1.0 / r.gradient.norm()) : 1.0;

    std::optional<Trial> step =
        LineSearch(objective, r.x, r.value, p, slope, options, r.evaluations).run(alpha1);
    if (!step && !mem.empty()) {
      mem.clear();
      p = -r.gradient;
      slope = r.gradient.dot(p);
      alpha1 = std::min(1.0, 1.0 / r.gradient.norm());
      step = LineSearch(objective, r.x, r.value, p, slope, options, r.evaluations).run(alpha1);
    }
    if (!step) {
      r.reason = StopReason::LineSearchFailure;
      return r;
    }

    Correction c{step->x - r.x, step->grad - r.gradient, 0.0};
    const double sy = c.s.dot(c.y);
    const double previous = r.value;
    r.x = std::move(step->x);
    r.gradient = std::move(step->grad);
    r.value = step->value;
    ++r.iterations;
    r.history.push_back(r.value);

    if (sy > 1e-10 * c.s.norm() * c.y.norm()) {
      c.rho = 1.0 / sy;
      mem.push_back(std::move(c));
      if (static_cast<int>(mem.size()) > options.memory) mem.pop_front();
    }

    if (r.gradient.lpNorm<Eigen::Infinity>() < options.grad_tol) {
      r.reason = StopReason::GradientTolerance;
      return r;
    }
    if (previous - r.value <= options.f_tol * std::max(1.0, std::abs(r.value))) {
      r.reason = StopReason::FunctionTolerance;
      return r;
    }
  }
}

}  // namespace wgp
