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

#include "wgp/optimize.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

#include "wgp/error.hpp"

namespace wgp {

namespace {

std::mt19937_64 restart_rng(std::uint64_t seed, std::size_t restart) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(restart)};
  return std::mt19937_64(seq);
}

LbfgsOptions lbfgs_options(const OptimizeConfig& config) {
  LbfgsOptions o;
  o.max_iters = config.max_iters;
  o.grad_tol = config.grad_tol;
  o.f_tol = config.f_tol;
  return o;
}

double response_sd(const Eigen::VectorXd& y) {
  const double n = static_cast<double>(y.size());
  const double var = (y.array() - y.mean()).square().sum() / std::max(1.0, n - 1.0);
  return var > 0.0 ? std::sqrt(var) : 1.0;
}

double sigmoid(double u) { return 1.0 / (1.0 + std::exp(-u)); }

// Inverse of lo + (hi - lo) · sigmoid(u), with values outside the box pulled
// just inside it.
double box_encode(double v, double lo, double hi) {
  const double t = std::clamp((v - lo) / (hi - lo), 1e-12, 1.0 - 1e-12);
  return std::log(t / (1.0 - t));
}

RestartResult run_once(const Dataset& dataset, const ModelSpec& spec, const Hyperparams& initial,
                       const OptimizeConfig& config, bool lengthscales_only) {
  std::optional<WarpBox> box;
  if (config.bound_warp && spec.warp.has_params()) box = warp_box(dataset, config.warp_bounds);
  const ParameterLayout layout(spec, dataset.dim(), box);
  Eigen::VectorXd mask = Eigen::VectorXd::Ones(layout.size());
  if (lengthscales_only) {
    mask.setZero();
    mask.segment(layout.lengthscale_offset(), layout.num_lengthscales()).setOnes();
  }
  // Frozen entries come from `initial` directly; a decode round trip is not exact.
  const auto decode = [&](const Eigen::VectorXd& theta) {
    Hyperparams hp = layout.decode(theta);
    if (lengthscales_only) {
      Eigen::VectorXd l = std::move(hp.kernel.lengthscales);
      hp = initial;
      hp.kernel.lengthscales = std::move(l);
    }
    return hp;
  };
  const Objective objective = [&](const Eigen::VectorXd& theta, Eigen::VectorXd& grad) {
    const Hyperparams hp = decode(theta);
    const NllGradient g = nll_gradients(dataset, spec, hp);
    grad = layout.encode_gradient(g, hp).cwiseProduct(mask);
    return g.value;
  };

  RestartResult r;
  r.hyperparams = initial;
  try {
    const LbfgsResult res = minimize_lbfgs(objective, layout.encode(initial), lbfgs_options(config));
    r.hyperparams = decode(res.x);
    r.initial_nll = res.history.front();
    r.nll = res.value;
    r.iterations = res.iterations;
    r.reason = res.reason;
    r.converged = res.converged();
    r.gradient_norm = res.gradient.lpNorm<Eigen::Infinity>();
    r.history = res.history;
  } catch (const Error& e) {
    r.failed = true;
    r.error = e.what();
    r.nll = std::numeric_limits<double>::infinity();
  }
  return r;
}

OptimizeReport merge(std::vector<RestartResult> runs) {
  OptimizeReport report;
  report.best_nll = std::numeric_limits<double>::infinity();
  std::string errors;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    if (runs[i].failed) {
      errors += "\n  restart " + std::to_string(i) + ": " + runs[i].error;
      continue;
    }
    if (runs[i].nll < report.best_nll) {
      report.best_nll = runs[i].nll;
      report.best_restart = i;
    }
  }
  if (!std::isfinite(report.best_nll)) {
    throw OptimizationFailed("all " + std::to_string(runs.size()) + " optimizer runs failed:" + errors);
  }
  report.best = runs[report.best_restart].hyperparams;
  report.restarts = std::move(runs);
  return report;
}

}  // namespace

void OptimizeConfig::validate() const {
  if (restarts < 1) throw InvalidInput("restarts must be at least 1");
  if (max_iters < 0) throw InvalidInput("max_iters must be non-negative");
  if (!(grad_tol > 0.0) || !(f_tol > 0.0)) throw InvalidInput("tolerances must be positive");
  if (threads < 1) throw InvalidInput("threads must be at least 1");
  if (bound_warp) warp_bounds.validate();
}

void WarpBounds::validate() const {
  if (!(a_min > 0.0 && a_min < a_max && std::isfinite(a_max))) {
    throw InvalidInput("warp bounds need 0 < a_min < a_max");
  }
  if (!(b_min > 0.0 && b_min < b_max && std::isfinite(b_max))) {
    throw InvalidInput("warp bounds need 0 < b_min < b_max");
  }
}

WarpBox warp_box(const Dataset& dataset, const WarpBounds& bounds) {
  bounds.validate();
  const double log_s = std::log(response_sd(dataset.responses));
  return {std::log(bounds.a_min) + log_s, std::log(bounds.a_max) + log_s, std::log(bounds.b_min) - log_s,
          std::log(bounds.b_max) - log_s};
}

ParameterLayout::ParameterLayout(const ModelSpec& spec, Eigen::Index dim, std::optional<WarpBox> box)
    : num_lengthscales_(spec.kernel.num_lengthscales(dim)),
      terms_(spec.warp.has_params() ? spec.warp.terms() : 0),
      box_(box) {}

Eigen::VectorXd ParameterLayout::encode(const Hyperparams& hp) const {
  Eigen::VectorXd theta(size());
  theta[0] = std::log(hp.kernel.variance);
  theta.segment(lengthscale_offset(), num_lengthscales_) = hp.kernel.lengthscales.array().log();
  theta[noise_offset()] = std::log(hp.noise_variance);
  for (Eigen::Index i = 0; i < terms_; ++i) {
    const double la = std::log(hp.warp.a[i]);
    const double lb = std::log(hp.warp.b[i]);
    theta[warp_offset() + i] = box_ ? box_encode(la, box_->log_a_lo, box_->log_a_hi) : la;
    theta[warp_offset() + terms_ + i] = box_ ? box_encode(lb, box_->log_b_lo, box_->log_b_hi) : lb;
    theta[warp_offset() + 2 * terms_ + i] = hp.warp.c[i];
  }
  return theta;
}

Hyperparams ParameterLayout::decode(const Eigen::VectorXd& theta) const {
  if (theta.size() != size()) throw InvalidInput("parameter vector has the wrong size");
  Hyperparams hp;
  hp.kernel.variance = std::exp(theta[0]);
  hp.kernel.lengthscales = theta.segment(lengthscale_offset(), num_lengthscales_).array().exp();
  hp.noise_variance = std::exp(theta[noise_offset()]);
  if (terms_ > 0) {
    hp.warp.a.resize(terms_);
    hp.warp.b.resize(terms_);
    hp.warp.c = theta.segment(warp_offset() + 2 * terms_, terms_);
    for (Eigen::Index i = 0; i < terms_; ++i) {
      const double ua = theta[warp_offset() + i];
      const double ub = theta[warp_offset() + terms_ + i];
      if (box_) {
        hp.warp.a[i] = std::exp(box_->log_a_lo + (box_->log_a_hi - box_->log_a_lo) * sigmoid(ua));
        hp.warp.b[i] = std::exp(box_->log_b_lo + (box_->log_b_hi - box_->log_b_lo) * sigmoid(ub));
      } else {
        hp.warp.a[i] = std::exp(ua);
        hp.warp.b[i] = std::exp(ub);
      }
    }
  }
  return hp;
}

Eigen::VectorXd ParameterLayout::encode_gradient(const NllGradient& g, const Hyperparams& hp) const {
  // ∂/∂ log θ = θ ∂/∂θ for the positive parameters.
  Eigen::VectorXd out(size());
  out[0] = g.d_variance * hp.kernel.variance;
  out.segment(lengthscale_offset(), num_lengthscales_) =
      g.d_lengthscales.cwiseProduct(hp.kernel.lengthscales);
  out[noise_offset()] = g.d_noise_variance * hp.noise_variance;
  for (Eigen::Index i = 0; i < terms_; ++i) {
    double da = g.d_warp[i] * hp.warp.a[i];
    double db = g.d_warp[terms_ + i] * hp.warp.b[i];
    if (box_) {
      // d log v / du = (hi - lo) t (1 - t) with t = sigmoid(u).
      const double wa = box_->log_a_hi - box_->log_a_lo;
      const double wb = box_->log_b_hi - box_->log_b_lo;
      const double ta = (std::log(hp.warp.a[i]) - box_->log_a_lo) / wa;
      const double tb = (std::log(hp.warp.b[i]) - box_->log_b_lo) / wb;
      da *= wa * ta * (1.0 - ta);
      db *= wb * tb * (1.0 - tb);
    }
    out[warp_offset() + i] = da;
    out[warp_offset() + terms_ + i] = db;
    out[warp_offset() + 2 * terms_ + i] = g.d_warp[2 * terms_ + i];
  }
  return out;
}

Hyperparams random_initialization(const Dataset& dataset, const ModelSpec& spec,
                                  std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const auto uniform = [&](double lo, double hi) { return lo + (hi - lo) * unit(rng); };
  const Eigen::VectorXd& y = dataset.responses;
  const double n = static_cast<double>(y.size());
  const double y_mean = y.mean();
  const double y_var = (y.array() - y_mean).square().sum() / std::max(1.0, n - 1.0);

  Hyperparams hp;
  if (spec.warp.has_params()) {
    const Eigen::Index I = spec.warp.terms();
    hp.warp.a.resize(I);
    hp.warp.b.resize(I);
    hp.warp.c.resize(I);
    std::normal_distribution<double> centre(-y_mean, std::sqrt(std::max(y_var, 1e-12)));
    const double sd = response_sd(y);
    for (Eigen::Index i = 0; i < I; ++i) {
      hp.warp.a[i] = sd * std::exp(uniform(-2.0, 0.0));
      hp.warp.b[i] = std::exp(uniform(-2.0, 0.0)) / sd;
      hp.warp.c[i] = centre(rng);
    }
  }

  Eigen::VectorXd z(y.size());
  for (Eigen::Index i = 0; i < y.size(); ++i) z[i] = warp(spec.warp, hp.warp, y[i]);
  const double z_var = (z.array() - z.mean()).square().sum() / std::max(1.0, n - 1.0);
  const double log_scale = std::log(std::max(z_var, 1e-12));

  hp.kernel.variance = std::exp(log_scale + uniform(-2.0, 1.0));
  const Eigen::Index nl = spec.kernel.num_lengthscales(dataset.dim());
  hp.kernel.lengthscales.resize(nl);
  for (Eigen::Index i = 0; i < nl; ++i) hp.kernel.lengthscales[i] = std::exp(uniform(-1.0, 2.0));
  hp.noise_variance = std::exp(log_scale + uniform(-2.0, 1.0));
  return hp;
}

OptimizeReport minimize_nll(const Dataset& dataset, const ModelSpec& spec,
                            const OptimizeConfig& config) {
  config.validate();
  dataset.validate();
  const auto count = static_cast<std::size_t>(config.restarts);
  std::vector<RestartResult> runs(count);

  const auto work = [&](std::size_t i) {
    std::mt19937_64 rng = restart_rng(config.seed, i);
    try {
      const Hyperparams init = random_initialization(dataset, spec, rng);
      runs[i] = run_once(dataset, spec, init, config, false);
    } catch (const Error& e) {
      runs[i].failed = true;
      runs[i].error = e.what();
      runs[i].nll = std::numeric_limits<double>::infinity();
    }
  };

  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(config.threads), count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) work(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < workers; ++t) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < count; i = next++) work(i);
      });
    }
    for (auto& th : pool) th.join();
  }
  return merge(std::move(runs));
}

OptimizeReport minimize_nll_from(const Dataset& dataset, const ModelSpec& spec,
                                 const Hyperparams& initial, const OptimizeConfig& config,
                                 bool lengthscales_only) {
  config.validate();
  dataset.validate();
  initial.validate(spec, dataset.dim());
  std::vector<RestartResult> runs;
  runs.push_back(run_once(dataset, spec, initial, config, lengthscales_only));
  return merge(std::move(runs));
}

TwoPassResult two_pass_fit(const Dataset& dataset, KernelFamily family, const WarpSpec& warp,
                           const OptimizeConfig& config) {
  const ModelSpec iso{KernelSpec(family, LengthscaleMode::Isotropic), warp};
  OptimizeReport first = minimize_nll(dataset, iso, config);

  const ModelSpec ard{KernelSpec(family, LengthscaleMode::ARD), warp};
  Hyperparams start = first.best;
  start.kernel.lengthscales =
      Eigen::VectorXd::Constant(dataset.dim(), first.best.kernel.lengthscales[0]);
  OptimizeReport second =
      minimize_nll_from(dataset, ard, start, config, config.pass2_lengthscales_only);

  TrainedModel model = fit_cache(dataset, ard, second.best);
  return TwoPassResult{std::move(model), std::move(first), std::move(second)};
}

}  // namespace wgp
