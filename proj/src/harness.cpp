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

#include "wgp/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstring>
#include <limits>
#include <numeric>
#include <random>
#include <thread>

#include "wgp/error.hpp"
#include "wgp/predictive.hpp"

namespace wgp {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

class Fnv1a {
 public:
  void add(const double* data, std::size_t count) {
    const auto* bytes = reinterpret_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < count * sizeof(double); ++i) {
      hash_ ^= bytes[i];
      hash_ *= 0x100000001b3ULL;
    }
  }
  void add(double v) { add(&v, 1); }
  void add(const Eigen::VectorXd& v) { add(v.data(), static_cast<std::size_t>(v.size())); }
  std::uint64_t value() const { return hash_; }

 private:
  std::uint64_t hash_ = 0xcbf29ce484222325ULL;
};

template <typename Fn>
void parallel_for(std::size_t count, int threads, Fn&& fn) {
  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(std::max(threads, 1)), count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < workers; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

double mean_of(const std::vector<double>& v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

}  // namespace

std::vector<std::vector<std::size_t>> kfold_split(std::size_t n, std::size_t k, std::uint64_t seed) {
  if (k == 0) throw InvalidInput("number of folds must be positive");
  if (k > n) {
    throw InvalidInput("cannot split " + std::to_string(n) + " instances into " + std::to_string(k) +
                       " folds");
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(seed);
  // Fisher-Yates with an explicit index draw so the partition does not depend
  // on the standard library's shuffle.
  for (std::size_t i = n; i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng() % i);
    std::swap(order[i - 1], order[j]);
  }
  std::vector<std::vector<std::size_t>> folds(k);
  const std::size_t base = n / k;
  const std::size_t extra = n % k;
  std::size_t pos = 0;
  for (std::size_t f = 0; f < k; ++f) {
    // The last `extra` folds take one more instance.
    const std::size_t size = base + (f >= k - extra ? 1 : 0);
    folds[f].assign(order.begin() + static_cast<std::ptrdiff_t>(pos),
                    order.begin() + static_cast<std::ptrdiff_t>(pos + size));
    std::sort(folds[f].begin(), folds[f].end());
    pos += size;
  }
  return folds;
}

std::vector<std::size_t> complement(std::size_t n, const std::vector<std::size_t>& fold) {
  std::vector<bool> in_fold(n, false);
  for (std::size_t i : fold) in_fold.at(i) = true;
  std::vector<std::size_t> out;
  out.reserve(n - fold.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (!in_fold[i]) out.push_back(i);
  }
  return out;
}

Standardizer Standardizer::fit(const Eigen::MatrixXd& X) {
  Standardizer s;
  const double n = static_cast<double>(X.rows());
  s.mean = X.colwise().mean().transpose();
  s.scale.resize(X.cols());
  for (Eigen::Index j = 0; j < X.cols(); ++j) {
    const double var = (X.col(j).array() - s.mean[j]).square().sum() / std::max(1.0, n - 1.0);
    s.scale[j] = var > 0.0 ? std::sqrt(var) : 1.0;
  }
  return s;
}

Eigen::MatrixXd Standardizer::apply(const Eigen::MatrixXd& X) const {
  if (X.cols() != mean.size()) throw InvalidInput("standardizer dimension mismatch");
  return (X.rowwise() - mean.transpose()).array().rowwise() / scale.transpose().array();
}

std::size_t clamp_for_log_warp(Eigen::VectorXd& responses) {
  std::size_t count = 0;
  for (Eigen::Index i = 0; i < responses.size(); ++i) {
    if (responses[i] < kLogWarpFloor) {
      responses[i] = kLogWarpFloor;
      ++count;
    }
  }
  return count;
}

std::uint64_t model_fingerprint(const TrainedModel& model) {
  Fnv1a h;
  const Hyperparams& hp = model.hyperparams();
  h.add(hp.kernel.variance);
  h.add(hp.kernel.lengthscales);
  h.add(hp.noise_variance);
  h.add(hp.warp.a);
  h.add(hp.warp.b);
  h.add(hp.warp.c);
  const Eigen::MatrixXd& L = model.cholesky_factor();
  h.add(L.data(), static_cast<std::size_t>(L.size()));
  h.add(model.weight_vector());
  return h.value();
}

Dataset generate_synthetic(std::size_t n, std::size_t dim, const ModelSpec& spec,
                           const Hyperparams& hp, std::uint64_t seed) {
  if (n < 2) throw InvalidInput("synthetic datasets need at least two rows");
  if (dim < 1) throw InvalidInput("synthetic datasets need at least one feature");
  hp.kernel.validate(spec.kernel, static_cast<Eigen::Index>(dim));
  if (!(hp.noise_variance >= 0.0)) throw InvalidInput("noise variance must be non-negative");
  const Warp warp(spec.warp, hp.warp);

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uniform(-1.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);

  Dataset d;
  const auto rows = static_cast<Eigen::Index>(n);
  d.features.resize(rows, static_cast<Eigen::Index>(dim));
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < d.features.cols(); ++j) d.features(i, j) = uniform(rng);
  }
  Eigen::VectorXd eps(rows);
  for (Eigen::Index i = 0; i < rows; ++i) eps[i] = normal(rng);
  Eigen::VectorXd noise(rows);
  for (Eigen::Index i = 0; i < rows; ++i) noise[i] = normal(rng);

  Eigen::MatrixXd L;
  jittered_cholesky(gram_matrix(spec.kernel, hp.kernel, d.features), L);
  const Eigen::VectorXd latent = L.triangularView<Eigen::Lower>() * eps + std::sqrt(hp.noise_variance) * noise;
  d.responses.resize(rows);
  for (Eigen::Index i = 0; i < rows; ++i) d.responses[i] = warp.inverse(latent[i]);
  return d;
}

std::string ModelConfig::name() const { return warp.name() + "-" + to_string(kernel); }

std::vector<ModelConfig> ExperimentConfig::models() const {
  std::vector<ModelConfig> out;
  for (const WarpSpec& w : warps) {
    for (KernelFamily k : kernels) out.push_back({k, w});
  }
  return out;
}

void ExperimentConfig::validate() const {
  if (folds < 2) throw InvalidInput("need at least 2 folds");
  if (kernels.empty()) throw InvalidInput("kernel list is empty");
  if (warps.empty()) throw InvalidInput("warp list is empty");
  for (const WarpSpec& w : warps) {
    if (w.family() == WarpFamily::TanhSum && (w.terms() < 1 || w.terms() > 3)) {
      throw InvalidInput("tanh warps support 1 to 3 terms");
    }
  }
  if (al_weights.empty() || linex_weights.empty()) throw InvalidInput("weight lists must be nonempty");
  for (double w : al_weights) {
    if (!(w > 0.0) || !std::isfinite(w)) throw InvalidInput("AL weights must be positive");
  }
  for (double w : linex_weights) {
    if (w == 0.0 || !std::isfinite(w)) throw InvalidInput("linex weights must be nonzero");
  }
  if (quad_order < 1) throw InvalidInput("quadrature order must be positive");
  if (threads < 1) throw InvalidInput("threads must be at least 1");
  if (!(max_failed_fraction >= 0.0 && max_failed_fraction <= 1.0)) {
    throw InvalidInput("failure fraction must lie in [0, 1]");
  }
  optimizer.validate();
}

FoldResult run_fold(const Dataset& dataset, const ModelConfig& model,
                    const std::vector<std::size_t>& test_indices, std::size_t fold,
                    const ExperimentConfig& config) {
  FoldResult r;
  r.fold = fold;
  r.test_indices = test_indices;
  try {
    const std::size_t n = static_cast<std::size_t>(dataset.size());
    Dataset train = dataset.subset(complement(n, test_indices));
    Dataset test = dataset.subset(test_indices);
    r.standardizer = Standardizer::fit(train.features);
    train.features = r.standardizer.apply(train.features);
    test.features = r.standardizer.apply(test.features);
    if (model.warp.family() == WarpFamily::Log) r.clamped_labels = clamp_for_log_warp(train.responses);

    OptimizeConfig opt = config.optimizer;
    opt.seed = splitmix64(config.seed ^ splitmix64(fold + 1));
    const TwoPassResult fit = two_pass_fit(train, model.kernel, model.warp, opt);
    const TrainedModel& trained = fit.model;
    r.hyperparams = trained.hyperparams();
    r.train_nll = fit.ard.best_nll;
    r.isotropic_converged = fit.isotropic.restarts[fit.isotropic.best_restart].converged;
    r.ard_converged = fit.ard.restarts[fit.ard.best_restart].converged;
    r.model_fingerprint = model_fingerprint(trained);

    const QuadratureRule rule = gauss_hermite(config.quad_order);
    std::vector<PredictiveDistribution> dists;
    dists.reserve(test_indices.size());
    for (std::size_t k = 0; k < test_indices.size(); ++k) {
      const auto row = static_cast<Eigen::Index>(k);
      dists.push_back(predictive_distribution(trained, test.features.row(row).transpose()));
      const PredictiveDistribution& dist = dists.back();
      const Moments m = mean_and_variance(dist, rule);
      InstancePrediction p{};
      p.index = test_indices[k];
      p.label = test.responses[row];
      p.latent_mean = dist.latent().mean;
      p.latent_variance = dist.latent().variance;
      p.median = median(dist);
      p.mean = m.mean;
      p.variance = m.variance;
      p.log_density = log_density(dist, p.label);
      p.quadrature_error = config.debug_quadrature ? moment_error_estimate(dist, rule)
                                                   : std::numeric_limits<double>::quiet_NaN();
      r.instances.push_back(p);
      r.eval.labels.push_back(p.label);
      r.eval.predictions.push_back(p.median);
      r.eval.log_densities.push_back(p.log_density);
    }
    r.eval.compute_intrinsic();
    if (r.eval.support_violation) {
      try {
        nlpd(r.eval.log_densities);
      } catch (const SupportViolation& e) {
        throw SupportViolation(model.name() + " fold " + std::to_string(fold) + ": " + e.what(),
                               e.indices());
      }
    }

    // Bayes estimators reuse the fitted model; no refitting per weight.
    std::vector<double> estimates(dists.size());
    for (double w : config.al_weights) {
      for (std::size_t k = 0; k < dists.size(); ++k) estimates[k] = bayes_estimate_al(dists[k], w);
      r.eval.al.push_back({w, al_loss(estimates, r.eval.labels, w), false});
      r.estimator_fingerprints.push_back(model_fingerprint(trained));
    }
    for (double w : config.linex_weights) {
      for (std::size_t k = 0; k < dists.size(); ++k) {
        estimates[k] = bayes_estimate_linex(dists[k], w, rule);
      }
      WeightedLoss loss{w, 0.0, false};
      try {
        loss.value = linex_loss(estimates, r.eval.labels, w);
      } catch (const LossOverflow&) {
        loss.value = std::numeric_limits<double>::infinity();
        loss.diverged = true;
      }
      r.eval.linex.push_back(loss);
      r.estimator_fingerprints.push_back(model_fingerprint(trained));
    }
  } catch (const Error& e) {
    r.failed = true;
    r.error = e.what();
  }
  return r;
}

ExperimentReport run_experiment(const Dataset& dataset, const ExperimentConfig& config) {
  config.validate();
  dataset.validate(static_cast<Eigen::Index>(config.folds));

  ExperimentReport report;
  report.config = config;
  report.partition = kfold_split(static_cast<std::size_t>(dataset.size()), config.folds, config.seed);

  const std::vector<ModelConfig> models = config.models();
  const std::size_t k = config.folds;
  std::vector<FoldResult> cells(models.size() * k);
  // One optimizer thread per cell when cells run concurrently.
  ExperimentConfig cell_config = config;
  if (config.threads > 1) cell_config.optimizer.threads = 1;
  parallel_for(cells.size(), config.threads, [&](std::size_t c) {
    const std::size_t m = c / k;
    const std::size_t f = c % k;
    cells[c] = run_fold(dataset, models[m], report.partition[f], f, cell_config);
  });

  report.total_cells = cells.size();
  for (std::size_t m = 0; m < models.size(); ++m) {
    ModelResult mr;
    mr.model = models[m];
    std::vector<double> nll, nlpd_v, mae_v, r_v;
    std::vector<std::vector<double>> al(config.al_weights.size()), lx(config.linex_weights.size());
    std::vector<bool> lx_div(config.linex_weights.size(), false);
    for (std::size_t f = 0; f < k; ++f) {
      FoldResult& fr = cells[m * k + f];
      if (fr.failed) {
        ++mr.failed_folds;
      } else {
        nll.push_back(fr.train_nll);
        nlpd_v.push_back(fr.eval.nlpd);
        mae_v.push_back(fr.eval.mae);
        r_v.push_back(fr.eval.pearson_r);
        for (std::size_t w = 0; w < al.size(); ++w) al[w].push_back(fr.eval.al[w].value);
        for (std::size_t w = 0; w < lx.size(); ++w) {
          lx[w].push_back(fr.eval.linex[w].value);
          if (fr.eval.linex[w].diverged) lx_div[w] = true;
        }
      }
      mr.folds.push_back(std::move(fr));
    }
    mr.aggregate.nll = mean_of(nll);
    mr.aggregate.nlpd = mean_of(nlpd_v);
    mr.aggregate.mae = mean_of(mae_v);
    mr.aggregate.pearson_r = mean_of(r_v);
    for (std::size_t w = 0; w < al.size(); ++w) {
      mr.aggregate.al.push_back({config.al_weights[w], mean_of(al[w]), false});
    }
    for (std::size_t w = 0; w < lx.size(); ++w) {
      mr.aggregate.linex.push_back({config.linex_weights[w], mean_of(lx[w]), lx_div[w]});
    }
    report.failed_cells += mr.failed_folds;
    report.models.push_back(std::move(mr));
  }
  return report;
}

ExperimentReport run_experiment(const ExperimentConfig& config) {
  const Dataset dataset = load_dataset(config.features_path, config.labels_path, config.lengths_path);
  return run_experiment(dataset, config);
}

}  // namespace wgp
