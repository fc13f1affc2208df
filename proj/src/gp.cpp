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

#include "wgp/gp.hpp"

#include <cmath>

#include "wgp/error.hpp"

namespace wgp {

namespace {

constexpr double kLog2Pi = 1.8378770664093454835606594728112;

Eigen::VectorXd warp_responses(const ModelSpec& spec, const Hyperparams& hp,
                               const Eigen::VectorXd& y) {
  Eigen::VectorXd z(y.size());
  for (Eigen::Index i = 0; i < y.size(); ++i) z[i] = warp(spec.warp, hp.warp, y[i]);
  return z;
}

double log_jacobian(const ModelSpec& spec, const Hyperparams& hp, const Eigen::VectorXd& y) {
  if (spec.warp.family() == WarpFamily::Identity) return 0.0;
  double s = 0.0;
  for (Eigen::Index i = 0; i < y.size(); ++i) s += std::log(warp_deriv(spec.warp, hp.warp, y[i]));
  return s;
}

bool try_cholesky(const Eigen::MatrixXd& A, double jitter, Eigen::MatrixXd& L) {
  Eigen::LLT<Eigen::MatrixXd> llt(A.rows());
  if (jitter > 0.0) {
    Eigen::MatrixXd B = A;
    B.diagonal().array() += jitter;
    llt.compute(B);
  } else {
    llt.compute(A);
  }
  if (llt.info() != Eigen::Success) return false;
  L = llt.matrixL();
  const auto diag = L.diagonal();
  return diag.allFinite() && (diag.array() > 0.0).all();
}

struct Factorization {
  Eigen::VectorXd z;
  Eigen::MatrixXd K;  // kernel Gram matrix without noise
  Eigen::MatrixXd L;
  Eigen::VectorXd alpha;
  double jitter = 0.0;
};

Factorization factorize(const Dataset& data, const ModelSpec& spec, const Hyperparams& hp) {
  data.validate(1);
  hp.validate(spec, data.dim());
  Factorization f;
  f.z = warp_responses(spec, hp, data.responses);
  f.K = gram_matrix(spec.kernel, hp.kernel, data.features);
  Eigen::MatrixXd Ky = f.K;
  Ky.diagonal().array() += hp.noise_variance;
  f.jitter = jittered_cholesky(Ky, f.L);
  f.alpha = f.L.triangularView<Eigen::Lower>().solve(f.z);
  f.L.triangularView<Eigen::Lower>().transpose().solveInPlace(f.alpha);
  return f;
}

double nll_from(const Factorization& f, const ModelSpec& spec, const Hyperparams& hp,
                const Eigen::VectorXd& y) {
  const double n = static_cast<double>(f.z.size());
  return 0.5 * f.z.dot(f.alpha) + f.L.diagonal().array().log().sum() + 0.5 * n * kLog2Pi -
         log_jacobian(spec, hp, y);
}

}  // namespace

void Dataset::validate(Eigen::Index min_rows) const {
  if (features.rows() != responses.size()) {
    throw InvalidInput("dataset has " + std::to_string(features.rows()) + " feature rows but " +
                       std::to_string(responses.size()) + " responses");
  }
  if (features.rows() < min_rows) {
    throw InvalidInput("dataset needs at least " + std::to_string(min_rows) + " rows");
  }
  if (!features.allFinite()) throw InvalidInput("dataset features contain non-finite values");
  if (!responses.allFinite()) throw InvalidInput("dataset responses contain non-finite values");
}

Dataset Dataset::subset(const std::vector<std::size_t>& indices) const {
  Dataset out;
  out.features.resize(static_cast<Eigen::Index>(indices.size()), features.cols());
  out.responses.resize(static_cast<Eigen::Index>(indices.size()));
  for (std::size_t k = 0; k < indices.size(); ++k) {
    const auto i = static_cast<Eigen::Index>(indices[k]);
    out.features.row(static_cast<Eigen::Index>(k)) = features.row(i);
    out.responses[static_cast<Eigen::Index>(k)] = responses[i];
  }
  return out;
}

void Hyperparams::validate(const ModelSpec& spec, Eigen::Index dim) const {
  kernel.validate(spec.kernel, dim);
  if (!(noise_variance > 0.0) || !std::isfinite(noise_variance)) {
    throw InvalidInput("noise variance must be positive and finite");
  }
  warp.validate(spec.warp);
}

double jittered_cholesky(const Eigen::MatrixXd& A, Eigen::MatrixXd& L) {
  if (try_cholesky(A, 0.0, L)) return 0.0;
  const double mean_diag = A.diagonal().mean();
  for (double rel = 1e-10; rel <= 1e-4 * (1.0 + 1e-9); rel *= 10.0) {
    if (try_cholesky(A, rel * mean_diag, L)) return rel * mean_diag;
  }
  throw IllConditionedModel("covariance matrix is not positive definite even with jitter " +
                            std::to_string(1e-4 * mean_diag));
}

TrainedModel::TrainedModel(Dataset dataset, ModelSpec spec, Hyperparams hyperparams)
    : dataset_(std::move(dataset)), spec_(spec), hyperparams_(std::move(hyperparams)) {
  Factorization f = factorize(dataset_, spec_, hyperparams_);
  z_ = std::move(f.z);
  chol_ = std::move(f.L);
  alpha_ = std::move(f.alpha);
  jitter_ = f.jitter;
}

LatentPredictive TrainedModel::predict_latent(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  if (x.size() != dataset_.dim()) {
    throw InvalidInput("test input has dimension " + std::to_string(x.size()) + ", model expects " +
                       std::to_string(dataset_.dim()));
  }
  const Eigen::VectorXd k_star =
      cross_covariance(spec_.kernel, hyperparams_.kernel, dataset_.features, x.transpose());
  const double mean = k_star.dot(alpha_);
  const Eigen::VectorXd v = chol_.triangularView<Eigen::Lower>().solve(k_star);
  // Latent variance is clipped at zero before the observation noise is added.
  const double latent = std::max(0.0, hyperparams_.kernel.variance - v.squaredNorm());
  return {mean, latent + hyperparams_.noise_variance};
}

TrainedModel fit_cache(const Dataset& dataset, const ModelSpec& spec, const Hyperparams& hp) {
  return TrainedModel(dataset, spec, hp);
}

double nll(const Dataset& dataset, const ModelSpec& spec, const Hyperparams& hp) {
  const Factorization f = factorize(dataset, spec, hp);
  return nll_from(f, spec, hp, dataset.responses);
}

NllGradient nll_gradients(const Dataset& dataset, const ModelSpec& spec, const Hyperparams& hp) {
  const Factorization f = factorize(dataset, spec, hp);
  const Eigen::Index n = dataset.size();
  const Eigen::Index D = dataset.dim();
  const Eigen::MatrixXd& X = dataset.features;
  const Eigen::VectorXd& l = hp.kernel.lengthscales;
  const Eigen::Index nl = l.size();

  NllGradient g;
  g.value = nll_from(f, spec, hp, dataset.responses);

  // M = (K + σ_n² I)^{-1} - α αᵀ; ∂NLL/∂θ = ½ tr(M ∂K/∂θ).
  Eigen::MatrixXd Linv = Eigen::MatrixXd::Identity(n, n);
  f.L.triangularView<Eigen::Lower>().solveInPlace(Linv);
  Eigen::MatrixXd M(n, n);
  M.noalias() = Linv.transpose() * Linv.triangularView<Eigen::Lower>();
  M.noalias() -= f.alpha * f.alpha.transpose();

  g.d_noise_variance = 0.5 * M.trace();
  g.d_variance = 0.5 * (M.array() * f.K.array()).sum() / hp.kernel.variance;

  // W_ij = M_ij ∂K_ij/∂r², strictly lower triangle. Off-diagonal pairs appear
  // twice in the trace, cancelling the ½.
  const Eigen::MatrixXd R2 = scaled_sq_distances(hp.kernel, X);
  Eigen::MatrixXd W = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = j + 1; i < n; ++i) {
      W(i, j) = M(i, j) * hp.kernel.variance * radial_profile(spec.kernel.family(), R2(i, j)).d_r2;
    }
  }

  // ∂r²/∂l_d = -2 (x_d - x'_d)² / l_d³.
  g.d_lengthscales = Eigen::VectorXd::Zero(nl);
  if (nl == 1) {
    g.d_lengthscales[0] = -2.0 * (W.array() * R2.array()).sum() / l[0];
  } else {
    for (Eigen::Index d = 0; d < D; ++d) {
      double acc = 0.0;
      for (Eigen::Index j = 0; j < n; ++j) {
        const double xj = X(j, d);
        for (Eigen::Index i = j + 1; i < n; ++i) {
          const double diff = X(i, d) - xj;
          acc += W(i, j) * diff * diff;
        }
      }
      g.d_lengthscales[d] = -2.0 * acc / (l[d] * l[d] * l[d]);
    }
  }

  if (spec.warp.has_params()) {
    const Eigen::Index P = 3 * spec.warp.terms();
    g.d_warp = Eigen::VectorXd::Zero(P);
    for (Eigen::Index i = 0; i < n; ++i) {
      const WarpParamGradients wg = warp_param_gradients(spec.warp, hp.warp, dataset.responses[i]);
      g.d_warp += f.alpha[i] * wg.d_value - wg.d_log_deriv;
    }
  }
  return g;
}

}  // namespace wgp
