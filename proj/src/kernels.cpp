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

#include "wgp/kernels.hpp"

#include <cmath>

#include "wgp/error.hpp"

namespace wgp {

namespace {

constexpr double kSqrt3 = 1.7320508075688772935274463415059;
constexpr double kSqrt5 = 2.2360679774997896964091736687313;

void check_dims(Eigen::Index a, Eigen::Index b, Eigen::Index nl) {
  if (a != b) {
    throw InvalidInput("kernel inputs have different dimensions (" + std::to_string(a) + " vs " +
                       std::to_string(b) + ")");
  }
  if (nl != 1 && nl != a) {
    throw InvalidInput("lengthscale vector of size " + std::to_string(nl) +
                       " does not broadcast to dimension " + std::to_string(a));
  }
}

// Scaled squared distance plus the per-dimension terms (x_i - x'_i)² / l_i².
template <typename A, typename B>
double sq_dist_unchecked(const A& x, const B& y, const Eigen::VectorXd& l) {
  double r2 = 0.0;
  if (l.size() == 1) {
    const double inv = 1.0 / (l[0] * l[0]);
    for (Eigen::Index d = 0; d < x.size(); ++d) {
      const double diff = x[d] - y[d];
      r2 += diff * diff;
    }
    return r2 * inv;
  }
  for (Eigen::Index d = 0; d < x.size(); ++d) {
    const double diff = (x[d] - y[d]) / l[d];
    r2 += diff * diff;
  }
  return r2;
}

// Points as columns, divided by their lengthscales.
Eigen::MatrixXd scaled_columns(const Eigen::MatrixXd& X, const Eigen::VectorXd& l) {
  Eigen::MatrixXd S = X.transpose();
  if (l.size() == 1) {
    S /= l[0];
  } else {
    S.array().colwise() /= l.array();
  }
  return S;
}

}  // namespace

const char* to_string(KernelFamily family) {
  switch (family) {
    case KernelFamily::EQ:
      return "eq";
    case KernelFamily::Matern32:
      return "matern32";
    case KernelFamily::Matern52:
      return "matern52";
  }
  return "unknown";
}

KernelFamily parse_kernel_family(const std::string& name) {
  if (name == "eq") return KernelFamily::EQ;
  if (name == "matern32") return KernelFamily::Matern32;
  if (name == "matern52") return KernelFamily::Matern52;
  throw InvalidInput("unknown kernel '" + name + "' (expected eq, matern32 or matern52)");
}

void KernelParams::validate(const KernelSpec& spec, Eigen::Index dim) const {
  if (!(variance > 0.0) || !std::isfinite(variance)) {
    throw InvalidInput("kernel variance must be positive and finite");
  }
  if (lengthscales.size() != spec.num_lengthscales(dim)) {
    throw InvalidInput("expected " + std::to_string(spec.num_lengthscales(dim)) +
                       " lengthscales, got " + std::to_string(lengthscales.size()));
  }
  for (Eigen::Index i = 0; i < lengthscales.size(); ++i) {
    if (!(lengthscales[i] > 0.0) || !std::isfinite(lengthscales[i])) {
      throw InvalidInput("lengthscales must be positive and finite");
    }
  }
}

RadialProfile radial_profile(KernelFamily family, double r2) {
  switch (family) {
    case KernelFamily::EQ: {
      const double k = std::exp(-0.5 * r2);
      return {k, -0.5 * k};
    }
    case KernelFamily::Matern32: {
      const double s = std::sqrt(3.0 * r2);
      const double e = std::exp(-s);
      // d/dr² of (1+s)e^{-s} with s = sqrt(3 r²) is -1.5 e^{-s}, finite at r² = 0.
      return {(1.0 + s) * e, -1.5 * e};
    }
    case KernelFamily::Matern52: {
      const double s = std::sqrt(5.0 * r2);
      const double e = std::exp(-s);
      return {(1.0 + s + 5.0 * r2 / 3.0) * e, -(5.0 / 6.0) * (1.0 + s) * e};
    }
  }
  return {0.0, 0.0};
}

double scaled_sq_distance(const Eigen::Ref<const Eigen::VectorXd>& x,
                          const Eigen::Ref<const Eigen::VectorXd>& x_prime,
                          const KernelParams& params) {
  check_dims(x.size(), x_prime.size(), params.lengthscales.size());
  return sq_dist_unchecked(x, x_prime, params.lengthscales);
}

double kernel_eval(const KernelSpec& spec, const KernelParams& params,
                   const Eigen::Ref<const Eigen::VectorXd>& x,
                   const Eigen::Ref<const Eigen::VectorXd>& x_prime) {
  return params.variance * radial_profile(spec.family(), scaled_sq_distance(x, x_prime, params)).value;
}

Eigen::MatrixXd scaled_sq_distances(const KernelParams& params, const Eigen::MatrixXd& X) {
  check_dims(X.cols(), X.cols(), params.lengthscales.size());
  const Eigen::Index n = X.rows();
  const Eigen::MatrixXd S = scaled_columns(X, params.lengthscales);
  Eigen::MatrixXd R2(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    R2(j, j) = 0.0;
    for (Eigen::Index i = j + 1; i < n; ++i) {
      const double r2 = (S.col(i) - S.col(j)).squaredNorm();
      R2(i, j) = r2;
      R2(j, i) = r2;
    }
  }
  return R2;
}

Eigen::MatrixXd gram_matrix(const KernelSpec& spec, const KernelParams& params,
                            const Eigen::MatrixXd& X) {
  Eigen::MatrixXd K = scaled_sq_distances(params, X);
  const Eigen::Index n = X.rows();
  for (Eigen::Index j = 0; j < n; ++j) {
    K(j, j) = params.variance;
    for (Eigen::Index i = j + 1; i < n; ++i) {
      const double k = params.variance * radial_profile(spec.family(), K(i, j)).value;
      K(i, j) = k;
      K(j, i) = k;
    }
  }
  return K;
}

Eigen::MatrixXd cross_covariance(const KernelSpec& spec, const KernelParams& params,
                                 const Eigen::MatrixXd& A, const Eigen::MatrixXd& B) {
  check_dims(A.cols(), B.cols(), params.lengthscales.size());
  const Eigen::MatrixXd SA = scaled_columns(A, params.lengthscales);
  const Eigen::MatrixXd SB = scaled_columns(B, params.lengthscales);
  Eigen::MatrixXd K(A.rows(), B.rows());
  for (Eigen::Index j = 0; j < B.rows(); ++j) {
    for (Eigen::Index i = 0; i < A.rows(); ++i) {
      const double r2 = (SA.col(i) - SB.col(j)).squaredNorm();
      K(i, j) = params.variance * radial_profile(spec.family(), r2).value;
    }
  }
  return K;
}

std::vector<Eigen::MatrixXd> gram_gradients(const KernelSpec& spec, const KernelParams& params,
                                            const Eigen::MatrixXd& X) {
  check_dims(X.cols(), X.cols(), params.lengthscales.size());
  const Eigen::Index n = X.rows();
  const Eigen::Index D = X.cols();
  const Eigen::Index nl = params.lengthscales.size();
  const Eigen::VectorXd& l = params.lengthscales;

  std::vector<Eigen::MatrixXd> grads(1 + nl, Eigen::MatrixXd::Zero(n, n));
  for (Eigen::Index j = 0; j < n; ++j) {
    grads[0](j, j) = 1.0;
    for (Eigen::Index i = j + 1; i < n; ++i) {
      const double r2 = sq_dist_unchecked(X.row(i), X.row(j), l);
      const RadialProfile p = radial_profile(spec.family(), r2);
      grads[0](i, j) = grads[0](j, i) = p.value;
      // ∂r²/∂l_d = -2 (x_d - x'_d)² / l_d³, so coincident points give exactly zero.
      const double scale = params.variance * p.d_r2;
      if (nl == 1) {
        const double g = scale * (-2.0 * r2 / l[0]);
        grads[1](i, j) = grads[1](j, i) = g;
      } else {
        for (Eigen::Index d = 0; d < D; ++d) {
          const double diff = X(i, d) - X(j, d);
          const double g = scale * (-2.0 * diff * diff / (l[d] * l[d] * l[d]));
          grads[1 + d](i, j) = grads[1 + d](j, i) = g;
        }
      }
    }
  }
  return grads;
}

}  // namespace wgp
