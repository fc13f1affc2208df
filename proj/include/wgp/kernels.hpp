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
#include <vector>

#include <Eigen/Dense>

namespace wgp {

enum class KernelFamily { EQ, Matern32, Matern52 };
enum class LengthscaleMode { Isotropic, ARD };

const char* to_string(KernelFamily family);
KernelFamily parse_kernel_family(const std::string& name);

class KernelSpec {
 public:
  KernelSpec(KernelFamily family, LengthscaleMode mode) : family_(family), mode_(mode) {}

  KernelFamily family() const { return family_; }
  LengthscaleMode lengthscale_mode() const { return mode_; }
  bool ard() const { return mode_ == LengthscaleMode::ARD; }

  /// Number of lengthscales for inputs of dimension `dim`.
  Eigen::Index num_lengthscales(Eigen::Index dim) const { return ard() ? dim : 1; }

 private:
  KernelFamily family_;
  LengthscaleMode mode_;
};

struct KernelParams {
  double variance = 1.0;
  Eigen::VectorXd lengthscales = Eigen::VectorXd::Ones(1);

  /// Throws InvalidInput unless variance and lengthscales are positive and the
  /// lengthscale count matches the lengthscale mode for inputs of dimension `dim`.
  void validate(const KernelSpec& spec, Eigen::Index dim) const;
};

/// Value of a unit-variance stationary kernel and its derivative with respect
/// to the scaled squared distance r².
struct RadialProfile {
  double value;
  double d_r2;
};

RadialProfile radial_profile(KernelFamily family, double r2);

double scaled_sq_distance(const Eigen::Ref<const Eigen::VectorXd>& x,
                          const Eigen::Ref<const Eigen::VectorXd>& x_prime,
                          const KernelParams& params);

double kernel_eval(const KernelSpec& spec, const KernelParams& params,
                   const Eigen::Ref<const Eigen::VectorXd>& x,
                   const Eigen::Ref<const Eigen::VectorXd>& x_prime);

/// Scaled squared distances between the rows of `X`; the diagonal is exactly zero.
Eigen::MatrixXd scaled_sq_distances(const KernelParams& params, const Eigen::MatrixXd& X);

/// Covariance between every row of `X` (n×D). No jitter is added.
Eigen::MatrixXd gram_matrix(const KernelSpec& spec, const KernelParams& params,
                            const Eigen::MatrixXd& X);

/// Covariance between rows of `A` (n×D) and rows of `B` (m×D).
Eigen::MatrixXd cross_covariance(const KernelSpec& spec, const KernelParams& params,
                                 const Eigen::MatrixXd& A, const Eigen::MatrixXd& B);

/// Partial derivatives of the Gram matrix. Element 0 is ∂K/∂σ_v, element 1+i
/// is ∂K/∂l_i. Coincident points have zero lengthscale derivative.
std::vector<Eigen::MatrixXd> gram_gradients(const KernelSpec& spec, const KernelParams& params,
                                            const Eigen::MatrixXd& X);

}  // namespace wgp
