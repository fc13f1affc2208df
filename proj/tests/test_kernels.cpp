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

#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "wgp/error.hpp"
#include "wgp/kernels.hpp"

namespace wgp {
namespace {

const KernelFamily kFamilies[] = {KernelFamily::EQ, KernelFamily::Matern32, KernelFamily::Matern52};

KernelParams params(double variance, std::initializer_list<double> ls) {
  KernelParams p;
  p.variance = variance;
  p.lengthscales = Eigen::VectorXd(static_cast<Eigen::Index>(ls.size()));
  Eigen::Index i = 0;
  for (double l : ls) p.lengthscales[i++] = l;
  return p;
}

TEST(ScaledSqDistance, Examples) {
  const Eigen::Vector2d x(1.0, 0.0);
  const Eigen::Vector2d o(0.0, 0.0);
  EXPECT_DOUBLE_EQ(scaled_sq_distance(x, x, params(1.0, {1.0, 1.0})), 0.0);
  EXPECT_DOUBLE_EQ(scaled_sq_distance(x, o, params(1.0, {1.0, 1.0})), 1.0);
  EXPECT_DOUBLE_EQ(scaled_sq_distance(Eigen::Vector2d(2.0, 2.0), o, params(1.0, {2.0, 1.0})), 5.0);
  EXPECT_DOUBLE_EQ(scaled_sq_distance(Eigen::Vector2d(2.0, 2.0), o, params(1.0, {2.0})), 2.0);
}

TEST(ScaledSqDistance, DimensionMismatchThrows) {
  EXPECT_THROW(scaled_sq_distance(Eigen::Vector2d(1, 2), Eigen::Vector3d(1, 2, 3), params(1.0, {1.0})),
               InvalidInput);
  EXPECT_THROW(scaled_sq_distance(Eigen::Vector3d(1, 2, 3), Eigen::Vector3d(1, 2, 3),
                                  params(1.0, {1.0, 1.0})),
               InvalidInput);
}

TEST(KernelEval, Examples) {
  const Eigen::Vector2d x(0.3, -0.7);
  for (KernelFamily f : kFamilies) {
    const KernelSpec spec(f, LengthscaleMode::Isotropic);
    EXPECT_DOUBLE_EQ(kernel_eval(spec, params(2.5, {0.7}), x, x), 2.5);
  }
  // r² = 2 with a unit lengthscale: points at distance √2.
  const Eigen::Vector2d a(0.0, 0.0);
  const Eigen::Vector2d b(1.0, 1.0);
  EXPECT_NEAR(kernel_eval(KernelSpec(KernelFamily::EQ, LengthscaleMode::Isotropic), params(1.0, {1.0}),
                          a, b),
              0.367879441171442321595523770161, 1e-15);
  // r² = 1; reference values from a 30-digit evaluation of the closed forms.
  const Eigen::Vector2d c(1.0, 0.0);
  EXPECT_NEAR(kernel_eval(KernelSpec(KernelFamily::Matern52, LengthscaleMode::Isotropic),
                          params(1.0, {1.0}), a, c),
              0.523994108831820310592713250761, 1e-15);
  EXPECT_NEAR(kernel_eval(KernelSpec(KernelFamily::Matern32, LengthscaleMode::Isotropic),
                          params(1.0, {1.0}), a, c),
              0.483357724596507650595075082258, 1e-15);
}

TEST(KernelEval, SymmetricBoundedAndDecaying) {
  std::mt19937_64 rng(7);
  for (KernelFamily f : kFamilies) {
    const KernelSpec spec(f, LengthscaleMode::ARD);
    const KernelParams p = params(1.7, {0.5, 1.3, 2.0});
    for (int t = 0; t < 200; ++t) {
      const Eigen::VectorXd x = testing::random_matrix(rng, 3, 1, -2, 2);
      const Eigen::VectorXd y = testing::random_matrix(rng, 3, 1, -2, 2);
      const double k = kernel_eval(spec, p, x, y);
      EXPECT_DOUBLE_EQ(k, kernel_eval(spec, p, y, x));
      EXPECT_GT(k, 0.0);
      EXPECT_LE(k, p.variance);
    }
    double prev = radial_profile(f, 0.0).value;
    for (double r2 = 0.01; r2 < 50.0; r2 += 0.01) {
      const double v = radial_profile(f, r2).value;
      EXPECT_LE(v, prev);
      prev = v;
    }
  }
}

TEST(KernelEval, ArdWithEqualLengthscalesMatchesIsotropic) {
  std::mt19937_64 rng(11);
  const Eigen::MatrixXd X = testing::random_matrix(rng, 8, 4);
  for (KernelFamily f : kFamilies) {
    const Eigen::MatrixXd iso =
        gram_matrix(KernelSpec(f, LengthscaleMode::Isotropic), params(1.3, {0.8}), X);
    const Eigen::MatrixXd ard =
        gram_matrix(KernelSpec(f, LengthscaleMode::ARD), params(1.3, {0.8, 0.8, 0.8, 0.8}), X);
    EXPECT_LT((iso - ard).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(GramMatrix, MatchesDoubleLoopAndIsSymmetric) {
  std::mt19937_64 rng(3);
  const Eigen::MatrixXd X = testing::random_matrix(rng, 5, 3);
  for (KernelFamily f : kFamilies) {
    const KernelSpec spec(f, LengthscaleMode::ARD);
    const KernelParams p = params(0.9, {0.4, 1.1, 2.2});
    const Eigen::MatrixXd K = gram_matrix(spec, p, X);
    for (Eigen::Index i = 0; i < 5; ++i) {
      EXPECT_DOUBLE_EQ(K(i, i), 0.9);
      for (Eigen::Index j = 0; j < 5; ++j) {
        EXPECT_NEAR(K(i, j), kernel_eval(spec, p, X.row(i).transpose(), X.row(j).transpose()), 1e-15);
        EXPECT_EQ(K(i, j), K(j, i));
      }
    }
  }
}

TEST(GramMatrix, SingleRowAndDuplicates) {
  const KernelSpec spec(KernelFamily::Matern32, LengthscaleMode::Isotropic);
  Eigen::MatrixXd one(1, 2);
  one << 0.4, 0.1;
  const Eigen::MatrixXd K1 = gram_matrix(spec, params(3.0, {1.0}), one);
  ASSERT_EQ(K1.rows(), 1);
  EXPECT_DOUBLE_EQ(K1(0, 0), 3.0);

  Eigen::MatrixXd dup(3, 2);
  dup << 0.4, 0.1, 0.9, -0.3, 0.4, 0.1;
  const Eigen::MatrixXd K = gram_matrix(spec, params(3.0, {1.0}), dup);
  EXPECT_DOUBLE_EQ(K(0, 2), 3.0);
}

TEST(GramMatrix, PositiveSemidefinite) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::Index n = 2 + trial % 19;
    const Eigen::MatrixXd X = testing::random_matrix(rng, n, 3);
    for (KernelFamily f : kFamilies) {
      const KernelParams p = params(1.5, {0.3 + 0.1 * trial});
      const Eigen::MatrixXd K = gram_matrix(KernelSpec(f, LengthscaleMode::Isotropic), p, X);
      const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(K);
      EXPECT_GE(eig.eigenvalues().minCoeff(), -1e-8 * p.variance);
    }
  }
}

TEST(GramGradients, VarianceDerivativeIsUnitVarianceGram) {
  std::mt19937_64 rng(9);
  const Eigen::MatrixXd X = testing::random_matrix(rng, 6, 2);
  for (KernelFamily f : kFamilies) {
    const KernelSpec spec(f, LengthscaleMode::ARD);
    const KernelParams p = params(1.0, {0.6, 1.4});
    const auto grads = gram_gradients(spec, p, X);
    ASSERT_EQ(grads.size(), 3u);
    EXPECT_LT((grads[0] - gram_matrix(spec, p, X)).cwiseAbs().maxCoeff(), 1e-15);
  }
}

TEST(GramGradients, CoincidentPointsHaveZeroLengthscaleDerivative) {
  Eigen::MatrixXd X(2, 2);
  X << 0.5, -0.5, 0.5, -0.5;
  for (KernelFamily f : kFamilies) {
    const auto grads = gram_gradients(KernelSpec(f, LengthscaleMode::ARD), params(2.0, {0.7, 1.9}), X);
    for (std::size_t k = 1; k < grads.size(); ++k) {
      EXPECT_TRUE(grads[k].allFinite());
      EXPECT_EQ(grads[k].cwiseAbs().maxCoeff(), 0.0);
    }
  }
}

TEST(GramGradients, MatchFiniteDifferences) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 10; ++trial) {
    const Eigen::MatrixXd X = testing::random_matrix(rng, 6, 3);
    for (KernelFamily f : kFamilies) {
      for (LengthscaleMode mode : {LengthscaleMode::Isotropic, LengthscaleMode::ARD}) {
        const KernelSpec spec(f, mode);
        KernelParams p;
        p.variance = std::exp(testing::random_matrix(rng, 1, 1)(0, 0));
        p.lengthscales = testing::random_matrix(rng, spec.num_lengthscales(3), 1, -0.5, 0.8)
                             .array()
                             .exp()
                             .matrix();
        const auto grads = gram_gradients(spec, p, X);
        for (std::size_t k = 0; k < grads.size(); ++k) {
          for (Eigen::Index i = 0; i < 6; ++i) {
            for (Eigen::Index j = 0; j < 6; ++j) {
              const auto entry = [&](double v) {
                KernelParams q = p;
                if (k == 0) {
                  q.variance = v;
                } else {
                  q.lengthscales[static_cast<Eigen::Index>(k) - 1] = v;
                }
                return kernel_eval(spec, q, X.row(i).transpose(), X.row(j).transpose());
              };
              const double at = k == 0 ? p.variance : p.lengthscales[static_cast<Eigen::Index>(k) - 1];
              const double fd = testing::central_difference(entry, at, 1e-5 * at);
              EXPECT_LT(testing::relative_error(grads[k](i, j), fd, 1e-6), 1e-5)
                  << to_string(f) << " param " << k << " entry " << i << "," << j;
            }
          }
        }
      }
    }
  }
}

TEST(KernelParams, Validation) {
  const KernelSpec iso(KernelFamily::EQ, LengthscaleMode::Isotropic);
  const KernelSpec ard(KernelFamily::EQ, LengthscaleMode::ARD);
  EXPECT_NO_THROW(params(1.0, {1.0}).validate(iso, 4));
  EXPECT_THROW(params(1.0, {1.0, 1.0}).validate(iso, 2), InvalidInput);
  EXPECT_THROW(params(1.0, {1.0}).validate(ard, 2), InvalidInput);
  EXPECT_THROW(params(0.0, {1.0}).validate(iso, 2), InvalidInput);
  EXPECT_THROW(params(1.0, {-1.0}).validate(iso, 2), InvalidInput);
}

}  // namespace
}  // namespace wgp
