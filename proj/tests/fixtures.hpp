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

#include <random>
#include <vector>

#include "oracles.hpp"
#include "wgp/gp.hpp"

namespace wgp::testing {

inline std::vector<ModelSpec> all_model_specs(LengthscaleMode mode) {
  std::vector<ModelSpec> out;
  for (KernelFamily k : {KernelFamily::EQ, KernelFamily::Matern32, KernelFamily::Matern52}) {
    for (const WarpSpec& w : {WarpSpec::identity(), WarpSpec::log(), WarpSpec::tanh_sum(1),
                              WarpSpec::tanh_sum(2), WarpSpec::tanh_sum(3)}) {
      out.push_back({KernelSpec(k, mode), w});
    }
  }
  return out;
}

inline Hyperparams random_hyperparams(std::mt19937_64& rng, const ModelSpec& spec, Eigen::Index dim) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  Hyperparams hp;
  hp.kernel.variance = std::exp(u(rng));
  hp.kernel.lengthscales.resize(spec.kernel.num_lengthscales(dim));
  for (Eigen::Index i = 0; i < hp.kernel.lengthscales.size(); ++i) {
    hp.kernel.lengthscales[i] = std::exp(0.5 * u(rng));
  }
  hp.noise_variance = std::exp(u(rng) - 1.5);
  if (spec.warp.has_params()) {
    const int I = spec.warp.terms();
    hp.warp.a.resize(I);
    hp.warp.b.resize(I);
    hp.warp.c.resize(I);
    for (int i = 0; i < I; ++i) {
      hp.warp.a[i] = std::exp(u(rng));
      hp.warp.b[i] = std::exp(u(rng));
      hp.warp.c[i] = -1.0 + normal(rng);
    }
  }
  return hp;
}

/// Features uniform in [-1, 1]^D and positive, skewed responses.
inline Dataset random_dataset(std::mt19937_64& rng, Eigen::Index n, Eigen::Index dim) {
  std::normal_distribution<double> normal(0.0, 0.6);
  Dataset d;
  d.features = random_matrix(rng, n, dim);
  d.responses.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    d.responses[i] = std::exp(0.5 * d.features(i, 0) + normal(rng));
  }
  return d;
}

}  // namespace wgp::testing
