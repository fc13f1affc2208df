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

#include <istream>
#include <ostream>

#include <json.hpp>

#include "wgp/error.hpp"
#include "wgp/harness.hpp"

namespace wgp {

namespace {

using nlohmann::json;

json to_array(const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

Eigen::VectorXd from_array(const json& j, const char* key, const std::string& source) {
  if (!j.contains(key) || !j.at(key).is_array()) {
    throw DataError(source + ": missing array field '" + key + "'");
  }
  const json& arr = j.at(key);
  Eigen::VectorXd v(static_cast<Eigen::Index>(arr.size()));
  for (std::size_t i = 0; i < arr.size(); ++i) {
    if (!arr[i].is_number()) throw DataError(source + ": non-numeric entry in '" + key + "'");
    v[static_cast<Eigen::Index>(i)] = arr[i].get<double>();
  }
  return v;
}

double number_field(const json& j, const char* key, const std::string& source) {
  if (!j.contains(key) || !j.at(key).is_number()) {
    throw DataError(source + ": missing numeric field '" + key + "'");
  }
  return j.at(key).get<double>();
}

std::string string_field(const json& j, const char* key, const std::string& source) {
  if (!j.contains(key) || !j.at(key).is_string()) {
    throw DataError(source + ": missing string field '" + key + "'");
  }
  return j.at(key).get<std::string>();
}

Dataset preprocess(const Dataset& dataset, const ModelConfig& model, const Standardizer& s,
                   std::size_t* clamped) {
  Dataset d = dataset;
  d.features = s.apply(d.features);
  const std::size_t n = model.warp.family() == WarpFamily::Log ? clamp_for_log_warp(d.responses) : 0;
  if (clamped != nullptr) *clamped = n;
  return d;
}

}  // namespace

FittedModel fit_model(const Dataset& dataset, const ModelConfig& model, const OptimizeConfig& config) {
  dataset.validate();
  FittedModel f;
  f.model = model;
  f.standardizer = Standardizer::fit(dataset.features);
  const Dataset d = preprocess(dataset, model, f.standardizer, &f.clamped_labels);
  const TwoPassResult fit = two_pass_fit(d, model.kernel, model.warp, config);
  f.hyperparams = fit.model.hyperparams();
  f.nll = fit.ard.best_nll;
  return f;
}

TrainedModel materialize(const Dataset& dataset, const FittedModel& fitted) {
  if (fitted.standardizer.mean.size() != dataset.dim()) {
    throw DataError("model was fitted on " + std::to_string(fitted.standardizer.mean.size()) +
                    " features, dataset has " + std::to_string(dataset.dim()));
  }
  const ModelSpec spec{KernelSpec(fitted.model.kernel, LengthscaleMode::ARD), fitted.model.warp};
  return TrainedModel(preprocess(dataset, fitted.model, fitted.standardizer, nullptr), spec,
                      fitted.hyperparams);
}

void write_model_json(std::ostream& out, const FittedModel& f) {
  const Hyperparams& hp = f.hyperparams;
  const json j = {{"kernel", to_string(f.model.kernel)},
                  {"warp", f.model.warp.name()},
                  {"variance", hp.kernel.variance},
                  {"lengthscales", to_array(hp.kernel.lengthscales)},
                  {"noise_variance", hp.noise_variance},
                  {"warp_a", to_array(hp.warp.a)},
                  {"warp_b", to_array(hp.warp.b)},
                  {"warp_c", to_array(hp.warp.c)},
                  {"feature_mean", to_array(f.standardizer.mean)},
                  {"feature_scale", to_array(f.standardizer.scale)},
                  {"nll", f.nll},
                  {"clamped_labels", f.clamped_labels}};
  out << j.dump(2) << '\n';
}

FittedModel read_model_json(std::istream& in, const std::string& source) {
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(source, 0, 0, e.what());
  }
  if (!j.is_object()) throw DataError(source + ": expected a JSON object");
  FittedModel f;
  try {
    f.model.kernel = parse_kernel_family(string_field(j, "kernel", source));
    f.model.warp = WarpSpec::parse(string_field(j, "warp", source));
  } catch (const InvalidInput& e) {
    throw DataError(source + ": " + e.what());
  }
  Hyperparams& hp = f.hyperparams;
  hp.kernel.variance = number_field(j, "variance", source);
  hp.kernel.lengthscales = from_array(j, "lengthscales", source);
  hp.noise_variance = number_field(j, "noise_variance", source);
  hp.warp.a = from_array(j, "warp_a", source);
  hp.warp.b = from_array(j, "warp_b", source);
  hp.warp.c = from_array(j, "warp_c", source);
  f.standardizer.mean = from_array(j, "feature_mean", source);
  f.standardizer.scale = from_array(j, "feature_scale", source);
  f.nll = j.contains("nll") && j.at("nll").is_number() ? j.at("nll").get<double>() : 0.0;

  const auto dim = f.standardizer.mean.size();
  if (f.standardizer.scale.size() != dim || dim == 0) {
    throw DataError(source + ": feature_mean and feature_scale must have the same nonzero length");
  }
  try {
    hp.validate(ModelSpec{KernelSpec(f.model.kernel, LengthscaleMode::ARD), f.model.warp}, dim);
  } catch (const InvalidInput& e) {
    throw DataError(source + ": " + e.what());
  }
  return f;
}

}  // namespace wgp
