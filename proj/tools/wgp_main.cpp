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

// Command-line front end: cross-validated experiments, single fits,
// prediction from a fitted model, and synthetic data generation.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "wgp/error.hpp"
#include "wgp/harness.hpp"
#include "wgp/predictive.hpp"

namespace {

namespace fs = std::filesystem;
using namespace wgp;

enum ExitCode { kOk = 0, kUsage = 1, kData = 2, kNumeric = 3 };

struct DataArgs {
  std::string features;
  std::string labels;
  std::string lengths;

  Dataset load() const {
    return load_dataset(features, labels,
                        lengths.empty() ? std::nullopt : std::optional<std::string>(lengths));
  }
};

void add_data_options(CLI::App* cmd, DataArgs& d) {
  cmd->add_option("--features", d.features, "Feature file, one whitespace-separated row per instance")
      ->required();
  cmd->add_option("--labels", d.labels, "Label file, one value per line")->required();
  cmd->add_option("--lengths", d.lengths, "Sentence lengths; labels become time / length");
}

struct OptimizerArgs {
  std::size_t restarts = 10;
  int max_iters = 1000;
  std::uint64_t seed = 0;
  int threads = 1;
  bool unbounded_warp = false;

  OptimizeConfig config() const {
    OptimizeConfig c;
    c.restarts = restarts;
    c.max_iters = max_iters;
    c.seed = seed;
    c.threads = threads;
    c.bound_warp = !unbounded_warp;
    return c;
  }
};

void add_optimizer_options(CLI::App* cmd, OptimizerArgs& o) {
  cmd->add_option("--restarts", o.restarts, "Random restarts of the isotropic pass")->capture_default_str();
  cmd->add_option("--max-iters", o.max_iters, "L-BFGS iteration limit per restart")->capture_default_str();
  cmd->add_option("--seed", o.seed, "Random seed")->capture_default_str();
  cmd->add_option("--threads", o.threads, "Worker threads")->capture_default_str();
  cmd->add_flag("--unbounded-warp", o.unbounded_warp, "Do not box the tanh warp parameters");
}

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  return out;
}

std::string join(const std::vector<std::string>& parts, char sep) {
  std::string s;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i > 0) s += sep;
    s += parts[i];
  }
  return s;
}

// --- run -------------------------------------------------------------------

struct RunArgs {
  DataArgs data;
  OptimizerArgs opt;
  std::vector<std::string> kernels{"eq"};
  std::vector<std::string> warps{"none"};
  std::size_t folds = 10;
  std::vector<double> al_weights{3.0, 1.0 / 3.0};
  std::vector<double> linex_weights{-0.75, 0.75};
  int quad_order = 50;
  double max_failed_fraction = 0.2;
  bool debug_quadrature = false;
  std::string out;
};

int run_command(const RunArgs& a) {
  ExperimentConfig c;
  c.features_path = a.data.features;
  c.labels_path = a.data.labels;
  if (!a.data.lengths.empty()) c.lengths_path = a.data.lengths;
  c.kernels.clear();
  for (const std::string& k : a.kernels) c.kernels.push_back(parse_kernel_family(k));
  c.warps.clear();
  for (const std::string& w : a.warps) c.warps.push_back(WarpSpec::parse(w));
  c.folds = a.folds;
  c.optimizer = a.opt.config();
  c.optimizer.threads = 1;
  c.seed = a.opt.seed;
  c.threads = a.opt.threads;
  c.al_weights = a.al_weights;
  c.linex_weights = a.linex_weights;
  c.quad_order = a.quad_order;
  c.max_failed_fraction = a.max_failed_fraction;
  c.debug_quadrature = a.debug_quadrature;
  c.validate();

  const ExperimentReport report = run_experiment(c);

  fs::create_directories(a.out);
  {
    std::ofstream out = open_output(fs::path(a.out) / "report.csv");
    write_csv(out, report_rows(report));
  }
  {
    std::ofstream out = open_output(fs::path(a.out) / "summary.csv");
    write_csv(out, summary_rows(report));
  }
  {
    std::ofstream out = open_output(fs::path(a.out) / "details.jsonl");
    write_jsonl(out, report);
  }

  write_csv(std::cout, summary_rows(report));
  for (const ModelResult& m : report.models) {
    for (const FoldResult& f : m.folds) {
      if (f.failed) std::cerr << "fold failed: " << f.error << '\n';
    }
  }
  if (report.failed()) {
    std::cerr << "experiment failed: " << report.failed_cells << " of " << report.total_cells
              << " cells failed\n";
    return kNumeric;
  }
  return kOk;
}

// --- fit -------------------------------------------------------------------

struct FitArgs {
  DataArgs data;
  OptimizerArgs opt;
  std::string kernel = "eq";
  std::string warp = "none";
  std::string out;
};

int fit_command(const FitArgs& a) {
  ModelConfig model;
  model.kernel = parse_kernel_family(a.kernel);
  model.warp = WarpSpec::parse(a.warp);
  a.opt.config().validate();
  const FittedModel fitted = fit_model(a.data.load(), model, a.opt.config());
  if (a.out.empty() || a.out == "-") {
    write_model_json(std::cout, fitted);
  } else {
    std::ofstream out = open_output(a.out);
    write_model_json(out, fitted);
    std::cout << model.name() << " nll " << format_double(fitted.nll) << '\n';
  }
  return kOk;
}

// --- predict ---------------------------------------------------------------

struct PredictArgs {
  DataArgs data;
  OptimizerArgs opt;
  std::string model;
  std::string kernel = "eq";
  std::string warp = "none";
  std::string test_features;
  std::string test_labels;
  std::vector<double> quantiles;
  std::vector<double> al_weights;
  std::vector<double> linex_weights;
  int quad_order = 50;
  std::string out;
};

Eigen::MatrixXd read_matrix(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  return parse_feature_rows(in, path);
}

Eigen::VectorXd read_column(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  return parse_column(in, path);
}

int predict_command(const PredictArgs& a) {
  for (double q : a.quantiles) {
    if (!(q > 0.0 && q < 1.0)) throw InvalidInput("quantile levels must lie in (0, 1)");
  }
  for (double w : a.al_weights) {
    if (!(w > 0.0)) throw InvalidInput("AL weights must be positive");
  }
  for (double w : a.linex_weights) {
    if (w == 0.0) throw InvalidInput("linex weights must be nonzero");
  }
  if (a.quad_order < 1) throw InvalidInput("quadrature order must be positive");

  const Dataset train = a.data.load();
  FittedModel fitted;
  if (a.model.empty()) {
    ModelConfig model;
    model.kernel = parse_kernel_family(a.kernel);
    model.warp = WarpSpec::parse(a.warp);
    fitted = fit_model(train, model, a.opt.config());
  } else {
    std::ifstream in(a.model);
    if (!in) throw DataError("cannot open " + a.model);
    fitted = read_model_json(in, a.model);
  }
  const TrainedModel trained = materialize(train, fitted);

  const Eigen::MatrixXd X = read_matrix(a.test_features);
  if (X.cols() != train.dim()) {
    throw DataError(a.test_features + ": expected " + std::to_string(train.dim()) + " columns, found " +
                    std::to_string(X.cols()));
  }
  Eigen::VectorXd y;
  if (!a.test_labels.empty()) {
    y = read_column(a.test_labels);
    if (y.size() != X.rows()) {
      throw DataError(a.test_labels + ": expected " + std::to_string(X.rows()) + " labels, found " +
                      std::to_string(y.size()));
    }
  }
  const Eigen::MatrixXd Z = fitted.standardizer.apply(X);
  const QuadratureRule rule = gauss_hermite(a.quad_order);

  std::vector<std::string> header{"index", "latent_mean", "latent_variance", "median", "mean", "variance"};
  for (double q : a.quantiles) header.push_back("q" + format_double(q));
  for (double w : a.al_weights) header.push_back("al" + format_double(w));
  for (double w : a.linex_weights) header.push_back("linex" + format_double(w));
  if (y.size() > 0) {
    header.push_back("label");
    header.push_back("log_density");
  }

  std::ofstream file;
  if (!a.out.empty() && a.out != "-") file = open_output(a.out);
  std::ostream& out = file.is_open() ? static_cast<std::ostream&>(file) : std::cout;
  out << join(header, ',') << '\n';
  for (Eigen::Index i = 0; i < Z.rows(); ++i) {
    const PredictiveDistribution d = predictive_distribution(trained, Z.row(i).transpose());
    const Moments m = mean_and_variance(d, rule);
    std::vector<std::string> row{std::to_string(i), format_double(d.latent().mean),
                                 format_double(d.latent().variance), format_double(median(d)),
                                 format_double(m.mean), format_double(m.variance)};
    for (double q : a.quantiles) row.push_back(format_double(quantile(d, q)));
    for (double w : a.al_weights) row.push_back(format_double(bayes_estimate_al(d, w)));
    for (double w : a.linex_weights) row.push_back(format_double(bayes_estimate_linex(d, w, rule)));
    if (y.size() > 0) {
      row.push_back(format_double(y[i]));
      row.push_back(format_double(log_density(d, y[i])));
    }
    out << join(row, ',') << '\n';
  }
  return kOk;
}

// --- synth -----------------------------------------------------------------

struct SynthArgs {
  std::size_t n = 100;
  std::size_t dim = 5;
  std::string kernel = "eq";
  std::string warp = "log";
  double variance = 0.5;
  double lengthscale = 1.0;
  double noise = 0.1;
  std::uint64_t seed = 0;
  std::string out;
};

int synth_command(const SynthArgs& a) {
  const WarpSpec warp = WarpSpec::parse(a.warp);
  const ModelSpec spec{KernelSpec(parse_kernel_family(a.kernel), LengthscaleMode::Isotropic), warp};
  Hyperparams hp;
  hp.kernel.variance = a.variance;
  hp.kernel.lengthscales = Eigen::VectorXd::Constant(1, a.lengthscale);
  hp.noise_variance = a.noise;
  if (warp.family() == WarpFamily::TanhSum) {
    hp.warp.a = Eigen::VectorXd::Ones(warp.terms());
    hp.warp.b = Eigen::VectorXd::Ones(warp.terms());
    hp.warp.c = Eigen::VectorXd::Zero(warp.terms());
  }
  const Dataset d = generate_synthetic(a.n, a.dim, spec, hp, a.seed);

  fs::create_directories(a.out);
  std::ofstream features = open_output(fs::path(a.out) / "features.txt");
  std::ofstream labels = open_output(fs::path(a.out) / "labels.txt");
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    for (Eigen::Index j = 0; j < d.dim(); ++j) {
      features << (j > 0 ? "\t" : "") << format_double(d.features(i, j));
    }
    features << '\n';
    labels << format_double(d.responses[i]) << '\n';
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Warped Gaussian process regression for quality estimation"};
  app.require_subcommand(1);

  RunArgs run;
  CLI::App* run_cmd = app.add_subcommand("run", "Cross-validated experiment over kernels x warps");
  add_data_options(run_cmd, run.data);
  add_optimizer_options(run_cmd, run.opt);
  run_cmd->add_option("--kernel", run.kernels, "eq|matern32|matern52, comma separated")
      ->delimiter(',')
      ->capture_default_str();
  run_cmd->add_option("--warp", run.warps, "none|log|tanh1|tanh2|tanh3, comma separated")
      ->delimiter(',')
      ->capture_default_str();
  run_cmd->add_option("--folds", run.folds, "Cross-validation folds")->capture_default_str();
  run_cmd->add_option("--al-weights", run.al_weights, "Asymmetric linear loss weights")->delimiter(',');
  run_cmd->add_option("--linex-weights", run.linex_weights, "Linex loss weights")->delimiter(',');
  run_cmd->add_option("--quad-order", run.quad_order, "Gauss-Hermite order")->capture_default_str();
  run_cmd->add_option("--max-failed-fraction", run.max_failed_fraction, "Tolerated fraction of failed folds")
      ->capture_default_str();
  run_cmd->add_flag("--debug-quadrature", run.debug_quadrature, "Record quadrature error per instance");
  run_cmd->add_option("--out", run.out, "Output directory")->required();

  FitArgs fit;
  CLI::App* fit_cmd = app.add_subcommand("fit", "Fit one model on the whole dataset and dump it as JSON");
  add_data_options(fit_cmd, fit.data);
  add_optimizer_options(fit_cmd, fit.opt);
  fit_cmd->add_option("--kernel", fit.kernel, "eq|matern32|matern52")->capture_default_str();
  fit_cmd->add_option("--warp", fit.warp, "none|log|tanh1|tanh2|tanh3")->capture_default_str();
  fit_cmd->add_option("--out", fit.out, "Model JSON path; stdout when omitted");

  PredictArgs pred;
  CLI::App* pred_cmd = app.add_subcommand("predict", "Score a feature file with a fitted model");
  add_data_options(pred_cmd, pred.data);
  add_optimizer_options(pred_cmd, pred.opt);
  pred_cmd->add_option("--model", pred.model, "Model JSON from 'fit'; fits on the training data when omitted");
  pred_cmd->add_option("--kernel", pred.kernel, "Kernel when fitting")->capture_default_str();
  pred_cmd->add_option("--warp", pred.warp, "Warp when fitting")->capture_default_str();
  pred_cmd->add_option("--test-features", pred.test_features, "Features to score")->required();
  pred_cmd->add_option("--test-labels", pred.test_labels, "Labels for log densities");
  pred_cmd->add_option("--quantiles", pred.quantiles, "Quantile levels")->delimiter(',');
  pred_cmd->add_option("--al-weights", pred.al_weights, "AL Bayes estimates to emit")->delimiter(',');
  pred_cmd->add_option("--linex-weights", pred.linex_weights, "Linex Bayes estimates to emit")->delimiter(',');
  pred_cmd->add_option("--quad-order", pred.quad_order, "Gauss-Hermite order")->capture_default_str();
  pred_cmd->add_option("--out", pred.out, "Predictions CSV; stdout when omitted");

  SynthArgs synth;
  CLI::App* synth_cmd = app.add_subcommand("synth", "Generate a synthetic dataset from the GP prior");
  synth_cmd->add_option("--n", synth.n, "Instances")->capture_default_str();
  synth_cmd->add_option("--dim", synth.dim, "Features")->capture_default_str();
  synth_cmd->add_option("--kernel", synth.kernel, "eq|matern32|matern52")->capture_default_str();
  synth_cmd->add_option("--warp", synth.warp, "Labels are pushed through the inverse warp")->capture_default_str();
  synth_cmd->add_option("--variance", synth.variance, "Signal variance")->capture_default_str();
  synth_cmd->add_option("--lengthscale", synth.lengthscale, "Lengthscale")->capture_default_str();
  synth_cmd->add_option("--noise", synth.noise, "Noise variance")->capture_default_str();
  synth_cmd->add_option("--seed", synth.seed, "Random seed")->capture_default_str();
  synth_cmd->add_option("--out", synth.out, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*run_cmd) return run_command(run);
    if (*fit_cmd) return fit_command(fit);
    if (*pred_cmd) return predict_command(pred);
    if (*synth_cmd) return synth_command(synth);
  } catch (const InvalidInput& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kData;
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kData;
  } catch (const SupportViolation& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kData;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kData;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kNumeric;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kData;
  }
  return kUsage;
}
