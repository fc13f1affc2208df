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

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "fixtures.hpp"
#include "wgp/error.hpp"
#include "wgp/harness.hpp"

namespace wgp {
namespace {

namespace fs = std::filesystem;

class TempDir {
 public:
  TempDir() {
    path_ = fs::temp_directory_path() /
            ("wgp_test_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) + "_" +
             ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }

  std::string write(const std::string& name, const std::string& content) const {
    const fs::path p = path_ / name;
    std::ofstream(p) << content;
    return p.string();
  }

 private:
  fs::path path_;
};

TEST(LoadDataset, ParsesRowsAndLabels) {
  TempDir dir;
  const auto f = dir.write("x.txt", "1.0 2.0\n3\t-4e-1\n\n+5 6.5\n");
  const auto y = dir.write("y.txt", "0.5\n1.5\n2.5\n");
  const Dataset d = load_dataset(f, y);
  EXPECT_EQ(d.size(), 3);
  EXPECT_EQ(d.dim(), 2);
  EXPECT_DOUBLE_EQ(d.features(1, 1), -0.4);
  EXPECT_DOUBLE_EQ(d.features(2, 0), 5.0);
  EXPECT_DOUBLE_EQ(d.responses[2], 2.5);
}

TEST(LoadDataset, NormalizesByLength) {
  TempDir dir;
  const auto f = dir.write("x.txt", "1\n2\n");
  const auto y = dir.write("y.txt", "30\n12\n");
  const auto len = dir.write("len.txt", "10\n4\n");
  const Dataset d = load_dataset(f, y, len);
  EXPECT_DOUBLE_EQ(d.responses[0], 3.0);
  EXPECT_DOUBLE_EQ(d.responses[1], 3.0);

  const auto bad = dir.write("bad.txt", "10\n0\n");
  EXPECT_THROW(load_dataset(f, y, bad), DataError);
}

TEST(LoadDataset, ParseErrorsNameTheLine) {
  std::istringstream in("1.0 2.0\n1.0 abc\n");
  try {
    parse_feature_rows(in, "feats");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
    EXPECT_EQ(e.column(), 2u);
    EXPECT_NE(std::string(e.what()).find("feats"), std::string::npos);
  }
  std::istringstream ragged("1 2\n3\n");
  EXPECT_THROW(parse_feature_rows(ragged, "r"), ParseError);
  std::istringstream nonfinite("1\ninf\n");
  EXPECT_THROW(parse_column(nonfinite, "c"), ParseError);
  std::istringstream nan("nan\n");
  EXPECT_THROW(parse_column(nan, "c"), ParseError);
}

TEST(LoadDataset, RowCountMismatch) {
  TempDir dir;
  const auto f = dir.write("x.txt", "1\n2\n3\n");
  const auto y = dir.write("y.txt", "1\n2\n");
  EXPECT_THROW(load_dataset(f, y), DataError);
  EXPECT_THROW(load_dataset(dir.write("z.txt", ""), y), Error);
}

TEST(KFold, Examples) {
  const auto ten = kfold_split(10, 10, 3);
  ASSERT_EQ(ten.size(), 10u);
  for (const auto& f : ten) EXPECT_EQ(f.size(), 1u);

  const auto eleven = kfold_split(11, 10, 3);
  std::vector<std::size_t> sizes;
  for (const auto& f : eleven) sizes.push_back(f.size());
  std::sort(sizes.begin(), sizes.end());
  EXPECT_EQ(sizes, (std::vector<std::size_t>{1, 1, 1, 1, 1, 1, 1, 1, 1, 2}));

  EXPECT_EQ(kfold_split(57, 10, 9), kfold_split(57, 10, 9));
  EXPECT_NE(kfold_split(57, 10, 9), kfold_split(57, 10, 10));
  EXPECT_THROW(kfold_split(5, 6, 0), InvalidInput);
  EXPECT_THROW(kfold_split(5, 0, 0), InvalidInput);
}

TEST(KFold, ExhaustiveAndBalanced) {
  for (std::size_t n : {10u, 23u, 100u, 301u}) {
    for (std::size_t k : {2u, 5u, 10u}) {
      const auto folds = kfold_split(n, k, n * k);
      std::vector<int> seen(n, 0);
      std::size_t lo = n, hi = 0;
      for (const auto& f : folds) {
        lo = std::min(lo, f.size());
        hi = std::max(hi, f.size());
        EXPECT_TRUE(std::is_sorted(f.begin(), f.end()));
        for (std::size_t i : f) ++seen[i];
        const auto rest = complement(n, f);
        EXPECT_EQ(rest.size() + f.size(), n);
        for (std::size_t i : rest) EXPECT_FALSE(std::binary_search(f.begin(), f.end(), i));
      }
      EXPECT_LE(hi - lo, 1u);
      for (int c : seen) EXPECT_EQ(c, 1);
    }
  }
}

TEST(Standardizer, UsesTrainingStatisticsOnly) {
  std::mt19937_64 rng(1);
  const Dataset d = testing::random_dataset(rng, 30, 3);
  Dataset train = d.subset(complement(30, {0, 4, 9}));
  Dataset test = d.subset({0, 4, 9});
  test.features *= 100.0;  // test rows must not influence the statistics
  const Standardizer s = Standardizer::fit(train.features);
  for (Eigen::Index j = 0; j < 3; ++j) {
    const Eigen::VectorXd col = train.features.col(j);
    const double mean = col.mean();
    const double sd = std::sqrt((col.array() - mean).square().sum() / static_cast<double>(col.size() - 1));
    EXPECT_NEAR(s.mean[j], mean, 1e-14);
    EXPECT_NEAR(s.scale[j], sd, 1e-13);
  }
  const Eigen::MatrixXd z = s.apply(train.features);
  EXPECT_LT(z.colwise().mean().cwiseAbs().maxCoeff(), 1e-14);
  const Eigen::MatrixXd zt = s.apply(test.features);
  EXPECT_NEAR(zt(1, 2), (test.features(1, 2) - s.mean[2]) / s.scale[2], 1e-14);

  Eigen::MatrixXd constant = Eigen::MatrixXd::Constant(4, 1, 2.0);
  EXPECT_EQ(Standardizer::fit(constant).scale[0], 1.0);
}

TEST(ClampForLogWarp, CountsRaisedEntries) {
  Eigen::VectorXd y(5);
  y << 0.5, 0.0, -1.0, 1e-7, 2.0;
  EXPECT_EQ(clamp_for_log_warp(y), 3u);
  EXPECT_EQ(y.minCoeff(), kLogWarpFloor);
  EXPECT_EQ(y[0], 0.5);
  EXPECT_EQ(clamp_for_log_warp(y), 0u);
}

ModelSpec log_eq() { return {KernelSpec(KernelFamily::EQ, LengthscaleMode::Isotropic), WarpSpec::log()}; }

Hyperparams simple_hp(double variance, double noise, double l) {
  Hyperparams hp;
  hp.kernel.variance = variance;
  hp.kernel.lengthscales = Eigen::VectorXd::Constant(1, l);
  hp.noise_variance = noise;
  return hp;
}

TEST(GenerateSynthetic, Deterministic) {
  const ModelSpec spec{KernelSpec(KernelFamily::Matern52, LengthscaleMode::Isotropic), WarpSpec::identity()};
  const Dataset a = generate_synthetic(20, 3, spec, simple_hp(1.0, 0.0, 0.7), 42);
  const Dataset b = generate_synthetic(20, 3, spec, simple_hp(1.0, 0.0, 0.7), 42);
  EXPECT_EQ(a.features, b.features);
  EXPECT_EQ(a.responses, b.responses);
  const Dataset c = generate_synthetic(20, 3, spec, simple_hp(1.0, 0.0, 0.7), 43);
  EXPECT_NE(a.responses, c.responses);
  EXPECT_TRUE(a.features.cwiseAbs().maxCoeff() <= 1.0);
}

TEST(GenerateSynthetic, MarginalVariance) {
  const ModelSpec spec{KernelSpec(KernelFamily::EQ, LengthscaleMode::Isotropic), WarpSpec::identity()};
  const double sv = 1.7;
  const double sn = 0.4;
  const int draws = 20000;
  double s = 0.0;
  double s2 = 0.0;
  double s4 = 0.0;
  for (int i = 0; i < draws; ++i) {
    const double y = generate_synthetic(2, 1, spec, simple_hp(sv, sn, 1.0), 1000 + i).responses[0];
    s += y;
    s2 += y * y;
    s4 += y * y * y * y;
  }
  const double var = s2 / draws - (s / draws) * (s / draws);
  const double se = std::sqrt((s4 / draws - (s2 / draws) * (s2 / draws)) / draws);
  EXPECT_LT(std::abs(var - (sv + sn)), 3.0 * se);
}

TEST(GenerateSynthetic, LogWarpGivesPositiveLabels) {
  const Dataset d = generate_synthetic(200, 2, log_eq(), simple_hp(2.0, 0.3, 0.5), 7);
  EXPECT_GT(d.responses.minCoeff(), 0.0);
  EXPECT_THROW(generate_synthetic(1, 2, log_eq(), simple_hp(1.0, 0.1, 1.0), 7), InvalidInput);
}

ExperimentConfig small_config() {
  ExperimentConfig c;
  c.folds = 4;
  c.optimizer.restarts = 2;
  c.optimizer.max_iters = 200;
  c.seed = 11;
  return c;
}

Dataset skewed_dataset(std::uint64_t seed) {
  Hyperparams hp = simple_hp(0.8, 0.1, 0.8);
  return generate_synthetic(40, 2, log_eq(), hp, seed);
}

TEST(RunExperiment, ReportShape) {
  ExperimentConfig c = small_config();
  c.kernels = {KernelFamily::EQ, KernelFamily::Matern32};
  c.warps = {WarpSpec::identity(), WarpSpec::log()};
  c.al_weights = {3.0, 1.0 / 3.0, 2.0};
  const ExperimentReport r = run_experiment(skewed_dataset(1), c);
  ASSERT_EQ(r.models.size(), 4u);
  EXPECT_EQ(r.total_cells, 16u);
  EXPECT_EQ(r.failed_cells, 0u);
  EXPECT_FALSE(r.failed());
  const std::size_t per_cell = 4 + c.al_weights.size() + c.linex_weights.size();
  EXPECT_EQ(summary_rows(r).size(), 4 * per_cell);
  EXPECT_EQ(report_rows(r).size(), 4 * (c.folds + 1) * per_cell);

  std::set<std::string> names;
  for (const ModelResult& m : r.models) names.insert(m.model.name());
  EXPECT_EQ(names, (std::set<std::string>{"none-eq", "none-matern32", "log-eq", "log-matern32"}));

  std::ostringstream csv;
  write_csv(csv, report_rows(r));
  std::istringstream lines(csv.str());
  std::string header;
  std::getline(lines, header);
  EXPECT_EQ(header, "model,fold,metric,weight,value");
}

TEST(RunExperiment, EstimatorsReuseTheFittedModel) {
  ExperimentConfig c = small_config();
  c.warps = {WarpSpec::tanh_sum(1)};
  const ExperimentReport r = run_experiment(skewed_dataset(2), c);
  for (const FoldResult& f : r.models[0].folds) {
    ASSERT_FALSE(f.failed) << f.error;
    ASSERT_EQ(f.estimator_fingerprints.size(), c.al_weights.size() + c.linex_weights.size());
    for (std::uint64_t fp : f.estimator_fingerprints) EXPECT_EQ(fp, f.model_fingerprint);
    EXPECT_NE(f.model_fingerprint, 0u);
  }
}

TEST(RunExperiment, FoldsAreAPartition) {
  const ExperimentReport r = run_experiment(skewed_dataset(3), small_config());
  std::vector<int> seen(40, 0);
  for (const FoldResult& f : r.models[0].folds) {
    for (const InstancePrediction& p : f.instances) ++seen[p.index];
  }
  for (int s : seen) EXPECT_EQ(s, 1);
}

TEST(RunExperiment, IdentityWarpIsTheStandardGp) {
  const Dataset data = skewed_dataset(4);
  const ExperimentConfig c = small_config();
  const ExperimentReport r = run_experiment(data, c);
  const ModelSpec spec{KernelSpec(KernelFamily::EQ, LengthscaleMode::ARD), WarpSpec::identity()};
  for (const FoldResult& f : r.models[0].folds) {
    ASSERT_FALSE(f.failed) << f.error;
    const auto n = static_cast<std::size_t>(data.size());
    Dataset train = data.subset(complement(n, f.test_indices));
    train.features = f.standardizer.apply(train.features);
    const TrainedModel model(train, spec, f.hyperparams);
    const Eigen::MatrixXd test = f.standardizer.apply(data.subset(f.test_indices).features);
    double sum = 0.0;
    for (std::size_t k = 0; k < f.instances.size(); ++k) {
      const InstancePrediction& p = f.instances[k];
      const LatentPredictive lp = model.predict_latent(test.row(static_cast<Eigen::Index>(k)).transpose());
      EXPECT_NEAR(p.median, lp.mean, 1e-12);
      EXPECT_NEAR(p.mean, lp.mean, 1e-10);
      EXPECT_NEAR(p.variance, lp.variance, 1e-10);
      const double d = p.label - lp.mean;
      sum += 0.5 * std::log(2.0 * M_PI * lp.variance) + 0.5 * d * d / lp.variance;
    }
    EXPECT_NEAR(f.eval.nlpd, sum / static_cast<double>(f.instances.size()), 1e-10);
    EXPECT_NEAR(f.train_nll, nll(train, spec, f.hyperparams), 1e-8);
  }
}

TEST(RunExperiment, FailedFoldsAreRecorded) {
  Dataset data = skewed_dataset(5);
  // Non-positive labels have no density under the log warp.
  data.responses[0] = -1.0;
  data.responses[1] = 0.0;
  ExperimentConfig c = small_config();
  c.warps = {WarpSpec::identity(), WarpSpec::log()};
  const ExperimentReport r = run_experiment(data, c);
  const ModelResult& none = r.models[0];
  const ModelResult& log = r.models[1];
  ASSERT_EQ(log.model.warp.family(), WarpFamily::Log);
  EXPECT_EQ(none.failed_folds, 0u);
  std::size_t bad_folds = 0;
  for (const auto& fold : r.partition) bad_folds += (fold[0] <= 1) ? 1 : 0;
  EXPECT_EQ(log.failed_folds, bad_folds);
  for (const FoldResult& f : log.folds) {
    const bool has_bad = f.test_indices[0] <= 1;
    EXPECT_EQ(f.failed, has_bad);
    if (has_bad) EXPECT_NE(f.error.find("log-eq"), std::string::npos) << f.error;
  }
  EXPECT_EQ(r.failed_cells, bad_folds);
  // 1 or 2 of 8 cells failed: within the 20% budget only for one.
  EXPECT_EQ(r.failed(), bad_folds > 1);

  ExperimentConfig strict = c;
  strict.max_failed_fraction = 0.0;
  EXPECT_TRUE(run_experiment(data, strict).failed());
}

TEST(ExperimentConfig, Validation) {
  ExperimentConfig c;
  EXPECT_NO_THROW(c.validate());
  c.folds = 1;
  EXPECT_THROW(c.validate(), InvalidInput);
  c = ExperimentConfig{};
  c.al_weights = {0.0};
  EXPECT_THROW(c.validate(), InvalidInput);
  c = ExperimentConfig{};
  c.linex_weights = {0.0};
  EXPECT_THROW(c.validate(), InvalidInput);
  c = ExperimentConfig{};
  c.warps = {WarpSpec::tanh_sum(4)};
  EXPECT_THROW(c.validate(), InvalidInput);
}

TEST(FormatDouble, RoundTrips) {
  EXPECT_EQ(format_double(0.1), "0.1");
  EXPECT_EQ(format_double(3.0), "3");
  EXPECT_EQ(format_double(std::numeric_limits<double>::infinity()), "inf");
  EXPECT_EQ(format_double(-std::numeric_limits<double>::infinity()), "-inf");
  EXPECT_EQ(format_double(std::nan("")), "nan");
  std::mt19937_64 rng(8);
  std::normal_distribution<double> n(0.0, 1e3);
  for (int i = 0; i < 100; ++i) {
    const double v = n(rng);
    EXPECT_EQ(std::stod(format_double(v)), v);
  }
}

}  // namespace
}  // namespace wgp
