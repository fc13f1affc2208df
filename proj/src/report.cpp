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

#include <charconv>
#include <cmath>
#include <ostream>

#include <json.hpp>

#include "wgp/harness.hpp"

namespace wgp {

namespace {

using nlohmann::json;

void add_rows(std::vector<ReportRow>& rows, const std::string& model, const std::string& fold,
              double nll, double nlpd, double mae, double r, const std::vector<WeightedLoss>& al,
              const std::vector<WeightedLoss>& linex) {
  rows.push_back({model, fold, "nll", std::nullopt, nll});
  rows.push_back({model, fold, "nlpd", std::nullopt, nlpd});
  rows.push_back({model, fold, "mae", std::nullopt, mae});
  rows.push_back({model, fold, "pearson_r", std::nullopt, r});
  for (const WeightedLoss& l : al) rows.push_back({model, fold, "al", l.weight, l.value});
  for (const WeightedLoss& l : linex) rows.push_back({model, fold, "linex", l.weight, l.value});
}

json number(double v) { return std::isfinite(v) ? json(v) : json(format_double(v)); }

json vector_json(const Eigen::VectorXd& v) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(number(v[i]));
  return arr;
}

json losses_json(const std::vector<WeightedLoss>& losses) {
  json arr = json::array();
  for (const WeightedLoss& l : losses) {
    arr.push_back({{"weight", l.weight}, {"value", number(l.value)}, {"diverged", l.diverged}});
  }
  return arr;
}

}  // namespace

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

std::vector<ReportRow> summary_rows(const ExperimentReport& report) {
  std::vector<ReportRow> rows;
  for (const ModelResult& m : report.models) {
    const Aggregate& a = m.aggregate;
    add_rows(rows, m.model.name(), "mean", a.nll, a.nlpd, a.mae, a.pearson_r, a.al, a.linex);
  }
  return rows;
}

std::vector<ReportRow> report_rows(const ExperimentReport& report) {
  std::vector<ReportRow> rows;
  for (const ModelResult& m : report.models) {
    for (const FoldResult& f : m.folds) {
      if (f.failed) continue;
      add_rows(rows, m.model.name(), std::to_string(f.fold), f.train_nll, f.eval.nlpd, f.eval.mae,
               f.eval.pearson_r, f.eval.al, f.eval.linex);
    }
  }
  const std::vector<ReportRow> summary = summary_rows(report);
  rows.insert(rows.end(), summary.begin(), summary.end());
  return rows;
}

void write_csv(std::ostream& out, const std::vector<ReportRow>& rows) {
  out << "model,fold,metric,weight,value\n";
  for (const ReportRow& r : rows) {
    out << r.model << ',' << r.fold << ',' << r.metric << ','
        << (r.weight ? format_double(*r.weight) : std::string()) << ',' << format_double(r.value)
        << '\n';
  }
}

void write_jsonl(std::ostream& out, const ExperimentReport& report) {
  const ExperimentConfig& c = report.config;
  json header = {{"record", "config"},
                 {"folds", c.folds},
                 {"seed", c.seed},
                 {"restarts", c.optimizer.restarts},
                 {"max_iters", c.optimizer.max_iters},
                 {"quad_order", c.quad_order},
                 {"al_weights", c.al_weights},
                 {"linex_weights", c.linex_weights},
                 {"failed_cells", report.failed_cells},
                 {"total_cells", report.total_cells},
                 {"partition", report.partition}};
  json models = json::array();
  for (const ModelConfig& m : c.models()) models.push_back(m.name());
  header["models"] = models;
  if (c.optimizer.bound_warp) {
    const WarpBounds& b = c.optimizer.warp_bounds;
    header["warp_bounds"] = {{"a_min", b.a_min}, {"a_max", b.a_max}, {"b_min", b.b_min}, {"b_max", b.b_max}};
  } else {
    header["warp_bounds"] = nullptr;
  }
  out << header.dump() << '\n';

  for (const ModelResult& m : report.models) {
    for (const FoldResult& f : m.folds) {
      json rec = {{"record", "fold"}, {"model", m.model.name()}, {"fold", f.fold},
                  {"failed", f.failed}};
      if (f.failed) {
        rec["error"] = f.error;
        out << rec.dump() << '\n';
        continue;
      }
      const Hyperparams& hp = f.hyperparams;
      rec["hyperparams"] = {{"variance", hp.kernel.variance},
                            {"lengthscales", vector_json(hp.kernel.lengthscales)},
                            {"noise_variance", hp.noise_variance},
                            {"warp_a", vector_json(hp.warp.a)},
                            {"warp_b", vector_json(hp.warp.b)},
                            {"warp_c", vector_json(hp.warp.c)}};
      rec["train_nll"] = number(f.train_nll);
      rec["isotropic_converged"] = f.isotropic_converged;
      rec["ard_converged"] = f.ard_converged;
      rec["clamped_labels"] = f.clamped_labels;
      rec["model_fingerprint"] = f.model_fingerprint;
      rec["nlpd"] = number(f.eval.nlpd);
      rec["mae"] = number(f.eval.mae);
      rec["pearson_r"] = number(f.eval.pearson_r);
      rec["pearson_p"] = number(f.eval.pearson_p);
      rec["al"] = losses_json(f.eval.al);
      rec["linex"] = losses_json(f.eval.linex);
      json inst = json::array();
      for (const InstancePrediction& p : f.instances) {
        json item = {{"index", p.index},
                     {"label", number(p.label)},
                     {"latent_mean", number(p.latent_mean)},
                     {"latent_variance", number(p.latent_variance)},
                     {"median", number(p.median)},
                     {"mean", number(p.mean)},
                     {"variance", number(p.variance)},
                     {"log_density", number(p.log_density)}};
        if (!std::isnan(p.quadrature_error)) item["quadrature_error"] = p.quadrature_error;
        inst.push_back(std::move(item));
      }
      rec["instances"] = std::move(inst);
      out << rec.dump() << '\n';
    }
  }
}

}  // namespace wgp
