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
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

#include "wgp/error.hpp"
#include "wgp/harness.hpp"

namespace wgp {

namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\v' || c == '\f'; }

// Splits a line into numbers; column numbers in errors are 1-based field indices.
std::vector<double> parse_line(std::string_view line, const std::string& source, std::size_t lineno) {
  std::vector<double> values;
  std::size_t pos = 0;
  while (pos < line.size()) {
    while (pos < line.size() && is_space(line[pos])) ++pos;
    if (pos >= line.size()) break;
    std::size_t end = pos;
    while (end < line.size() && !is_space(line[end])) ++end;
    const std::string_view token = line.substr(pos, end - pos);
    const std::string_view digits = token.front() == '+' ? token.substr(1) : token;
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), v);
    if (ec != std::errc() || ptr != digits.data() + digits.size() || digits.empty()) {
      throw ParseError(source, lineno, values.size() + 1,
                       "cannot parse '" + std::string(token) + "' as a number");
    }
    if (!std::isfinite(v)) {
      throw ParseError(source, lineno, values.size() + 1,
                       "non-finite value '" + std::string(token) + "'");
    }
    values.push_back(v);
    pos = end;
  }
  return values;
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path + "'");
  return in;
}

}  // namespace

Eigen::MatrixXd parse_feature_rows(std::istream& in, const std::string& source) {
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::vector<double> row = parse_line(line, source, lineno);
    if (row.empty()) continue;
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw ParseError(source, lineno, 0,
                       "expected " + std::to_string(rows.front().size()) + " columns, found " +
                           std::to_string(row.size()));
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw DataError(source + ": no feature rows");
  Eigen::MatrixXd X(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows[0].size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j) {
      X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    }
  }
  return X;
}

Eigen::VectorXd parse_column(std::istream& in, const std::string& source) {
  std::vector<double> values;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::vector<double> row = parse_line(line, source, lineno);
    if (row.empty()) continue;
    if (row.size() != 1) {
      throw ParseError(source, lineno, 0, "expected one value, found " + std::to_string(row.size()));
    }
    values.push_back(row[0]);
  }
  if (values.empty()) throw DataError(source + ": no values");
  return Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
}

Eigen::VectorXd normalize_rates(const Eigen::VectorXd& times, const Eigen::VectorXd& lengths) {
  if (times.size() != lengths.size()) {
    throw DataError("got " + std::to_string(times.size()) + " labels but " +
                    std::to_string(lengths.size()) + " lengths");
  }
  Eigen::VectorXd rates(times.size());
  for (Eigen::Index i = 0; i < times.size(); ++i) {
    if (!(lengths[i] > 0.0)) {
      throw DataError("length on line " + std::to_string(i + 1) + " is not positive");
    }
    rates[i] = times[i] / lengths[i];
  }
  return rates;
}

Dataset load_dataset(const std::string& features_path, const std::string& labels_path,
                     const std::optional<std::string>& lengths_path) {
  Dataset d;
  {
    std::ifstream in = open_input(features_path);
    d.features = parse_feature_rows(in, features_path);
  }
  {
    std::ifstream in = open_input(labels_path);
    d.responses = parse_column(in, labels_path);
  }
  if (d.features.rows() != d.responses.size()) {
    throw DataError(features_path + " has " + std::to_string(d.features.rows()) + " rows but " +
                    labels_path + " has " + std::to_string(d.responses.size()));
  }
  if (lengths_path) {
    std::ifstream in = open_input(*lengths_path);
    const Eigen::VectorXd lengths = parse_column(in, *lengths_path);
    d.responses = normalize_rates(d.responses, lengths);
  }
  return d;
}

}  // namespace wgp
