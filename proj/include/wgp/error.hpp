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

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace wgp {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed arguments: dimension mismatches, out-of-range weights, bad configs.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

/// Evaluation outside the support of a warp (e.g. log of a non-positive label).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// An iterative routine failed to converge.
class NumericError : public Error {
 public:
  NumericError(const std::string& what, double best_iterate, double residual)
      : Error(what), best_iterate_(best_iterate), residual_(residual) {}

  double best_iterate() const noexcept { return best_iterate_; }
  double residual() const noexcept { return residual_; }

 private:
  double best_iterate_;
  double residual_;
};

/// Covariance matrix stayed non positive definite after maximal jitter.
class IllConditionedModel : public Error {
 public:
  using Error::Error;
};

/// Every optimizer restart failed.
class OptimizationFailed : public Error {
 public:
  using Error::Error;
};

/// A model assigned zero density to an observed label.
class SupportViolation : public Error {
 public:
  SupportViolation(const std::string& what, std::vector<std::size_t> indices)
      : Error(what), indices_(std::move(indices)) {}

  const std::vector<std::size_t>& indices() const noexcept { return indices_; }

 private:
  std::vector<std::size_t> indices_;
};

/// Correlation requested for a constant vector.
class UndefinedCorrelation : public Error {
 public:
  using Error::Error;
};

/// Loss evaluation would overflow a double.
class LossOverflow : public Error {
 public:
  using Error::Error;
};

/// Input file could not be parsed. Line and column are 1-based; column 0 means
/// the whole line.
class ParseError : public Error {
 public:
  ParseError(const std::string& path, std::size_t line, std::size_t column,
             const std::string& detail)
      : Error(path + ":" + std::to_string(line) +
              (column > 0 ? ":" + std::to_string(column) : std::string()) + ": " + detail),
        line_(line),
        column_(column) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

/// Dataset-level inconsistency (row count mismatch, non-positive lengths).
class DataError : public Error {
 public:
  using Error::Error;
};

}  // namespace wgp
