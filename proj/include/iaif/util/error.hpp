// SPDX-FileCopyrightText: 2026 The iaif Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace iaif {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input bytes (bad magic, unparsable CSV cell, ...).
class FormatError : public Error {
 public:
  using Error::Error;
};

/// Input shorter than its header promises.
class LengthError : public Error {
 public:
  using Error::Error;
};

/// Sizes or dimensions that do not fit together.
class SizeError : public Error {
 public:
  using Error::Error;
};

/// Invalid configuration. `field()` is a dotted path such as `train.epochs`.
class ConfigError : public Error {
 public:
  ConfigError(std::string field, const std::string& message)
      : Error(field.empty() ? message : field + ": " + message), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

/// Optimizer failed (non-finite loss, no convergence).
class TrainingError : public Error {
 public:
  using Error::Error;
};

/// Cholesky factorization failed for the requested damping.
class NotPositiveDefiniteError : public Error {
 public:
  NotPositiveDefiniteError(double damping, const std::string& message)
      : Error(message), damping_(damping) {}
  double damping() const noexcept { return damping_; }

 private:
  double damping_;
};

/// API misuse, e.g. scoring a candidate that is already selected.
class UsageError : public Error {
 public:
  using Error::Error;
};

/// A statistic or retraining that is undefined for the given input.
class DegenerateError : public Error {
 public:
  using Error::Error;
};

/// Wraps a failure inside a benchmark pipeline with the stage it came from.
class StageError : public Error {
 public:
  StageError(std::string stage, const std::string& message)
      : Error("[" + stage + "] " + message), stage_(std::move(stage)) {}
  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

}  // namespace iaif
