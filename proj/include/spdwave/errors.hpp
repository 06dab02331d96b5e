// Copyright 2026 The spdwave Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace spdwave {

/// Base class of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class NotPositiveDefinite : public Error {
 public:
  using Error::Error;
};

class OverflowError : public Error {
 public:
  using Error::Error;
};

/// An iterative method did not converge within its documented cap. The
/// offending input is kept (row-major, dense) so callers can log or replay it.
class NumericalFailure : public Error {
 public:
  NumericalFailure(const std::string& what, std::vector<double> input = {})
      : Error(what), input_(std::move(input)) {}

  const std::vector<double>& input() const noexcept { return input_; }

 private:
  std::vector<double> input_;
};

}  // namespace spdwave
