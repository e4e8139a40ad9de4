// Copyright 2026 The qnd Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace qnd {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid argument or violated precondition.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Adaptive quadrature failed to reach its tolerance.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double residual)
      : Error(what + " (residual " + std::to_string(residual) + ")"),
        residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

/// ODE integration could not proceed.
class IntegrationError : public Error {
 public:
  IntegrationError(const std::string& what, double time, double step)
      : Error(what + " at t=" + std::to_string(time) +
              " (h=" + std::to_string(step) + ")"),
        time_(time),
        step_(step) {}
  double time() const noexcept { return time_; }
  double step() const noexcept { return step_; }

 private:
  double time_;
  double step_;
};

/// Mean spin vanished, so the squeezing parameter is undefined.
class DepolarizedError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Requested problem exceeds the dense solver budget.
class BudgetError : public DomainError {
 public:
  using DomainError::DomainError;
};

}  // namespace qnd
