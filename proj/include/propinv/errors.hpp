// Copyright 2026 The propinv Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef PROPINV_ERRORS_HPP_
#define PROPINV_ERRORS_HPP_

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace propinv {

// Argument outside the domain of a function (out-of-range value, weight
// above the sum, nonpositive weight, overlapping parts, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Self/cross partial ratio requested on the lower boundary, where both
// partials vanish.
class UndefinedRatioError : public DomainError {
 public:
  using DomainError::DomainError;
};

// Quadrature or search failed to reach the requested tolerance.
class NumericalError : public std::runtime_error {
 public:
  NumericalError(const std::string& what, double residual)
      : std::runtime_error(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

// Observed prices are not in the image of the price function.
class InfeasiblePriceError : public std::runtime_error {
 public:
  InfeasiblePriceError(const std::string& what,
                       std::vector<std::string> reasons)
      : std::runtime_error(what), reasons_(std::move(reasons)) {}
  const std::vector<std::string>& reasons() const noexcept { return reasons_; }

 private:
  std::vector<std::string> reasons_;
};

// Problem too large for an exhaustive routine.
class SizeError : public std::length_error {
 public:
  using std::length_error::length_error;
};

// No off-center equal-price root exists for the requested parameters.
class CounterexampleNotFound : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace propinv

#endif  // PROPINV_ERRORS_HPP_
