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

#ifndef PROPINV_WEIGHTS_HPP_
#define PROPINV_WEIGHTS_HPP_

#include <cmath>
#include <limits>
#include <string>
#include <string_view>

#include "propinv/errors.hpp"

namespace propinv {

enum class WeightFamily { kExponential, kAffine, kPowerShifted };

inline std::string_view family_name(WeightFamily f) {
  switch (f) {
    case WeightFamily::kExponential:
      return "exponential";
    case WeightFamily::kAffine:
      return "affine";
    case WeightFamily::kPowerShifted:
      return "power-shifted";
  }
  return "unknown";
}

// A strictly increasing weight function w(v) on the value range [0, h],
// together with its closed-form inverse v(w).
//
//   exponential     w(v) = a * exp(b v)
//   affine          w(v) = a + b v
//   power-shifted   w(v) = a + b v^c,  c >= 1
//
// All parameters are validated at construction so that w(0) = a > 0 and w is
// strictly increasing. Objects are immutable.
class WeightFunction {
 public:
  static WeightFunction exponential(double a, double b, double h) {
    return WeightFunction(WeightFamily::kExponential, a, b, 1.0, h);
  }
  static WeightFunction affine(double a, double b, double h) {
    return WeightFunction(WeightFamily::kAffine, a, b, 1.0, h);
  }
  static WeightFunction power_shifted(double a, double b, double c, double h) {
    return WeightFunction(WeightFamily::kPowerShifted, a, b, c, h);
  }

  WeightFamily family() const { return family_; }
  double a() const { return a_; }
  double b() const { return b_; }
  double c() const { return c_; }
  // Maximum value type h.
  double value_cap() const { return h_; }

  double min_weight() const { return w_min_; }
  double max_weight() const { return w_max_; }

  // w(v) for v in [0, h].
  double weight(double v) const {
    check_value(v);
    return weight_unchecked(v);
  }

  // w'(v) for v in [0, h].
  double derivative(double v) const {
    check_value(v);
    switch (family_) {
      case WeightFamily::kExponential:
        return a_ * b_ * std::exp(b_ * v);
      case WeightFamily::kAffine:
        return b_;
      case WeightFamily::kPowerShifted:
        return c_ == 1.0 ? b_ : b_ * c_ * std::pow(v, c_ - 1.0);
    }
    return 0.0;
  }

  // Inverse map v(w) for w in [w(0), w(h)].
  double value(double w) const {
    check_weight(w);
    if (w <= w_min_) return 0.0;
    if (w >= w_max_) return h_;
    double v = 0.0;
    switch (family_) {
      case WeightFamily::kExponential:
        v = std::log(w / a_) / b_;
        break;
      case WeightFamily::kAffine:
        v = (w - a_) / b_;
        break;
      case WeightFamily::kPowerShifted:
        v = c_ == 1.0 ? (w - a_) / b_ : std::pow((w - a_) / b_, 1.0 / c_);
        break;
    }
    return v < 0.0 ? 0.0 : (v > h_ ? h_ : v);
  }

  // v'(w) = 1 / w'(v(w)). Infinite at w(0) for power-shifted with c > 1.
  double value_derivative(double w) const {
    const double v = value(w);
    const double d = derivative(v);
    return d > 0.0 ? 1.0 / d : std::numeric_limits<double>::infinity();
  }

  // w(v) without the range check; used on quadrature nodes that lie in
  // [0, h] by construction.
  double weight_unchecked(double v) const {
    switch (family_) {
      case WeightFamily::kExponential:
        return a_ * std::exp(b_ * v);
      case WeightFamily::kAffine:
        return a_ + b_ * v;
      case WeightFamily::kPowerShifted:
        return c_ == 1.0 ? a_ + b_ * v : a_ + b_ * std::pow(v, c_);
    }
    return 0.0;
  }

  friend bool operator==(const WeightFunction&, const WeightFunction&) = default;

 private:
  // Inputs produced by arithmetic on w(0) or w(h) are accepted within this
  // relative slack and clamped.
  static constexpr double kRangeSlack = 1e-12;

  WeightFunction(WeightFamily family, double a, double b, double c, double h)
      : family_(family), a_(a), b_(b), c_(c), h_(h) {
    if (!(std::isfinite(a) && std::isfinite(b) && std::isfinite(c) &&
          std::isfinite(h))) {
      throw DomainError("weight function parameters must be finite");
    }
    if (!(h > 0.0)) throw DomainError("value cap h must be positive");
    if (!(a > 0.0)) throw DomainError("weight function requires w(0) = a > 0");
    if (!(b > 0.0)) {
      throw DomainError("weight function requires b > 0 (strictly increasing)");
    }
    if (family == WeightFamily::kPowerShifted && !(c >= 1.0)) {
      throw DomainError("power-shifted weight function requires c >= 1");
    }
    w_min_ = weight_unchecked(0.0);
    w_max_ = weight_unchecked(h);
    if (!std::isfinite(w_max_)) {
      throw DomainError("w(h) overflows double precision");
    }
  }

  void check_value(double v) const {
    if (!(v >= 0.0 && v <= h_)) {
      throw DomainError("value " + std::to_string(v) + " outside [0, " +
                        std::to_string(h_) + "]");
    }
  }

  void check_weight(double w) const {
    if (!(w >= w_min_ * (1.0 - kRangeSlack) &&
          w <= w_max_ * (1.0 + kRangeSlack))) {
      throw DomainError("weight " + std::to_string(w) + " outside [w(0), w(h)]");
    }
  }

  WeightFamily family_;
  double a_;
  double b_;
  double c_;
  double h_;
  double w_min_ = 0.0;
  double w_max_ = 0.0;
};

}  // namespace propinv

#endif  // PROPINV_WEIGHTS_HPP_
