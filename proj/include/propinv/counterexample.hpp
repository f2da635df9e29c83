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

#ifndef PROPINV_COUNTEREXAMPLE_HPP_
#define PROPINV_COUNTEREXAMPLE_HPP_

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <string>
#include <vector>

#include "propinv/allocation.hpp"
#include "propinv/errors.hpp"
#include "propinv/pricing.hpp"

namespace propinv {

// Two symmetric parts S1, S2 of k agents each with v_{S1} + v_{S2} = beta,
// every S1 agent valued alpha/k and every S2 agent (beta - alpha)/k. The
// remaining parts enter only through delta = log sum_{r>2} e^{v_{S_r}}.
struct CounterexampleInstance {
  int k = 4;
  double beta = 10.0;
  double delta = 4.0;
  double alpha_lo = 0.01;
  double alpha_hi = 9.99;

  void validate() const {
    if (k < 2) throw DomainError("counterexample needs k >= 2");
    if (!(beta > 0.0) || !std::isfinite(beta)) {
      throw DomainError("beta must be finite and positive");
    }
    if (!std::isfinite(delta)) throw DomainError("delta must be finite");
    if (!(alpha_lo > 0.0 && alpha_lo < alpha_hi && alpha_hi < beta)) {
      throw DomainError("alpha range must satisfy 0 < lo < hi < beta");
    }
  }

  static CounterexampleInstance with_defaults(int k, double beta,
                                              double delta) {
    return {k, beta, delta, 1e-3 * beta, beta - 1e-3 * beta};
  }
};

namespace detail {

// Price of one agent with value v_i in a part of total value v_own, facing one
// other symmetric part of value v_other plus the summarized rest.
inline double member_price(double v_own, double v_i, double v_other,
                           double delta) {
  const std::array<double, 3> all{v_own, v_other, delta};
  const std::array<double, 2> rest{v_other, delta};
  const double lse_all = log_sum_exp(all);
  const double lse_rest = log_sum_exp(rest);
  const std::array<double, 2> without{v_own - v_i, lse_rest};
  const double lse_wo = log_sum_exp(without);
  const double ratio = std::exp(v_own - lse_wo) * (-std::expm1(-v_i));
  return v_i - std::exp(lse_all - v_own) * std::log1p(ratio);
}

}  // namespace detail

// p_1(alpha) - p_{k+1}(alpha).
inline double price_gap(const CounterexampleInstance& inst, double alpha) {
  if (!(alpha > 0.0 && alpha < inst.beta)) {
    throw DomainError("alpha must lie in (0, beta)");
  }
  const double k = inst.k;
  const double other = inst.beta - alpha;
  return detail::member_price(alpha, alpha / k, other, inst.delta) -
         detail::member_price(other, other / k, alpha, inst.delta);
}

inline constexpr double kGapRootTolerance = 1e-10;
inline constexpr double kWitnessPriceTolerance = 1e-8;
inline constexpr double kWitnessValueSeparation = 0.1;

// grid + 1 evenly spaced points over [alpha_lo, alpha_hi]. beta/2 is
// inserted (or snapped to) exactly when it lies in the range.
inline std::vector<double> gap_grid(const CounterexampleInstance& inst,
                                    int grid) {
  inst.validate();
  if (grid < 1) throw DomainError("grid must be positive");
  std::vector<double> xs(static_cast<std::size_t>(grid) + 1);
  const double span = inst.alpha_hi - inst.alpha_lo;
  for (int m = 0; m <= grid; ++m) {
    xs[m] = inst.alpha_lo + span * m / grid;
  }
  xs.back() = inst.alpha_hi;
  const double mid = 0.5 * inst.beta;
  if (mid >= inst.alpha_lo && mid <= inst.alpha_hi) {
    auto it = std::lower_bound(xs.begin(), xs.end(), mid);
    const double snap = 1e-9 * span / grid;
    if (it != xs.end() && std::abs(*it - mid) <= snap) {
      *it = mid;
    } else if (it != xs.begin() && std::abs(*(it - 1) - mid) <= snap) {
      *(it - 1) = mid;
    } else {
      xs.insert(it, mid);
    }
  }
  return xs;
}

// Ascending roots of the gap curve: sign changes between consecutive grid
// points are refined by bisection to 1e-10; grid points where the gap is
// exactly zero are reported as roots.
inline std::vector<double> find_gap_roots(const CounterexampleInstance& inst,
                                          int grid) {
  if (grid < 100) throw DomainError("root scan needs grid >= 100");
  const std::vector<double> xs = gap_grid(inst, grid);
  std::vector<double> gs(xs.size());
  for (std::size_t m = 0; m < xs.size(); ++m) gs[m] = price_gap(inst, xs[m]);
  std::vector<double> roots;
  for (std::size_t m = 0; m < xs.size(); ++m) {
    if (gs[m] == 0.0) {
      roots.push_back(xs[m]);
      continue;
    }
    if (m + 1 == xs.size() || gs[m + 1] == 0.0) continue;
    if ((gs[m] < 0.0) == (gs[m + 1] < 0.0)) continue;
    double lo = xs[m];
    double hi = xs[m + 1];
    const bool lo_negative = gs[m] < 0.0;
    while (hi - lo > kGapRootTolerance) {
      const double mid = 0.5 * (lo + hi);
      if (!(mid > lo && mid < hi)) break;
      const double g = price_gap(inst, mid);
      if (g == 0.0) {
        lo = hi = mid;
        break;
      }
      if ((g < 0.0) == lo_negative) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    roots.push_back(0.5 * (lo + hi));
  }
  return roots;
}

struct NonidentifiabilityWitness {
  CounterexampleInstance instance;
  std::vector<double> roots;
  double alpha = 0.0;
  // Per-agent values in S1 and S2 under profile A; B swaps them.
  double low_value = 0.0;
  double high_value = 0.0;
  PartitionInstance profile_a;
  PartitionInstance profile_b;
  PriceProfile prices_a;
  PriceProfile prices_b;
  double max_price_difference = 0.0;
  double max_value_difference = 0.0;
};

// Agents 0..k-1 form S1, k..2k-1 form S2, agent 2k is a single dummy agent
// carrying the summarized value delta.
inline PartitionInstance counterexample_profile(int k, double s1_value,
                                                double s2_value,
                                                double delta) {
  PartitionInstance inst;
  inst.parts.resize(3);
  for (int i = 0; i < 2 * k + 1; ++i) {
    const std::size_t part = i < k ? 0 : (i < 2 * k ? 1 : 2);
    inst.parts[part].push_back(static_cast<std::size_t>(i));
    inst.values.push_back(part == 0 ? s1_value
                                    : (part == 1 ? s2_value : delta));
  }
  return inst;
}

inline NonidentifiabilityWitness verify_nonidentifiability(
    const CounterexampleInstance& inst, int grid = 1000) {
  inst.validate();
  if (inst.delta < 0.0) {
    throw DomainError("witness expansion needs delta >= 0 for the dummy agent");
  }
  NonidentifiabilityWitness w;
  w.instance = inst;
  w.roots = find_gap_roots(inst, grid);
  const double mid = 0.5 * inst.beta;
  auto off = std::find_if(w.roots.begin(), w.roots.end(), [&](double r) {
    return std::abs(r - mid) > 1e3 * kGapRootTolerance;
  });
  if (off == w.roots.end()) {
    throw CounterexampleNotFound("gap curve has no off-center root");
  }
  w.alpha = std::min(*off, inst.beta - *off);
  w.low_value = w.alpha / inst.k;
  w.high_value = (inst.beta - w.alpha) / inst.k;
  w.profile_a =
      counterexample_profile(inst.k, w.low_value, w.high_value, inst.delta);
  w.profile_b =
      counterexample_profile(inst.k, w.high_value, w.low_value, inst.delta);
  w.prices_a = partition_price(w.profile_a);
  w.prices_b = partition_price(w.profile_b);
  for (std::size_t i = 0; i < w.prices_a.size(); ++i) {
    w.max_price_difference = std::max(
        w.max_price_difference, std::abs(w.prices_a[i] - w.prices_b[i]));
    w.max_value_difference =
        std::max(w.max_value_difference,
                 std::abs(w.profile_a.values[i] - w.profile_b.values[i]));
  }
  if (w.max_price_difference > kWitnessPriceTolerance) {
    throw CounterexampleNotFound("witness prices differ by " +
                                 std::to_string(w.max_price_difference));
  }
  if (w.max_value_difference < kWitnessValueSeparation) {
    throw CounterexampleNotFound("witness profiles are too close to separate");
  }
  return w;
}

// CSV with header "alpha,gap", 6 significant digits.
inline std::string gap_curve_csv(const CounterexampleInstance& inst,
                                 int grid) {
  std::string out = "alpha,gap\n";
  char buf[64];
  for (double a : gap_grid(inst, grid)) {
    double g = price_gap(inst, a);
    if (g == 0.0) g = 0.0;  // drop the sign of negative zero
    std::snprintf(buf, sizeof buf, "%.6g,%.6g\n", a, g);
    out += buf;
  }
  return out;
}

}  // namespace propinv

#endif  // PROPINV_COUNTEREXAMPLE_HPP_
