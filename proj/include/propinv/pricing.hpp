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

#ifndef PROPINV_PRICING_HPP_
#define PROPINV_PRICING_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "propinv/allocation.hpp"
#include "propinv/errors.hpp"
#include "propinv/parallel.hpp"
#include "propinv/quadrature.hpp"
#include "propinv/weights.hpp"

namespace propinv {

// Price violations smaller than this are clamped; larger ones throw.
inline constexpr double kPriceClampSlack = 1e-9;

namespace detail {

inline void check_sum_coords(const WeightFunction& spec, double s, double w) {
  const double w0 = spec.min_weight();
  const double slack = 1e-12 * std::max(1.0, s);
  if (!(w >= w0 * (1.0 - 1e-12) && w <= spec.max_weight() * (1.0 + 1e-12))) {
    throw DomainError("own weight " + std::to_string(w) +
                      " outside [w(0), w(h)]");
  }
  if (!(w <= s + slack)) {
    throw DomainError("own weight " + std::to_string(w) +
                      " exceeds the weight sum " + std::to_string(s));
  }
}

}  // namespace detail

// Price of an agent with own weight w when all weights sum to s:
//
//   beta(s, w) = v(w) - (s / w) * Int_{w(0)}^{w} z v'(z) / (s - w + z) dz.
//
// Evaluated after substituting z = w(u) and folding v(w) into the integral,
//
//   beta(s, w) = Int_0^{v(w)} (s - w)(w - w(u)) / (w (s - w + w(u))) du,
//
// whose integrand is nonnegative and vanishes at both u = v(w) and s = w, so
// the price carries no cancellation error near zero.
inline double price_in_sum_coords(const WeightFunction& spec, double s,
                                  double w, const QuadratureConfig& q) {
  detail::check_sum_coords(spec, s, w);
  if (w <= spec.min_weight()) return 0.0;
  const double others = s - w;
  if (others <= 0.0) return 0.0;
  const double v = spec.value(w);
  auto integrand = [&](double u) {
    const double z = spec.weight_unchecked(u);
    return others * (w - z) / (w * (others + z));
  };
  const double r = integrate(integrand, 0.0, v, q).value;
  if (r < 0.0) {
    if (r < -kPriceClampSlack) {
      throw NumericalError("negative price from quadrature", -r);
    }
    return 0.0;
  }
  if (r > v) {
    if (r > v + kPriceClampSlack) {
      throw NumericalError("price exceeds value", r - v);
    }
    return v;
  }
  return r;
}

// Prices from a weight profile: r_i = beta_i(sum_k w_k, w_i).
inline PriceProfile price_profile_from_weights(
    std::span<const WeightFunction> specs, std::span<const double> weights,
    const QuadratureConfig& q, int threads = 1) {
  if (specs.size() != weights.size() || specs.empty()) {
    throw DomainError("weight profile length must match a nonempty agent list");
  }
  double s = 0.0;
  for (double w : weights) s += w;
  PriceProfile r(specs.size(), 0.0);
  parallel_for(specs.size(), threads, [&](std::size_t i) {
    r[i] = price_in_sum_coords(specs[i], s, weights[i], q);
  });
  return r;
}

inline WeightProfile weights_of(std::span<const WeightFunction> specs,
                                std::span<const double> values) {
  if (specs.size() != values.size() || specs.empty()) {
    throw DomainError("value profile length must match a nonempty agent list");
  }
  WeightProfile w(specs.size());
  for (std::size_t i = 0; i < specs.size(); ++i) {
    w[i] = specs[i].weight(values[i]);
  }
  return w;
}

// Per-unit prices r_i = v_i - Int_0^{v_i} x_i(z, v_-i) dz / x_i(v) under
// proportional weights, computed in weight space.
inline PriceProfile price_profile(std::span<const WeightFunction> specs,
                                  std::span<const double> values,
                                  const QuadratureConfig& q, int threads = 1) {
  q.validate();
  const WeightProfile w = weights_of(specs, values);
  PriceProfile r = price_profile_from_weights(specs, w, q, threads);
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (values[i] == 0.0) r[i] = 0.0;
  }
  return r;
}

// Closed-form prices for exponential weights on a partition set system:
//
//   p_i = v_i - (sum_T e^{v_T} / e^{v_S})
//               * (ln sum_T e^{v_T} - ln(e^{v_S - v_i} + sum_{T != S} e^{v_T}))
//
// for i in S. The log difference is evaluated as log1p of a ratio so that
// v_i = 0 yields exactly 0.
inline PriceProfile partition_price(const PartitionInstance& inst) {
  inst.validate();
  const std::vector<double> vs = inst.part_values();
  const std::vector<std::size_t> owner = inst.part_of();
  const double total = log_sum_exp(vs);
  PriceProfile p(inst.num_agents(), 0.0);
  std::vector<double> reduced(vs.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double vi = inst.values[i];
    if (vi == 0.0) continue;
    const std::size_t own = owner[i];
    reduced = vs;
    reduced[own] = vs[own] - vi;
    const double lse_wo = log_sum_exp(reduced);
    // (e^{v_S} - e^{v_S - v_i}) / (e^{v_S - v_i} + sum_{T != S} e^{v_T})
    const double ratio = std::exp(vs[own] - lse_wo) * (-std::expm1(-vi));
    const double price = vi - std::exp(total - vs[own]) * std::log1p(ratio);
    if (price < -kPriceClampSlack || price > vi + kPriceClampSlack) {
      throw NumericalError("partition price outside [0, v_i]",
                           price < 0.0 ? -price : price - vi);
    }
    p[i] = std::clamp(price, 0.0, vi);
  }
  return p;
}

}  // namespace propinv

#endif  // PROPINV_PRICING_HPP_
