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

#ifndef PROPINV_ALLOCATION_HPP_
#define PROPINV_ALLOCATION_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "propinv/errors.hpp"

namespace propinv {

// Per-agent vectors. Index i is agent i throughout.
using ValueProfile = std::vector<double>;
using WeightProfile = std::vector<double>;
using PriceProfile = std::vector<double>;
using AllocationProfile = std::vector<double>;

// log(sum_k exp(x_k)) with max subtraction.
inline double log_sum_exp(std::span<const double> xs) {
  if (xs.empty()) return -std::numeric_limits<double>::infinity();
  const double m = *std::max_element(xs.begin(), xs.end());
  if (!std::isfinite(m)) return m;
  double sum = 0.0;
  for (double x : xs) sum += std::exp(x - m);
  return m + std::log(sum);
}

// x_i = w_i / sum_k w_k.
inline AllocationProfile proportional_alloc(std::span<const double> weights) {
  if (weights.empty()) throw DomainError("weight profile is empty");
  double sum = 0.0;
  for (double w : weights) {
    if (!(w > 0.0) || !std::isfinite(w)) {
      throw DomainError("proportional allocation requires positive weights");
    }
    sum += w;
  }
  AllocationProfile x(weights.size());
  for (std::size_t i = 0; i < weights.size(); ++i) x[i] = weights[i] / sum;
  return x;
}

// Partition set system: exactly one part is allocated, with probability
// proportional to exp(sum of its members' values).
struct PartitionInstance {
  std::vector<std::vector<std::size_t>> parts;
  ValueProfile values;

  std::size_t num_agents() const { return values.size(); }

  void validate() const {
    if (parts.size() < 2) {
      throw DomainError("partition instance needs at least two parts");
    }
    std::vector<int> seen(values.size(), 0);
    for (const auto& part : parts) {
      if (part.empty()) throw DomainError("partition part is empty");
      for (std::size_t i : part) {
        if (i >= values.size()) {
          throw DomainError("partition references agent " + std::to_string(i) +
                            " outside the value profile");
        }
        if (seen[i]++) {
          throw DomainError("partition parts overlap at agent " +
                            std::to_string(i));
        }
      }
    }
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (!seen[i]) {
        throw DomainError("partition does not cover agent " +
                          std::to_string(i));
      }
      if (!(values[i] >= 0.0) || !std::isfinite(values[i])) {
        throw DomainError("partition values must be finite and nonnegative");
      }
    }
  }

  // v_S for every part.
  std::vector<double> part_values() const {
    std::vector<double> sums(parts.size(), 0.0);
    for (std::size_t p = 0; p < parts.size(); ++p) {
      for (std::size_t i : parts[p]) sums[p] += values[i];
    }
    return sums;
  }

  // Index of the part containing each agent.
  std::vector<std::size_t> part_of() const {
    std::vector<std::size_t> owner(values.size(), 0);
    for (std::size_t p = 0; p < parts.size(); ++p) {
      for (std::size_t i : parts[p]) owner[i] = p;
    }
    return owner;
  }
};

// Per-part probabilities exp(v_S) / sum_T exp(v_T).
inline std::vector<double> partition_part_alloc(const PartitionInstance& inst) {
  inst.validate();
  const std::vector<double> vs = inst.part_values();
  const double lse = log_sum_exp(vs);
  std::vector<double> x(vs.size());
  for (std::size_t p = 0; p < vs.size(); ++p) x[p] = std::exp(vs[p] - lse);
  return x;
}

// Per-agent probabilities; each agent receives its part's probability.
inline AllocationProfile partition_alloc(const PartitionInstance& inst) {
  const std::vector<double> xp = partition_part_alloc(inst);
  const std::vector<std::size_t> owner = inst.part_of();
  AllocationProfile x(inst.num_agents());
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = xp[owner[i]];
  return x;
}

}  // namespace propinv

#endif  // PROPINV_ALLOCATION_HPP_
