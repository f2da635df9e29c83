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

#include "propinv/pricing.hpp"

#include <cmath>

#include <gtest/gtest.h>

#include "propinv/errors.hpp"
#include "test_support.hpp"

namespace propinv {
namespace {

const QuadratureConfig kQ;

TEST(PriceInSumCoords, MatchesTrapezoidOracle) {
  const auto e = WeightFunction::exponential(1, 1, 5);
  const double oracle = testing::trapezoid_price(e, 10.0, 3.0);
  EXPECT_NEAR(price_in_sum_coords(e, 10.0, 3.0, kQ), oracle, 1e-9);
  // Frozen from an offline high-precision evaluation of the same integral.
  EXPECT_NEAR(price_in_sum_coords(e, 10.0, 3.0, kQ), 0.354800450954077, 1e-11);
}

TEST(PriceInSumCoords, RandomPointsMatchTrapezoidOracle) {
  testing::Rng rng(31);
  for (int t = 0; t < 12; ++t) {
    const auto spec = testing::random_spec(rng);
    const double w = rng.uniform(spec.min_weight(), spec.max_weight());
    const double s = w + rng.uniform(0.2, 30.0);
    EXPECT_NEAR(price_in_sum_coords(spec, s, w, kQ),
                testing::trapezoid_price(spec, s, w, 200000), 1e-8);
  }
}

TEST(PriceInSumCoords, BoundaryAndDomain) {
  const auto e = WeightFunction::exponential(1, 1, 5);
  EXPECT_EQ(price_in_sum_coords(e, 4.0, 1.0, kQ), 0.0);
  EXPECT_EQ(price_in_sum_coords(e, 3.0, 3.0, kQ), 0.0);
  EXPECT_THROW(price_in_sum_coords(e, 2.0, 3.0, kQ), DomainError);
  EXPECT_THROW(price_in_sum_coords(e, 10.0, 0.5, kQ), DomainError);
  EXPECT_THROW(price_in_sum_coords(e, 1000.0, 200.0, kQ), DomainError);
}

TEST(PriceProfile, SymmetricPairMatchesOracle) {
  const std::vector<WeightFunction> specs(2, WeightFunction::exponential(1, 1, 5));
  const std::vector<double> v{1.0, 1.0};
  const auto r = price_profile(specs, v, kQ);
  EXPECT_EQ(r[0], r[1]);
  EXPECT_NEAR(r[0], testing::trapezoid_profile(specs, v)[0], 1e-9);
  EXPECT_GT(r[0], 0.0);
  EXPECT_LT(r[0], 1.0);
}

TEST(PriceProfile, SingleAgentPaysNothing) {
  const std::vector<WeightFunction> specs{WeightFunction::affine(1, 1, 5)};
  EXPECT_EQ(price_profile(specs, std::vector<double>{2.0}, kQ)[0], 0.0);
}

TEST(PriceProfile, ConsistentWithSumCoordinates) {
  testing::Rng rng(32);
  for (int t = 0; t < 50; ++t) {
    const int n = rng.integer(2, 6);
    const auto specs = testing::random_specs(rng, n);
    const auto v = testing::random_values(rng, n);
    const auto w = weights_of(specs, v);
    double s = 0.0;
    for (double x : w) s += x;
    const auto r = price_profile(specs, v, kQ);
    for (int i = 0; i < n; ++i) {
      EXPECT_EQ(r[i], price_in_sum_coords(specs[i], s, w[i], kQ));
    }
  }
}

TEST(PriceProfile, ZeroPriceIffZeroValue) {
  testing::Rng rng(33);
  for (int t = 0; t < 200; ++t) {
    const int n = rng.integer(1, 6);
    const auto specs = testing::random_specs(rng, n);
    auto v = testing::random_values(rng, n);
    for (double& x : v) {
      if (rng.integer(0, 3) == 0) x = 0.0;
    }
    const auto r = price_profile(specs, v, kQ);
    for (int i = 0; i < n; ++i) {
      if (n == 1) {
        EXPECT_EQ(r[i], 0.0);
        continue;
      }
      EXPECT_EQ(r[i] == 0.0, v[i] == 0.0) << "v=" << v[i] << " r=" << r[i];
      EXPECT_LE(r[i], v[i]);
      EXPECT_GE(r[i], 0.0);
    }
  }
}

TEST(PriceProfile, TinyValuesGivePositivePrices) {
  const std::vector<WeightFunction> specs(2, WeightFunction::exponential(1, 1, 5));
  const auto r = price_profile(specs, std::vector<double>{1e-9, 2.0}, kQ);
  EXPECT_GT(r[0], 0.0);
  EXPECT_LT(r[0], 1e-9);
}

TEST(PriceProfile, StrictlyIncreasingInOwnValue) {
  testing::Rng rng(34);
  for (int t = 0; t < 200; ++t) {
    const int n = rng.integer(2, 5);
    const auto specs = testing::random_specs(rng, n);
    auto v = testing::random_values(rng, n);
    const int i = rng.integer(0, n - 1);
    double a = rng.uniform(0.01, 5);
    double b = rng.uniform(0.01, 5);
    if (a > b) std::swap(a, b);
    if (b - a < 1e-3) continue;
    v[i] = a;
    const double ra = price_profile(specs, v, kQ)[i];
    v[i] = b;
    const double rb = price_profile(specs, v, kQ)[i];
    EXPECT_LT(ra, rb);
  }
}

TEST(PriceInSumCoords, StrictlyIncreasingInSum) {
  testing::Rng rng(35);
  for (int t = 0; t < 300; ++t) {
    const auto spec = testing::random_spec(rng);
    const double w = rng.uniform(spec.min_weight() * 1.01, spec.max_weight());
    const double s1 = w + rng.uniform(0.01, 40);
    const double s2 = s1 + rng.uniform(0.01, 10);
    EXPECT_LT(price_in_sum_coords(spec, s1, w, kQ), price_in_sum_coords(spec, s2, w, kQ));
  }
}

TEST(PriceProfile, PanelDoublingChangesLittle) {
  testing::Rng rng(36);
  QuadratureConfig fine = kQ;
  fine.panels *= 2;
  for (int t = 0; t < 50; ++t) {
    const int n = rng.integer(2, 6);
    const auto specs = testing::random_specs(rng, n);
    const auto v = testing::random_values(rng, n);
    const auto a = price_profile(specs, v, kQ);
    const auto b = price_profile(specs, v, fine);
    for (int i = 0; i < n; ++i) EXPECT_LT(std::abs(a[i] - b[i]), kQ.abs_tol);
  }
}

TEST(PriceProfile, PowerShiftedFamilyMatchesOracle) {
  // c = 1 keeps v'(z) bounded so the trapezoid oracle applies.
  const std::vector<WeightFunction> specs{WeightFunction::power_shifted(1, 2, 1, 5),
                                          WeightFunction::affine(1, 2, 5)};
  const std::vector<double> v{2.0, 1.0};
  const auto r = price_profile(specs, v, kQ);
  const auto o = testing::trapezoid_profile(specs, v);
  EXPECT_NEAR(r[0], o[0], 1e-9);
  EXPECT_NEAR(r[1], o[1], 1e-9);
  // With c > 1 the integrand in value space stays smooth.
  const std::vector<WeightFunction> curved{WeightFunction::power_shifted(1, 1, 2.5, 3),
                                           WeightFunction::exponential(1, 1, 3)};
  const auto rc = price_profile(curved, std::vector<double>{1.5, 1.0}, kQ);
  EXPECT_GT(rc[0], 0.0);
  EXPECT_LT(rc[0], 1.5);
}

TEST(PriceProfile, ThreadCountDoesNotChangeBits) {
  testing::Rng rng(37);
  const auto specs = testing::random_specs(rng, 7);
  const auto v = testing::random_values(rng, 7);
  const auto a = price_profile(specs, v, kQ, 1);
  const auto b = price_profile(specs, v, kQ, 4);
  EXPECT_EQ(a, b);
}

TEST(PriceProfile, RejectsBadInput) {
  const std::vector<WeightFunction> specs(2, WeightFunction::exponential(1, 1, 5));
  EXPECT_THROW(price_profile(specs, std::vector<double>{1.0}, kQ), DomainError);
  EXPECT_THROW(price_profile(specs, std::vector<double>{1.0, 6.0}, kQ), DomainError);
  EXPECT_THROW(price_profile(specs, std::vector<double>{-1.0, 1.0}, kQ), DomainError);
}

// Naive closed form without stabilization, usable for small values.
std::vector<double> naive_partition_price(const PartitionInstance& inst) {
  const auto vs = inst.part_values();
  const auto owner = inst.part_of();
  double total = 0.0;
  for (double v : vs) total += std::exp(v);
  std::vector<double> p(inst.num_agents());
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double es = std::exp(vs[owner[i]]);
    const double without = total - es + std::exp(vs[owner[i]] - inst.values[i]);
    p[i] = inst.values[i] - (total / es) * (std::log(total) - std::log(without));
  }
  return p;
}

TEST(PartitionPrice, MatchesNaiveFormula) {
  testing::Rng rng(38);
  for (int t = 0; t < 300; ++t) {
    const int n = rng.integer(2, 7);
    PartitionInstance inst;
    inst.values = testing::random_values(rng, n, 0.0, 3.0);
    const int parts = rng.integer(2, n);
    inst.parts.resize(parts);
    for (int i = 0; i < n; ++i) {
      inst.parts[i < parts ? i : rng.integer(0, parts - 1)].push_back(i);
    }
    const auto p = partition_price(inst);
    const auto q = naive_partition_price(inst);
    for (int i = 0; i < n; ++i) {
      EXPECT_NEAR(p[i], q[i], 1e-10);
      EXPECT_GE(p[i], 0.0);
      EXPECT_LE(p[i], inst.values[i]);
    }
  }
}

TEST(PartitionPrice, ZeroValuePaysZeroExactly) {
  PartitionInstance inst{{{0, 1}, {2}}, {0.0, 2.0, 1.0}};
  const auto p = partition_price(inst);
  EXPECT_EQ(p[0], 0.0);
  EXPECT_GT(p[1], 0.0);
}

TEST(PartitionPrice, StableForLargeValues) {
  PartitionInstance inst{{{0, 1}, {2, 3}, {4}}, {300.0, 300.0, 250.0, 340.0, 400.0}};
  const auto p = partition_price(inst);
  for (std::size_t i = 0; i < p.size(); ++i) {
    EXPECT_TRUE(std::isfinite(p[i]));
    EXPECT_GE(p[i], 0.0);
    EXPECT_LE(p[i], inst.values[i]);
  }
}

}  // namespace
}  // namespace propinv
