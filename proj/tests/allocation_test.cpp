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

#include "propinv/allocation.hpp"

#include <cmath>
#include <numeric>

#include <gtest/gtest.h>

#include "propinv/errors.hpp"
#include "test_support.hpp"

namespace propinv {
namespace {

TEST(ProportionalAlloc, Examples) {
  EXPECT_EQ(proportional_alloc(std::vector<double>{1, 1}),
            (std::vector<double>{0.5, 0.5}));
  EXPECT_EQ(proportional_alloc(std::vector<double>{1, 3}),
            (std::vector<double>{0.25, 0.75}));
  const auto x = proportional_alloc(std::vector<double>{2, 3, 5});
  EXPECT_NEAR(x[0], 0.2, 1e-16);
  EXPECT_NEAR(x[1], 0.3, 1e-16);
  EXPECT_NEAR(x[2], 0.5, 1e-16);
}

TEST(ProportionalAlloc, RejectsNonpositiveWeights) {
  EXPECT_THROW(proportional_alloc(std::vector<double>{1, 0}), DomainError);
  EXPECT_THROW(proportional_alloc(std::vector<double>{-1, 2}), DomainError);
  EXPECT_THROW(proportional_alloc(std::vector<double>{}), DomainError);
}

TEST(ProportionalAlloc, NormalizedAndMonotone) {
  testing::Rng rng(21);
  for (int t = 0; t < 500; ++t) {
    const int n = rng.integer(1, 8);
    std::vector<double> w(n);
    for (double& x : w) x = rng.uniform(0.1, 10);
    const auto x = proportional_alloc(w);
    EXPECT_NEAR(std::accumulate(x.begin(), x.end(), 0.0), 1.0, 1e-12);
    const int i = rng.integer(0, n - 1);
    auto w2 = w;
    w2[i] *= 1.5;
    const auto y = proportional_alloc(w2);
    if (n > 1) {
      EXPECT_GT(y[i], x[i]);
    }
    for (int j = 0; j < n; ++j) {
      if (j != i) {
        EXPECT_LT(y[j], x[j]);
      }
    }
  }
}

TEST(LogSumExp, MatchesNaiveAndSurvivesLargeInputs) {
  const std::vector<double> xs{1.0, 2.0, 3.0};
  EXPECT_NEAR(log_sum_exp(xs), std::log(std::exp(1.0) + std::exp(2.0) + std::exp(3.0)),
              1e-14);
  const std::vector<double> big{1000.0, 1000.0};
  EXPECT_NEAR(log_sum_exp(big), 1000.0 + std::log(2.0), 1e-12);
}

TEST(PartitionAlloc, Examples) {
  PartitionInstance a{{{0}, {1}}, {0.0, 0.0}};
  EXPECT_EQ(partition_alloc(a), (std::vector<double>{0.5, 0.5}));
  PartitionInstance b{{{0}, {1}}, {std::log(3.0), 0.0}};
  const auto xb = partition_alloc(b);
  EXPECT_NEAR(xb[0], 0.75, 1e-15);
  EXPECT_NEAR(xb[1], 0.25, 1e-15);
  PartitionInstance c{{{0, 1}, {2}}, {1.0, 1.0, 2.0}};
  const auto xp = partition_part_alloc(c);
  EXPECT_NEAR(xp[0], 0.5, 1e-15);
  const auto xc = partition_alloc(c);
  EXPECT_EQ(xc[0], xc[1]);
}

TEST(PartitionAlloc, Validation) {
  EXPECT_THROW(partition_alloc(PartitionInstance{{{0, 1}}, {1, 1}}), DomainError);
  EXPECT_THROW(partition_alloc(PartitionInstance{{{0, 1}, {1}}, {1, 1}}), DomainError);
  EXPECT_THROW(partition_alloc(PartitionInstance{{{0}, {}}, {1}}), DomainError);
  EXPECT_THROW(partition_alloc(PartitionInstance{{{0}, {2}}, {1, 1, 1}}), DomainError);
  EXPECT_THROW(partition_alloc(PartitionInstance{{{0}, {1}}, {1, -1}}), DomainError);
}

TEST(PartitionAlloc, NormalizedAndMatchesNaive) {
  testing::Rng rng(22);
  for (int t = 0; t < 300; ++t) {
    const int n = rng.integer(2, 9);
    PartitionInstance inst;
    inst.values = testing::random_values(rng, n, 0.0, 3.0);
    const int parts = rng.integer(2, n);
    inst.parts.resize(parts);
    for (int i = 0; i < n; ++i) {
      inst.parts[i < parts ? i : rng.integer(0, parts - 1)].push_back(i);
    }
    const auto xp = partition_part_alloc(inst);
    EXPECT_NEAR(std::accumulate(xp.begin(), xp.end(), 0.0), 1.0, 1e-12);
    const auto vs = inst.part_values();
    double naive = 0.0;
    for (double v : vs) naive += std::exp(v);
    for (int p = 0; p < parts; ++p) EXPECT_NEAR(xp[p], std::exp(vs[p]) / naive, 1e-12);
    const auto x = partition_alloc(inst);
    const auto owner = inst.part_of();
    for (int i = 0; i < n; ++i) EXPECT_EQ(x[i], xp[owner[i]]);
  }
}

}  // namespace
}  // namespace propinv
