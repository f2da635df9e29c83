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

#include "propinv/proxygame.hpp"

#include <cmath>

#include <gtest/gtest.h>

#include "propinv/errors.hpp"
#include "propinv/pricing.hpp"
#include "test_support.hpp"

namespace propinv {
namespace {

const QuadratureConfig kQ;

ProxyGame game_from_values(const std::vector<WeightFunction>& specs,
                           const std::vector<double>& v) {
  return ProxyGame{specs, price_profile(specs, v, kQ)};
}

TEST(Imbalance, ZeroAtTruth) {
  testing::Rng rng(51);
  for (int t = 0; t < 40; ++t) {
    const int n = rng.integer(2, 6);
    const auto specs = testing::random_specs(rng, n);
    const auto v = testing::random_values(rng, n);
    const auto game = game_from_values(specs, v);
    const auto phi = imbalance(game, weights_of(specs, v), kQ);
    for (double x : phi) EXPECT_LE(std::abs(x), 10 * kQ.abs_tol);
  }
}

TEST(Imbalance, ZeroPricesAtLowerBoundary) {
  const std::vector<WeightFunction> specs{WeightFunction::exponential(1, 1, 5),
                                          WeightFunction::affine(2, 1, 5)};
  const ProxyGame game{specs, {0.0, 0.0}};
  const auto phi = imbalance(game, std::vector<double>{1.0, 2.0}, kQ);
  EXPECT_EQ(phi[0], 0.0);
  EXPECT_EQ(phi[1], 0.0);
}

TEST(Imbalance, NegativeWhenGuessOvershoots) {
  testing::Rng rng(52);
  for (int t = 0; t < 50; ++t) {
    const int n = rng.integer(2, 5);
    const auto specs = testing::random_specs(rng, n);
    const auto v = testing::random_values(rng, n, 0.1, 4.5);
    const auto game = game_from_values(specs, v);
    auto w = weights_of(specs, v);
    const int i = rng.integer(0, n - 1);
    w[i] = specs[i].weight(std::min(5.0, v[i] + rng.uniform(0.05, 0.5)));
    EXPECT_LT(imbalance(game, w, kQ)[i], 0.0);
  }
}

TEST(CumulativeImbalance, EmptyIntegralAtBoundary) {
  const std::vector<WeightFunction> specs(2, WeightFunction::exponential(1, 1, 5));
  const auto game = game_from_values(specs, {1.0, 2.0});
  EXPECT_EQ(cumulative_imbalance(game, std::vector<double>{1.0, 5.0}, 0, kQ), 0.0);
}

TEST(CumulativeImbalance, StrictlyConcaveWithArgmaxAtTruth) {
  testing::Rng rng(53);
  for (int t = 0; t < 8; ++t) {
    const auto specs = testing::random_specs(rng, 3);
    const auto v = testing::random_values(rng, 3, 0.5, 4.5);
    const auto game = game_from_values(specs, v);
    auto w = weights_of(specs, v);
    const int i = rng.integer(0, 2);
    const double lo = specs[i].min_weight();
    const double hi = specs[i].max_weight();
    const int m = 200;
    const double step = (hi - lo) / m;
    std::vector<double> u(m + 1);
    for (int k = 0; k <= m; ++k) {
      w[i] = k == m ? hi : lo + k * step;
      u[k] = cumulative_imbalance(game, w, i, kQ);
    }
    for (int k = 1; k < m; ++k) EXPECT_LT(u[k + 1] - 2 * u[k] + u[k - 1], 0.0);
    const int arg = std::max_element(u.begin(), u.end()) - u.begin();
    EXPECT_LE(std::abs(lo + arg * step - specs[i].weight(v[i])), step);
  }
}

TEST(GridNashOracle, UniqueNearTruth) {
  testing::Rng rng(54);
  for (int t = 0; t < 4; ++t) {
    const auto specs = testing::random_specs(rng, 2);
    const auto v = testing::random_values(rng, 2, 0.3, 4.7);
    const auto game = game_from_values(specs, v);
    const auto eq = grid_nash_oracle(game, 32, kQ);
    ASSERT_EQ(eq.size(), 1u);
    for (int i = 0; i < 2; ++i) {
      const double step = (specs[i].max_weight() - specs[i].min_weight()) / 31;
      EXPECT_LE(std::abs(eq[0].weights[i] - specs[i].weight(v[i])), step);
    }
  }
}

TEST(GridNashOracle, ZeroPricesSelectLowerCorner) {
  const std::vector<WeightFunction> specs{WeightFunction::exponential(1, 1, 5),
                                          WeightFunction::affine(1, 2, 5)};
  const auto eq = grid_nash_oracle(ProxyGame{specs, {0.0, 0.0}}, 16, kQ);
  ASSERT_EQ(eq.size(), 1u);
  EXPECT_EQ(eq[0].index, (std::vector<std::size_t>{0, 0}));
}

TEST(GridNashOracle, SymmetricInstanceHasSymmetricEquilibrium) {
  const std::vector<WeightFunction> specs(2, WeightFunction::exponential(1, 0.8, 5));
  const auto game = game_from_values(specs, {2.0, 2.0});
  const auto eq = grid_nash_oracle(game, 24, kQ);
  ASSERT_EQ(eq.size(), 1u);
  EXPECT_EQ(eq[0].index[0], eq[0].index[1]);
}

TEST(GridNashOracle, ThreeAgentsAndThreadInvariance) {
  const std::vector<WeightFunction> specs{WeightFunction::exponential(1, 0.6, 5),
                                          WeightFunction::affine(1, 1.5, 5),
                                          WeightFunction::exponential(1.5, 0.4, 5)};
  const auto game = game_from_values(specs, {1.0, 3.0, 2.5});
  const auto a = grid_nash_oracle(game, 12, kQ, 1);
  const auto b = grid_nash_oracle(game, 12, kQ, 3);
  ASSERT_EQ(a.size(), 1u);
  ASSERT_EQ(b.size(), 1u);
  EXPECT_EQ(a[0].index, b[0].index);
}

TEST(GridNashOracle, SizeLimits) {
  const std::vector<WeightFunction> four(4, WeightFunction::exponential(1, 1, 5));
  EXPECT_THROW(grid_nash_oracle(ProxyGame{four, {0, 0, 0, 0}}, 8, kQ), SizeError);
  const std::vector<WeightFunction> two(2, WeightFunction::exponential(1, 1, 5));
  EXPECT_THROW(grid_nash_oracle(ProxyGame{two, {0, 0}}, 65, kQ), SizeError);
}

TEST(ProxyGame, Validation) {
  const std::vector<WeightFunction> two(2, WeightFunction::exponential(1, 1, 5));
  EXPECT_THROW(imbalance(ProxyGame{two, {0.0}}, std::vector<double>{1, 1}, kQ),
               DomainError);
  EXPECT_THROW(imbalance(ProxyGame{two, {0.0, 6.0}}, std::vector<double>{1, 1}, kQ),
               DomainError);
  EXPECT_THROW(imbalance(ProxyGame{two, {0.0, 1.0}}, std::vector<double>{0.5, 1}, kQ),
               DomainError);
}

}  // namespace
}  // namespace propinv
