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

#include "propinv/quadrature.hpp"

#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "propinv/errors.hpp"

namespace propinv {
namespace {

TEST(GaussLegendreRule, WeightsSumToTwoAndIntegratePolynomials) {
  for (int n : {2, 3, 5, 8, 16}) {
    const GaussLegendreRule& r = gauss_legendre_rule(n);
    double sum = 0.0;
    for (double w : r.weights) sum += w;
    EXPECT_NEAR(sum, 2.0, 1e-14) << n;
    // Exact for degree 2n - 1.
    const int deg = 2 * n - 2;
    double moment = 0.0;
    for (int k = 0; k < n; ++k) moment += r.weights[k] * std::pow(r.nodes[k], deg);
    EXPECT_NEAR(moment, 2.0 / (deg + 1), 1e-13) << n;
  }
}

TEST(GaussLegendreRule, NodesAreSymmetricAndSorted) {
  const GaussLegendreRule& r = gauss_legendre_rule(7);
  for (int k = 0; k < 7; ++k) EXPECT_NEAR(r.nodes[k], -r.nodes[6 - k], 1e-15);
  for (int k = 1; k < 7; ++k) EXPECT_LT(r.nodes[k - 1], r.nodes[k]);
  EXPECT_EQ(r.nodes[3], 0.0);
}

TEST(Integrate, SmoothFunctions) {
  QuadratureConfig q;
  EXPECT_NEAR(integrate([](double x) { return std::exp(x); }, 0, 1, q).value,
              std::numbers::e - 1, 1e-13);
  EXPECT_NEAR(integrate([](double x) { return std::sin(x); }, 0, std::numbers::pi, q)
                  .value,
              2.0, 1e-13);
  EXPECT_NEAR(integrate([](double x) { return 1 / (1 + x); }, 0, 3, q).value,
              std::log(4.0), 1e-13);
}

TEST(Integrate, EmptyIntervalIsZero) {
  const auto r = integrate([](double) { return 1.0; }, 2.0, 2.0, QuadratureConfig{});
  EXPECT_EQ(r.value, 0.0);
  EXPECT_EQ(r.panels, 0);
}

TEST(Integrate, DoublesOnceBeforeFailing) {
  QuadratureConfig q{2, 2, 1e-14};
  // Converges after one doubling.
  const auto ok = integrate([](double x) { return x * x * x; }, 0, 1, q);
  EXPECT_NEAR(ok.value, 0.25, 1e-15);
  // A kink defeats both attempts.
  EXPECT_THROW(integrate([](double x) { return std::sqrt(std::abs(x - 0.3)); }, 0, 1, q),
               NumericalError);
  try {
    integrate([](double x) { return std::sqrt(std::abs(x - 0.3)); }, 0, 1, q);
  } catch (const NumericalError& e) {
    EXPECT_GT(e.residual(), 1e-14);
  }
}

TEST(Integrate, OddPanelCountComparesAgainstDouble) {
  QuadratureConfig q{3, 8, 1e-12};
  const auto r = integrate([](double x) { return std::cos(x); }, 0, 1, q);
  EXPECT_EQ(r.panels, 6);
  EXPECT_NEAR(r.value, std::sin(1.0), 1e-14);
}

TEST(QuadratureConfig, Validation) {
  EXPECT_THROW((QuadratureConfig{0, 8, 1e-10}).validate(), DomainError);
  EXPECT_THROW((QuadratureConfig{4, 1, 1e-10}).validate(), DomainError);
  EXPECT_THROW((QuadratureConfig{4, 8, 0}).validate(), DomainError);
  EXPECT_NO_THROW(QuadratureConfig{}.validate());
}

}  // namespace
}  // namespace propinv
