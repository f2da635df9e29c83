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

#ifndef PROPINV_QUADRATURE_HPP_
#define PROPINV_QUADRATURE_HPP_

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <vector>

#include "propinv/errors.hpp"

namespace propinv {

struct QuadratureConfig {
  int panels = 64;
  int nodes_per_panel = 8;
  double abs_tol = 1e-10;

  void validate() const {
    if (panels < 1) throw DomainError("quadrature panels must be >= 1");
    if (nodes_per_panel < 2) {
      throw DomainError("quadrature nodes_per_panel must be >= 2");
    }
    if (!(abs_tol > 0.0)) throw DomainError("quadrature abs_tol must be > 0");
  }
};

// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussLegendreRule {
  std::vector<double> nodes;
  std::vector<double> weights;

  explicit GaussLegendreRule(int n) : nodes(n), weights(n) {
    const int half = (n + 1) / 2;
    for (int i = 0; i < half; ++i) {
      double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
      double dp = 0.0;
      for (int it = 0; it < 100; ++it) {
        // Three-term recurrence for P_n(x) and its derivative.
        double p0 = 1.0;
        double p1 = x;
        for (int k = 2; k <= n; ++k) {
          const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
          p0 = p1;
          p1 = p2;
        }
        dp = n * (x * p1 - p0) / (x * x - 1.0);
        const double dx = p1 / dp;
        x -= dx;
        if (std::abs(dx) < 1e-16) break;
      }
      const double wt = 2.0 / ((1.0 - x * x) * dp * dp);
      nodes[i] = -x;
      nodes[n - 1 - i] = x;
      weights[i] = wt;
      weights[n - 1 - i] = wt;
    }
    if (n % 2 == 1) nodes[n / 2] = 0.0;
  }
};

// Shared, lazily built rules; safe to call concurrently.
inline const GaussLegendreRule& gauss_legendre_rule(int n) {
  static std::mutex mu;
  static std::map<int, std::unique_ptr<GaussLegendreRule>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<GaussLegendreRule>(n);
  return *slot;
}

// Fixed composite rule: `panels` equal panels, one Gauss-Legendre rule each.
template <class F>
double composite_gauss_legendre(const F& f, double a, double b, int panels,
                                const GaussLegendreRule& rule) {
  const double width = (b - a) / panels;
  const double half = 0.5 * width;
  const std::size_t m = rule.nodes.size();
  double total = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double mid = a + (p + 0.5) * width;
    double panel = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
      panel += rule.weights[k] * f(mid + half * rule.nodes[k]);
    }
    total += panel * half;
  }
  return total;
}

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
  int panels = 0;
};

// Integrates f over [a, b]. The error estimate is the change between the
// configured panel count and half of it (or double it, for a single panel).
// If the estimate exceeds abs_tol the panel count is doubled once; a second
// miss throws NumericalError carrying the estimate.
template <class F>
QuadratureResult integrate(const F& f, double a, double b,
                           const QuadratureConfig& cfg) {
  if (a == b) return {0.0, 0.0, 0};
  const GaussLegendreRule& rule = gauss_legendre_rule(cfg.nodes_per_panel);
  int fine_panels = cfg.panels;
  double fine = 0.0;
  double coarse = 0.0;
  if (fine_panels >= 2 && fine_panels % 2 == 0) {
    coarse = composite_gauss_legendre(f, a, b, fine_panels / 2, rule);
    fine = composite_gauss_legendre(f, a, b, fine_panels, rule);
  } else {
    coarse = composite_gauss_legendre(f, a, b, fine_panels, rule);
    fine_panels *= 2;
    fine = composite_gauss_legendre(f, a, b, fine_panels, rule);
  }
  double err = std::abs(fine - coarse);
  if (err <= cfg.abs_tol) return {fine, err, fine_panels};

  coarse = fine;
  fine_panels *= 2;
  fine = composite_gauss_legendre(f, a, b, fine_panels, rule);
  err = std::abs(fine - coarse);
  if (err <= cfg.abs_tol) return {fine, err, fine_panels};
  throw NumericalError("quadrature did not converge to abs_tol after panel "
                       "doubling",
                       err);
}

}  // namespace propinv

#endif  // PROPINV_QUADRATURE_HPP_
