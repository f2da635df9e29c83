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

#ifndef PROPINV_PROXYGAME_HPP_
#define PROPINV_PROXYGAME_HPP_

#include <algorithm>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "propinv/allocation.hpp"
#include "propinv/errors.hpp"
#include "propinv/parallel.hpp"
#include "propinv/pricing.hpp"
#include "propinv/quadrature.hpp"
#include "propinv/weights.hpp"

namespace propinv {

// Proxy game for observed prices: player i picks a weight in
// [w_i(0), w_i(h)] and earns the cumulative price imbalance U_i.
struct ProxyGame {
  std::vector<WeightFunction> specs;
  PriceProfile prices;

  std::size_t num_agents() const { return specs.size(); }

  void validate() const {
    if (specs.empty() || specs.size() != prices.size()) {
      throw DomainError("proxy game needs one price per agent");
    }
    for (std::size_t i = 0; i < specs.size(); ++i) {
      if (!(prices[i] >= 0.0 && prices[i] <= specs[i].value_cap())) {
        throw DomainError("price " + std::to_string(prices[i]) +
                          " outside [0, h] for agent " + std::to_string(i));
      }
    }
  }

  void check_guess(std::span<const double> guess) const {
    if (guess.size() != specs.size()) {
      throw DomainError("guess length must match the agent count");
    }
    for (std::size_t i = 0; i < specs.size(); ++i) {
      if (!(guess[i] >= specs[i].min_weight() &&
            guess[i] <= specs[i].max_weight())) {
        throw DomainError("guess outside the action space of agent " +
                          std::to_string(i));
      }
    }
  }
};

// phi_i = r_i - beta_i(guess).
inline std::vector<double> imbalance(const ProxyGame& game,
                                     std::span<const double> guess,
                                     const QuadratureConfig& q) {
  game.validate();
  game.check_guess(guess);
  const PriceProfile beta = price_profile_from_weights(game.specs, guess, q);
  std::vector<double> phi(beta.size());
  for (std::size_t i = 0; i < phi.size(); ++i) phi[i] = game.prices[i] - beta[i];
  return phi;
}

namespace detail {

// phi_i as a function of player i's own weight z, others fixed with sum
// `others_sum`.
inline double imbalance_at(const ProxyGame& game, std::size_t i,
                           double others_sum, double z,
                           const QuadratureConfig& q) {
  return game.prices[i] -
         price_in_sum_coords(game.specs[i], others_sum + z, z, q);
}

}  // namespace detail

// U_i = Int_{w_i(0)}^{guess_i} phi_i(z, guess_-i) dz.
inline double cumulative_imbalance(const ProxyGame& game,
                                   std::span<const double> guess,
                                   std::size_t i, const QuadratureConfig& q) {
  game.validate();
  game.check_guess(guess);
  if (i >= game.num_agents()) throw DomainError("agent index out of range");
  double others = 0.0;
  for (std::size_t k = 0; k < guess.size(); ++k) {
    if (k != i) others += guess[k];
  }
  auto phi = [&](double z) {
    return detail::imbalance_at(game, i, others, z, q);
  };
  return integrate(phi, game.specs[i].min_weight(), guess[i], q).value;
}

struct GridNashProfile {
  std::vector<std::size_t> index;  // grid index per agent
  WeightProfile weights;
};

inline constexpr std::size_t kMaxGridAgents = 3;
inline constexpr std::size_t kMaxGridPoints = 64;
// Grid actions within this of the grid maximum count as best responses.
inline constexpr double kBestResponseSlack = 1e-9;

// Evenly spaced grid over [w_i(0), w_i(h)].
inline std::vector<double> action_grid(const WeightFunction& spec,
                                       std::size_t points) {
  std::vector<double> g(points);
  const double lo = spec.min_weight();
  const double hi = spec.max_weight();
  for (std::size_t k = 0; k < points; ++k) {
    g[k] = (k + 1 == points) ? hi
                             : lo + (hi - lo) * static_cast<double>(k) /
                                        static_cast<double>(points - 1);
  }
  return g;
}

// Exhaustive pure-Nash search on the product grid. Utilities along each
// player's grid are accumulated segment by segment, each segment integrated
// with two Gauss-Legendre panels. Results are sorted lexicographically by
// grid index.
inline std::vector<GridNashProfile> grid_nash_oracle(
    const ProxyGame& game, std::size_t grid_points, const QuadratureConfig& q,
    int threads = 1) {
  game.validate();
  q.validate();
  const std::size_t n = game.num_agents();
  if (n > kMaxGridAgents) {
    throw SizeError("grid Nash oracle supports at most " +
                    std::to_string(kMaxGridAgents) + " agents");
  }
  if (grid_points < 2 || grid_points > kMaxGridPoints) {
    throw SizeError("grid Nash oracle needs 2.." +
                    std::to_string(kMaxGridPoints) + " points per agent");
  }
  const std::size_t G = grid_points;
  std::vector<std::vector<double>> grids(n);
  for (std::size_t i = 0; i < n; ++i) grids[i] = action_grid(game.specs[i], G);

  std::size_t others_count = 1;
  for (std::size_t k = 1; k < n; ++k) others_count *= G;

  const GaussLegendreRule& rule = gauss_legendre_rule(q.nodes_per_panel);

  // best[i][o * G + k]: grid action k of player i is a best response to the
  // others' grid profile with mixed-radix index o.
  std::vector<std::vector<char>> best(n, std::vector<char>(others_count * G, 0));
  for (std::size_t i = 0; i < n; ++i) {
    parallel_for(others_count, threads, [&](std::size_t o) {
      double others = 0.0;
      std::size_t rem = o;
      for (std::size_t k = 0; k < n; ++k) {
        if (k == i) continue;
        others += grids[k][rem % G];
        rem /= G;
      }
      auto phi = [&](double z) {
        return detail::imbalance_at(game, i, others, z, q);
      };
      std::vector<double> util(G, 0.0);
      for (std::size_t k = 1; k < G; ++k) {
        util[k] = util[k - 1] + composite_gauss_legendre(phi, grids[i][k - 1],
                                                         grids[i][k], 2, rule);
      }
      const double top = *std::max_element(util.begin(), util.end());
      for (std::size_t k = 0; k < G; ++k) {
        best[i][o * G + k] = util[k] >= top - kBestResponseSlack ? 1 : 0;
      }
    });
  }

  std::size_t total = others_count * G;
  std::vector<GridNashProfile> out;
  std::vector<std::size_t> idx(n, 0);
  for (std::size_t flat = 0; flat < total; ++flat) {
    // Agent 0 is the most significant digit so that `flat` order is
    // lexicographic.
    std::size_t rem = flat;
    for (std::size_t k = n; k-- > 0;) {
      idx[k] = rem % G;
      rem /= G;
    }
    bool nash = true;
    for (std::size_t i = 0; i < n && nash; ++i) {
      std::size_t o = 0;
      std::size_t radix = 1;
      for (std::size_t k = 0; k < n; ++k) {
        if (k == i) continue;
        o += idx[k] * radix;
        radix *= G;
      }
      nash = best[i][o * G + idx[i]] != 0;
    }
    if (!nash) continue;
    GridNashProfile p;
    p.index = idx;
    p.weights.resize(n);
    for (std::size_t k = 0; k < n; ++k) p.weights[k] = grids[k][idx[k]];
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace propinv

#endif  // PROPINV_PROXYGAME_HPP_
