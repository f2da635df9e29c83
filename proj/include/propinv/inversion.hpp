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

#ifndef PROPINV_INVERSION_HPP_
#define PROPINV_INVERSION_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "propinv/allocation.hpp"
#include "propinv/errors.hpp"
#include "propinv/jacobian.hpp"
#include "propinv/parallel.hpp"
#include "propinv/pricing.hpp"
#include "propinv/quadrature.hpp"
#include "propinv/weights.hpp"

namespace propinv {

struct SearchConfig {
  // Target width of every recovered weight's bracket.
  double epsilon = 1e-6;
  // Iteration cap for each individual bisection.
  int max_iter = 200;
  QuadratureConfig quadrature;
  // Worker threads for per-agent level-set solves. Results do not depend on
  // this value.
  int threads = 1;

  void validate() const {
    if (!(epsilon > 0.0)) throw DomainError("search epsilon must be > 0");
    if (max_iter < 1) throw DomainError("search max_iter must be >= 1");
    quadrature.validate();
  }
};

// Running totals of bisection steps by phase.
struct SearchStats {
  long min_sum = 0;
  long upper_bound = 0;  // s_H searches, summed over attempted spaces
  long main = 0;         // final search on the weight sum
  long level_weight = 0;  // inner level-set solves

  // Bisection steps on one-dimensional coordinates outside the inner
  // level-set solves.
  long outer() const { return min_sum + upper_bound + main; }
};

enum class MinSumCase { kDiagonal, kHorizontal, kZeroPrice };

inline std::string_view min_sum_case_name(MinSumCase c) {
  switch (c) {
    case MinSumCase::kDiagonal:
      return "diagonal";
    case MinSumCase::kHorizontal:
      return "horizontal";
    case MinSumCase::kZeroPrice:
      return "zero_price";
  }
  return "unknown";
}

// Smallest weight sum at which the agent's price level set meets the cone
// w <= s/2. The stored value is the upper end of the final bracket, so the
// level set is guaranteed to be reachable at min_sum itself.
struct MinSumRecord {
  std::size_t agent = 0;
  double min_sum = 0.0;
  MinSumCase boundary_case = MinSumCase::kZeroPrice;
};

namespace detail {

struct Bracket {
  double lo;
  double hi;
  long iterations;
};

// Bisection for an increasing f with f(lo) < target <= f(hi) maintained.
// Stops once hi - lo <= tol or the midpoint no longer splits the interval.
template <class F>
Bracket bisect_increasing(const F& f, double lo, double hi, double target,
                          double tol, int max_iter) {
  long it = 0;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (!(mid > lo && mid < hi)) break;
    if (it >= max_iter) {
      throw NumericalError("bisection hit its iteration cap", hi - lo);
    }
    ++it;
    if (f(mid) < target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return {lo, hi, it};
}

inline void check_price(const WeightFunction& spec, double r) {
  if (!(r >= 0.0) || !std::isfinite(r)) {
    throw DomainError("price must be finite and nonnegative");
  }
  if (r > spec.value_cap()) {
    throw InfeasiblePriceError("price exceeds the value cap",
                               {"price " + std::to_string(r) +
                                " above value cap " +
                                std::to_string(spec.value_cap())});
  }
}

}  // namespace detail

// Recovers a single agent's value from its price while every other agent's
// weight is pinned, with the pinned weights summing to `others_weight`. A
// lone agent (others_weight = 0) is allocated with probability one and
// always pays 0, so only r = 0 is feasible there.
inline double invert_single(const WeightFunction& spec, double r,
                            const SearchConfig& cfg,
                            double others_weight = 0.0,
                            SearchStats* stats = nullptr) {
  cfg.validate();
  detail::check_price(spec, r);
  if (r == 0.0) return 0.0;
  const QuadratureConfig& q = cfg.quadrature;
  auto price = [&](double w) {
    return price_in_sum_coords(spec, others_weight + w, w, q);
  };
  const double wh = spec.max_weight();
  const double top = price(wh);
  if (r > top) {
    throw InfeasiblePriceError(
        "price above the price at the value cap",
        {"price " + std::to_string(r) + " exceeds attainable maximum " +
         std::to_string(top)});
  }
  const detail::Bracket b = detail::bisect_increasing(
      price, spec.min_weight(), wh, r, cfg.epsilon, cfg.max_iter);
  if (stats) stats->main += b.iterations;
  return spec.value(0.5 * (b.lo + b.hi));
}

// Minimum weight sum of agent i's price level set within w <= s/2.
// `sum_cap` is the largest attainable weight sum, sum_k w_k(h).
inline MinSumRecord min_sum(const WeightFunction& spec, double r,
                            double sum_cap, const SearchConfig& cfg,
                            std::size_t agent = 0, double tol = -1.0,
                            SearchStats* stats = nullptr) {
  detail::check_price(spec, r);
  if (tol <= 0.0) tol = cfg.epsilon;
  const QuadratureConfig& q = cfg.quadrature;
  const double w0 = spec.min_weight();
  const double wh = spec.max_weight();
  MinSumRecord rec;
  rec.agent = agent;
  if (r == 0.0) {
    rec.min_sum = 2.0 * w0;
    rec.boundary_case = MinSumCase::kZeroPrice;
    return rec;
  }
  const double diag_top = price_in_sum_coords(spec, 2.0 * wh, wh, q);
  if (diag_top >= r) {
    // Bisect along w = s/2 between (2 w(0), w(0)) and (2 w(h), w(h)).
    auto diag = [&](double t) { return price_in_sum_coords(spec, 2.0 * t, t, q); };
    const detail::Bracket b =
        detail::bisect_increasing(diag, w0, wh, r, 0.5 * tol, cfg.max_iter);
    if (stats) stats->min_sum += b.iterations;
    rec.min_sum = 2.0 * b.hi;
    rec.boundary_case = MinSumCase::kDiagonal;
    return rec;
  }
  // Bisect along w = w(h) for s in [2 w(h), sum_cap].
  const double cap_price =
      sum_cap >= 2.0 * wh ? price_in_sum_coords(spec, sum_cap, wh, q) : -1.0;
  if (cap_price < r) {
    throw InfeasiblePriceError(
        "price unreachable within the attainable weight sum",
        {"agent " + std::to_string(agent) + ": price " + std::to_string(r) +
         " exceeds " + std::to_string(std::max(cap_price, diag_top)) +
         " at s = " + std::to_string(sum_cap)});
  }
  auto horiz = [&](double s) { return price_in_sum_coords(spec, s, wh, q); };
  const detail::Bracket b =
      detail::bisect_increasing(horiz, 2.0 * wh, sum_cap, r, tol, cfg.max_iter);
  if (stats) stats->min_sum += b.iterations;
  rec.min_sum = b.hi;
  rec.boundary_case = MinSumCase::kHorizontal;
  return rec;
}

// The weight w in [w(0), min(s/2, w(h))] with beta(s, w) = r. Decreasing in
// s. `tol` is the bracket width on w (defaults to epsilon / 4).
inline double level_weight(const WeightFunction& spec, double r, double s,
                           const SearchConfig& cfg, double tol = -1.0,
                           SearchStats* stats = nullptr) {
  detail::check_price(spec, r);
  const double w0 = spec.min_weight();
  if (r == 0.0) return w0;
  if (tol <= 0.0) tol = 0.25 * cfg.epsilon;
  const QuadratureConfig& q = cfg.quadrature;
  const double upper = std::min(0.5 * s, spec.max_weight());
  if (upper < w0) throw DomainError("weight sum below the level set's support");
  const double top = price_in_sum_coords(spec, s, upper, q);
  if (top < r) {
    throw DomainError("weight sum " + std::to_string(s) +
                      " below the minimum sum of the price level set");
  }
  auto f = [&](double w) { return price_in_sum_coords(spec, s, w, q); };
  const detail::Bracket b =
      detail::bisect_increasing(f, w0, upper, r, tol, cfg.max_iter);
  if (stats) stats->level_weight += b.iterations;
  return 0.5 * (b.lo + b.hi);
}

struct BalanceResult {
  // beta_{i*}(s, max(balance, w_{i*}(0))); NaN when out_of_range.
  double price = std::numeric_limits<double>::quiet_NaN();
  // s - fixed - sum_j level_weight_j(s), before clamping.
  double balance = 0.0;
  bool clamped = false;       // balance <= w_{i*}(0)
  bool out_of_range = false;  // balance > w_{i*}(h)
  // Level weights of the searched agents, in the order they were given.
  std::vector<double> level_weights;
};

namespace detail {

// beta-tilde for one candidate space: `members` are the agents held to
// w <= s/2, `fixed_sum` the total weight of agents pinned at w(0).
struct BalanceEvaluator {
  std::span<const WeightFunction> specs;
  std::span<const double> prices;
  std::size_t candidate;
  std::vector<std::size_t> members;
  double fixed_sum;
  const SearchConfig* cfg;
  double inner_tol;

  BalanceResult operator()(double s, SearchStats* stats) const {
    BalanceResult out;
    out.level_weights.assign(members.size(), 0.0);
    std::vector<long> iters(members.size(), 0);
    parallel_for(members.size(), cfg->threads, [&](std::size_t m) {
      SearchStats local;
      const std::size_t j = members[m];
      out.level_weights[m] =
          level_weight(specs[j], prices[j], s, *cfg, inner_tol, &local);
      iters[m] = local.level_weight;
    });
    double balance = s - fixed_sum;
    for (std::size_t m = 0; m < members.size(); ++m) {
      balance -= out.level_weights[m];
      if (stats) stats->level_weight += iters[m];
    }
    out.balance = balance;
    const WeightFunction& spec = specs[candidate];
    if (balance > spec.max_weight()) {
      out.out_of_range = true;
      return out;
    }
    if (balance <= spec.min_weight()) {
      out.clamped = true;
      out.price = 0.0;
      return out;
    }
    out.price = price_in_sum_coords(spec, s, balance, cfg->quadrature);
    return out;
  }
};

}  // namespace detail

// beta-tilde_{i*}(s): solve every other agent's level set at s, give agent
// i* the balance of s and price it.
inline BalanceResult balance_price(std::span<const WeightFunction> specs,
                                   std::span<const double> prices,
                                   std::size_t i_star, double s,
                                   const SearchConfig& cfg) {
  cfg.validate();
  if (specs.size() != prices.size() || specs.empty()) {
    throw DomainError("price profile length must match a nonempty agent list");
  }
  if (i_star >= specs.size()) throw DomainError("candidate agent out of range");
  detail::BalanceEvaluator eval{specs, prices, i_star, {}, 0.0, &cfg,
                                cfg.epsilon / (4.0 * specs.size())};
  for (std::size_t j = 0; j < specs.size(); ++j) {
    if (j != i_star) eval.members.push_back(j);
  }
  return eval(s, nullptr);
}

enum class RejectionReason { kLowerCheck, kRationality, kUpperCheck };

inline std::string_view rejection_name(RejectionReason r) {
  switch (r) {
    case RejectionReason::kLowerCheck:
      return "lower-check failed";
    case RejectionReason::kRationality:
      return "rationality failed";
    case RejectionReason::kUpperCheck:
      return "upper-check failed";
  }
  return "unknown";
}

struct SpaceRejection {
  std::size_t agent = 0;
  RejectionReason reason = RejectionReason::kLowerCheck;
  std::string detail;
};

struct InversionReport {
  WeightProfile recovered_weights;
  ValueProfile recovered_values;
  std::size_t winning_space = 0;
  double s_low = 0.0;
  double s_high = 0.0;
  double final_sum = 0.0;
  // Width of the widest recovered-weight bracket at termination.
  double final_bracket = 0.0;
  // max_i |r_i - beta_i(recovered weights)|.
  double residual = 0.0;
  bool converged = false;
  // Spaces were validated only after allowing `check_slack` on the price
  // oracle checks.
  bool used_check_slack = false;
  double check_slack = 0.0;
  SearchStats iterations;
  std::vector<MinSumRecord> min_sums;
  std::vector<SpaceRejection> spaces_rejected;
  std::vector<std::size_t> zero_price_agents;
};

namespace detail {

struct SpaceAttempt {
  bool accepted = false;
  double s_low = 0.0;
  double s_high = 0.0;
  BalanceResult at_low;
  BalanceResult at_high;
  SpaceRejection rejection;
};

inline std::string fmt_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", x);
  return buf;
}

inline SpaceAttempt try_space(const BalanceEvaluator& eval, double s_low,
                              double s_cap, double r_star, double slack,
                              SearchStats* stats) {
  SpaceAttempt out;
  out.rejection.agent = eval.candidate;
  const WeightFunction& spec = eval.specs[eval.candidate];
  const int max_iter = eval.cfg->max_iter;

  // Lower oracle check.
  out.s_low = s_low;
  out.at_low = eval(s_low, stats);
  if (out.at_low.out_of_range) {
    out.rejection.reason = RejectionReason::kUpperCheck;
    out.rejection.detail = "balance weight " + fmt_double(out.at_low.balance) +
                           " already exceeds w(h) at s_L = " +
                           fmt_double(s_low);
    return out;
  }
  if (out.at_low.price > r_star + slack) {
    out.rejection.reason = RejectionReason::kLowerCheck;
    out.rejection.detail = "beta-tilde(s_L) = " + fmt_double(out.at_low.price) +
                           " exceeds observed price " + fmt_double(r_star);
    return out;
  }

  // Largest s in [s_L, s_cap] whose balance weight stays within w(h).
  BalanceResult at_cap = eval(s_cap, stats);
  if (!at_cap.out_of_range) {
    out.s_high = s_cap;
    out.at_high = std::move(at_cap);
  } else {
    double lo = s_low;
    double hi = s_cap;
    BalanceResult at_lo = out.at_low;
    long it = 0;
    while (hi - lo > eval.inner_tol) {
      const double mid = 0.5 * (lo + hi);
      if (!(mid > lo && mid < hi)) break;
      if (it >= max_iter) {
        throw NumericalError("upper-bound search hit its iteration cap",
                             hi - lo);
      }
      ++it;
      BalanceResult at_mid = eval(mid, stats);
      if (at_mid.out_of_range) {
        hi = mid;
      } else {
        lo = mid;
        at_lo = std::move(at_mid);
      }
    }
    if (stats) stats->upper_bound += it;
    out.s_high = lo;
    out.at_high = std::move(at_lo);
  }

  if (out.at_high.balance < spec.min_weight()) {
    out.rejection.reason = RejectionReason::kRationality;
    out.rejection.detail = "balance weight " + fmt_double(out.at_high.balance) +
                           " below w(0) at s_H = " + fmt_double(out.s_high);
    return out;
  }
  if (r_star > out.at_high.price + slack) {
    out.rejection.reason = RejectionReason::kUpperCheck;
    out.rejection.detail = "observed price " + fmt_double(r_star) +
                           " exceeds beta-tilde(s_H) = " +
                           fmt_double(out.at_high.price);
    return out;
  }
  out.accepted = true;
  return out;
}

}  // namespace detail

// Recovers the weight and value profile that produced `prices`.
//
// Agents with zero price are identified as value 0 and pinned at w(0).
// Each remaining agent i* in ascending order defines a candidate space in
// which every other agent holds at most half the total weight. The first
// space passing the oracle checks at s_L and s_H is searched by bisection
// on the weight sum until every recovered weight's bracket is at most
// epsilon wide. Oracle checks run exactly first; if no space passes, they
// are repeated once allowing a price slack of epsilon.
inline InversionReport invert_prices(std::span<const WeightFunction> specs,
                                     std::span<const double> prices,
                                     const SearchConfig& cfg) {
  cfg.validate();
  const std::size_t n = specs.size();
  if (n == 0 || prices.size() != n) {
    throw DomainError("price profile length must match a nonempty agent list");
  }
  std::vector<std::string> infeasible;
  for (std::size_t i = 0; i < n; ++i) {
    if (!(prices[i] >= 0.0) || !std::isfinite(prices[i])) {
      throw DomainError("prices must be finite and nonnegative");
    }
    if (prices[i] > specs[i].value_cap()) {
      infeasible.push_back("agent " + std::to_string(i) + ": price " +
                           detail::fmt_double(prices[i]) +
                           " above value cap " +
                           detail::fmt_double(specs[i].value_cap()));
    }
  }
  if (!infeasible.empty()) {
    throw InfeasiblePriceError("prices above the value cap", infeasible);
  }

  InversionReport rep;
  rep.recovered_weights.assign(n, 0.0);
  rep.recovered_values.assign(n, 0.0);
  std::vector<std::size_t> active;
  double fixed_sum = 0.0;
  double sum_cap = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    rep.recovered_weights[i] = specs[i].min_weight();
    if (prices[i] == 0.0) {
      rep.zero_price_agents.push_back(i);
      fixed_sum += specs[i].min_weight();
      sum_cap += specs[i].min_weight();
    } else {
      active.push_back(i);
      sum_cap += specs[i].max_weight();
    }
  }
  const double needed = std::ceil(std::log2(sum_cap / cfg.epsilon));
  if (cfg.max_iter < needed) {
    throw DomainError("max_iter " + std::to_string(cfg.max_iter) +
                      " below log2(range / epsilon) = " +
                      detail::fmt_double(needed));
  }

  auto finish = [&] {
    rep.final_sum = weight_sum(rep.recovered_weights);
    for (std::size_t i = 0; i < n; ++i) {
      rep.recovered_values[i] =
          prices[i] == 0.0 ? 0.0 : specs[i].value(rep.recovered_weights[i]);
    }
    const PriceProfile back =
        price_profile_from_weights(specs, rep.recovered_weights,
                                   cfg.quadrature, cfg.threads);
    rep.residual = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      rep.residual = std::max(rep.residual, std::abs(prices[i] - back[i]));
    }
    return rep;
  };

  if (active.empty()) {
    rep.converged = true;
    return finish();
  }
  if (active.size() == 1) {
    const std::size_t i = active.front();
    const double v = invert_single(specs[i], prices[i], cfg, fixed_sum,
                                   &rep.iterations);
    rep.recovered_weights[i] = specs[i].weight(v);
    rep.winning_space = i;
    rep.converged = true;
    rep.final_bracket = cfg.epsilon;
    rep.s_low = rep.s_high = fixed_sum + rep.recovered_weights[i];
    return finish();
  }

  const double inner_tol = cfg.epsilon / (4.0 * static_cast<double>(n));
  rep.min_sums.resize(active.size());
  std::vector<SearchStats> ms_stats(active.size());
  parallel_for(active.size(), cfg.threads, [&](std::size_t m) {
    const std::size_t j = active[m];
    rep.min_sums[m] = min_sum(specs[j], prices[j], sum_cap, cfg, j, inner_tol,
                              &ms_stats[m]);
  });
  for (const auto& st : ms_stats) rep.iterations.min_sum += st.min_sum;

  std::optional<detail::SpaceAttempt> chosen;
  std::optional<detail::BalanceEvaluator> chosen_eval;
  const double slacks[2] = {0.0, cfg.epsilon};
  for (double slack : slacks) {
    rep.spaces_rejected.clear();
    for (std::size_t a = 0; a < active.size() && !chosen; ++a) {
      const std::size_t cand = active[a];
      detail::BalanceEvaluator eval{specs, prices, cand, {}, fixed_sum, &cfg,
                                    inner_tol};
      double s_low = 0.0;
      for (std::size_t m = 0; m < active.size(); ++m) {
        if (m == a) continue;
        eval.members.push_back(active[m]);
        s_low = std::max(s_low, rep.min_sums[m].min_sum);
      }
      detail::SpaceAttempt att = detail::try_space(
          eval, s_low, sum_cap, prices[cand], slack, &rep.iterations);
      if (att.accepted) {
        chosen = std::move(att);
        chosen_eval = std::move(eval);
        rep.used_check_slack = slack > 0.0;
        rep.check_slack = slack;
      } else {
        rep.spaces_rejected.push_back(att.rejection);
      }
    }
    if (chosen) break;
  }
  if (!chosen) {
    std::vector<std::string> reasons;
    for (const auto& rj : rep.spaces_rejected) {
      reasons.push_back("space " + std::to_string(rj.agent) + ": " +
                        std::string(rejection_name(rj.reason)) + " (" +
                        rj.detail + ")");
    }
    throw InfeasiblePriceError("no candidate space validated", reasons);
  }

  const detail::BalanceEvaluator& eval = *chosen_eval;
  const std::size_t cand = eval.candidate;
  const double r_star = prices[cand];
  rep.winning_space = cand;
  rep.s_low = chosen->s_low;
  rep.s_high = chosen->s_high;

  double lo = chosen->s_low;
  double hi = chosen->s_high;
  BalanceResult at_lo = std::move(chosen->at_low);
  BalanceResult at_hi = std::move(chosen->at_high);
  auto bracket_width = [&] {
    double member_total = 0.0;
    double widest = 0.0;
    for (std::size_t m = 0; m < eval.members.size(); ++m) {
      const double wdt =
          std::max(0.0, at_lo.level_weights[m] - at_hi.level_weights[m]);
      member_total += wdt;
      widest = std::max(widest, wdt);
    }
    return std::max(widest, (hi - lo) + member_total);
  };
  long it = 0;
  rep.converged = false;
  while (true) {
    if (bracket_width() <= cfg.epsilon) {
      rep.converged = true;
      break;
    }
    const double mid = 0.5 * (lo + hi);
    if (!(mid > lo && mid < hi)) {
      rep.converged = true;
      break;
    }
    if (it >= cfg.max_iter) break;
    ++it;
    BalanceResult at_mid = eval(mid, &rep.iterations);
    if (!at_mid.out_of_range && at_mid.price < r_star) {
      lo = mid;
      at_lo = std::move(at_mid);
    } else {
      hi = mid;
      at_hi = std::move(at_mid);
    }
  }
  rep.iterations.main += it;
  rep.final_bracket = bracket_width();

  const double s_final = 0.5 * (lo + hi);
  const BalanceResult fin = eval(s_final, &rep.iterations);
  for (std::size_t m = 0; m < eval.members.size(); ++m) {
    rep.recovered_weights[eval.members[m]] = fin.level_weights[m];
  }
  rep.recovered_weights[cand] =
      std::clamp(fin.balance, specs[cand].min_weight(),
                 specs[cand].max_weight());
  return finish();
}

}  // namespace propinv

#endif  // PROPINV_INVERSION_HPP_
