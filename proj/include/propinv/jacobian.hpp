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

#ifndef PROPINV_JACOBIAN_HPP_
#define PROPINV_JACOBIAN_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "propinv/errors.hpp"
#include "propinv/pricing.hpp"
#include "propinv/quadrature.hpp"
#include "propinv/weights.hpp"

namespace propinv {

// Dense row-major square matrix.
class Matrix {
 public:
  Matrix() = default;
  explicit Matrix(std::size_t n) : n_(n), data_(n * n, 0.0) {}

  std::size_t size() const { return n_; }
  double& operator()(std::size_t i, std::size_t j) { return data_[i * n_ + j]; }
  double operator()(std::size_t i, std::size_t j) const {
    return data_[i * n_ + j];
  }

  static Matrix identity(std::size_t n) {
    Matrix m(n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

 private:
  std::size_t n_ = 0;
  std::vector<double> data_;
};

// ---------------------------------------------------------------------------
// Price partials in (s, w) coordinates. Both integrals run over the value
// variable u in [0, v(w)] with z = w(u), which absorbs the v'(z) factor.

// d beta_i / d w_i with the other weights held fixed.
inline double price_partial_self(const WeightFunction& spec, double w, double s,
                                 const QuadratureConfig& q) {
  detail::check_sum_coords(spec, s, w);
  if (w <= spec.min_weight()) return 0.0;
  const double others = std::max(s - w, 0.0);
  const double factor = others / (w * w);
  auto integrand = [&](double u) {
    const double z = spec.weight_unchecked(u);
    return z / (others + z);
  };
  return factor * integrate(integrand, 0.0, spec.value(w), q).value;
}

// d beta_i / d w_j for any j != i; identical for every j.
inline double price_partial_cross(const WeightFunction& spec, double w,
                                  double s, const QuadratureConfig& q) {
  detail::check_sum_coords(spec, s, w);
  if (w <= spec.min_weight()) return 0.0;
  const double others = std::max(s - w, 0.0);
  auto integrand = [&](double u) {
    const double z = spec.weight_unchecked(u);
    const double den = others + z;
    return z * (w - z) / (den * den);
  };
  return integrate(integrand, 0.0, spec.value(w), q).value / w;
}

// h = self partial / cross partial.
inline double h_ratio(const WeightFunction& spec, double w, double s,
                      const QuadratureConfig& q) {
  if (w <= spec.min_weight()) {
    throw UndefinedRatioError("h-ratio is undefined on the lower boundary");
  }
  const double cross = price_partial_cross(spec, w, s, q);
  if (!(cross > 0.0)) {
    throw UndefinedRatioError("cross partial vanished; h-ratio undefined");
  }
  return price_partial_self(spec, w, s, q) / cross;
}

inline double weight_sum(std::span<const double> weights) {
  double s = 0.0;
  for (double w : weights) s += w;
  return s;
}

// J(i, i) = d beta_i / d w_i, J(i, j) = d beta_i / d w_j.
inline Matrix jacobian_matrix(std::span<const WeightFunction> specs,
                              std::span<const double> weights,
                              const QuadratureConfig& q) {
  if (specs.size() != weights.size() || specs.empty()) {
    throw DomainError("weight profile length must match a nonempty agent list");
  }
  const std::size_t n = specs.size();
  const double s = weight_sum(weights);
  Matrix jac(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double self = price_partial_self(specs[i], weights[i], s, q);
    const double cross = price_partial_cross(specs[i], weights[i], s, q);
    for (std::size_t j = 0; j < n; ++j) jac(i, j) = (i == j) ? self : cross;
  }
  return jac;
}

// ---------------------------------------------------------------------------
// Positive definiteness of G = diag(g) + (ones off the diagonal).

struct HMatrixVerdict {
  bool positive_definite = false;
  // 1: g1 <= 0; 2: g1 >= 1, g2 > 1; 3: 0 < g1, g2 <= 1; 4: 0 < g1 < 1 < g2.
  int case_tag = 0;
  // sum_k 1 / (1 - g_k); only meaningful for case 4.
  double reciprocal_sum = std::numeric_limits<double>::quiet_NaN();
  // Case 4 reports PD only when reciprocal_sum > 1 + tie_slack.
  double tie_slack = 1e-12;
};

inline HMatrixVerdict hmatrix_pd_classify(std::span<const double> g_in) {
  if (g_in.empty()) throw DomainError("h-matrix diagonal is empty");
  std::vector<double> g(g_in.begin(), g_in.end());
  std::sort(g.begin(), g.end());
  const double inf = std::numeric_limits<double>::infinity();
  const double g1 = g[0];
  const double g2 = g.size() > 1 ? g[1] : inf;

  HMatrixVerdict out;
  if (g1 <= 0.0) {
    out.case_tag = 1;
    out.positive_definite = false;
  } else if (g1 >= 1.0 && g2 > 1.0) {
    out.case_tag = 2;
    out.positive_definite = true;
  } else if (g2 <= 1.0) {
    out.case_tag = 3;
    out.positive_definite = false;
  } else {
    out.case_tag = 4;
    double sum = 0.0;
    for (double gk : g) sum += 1.0 / (1.0 - gk);
    out.reciprocal_sum = sum;
    out.positive_definite = sum > 1.0 + out.tie_slack;
  }
  return out;
}

// ---------------------------------------------------------------------------
// P-matrix tests by principal-minor enumeration.

enum class PMatrixVerdict { kInteriorP, kP, kP0Only, kNotP0 };

inline std::string_view verdict_name(PMatrixVerdict v) {
  switch (v) {
    case PMatrixVerdict::kInteriorP:
      return "interior_P";
    case PMatrixVerdict::kP:
      return "P";
    case PMatrixVerdict::kP0Only:
      return "P0_only";
    case PMatrixVerdict::kNotP0:
      return "not_P0";
  }
  return "unknown";
}

struct PMatrixReport {
  PMatrixVerdict verdict = PMatrixVerdict::kNotP0;
  // Minors with |det| <= zero_tolerance * (product of row 2-norms) count
  // as zero.
  double zero_tolerance = 1e-12;
  std::size_t minors_checked = 0;
  std::size_t zero_minors = 0;
  std::size_t negative_minors = 0;
  // Smallest determinant normalized by its Hadamard bound.
  double min_normalized_minor = std::numeric_limits<double>::infinity();
};

inline constexpr std::size_t kMaxMinorDimension = 12;

namespace detail {

// Determinant by LU with partial pivoting; `a` is overwritten.
inline double lu_determinant(std::vector<double>& a, std::size_t k) {
  double det = 1.0;
  for (std::size_t col = 0; col < k; ++col) {
    std::size_t piv = col;
    double best = std::abs(a[col * k + col]);
    for (std::size_t r = col + 1; r < k; ++r) {
      const double cand = std::abs(a[r * k + col]);
      if (cand > best) {
        best = cand;
        piv = r;
      }
    }
    if (best == 0.0) return 0.0;
    if (piv != col) {
      for (std::size_t c = 0; c < k; ++c) {
        std::swap(a[col * k + c], a[piv * k + c]);
      }
      det = -det;
    }
    const double d = a[col * k + col];
    det *= d;
    for (std::size_t r = col + 1; r < k; ++r) {
      const double f = a[r * k + col] / d;
      if (f == 0.0) continue;
      for (std::size_t c = col + 1; c < k; ++c) {
        a[r * k + c] -= f * a[col * k + c];
      }
    }
  }
  return det;
}

}  // namespace detail

inline PMatrixReport pmatrix_check(const Matrix& m,
                                   std::span<const std::size_t> boundary_dims) {
  const std::size_t n = m.size();
  if (n == 0) throw DomainError("matrix is empty");
  if (n > kMaxMinorDimension) {
    throw SizeError("principal-minor enumeration limited to dimension " +
                    std::to_string(kMaxMinorDimension));
  }
  std::uint32_t boundary_mask = 0;
  for (std::size_t d : boundary_dims) {
    if (d >= n) throw DomainError("boundary dimension out of range");
    boundary_mask |= 1u << d;
  }

  PMatrixReport rep;
  bool all_positive = true;
  bool no_negative = true;
  bool interior_positive = true;
  std::vector<std::size_t> idx;
  std::vector<double> sub;
  for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
    idx.clear();
    for (std::size_t i = 0; i < n; ++i) {
      if (mask & (1u << i)) idx.push_back(i);
    }
    const std::size_t k = idx.size();
    sub.assign(k * k, 0.0);
    double bound = 1.0;
    for (std::size_t r = 0; r < k; ++r) {
      double norm2 = 0.0;
      for (std::size_t c = 0; c < k; ++c) {
        const double x = m(idx[r], idx[c]);
        sub[r * k + c] = x;
        norm2 += x * x;
      }
      bound *= std::sqrt(norm2);
    }
    const double det = detail::lu_determinant(sub, k);
    const double thr = rep.zero_tolerance * bound;
    ++rep.minors_checked;
    if (bound > 0.0) {
      rep.min_normalized_minor = std::min(rep.min_normalized_minor, det / bound);
    } else {
      rep.min_normalized_minor = std::min(rep.min_normalized_minor, 0.0);
    }
    const bool interior = (mask & boundary_mask) == 0;
    if (std::abs(det) <= thr) {
      ++rep.zero_minors;
      all_positive = false;
      if (interior) interior_positive = false;
    } else if (det < 0.0) {
      ++rep.negative_minors;
      all_positive = false;
      no_negative = false;
      if (interior) interior_positive = false;
    }
  }
  if (all_positive) {
    rep.verdict = PMatrixVerdict::kP;
  } else if (no_negative && interior_positive) {
    rep.verdict = PMatrixVerdict::kInteriorP;
  } else if (no_negative) {
    rep.verdict = PMatrixVerdict::kP0Only;
  } else {
    rep.verdict = PMatrixVerdict::kNotP0;
  }
  return rep;
}

// ---------------------------------------------------------------------------
// J_K = D * H on the coordinates off the lower boundary.

struct HFactorization {
  std::vector<double> d;                // cross partials (diagonal of D)
  std::vector<double> g;                // h-ratios (diagonal of H)
  std::vector<std::size_t> active_dims;  // agents with w_i > w_i(0)
};

struct IdentifiabilityReport {
  Matrix jacobian;
  HFactorization factorization;
  std::vector<std::size_t> boundary_dims;
  std::optional<HMatrixVerdict> hmatrix;  // empty when every agent is on
                                          // the boundary
  PMatrixReport pmatrix;
  // H positive definite (or vacuous) exactly when the minor test reports
  // P or interior_P.
  bool verdicts_agree = false;
};

inline HFactorization h_factorization(std::span<const WeightFunction> specs,
                                      std::span<const double> weights,
                                      const QuadratureConfig& q) {
  const double s = weight_sum(weights);
  HFactorization f;
  for (std::size_t i = 0; i < specs.size(); ++i) {
    if (weights[i] <= specs[i].min_weight()) continue;
    const double cross = price_partial_cross(specs[i], weights[i], s, q);
    const double self = price_partial_self(specs[i], weights[i], s, q);
    f.active_dims.push_back(i);
    f.d.push_back(cross);
    f.g.push_back(self / cross);
  }
  return f;
}

inline IdentifiabilityReport interior_pmatrix_verify(
    std::span<const WeightFunction> specs, std::span<const double> weights,
    const QuadratureConfig& q) {
  if (specs.size() > kMaxMinorDimension) {
    throw SizeError("identifiability check limited to " +
                    std::to_string(kMaxMinorDimension) + " agents");
  }
  IdentifiabilityReport rep;
  rep.jacobian = jacobian_matrix(specs, weights, q);
  rep.factorization = h_factorization(specs, weights, q);
  for (std::size_t i = 0; i < specs.size(); ++i) {
    if (weights[i] <= specs[i].min_weight()) rep.boundary_dims.push_back(i);
  }
  if (!rep.factorization.g.empty()) {
    rep.hmatrix = hmatrix_pd_classify(rep.factorization.g);
  }
  rep.pmatrix = pmatrix_check(rep.jacobian, rep.boundary_dims);
  const bool h_pd = !rep.hmatrix || rep.hmatrix->positive_definite;
  const bool minors_ok = rep.pmatrix.verdict == PMatrixVerdict::kP ||
                         rep.pmatrix.verdict == PMatrixVerdict::kInteriorP;
  rep.verdicts_agree = h_pd == minors_ok;
  return rep;
}

}  // namespace propinv

#endif  // PROPINV_JACOBIAN_HPP_
