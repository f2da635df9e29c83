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

#ifndef PROPINV_TOOLS_INSTANCE_IO_HPP_
#define PROPINV_TOOLS_INSTANCE_IO_HPP_

#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "propinv/counterexample.hpp"
#include "propinv/inversion.hpp"
#include "propinv/jacobian.hpp"
#include "propinv/weights.hpp"

namespace propinv::io {

using Json = nlohmann::json;

// Malformed or inconsistent instance file.
class SchemaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Instance {
  std::vector<WeightFunction> agents;
  std::optional<ValueProfile> values;
  std::optional<PriceProfile> prices;
  SearchConfig search;
};

namespace detail {

inline double number_field(const Json& obj, const char* key,
                           const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) throw SchemaError(where + ": missing \"" + key + "\"");
  if (!it->is_number()) {
    throw SchemaError(where + ": \"" + key + "\" must be a number");
  }
  return it->get<double>();
}

inline void reject_unknown(const Json& obj,
                           std::initializer_list<const char*> allowed,
                           const std::string& where) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool ok = false;
    for (const char* k : allowed) ok = ok || it.key() == k;
    if (!ok) throw SchemaError(where + ": unknown key \"" + it.key() + "\"");
  }
}

inline std::vector<double> number_list(const Json& arr,
                                       const std::string& where) {
  if (!arr.is_array()) throw SchemaError(where + " must be an array");
  std::vector<double> out;
  for (const Json& x : arr) {
    if (!x.is_number()) throw SchemaError(where + " entries must be numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

}  // namespace detail

inline WeightFunction parse_agent(const Json& j, const std::string& where) {
  if (!j.is_object()) throw SchemaError(where + " must be an object");
  auto fam = j.find("family");
  if (fam == j.end() || !fam->is_string()) {
    throw SchemaError(where + ": \"family\" must be a string");
  }
  const std::string family = fam->get<std::string>();
  try {
    if (family == "exponential" || family == "affine") {
      detail::reject_unknown(j, {"family", "a", "b", "h"}, where);
      const double a = detail::number_field(j, "a", where);
      const double b = detail::number_field(j, "b", where);
      const double h = detail::number_field(j, "h", where);
      return family == "exponential" ? WeightFunction::exponential(a, b, h)
                                     : WeightFunction::affine(a, b, h);
    }
    if (family == "power-shifted") {
      detail::reject_unknown(j, {"family", "a", "b", "c", "h"}, where);
      return WeightFunction::power_shifted(
          detail::number_field(j, "a", where),
          detail::number_field(j, "b", where),
          detail::number_field(j, "c", where),
          detail::number_field(j, "h", where));
    }
  } catch (const DomainError& e) {
    throw SchemaError(where + ": " + e.what());
  }
  throw SchemaError(where + ": unknown family \"" + family + "\"");
}

inline Json agent_to_json(const WeightFunction& w) {
  Json j;
  j["family"] = std::string(family_name(w.family()));
  j["a"] = w.a();
  j["b"] = w.b();
  if (w.family() == WeightFamily::kPowerShifted) j["c"] = w.c();
  j["h"] = w.value_cap();
  return j;
}

inline Instance parse_instance(const Json& j) {
  if (!j.is_object()) throw SchemaError("instance must be a JSON object");
  detail::reject_unknown(j, {"agents", "values", "prices", "search", "quadrature"},
                         "instance");
  Instance inst;
  auto agents = j.find("agents");
  if (agents == j.end() || !agents->is_array() || agents->empty()) {
    throw SchemaError("instance: \"agents\" must be a nonempty array");
  }
  for (std::size_t i = 0; i < agents->size(); ++i) {
    inst.agents.push_back(
        parse_agent((*agents)[i], "agents[" + std::to_string(i) + "]"));
  }
  const std::size_t n = inst.agents.size();
  auto take_profile = [&](const char* key) -> std::optional<std::vector<double>> {
    auto it = j.find(key);
    if (it == j.end()) return std::nullopt;
    std::vector<double> v = detail::number_list(*it, key);
    if (v.size() != n) {
      throw SchemaError(std::string(key) + " has " + std::to_string(v.size()) +
                        " entries for " + std::to_string(n) + " agents");
    }
    for (double x : v) {
      if (!std::isfinite(x) || x < 0.0) {
        throw SchemaError(std::string(key) + " entries must be finite and >= 0");
      }
    }
    return v;
  };
  inst.values = take_profile("values");
  inst.prices = take_profile("prices");
  if (auto it = j.find("search"); it != j.end()) {
    if (!it->is_object()) throw SchemaError("search must be an object");
    detail::reject_unknown(*it, {"epsilon", "max_iter", "threads"}, "search");
    if (it->contains("epsilon")) {
      inst.search.epsilon = detail::number_field(*it, "epsilon", "search");
    }
    if (it->contains("max_iter")) {
      if (!(*it)["max_iter"].is_number_integer()) {
        throw SchemaError("search: \"max_iter\" must be an integer");
      }
      inst.search.max_iter = (*it)["max_iter"].get<int>();
    }
    if (it->contains("threads")) {
      if (!(*it)["threads"].is_number_integer()) {
        throw SchemaError("search: \"threads\" must be an integer");
      }
      inst.search.threads = (*it)["threads"].get<int>();
    }
  }
  if (auto it = j.find("quadrature"); it != j.end()) {
    if (!it->is_object()) throw SchemaError("quadrature must be an object");
    detail::reject_unknown(*it, {"panels", "nodes_per_panel", "abs_tol"},
                           "quadrature");
    QuadratureConfig& q = inst.search.quadrature;
    for (const char* key : {"panels", "nodes_per_panel"}) {
      if (!it->contains(key)) continue;
      if (!(*it)[key].is_number_integer()) {
        throw SchemaError(std::string("quadrature: \"") + key +
                          "\" must be an integer");
      }
      (std::string(key) == "panels" ? q.panels : q.nodes_per_panel) =
          (*it)[key].get<int>();
    }
    if (it->contains("abs_tol")) {
      q.abs_tol = detail::number_field(*it, "abs_tol", "quadrature");
    }
  }
  try {
    inst.search.validate();
  } catch (const DomainError& e) {
    throw SchemaError(e.what());
  }
  if (inst.search.threads < 1) throw SchemaError("search: threads must be >= 1");
  return inst;
}

inline Instance load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open " + path);
  Json j;
  try {
    j = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw SchemaError(path + ": " + e.what());
  }
  return parse_instance(j);
}

inline Json instance_to_json(const Instance& inst) {
  Json j;
  j["agents"] = Json::array();
  for (const auto& a : inst.agents) j["agents"].push_back(agent_to_json(a));
  if (inst.values) j["values"] = *inst.values;
  if (inst.prices) j["prices"] = *inst.prices;
  j["search"] = {{"epsilon", inst.search.epsilon},
                 {"max_iter", inst.search.max_iter}};
  j["quadrature"] = {{"panels", inst.search.quadrature.panels},
                     {"nodes_per_panel", inst.search.quadrature.nodes_per_panel},
                     {"abs_tol", inst.search.quadrature.abs_tol}};
  return j;
}

// Sorted keys, floats at 12 significant digits, non-finite numbers as null.
inline void emit(const Json& j, std::string& out, int indent, int depth) {
  const std::string pad(static_cast<std::size_t>(indent * (depth + 1)), ' ');
  const std::string close_pad(static_cast<std::size_t>(indent * depth), ' ');
  const char* nl = indent > 0 ? "\n" : "";
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{";
      out += nl;
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) {
          out += ",";
          out += nl;
        }
        first = false;
        out += pad;
        out += Json(it.key()).dump();
        out += indent > 0 ? ": " : ":";
        emit(it.value(), out, indent, depth + 1);
      }
      out += nl;
      out += close_pad;
      out += "}";
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      out += "[";
      bool first = true;
      for (const Json& x : j) {
        if (!first) out += indent > 0 ? ", " : ",";
        first = false;
        emit(x, out, indent, depth + 1);
      }
      out += "]";
      return;
    }
    case Json::value_t::number_float: {
      const double x = j.get<double>();
      if (!std::isfinite(x)) {
        out += "null";
        return;
      }
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.12g", x == 0.0 ? 0.0 : x);
      out += buf;
      return;
    }
    default:
      out += j.dump();
  }
}

inline std::string to_text(const Json& j) {
  std::string out;
  emit(j, out, 2, 0);
  out += "\n";
  return out;
}

inline Json report_to_json(const InversionReport& rep) {
  Json j;
  j["recovered_values"] = rep.recovered_values;
  j["recovered_weights"] = rep.recovered_weights;
  j["winning_space"] = rep.winning_space;
  j["s_range"] = {rep.s_low, rep.s_high};
  j["final_sum"] = rep.final_sum;
  j["final_bracket"] = rep.final_bracket;
  j["residual"] = rep.residual;
  j["converged"] = rep.converged;
  j["used_check_slack"] = rep.used_check_slack;
  j["iterations"] = {{"min_sum", rep.iterations.min_sum},
                     {"upper_bound", rep.iterations.upper_bound},
                     {"main", rep.iterations.main},
                     {"level_weight", rep.iterations.level_weight}};
  j["min_sums"] = Json::array();
  for (const auto& m : rep.min_sums) {
    j["min_sums"].push_back({{"agent", m.agent},
                             {"min_sum", m.min_sum},
                             {"case", std::string(min_sum_case_name(m.boundary_case))}});
  }
  j["spaces_rejected"] = Json::array();
  for (const auto& r : rep.spaces_rejected) {
    j["spaces_rejected"].push_back({{"agent", r.agent},
                                    {"reason", std::string(rejection_name(r.reason))},
                                    {"detail", r.detail}});
  }
  j["zero_price_agents"] = rep.zero_price_agents;
  return j;
}

inline Json matrix_to_json(const Matrix& m) {
  Json rows = Json::array();
  for (std::size_t i = 0; i < m.size(); ++i) {
    Json row = Json::array();
    for (std::size_t k = 0; k < m.size(); ++k) row.push_back(m(i, k));
    rows.push_back(row);
  }
  return rows;
}

inline Json witness_to_json(const NonidentifiabilityWitness& w) {
  Json j;
  j["parameters"] = {{"k", w.instance.k},
                     {"beta", w.instance.beta},
                     {"delta", w.instance.delta}};
  j["roots"] = w.roots;
  j["root_count"] = w.roots.size();
  j["alpha"] = w.alpha;
  j["group_values"] = {w.low_value, w.high_value};
  j["value_profile_a"] = w.profile_a.values;
  j["value_profile_b"] = w.profile_b.values;
  j["prices_a"] = w.prices_a;
  j["prices_b"] = w.prices_b;
  j["common_prices"] = w.prices_a;
  j["max_price_difference"] = w.max_price_difference;
  j["max_value_difference"] = w.max_value_difference;
  return j;
}

}  // namespace propinv::io

#endif  // PROPINV_TOOLS_INSTANCE_IO_HPP_
