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

// propinv command-line front end.
//
// Exit codes: 0 success, 2 schema/usage/size error, 3 numerical failure,
// 4 infeasible prices, 5 no counterexample witness.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "instance_io.hpp"
#include "propinv/allocation.hpp"
#include "propinv/counterexample.hpp"
#include "propinv/inversion.hpp"
#include "propinv/jacobian.hpp"
#include "propinv/pricing.hpp"

namespace {

using propinv::io::Json;

constexpr int kExitOk = 0;
constexpr int kExitSchema = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitInfeasible = 4;
constexpr int kExitNoWitness = 5;

constexpr double kRoundtripTolerance = 1e-4;

struct Overrides {
  std::optional<double> epsilon;
  std::optional<int> panels;
  std::optional<int> max_iter;
  std::optional<int> threads;
};

propinv::io::Instance load(const std::string& path, const Overrides& o) {
  propinv::io::Instance inst = propinv::io::load_instance(path);
  if (o.epsilon) inst.search.epsilon = *o.epsilon;
  if (o.panels) inst.search.quadrature.panels = *o.panels;
  if (o.max_iter) inst.search.max_iter = *o.max_iter;
  if (o.threads) inst.search.threads = *o.threads;
  try {
    inst.search.validate();
  } catch (const propinv::DomainError& e) {
    throw propinv::io::SchemaError(e.what());
  }
  if (inst.search.threads < 1) throw propinv::io::SchemaError("--threads must be >= 1");
  return inst;
}

const propinv::ValueProfile& need_values(const propinv::io::Instance& inst) {
  if (!inst.values) throw propinv::io::SchemaError("instance has no values");
  return *inst.values;
}

const propinv::PriceProfile& need_prices(const propinv::io::Instance& inst) {
  if (!inst.prices) throw propinv::io::SchemaError("instance has no prices");
  return *inst.prices;
}

int cmd_forward(const std::string& path, const Overrides& o) {
  const auto inst = load(path, o);
  const auto& v = need_values(inst);
  const auto& q = inst.search.quadrature;
  Json out;
  out["prices"] = propinv::price_profile(inst.agents, v, q, inst.search.threads);
  out["allocations"] =
      propinv::proportional_alloc(propinv::weights_of(inst.agents, v));
  std::cout << propinv::io::to_text(out);
  return kExitOk;
}

int cmd_invert(const std::string& path, const Overrides& o) {
  const auto inst = load(path, o);
  const auto rep =
      propinv::invert_prices(inst.agents, need_prices(inst), inst.search);
  std::cout << propinv::io::to_text(propinv::io::report_to_json(rep));
  return rep.converged ? kExitOk : kExitNumerical;
}

int cmd_diagnose(const std::string& path, const Overrides& o) {
  const auto inst = load(path, o);
  const auto& v = need_values(inst);
  const auto w = propinv::weights_of(inst.agents, v);
  const auto rep =
      propinv::interior_pmatrix_verify(inst.agents, w, inst.search.quadrature);
  Json out;
  out["jacobian"] = propinv::io::matrix_to_json(rep.jacobian);
  Json h = Json::array();
  std::size_t next = 0;
  for (std::size_t i = 0; i < inst.agents.size(); ++i) {
    const auto& act = rep.factorization.active_dims;
    if (next < act.size() && act[next] == i) {
      h.push_back(rep.factorization.g[next++]);
    } else {
      h.push_back(nullptr);
    }
  }
  out["h_ratios"] = h;
  out["boundary_dims"] = rep.boundary_dims;
  out["pmatrix_verdict"] = std::string(propinv::verdict_name(rep.pmatrix.verdict));
  out["minors_checked"] = rep.pmatrix.minors_checked;
  out["zero_minors"] = rep.pmatrix.zero_minors;
  out["negative_minors"] = rep.pmatrix.negative_minors;
  if (rep.hmatrix) {
    out["hmatrix_case"] = rep.hmatrix->case_tag;
    out["hmatrix_positive_definite"] = rep.hmatrix->positive_definite;
    out["hmatrix_reciprocal_sum"] = rep.hmatrix->reciprocal_sum;
  } else {
    out["hmatrix_case"] = nullptr;
  }
  out["verdicts_agree"] = rep.verdicts_agree;
  std::cout << propinv::io::to_text(out);
  return kExitOk;
}

int cmd_counterexample(int k, double beta, double delta, int grid,
                       const std::string& witness_path) {
  propinv::CounterexampleInstance inst;
  try {
    inst = propinv::CounterexampleInstance::with_defaults(k, beta, delta);
    inst.validate();
  } catch (const propinv::DomainError& e) {
    throw propinv::io::SchemaError(e.what());
  }
  if (grid < 100) throw propinv::io::SchemaError("--grid must be >= 100");
  std::cout << propinv::gap_curve_csv(inst, grid);
  const auto w = propinv::verify_nonidentifiability(inst, grid);
  const std::string text = propinv::io::to_text(propinv::io::witness_to_json(w));
  if (witness_path.empty() || witness_path == "-") {
    std::cerr << text;
  } else {
    std::ofstream f(witness_path);
    if (!f) throw propinv::io::SchemaError("cannot write " + witness_path);
    f << text;
  }
  return kExitOk;
}

int cmd_roundtrip(const std::string& path, const Overrides& o) {
  const auto inst = load(path, o);
  const auto& v = need_values(inst);
  const auto r = propinv::price_profile(inst.agents, v, inst.search.quadrature,
                                        inst.search.threads);
  const auto rep = propinv::invert_prices(inst.agents, r, inst.search);
  double err = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    err = std::max(err, std::abs(v[i] - rep.recovered_values[i]));
  }
  Json out;
  out["values"] = v;
  out["prices"] = r;
  out["recovered_values"] = rep.recovered_values;
  out["max_value_error"] = err;
  out["tolerance"] = kRoundtripTolerance;
  out["pass"] = err <= kRoundtripTolerance;
  out["winning_space"] = rep.winning_space;
  std::cout << propinv::io::to_text(out);
  return err <= kRoundtripTolerance ? kExitOk : kExitNumerical;
}

void print_reasons(const propinv::InfeasiblePriceError& e) {
  Json j;
  j["error"] = "infeasible prices";
  j["message"] = e.what();
  j["reasons"] = e.reasons();
  std::cout << propinv::io::to_text(j);
  std::cerr << "infeasible prices: " << e.what() << "\n";
  for (const auto& r : e.reasons()) std::cerr << "  " << r << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Proportional-weights mechanism pricing and price inversion"};
  app.require_subcommand(1);
  Overrides o;
  std::string path;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("instance", path, "Instance JSON file")->required();
    sub->add_option("--epsilon", o.epsilon, "Weight bracket tolerance");
    sub->add_option("--panels", o.panels, "Quadrature panels");
    sub->add_option("--max-iter", o.max_iter, "Bisection iteration cap");
    sub->add_option("--threads", o.threads, "Worker threads");
  };
  CLI::App* forward = app.add_subcommand("forward", "Prices from values");
  add_common(forward);
  CLI::App* invert = app.add_subcommand("invert", "Values from prices");
  add_common(invert);
  CLI::App* diagnose =
      app.add_subcommand("diagnose", "Jacobian identifiability diagnostics");
  add_common(diagnose);
  CLI::App* roundtrip =
      app.add_subcommand("roundtrip", "Forward then invert self-test");
  add_common(roundtrip);

  int k = 4;
  double beta = 10.0;
  double delta = 4.0;
  int grid = 1000;
  std::string witness;
  CLI::App* cex = app.add_subcommand(
      "counterexample", "Partition-system equal-price curve and witness");
  cex->add_option("--k", k, "Agents per symmetric part");
  cex->add_option("--beta", beta, "Combined value of the two parts");
  cex->add_option("--delta", delta, "Log-sum-exp of the remaining parts");
  cex->add_option("--grid", grid, "Grid intervals for the curve");
  cex->add_option("--witness", witness,
                  "Witness JSON destination (default: stderr)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitSchema;
  }

  try {
    if (*forward) return cmd_forward(path, o);
    if (*invert) return cmd_invert(path, o);
    if (*diagnose) return cmd_diagnose(path, o);
    if (*roundtrip) return cmd_roundtrip(path, o);
    if (*cex) return cmd_counterexample(k, beta, delta, grid, witness);
  } catch (const propinv::io::SchemaError& e) {
    std::cerr << "schema error: " << e.what() << "\n";
    return kExitSchema;
  } catch (const propinv::SizeError& e) {
    std::cerr << "size error: " << e.what() << "\n";
    return kExitSchema;
  } catch (const propinv::InfeasiblePriceError& e) {
    print_reasons(e);
    return kExitInfeasible;
  } catch (const propinv::CounterexampleNotFound& e) {
    std::cerr << "no witness: " << e.what() << "\n";
    return kExitNoWitness;
  } catch (const propinv::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what()
              << " (residual " << e.residual() << ")\n";
    return kExitNumerical;
  } catch (const propinv::DomainError& e) {
    std::cerr << "domain error: " << e.what() << "\n";
    return kExitSchema;
  }
  return kExitSchema;
}
