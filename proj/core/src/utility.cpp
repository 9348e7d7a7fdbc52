// Copyright 2026 The riskhtn Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "riskhtn/utility.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "riskhtn/error.hpp"

namespace riskhtn {

namespace {

void require_static(const UtilitySpec& spec, const char* what) {
  if (!spec.is_static()) throw ModelError(std::string(what) + " requires a static utility");
}

double exact_rec(const UtilitySpec& spec, std::span<const CostDistribution> plan, std::size_t k,
                 double prob, double total) {
  if (k == plan.size()) return prob * realized_utility(spec, total);
  double sum = 0;
  for (const auto& o : plan[k]) sum += exact_rec(spec, plan, k + 1, prob * o.probability, total + o.cost);
  return sum;
}

}  // namespace

UtilitySpec UtilitySpec::linear() { return UtilitySpec{}; }

UtilitySpec UtilitySpec::exponential(int a, double alpha) {
  if (a != 1 && a != -1) throw ModelError("exponential utility needs a = +1 or -1");
  if (!(alpha > 0) || !std::isfinite(alpha)) throw ModelError("alpha must be positive");
  UtilitySpec s;
  s.kind = UtilityKind::exponential;
  s.a = a;
  s.alpha = alpha;
  return s;
}

UtilitySpec UtilitySpec::one_switch(double trade_off, double alpha, double initial_resource) {
  if (!(trade_off > 0) || !std::isfinite(trade_off)) throw ModelError("D must be positive");
  if (!(alpha > 0) || !std::isfinite(alpha)) throw ModelError("alpha must be positive");
  if (!(initial_resource > 0) || !std::isfinite(initial_resource))
    throw ModelError("initial_resource must be positive");
  UtilitySpec s;
  s.kind = UtilityKind::one_switch;
  s.trade_off = trade_off;
  s.alpha = alpha;
  s.initial_resource = initial_resource;
  return s;
}

double eval_static(const UtilitySpec& spec, double cost) {
  switch (spec.kind) {
    case UtilityKind::linear:
      return cost;
    case UtilityKind::exponential:
      return spec.a * std::expm1(spec.a * spec.alpha * cost) / spec.alpha;
    case UtilityKind::one_switch:
      break;
  }
  throw ModelError("eval_static called with a one-switch utility");
}

double eval_one_switch(const UtilitySpec& spec, double resource_after) {
  if (spec.kind != UtilityKind::one_switch)
    throw ModelError("eval_one_switch called with a static utility");
  return resource_after - spec.trade_off * std::expm1(-spec.alpha * resource_after) / spec.alpha;
}

double realized_utility(const UtilitySpec& spec, double total_cost) {
  if (spec.is_static()) return eval_static(spec, total_cost);
  return eval_one_switch(spec, spec.initial_resource + total_cost);
}

double operator_eu(const UtilitySpec& spec, std::span<const CostOutcome> outcomes) {
  require_static(spec, "operator_eu");
  if (outcomes.empty()) throw ModelError("operator_eu of an empty distribution");
  double sum = 0;
  for (const auto& o : outcomes) sum += o.probability * eval_static(spec, o.cost);
  return sum;
}

double plan_eu_exact(const UtilitySpec& spec, std::span<const CostDistribution> plan, std::size_t cap) {
  double count = 1;
  for (const auto& d : plan) {
    if (d.empty()) throw ModelError("plan step with an empty distribution");
    count *= static_cast<double>(d.size());
    if (count > static_cast<double>(cap))
      throw ResourceLimitError("plan has more than " + std::to_string(cap) + " trajectories");
  }
  return exact_rec(spec, plan, 0, 1.0, 0.0);
}

double plan_eu_segmented(const UtilitySpec& spec, std::span<const CostDistribution> plan) {
  require_static(spec, "plan_eu_segmented");
  if (spec.kind == UtilityKind::linear) {
    double sum = 0;
    for (const auto& d : plan) sum += operator_eu(spec, d);
    return sum;
  }
  double total = 0;
  for (const auto& d : plan) total += risk_cost(spec, d);
  return eu_from_risk_cost(spec, total);
}

double trajectory_eu(const UtilitySpec& spec, std::span<const CostDistribution> plan,
                     const Trajectory& trajectory) {
  require_static(spec, "trajectory_eu");
  if (trajectory.size() != plan.size())
    throw ModelError("trajectory length " + std::to_string(trajectory.size()) +
                     " does not match plan length " + std::to_string(plan.size()));
  double sum = 0;
  for (std::size_t k = 0; k < plan.size(); ++k) {
    if (trajectory[k] >= plan[k].size())
      throw ModelError("outcome index out of range at step " + std::to_string(k));
    const auto& o = plan[k][trajectory[k]];
    sum += o.probability * eval_static(spec, o.cost);
  }
  return sum;
}

double plan_eu_success_model(std::span<const double> success_probabilities,
                             std::span<const double> success_utilities) {
  if (success_probabilities.size() != success_utilities.size())
    throw ModelError("success model needs one utility per probability");
  double p = 1, u = 1;
  for (double x : success_probabilities) {
    if (!(x > 0 && x <= 1)) throw ModelError("success probability outside (0, 1]");
    p *= x;
  }
  for (double x : success_utilities) u *= x;
  return p * u;
}

double risk_cost(const UtilitySpec& spec, std::span<const CostOutcome> outcomes) {
  require_static(spec, "risk_cost");
  if (outcomes.empty()) throw ModelError("risk_cost of an empty distribution");
  if (spec.kind == UtilityKind::linear) return -operator_eu(spec, outcomes);
  double s = 0;
  for (const auto& o : outcomes) s += o.probability * std::expm1(spec.a * spec.alpha * o.cost);
  return -spec.a * std::log1p(s);
}

double eu_from_risk_cost(const UtilitySpec& spec, double total_risk_cost) {
  require_static(spec, "eu_from_risk_cost");
  if (total_risk_cost == 0) return 0.0;
  if (spec.kind == UtilityKind::linear) return -total_risk_cost;
  if (total_risk_cost == std::numeric_limits<double>::infinity())
    return -std::numeric_limits<double>::infinity();
  return spec.a * std::expm1(-spec.a * total_risk_cost) / spec.alpha;
}

double risk_cost_from_eu(const UtilitySpec& spec, double eu) {
  require_static(spec, "risk_cost_from_eu");
  if (spec.kind == UtilityKind::linear) return -eu;
  const double x = spec.a * spec.alpha * eu;
  if (x <= -1) return std::numeric_limits<double>::infinity();
  return -spec.a * std::log1p(x);
}

double segment_core(const UtilitySpec& spec, double total_risk_cost) {
  if (spec.kind != UtilityKind::exponential)
    throw ModelError("segment_core is defined for exponential utilities only");
  return std::exp(-spec.a * total_risk_cost);
}

}  // namespace riskhtn
