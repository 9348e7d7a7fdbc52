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

#ifndef RISKHTN_UTILITY_HPP_
#define RISKHTN_UTILITY_HPP_

// Utility functions over (negative) costs and the expected-utility
// evaluators for single operators and whole plans.
//
// Static attitudes use the exponential family
//     U(c) = c                              (neutral)
//     U(c) = a * (exp(a * alpha * c) - 1) / alpha     (a = -1 averse, a = +1 seeking)
// and the dynamic attitude uses the one-switch function
//     U(x) = x + D * (1 - exp(-alpha * x)) / alpha,    x = remaining resource.
//
// The static family segments: the expected utility of a plan is a function
// of the sum of per-operator "risk costs" (see risk_cost()). That sum is what
// the planners minimise.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace riskhtn {

enum class UtilityKind : std::uint8_t { linear, exponential, one_switch };

struct UtilitySpec {
  UtilityKind kind = UtilityKind::linear;
  int a = -1;                    // exponential: attitude sign (-1 averse, +1 seeking)
  double alpha = 1.0;            // exponential/one-switch curvature, > 0
  double trade_off = 1.0;        // one-switch D, > 0
  double initial_resource = 0;   // one-switch R at t0, > 0

  static UtilitySpec linear();
  // Throws ModelError unless a is +-1 and alpha > 0.
  static UtilitySpec exponential(int a, double alpha);
  // Throws ModelError unless all parameters are > 0.
  static UtilitySpec one_switch(double trade_off, double alpha, double initial_resource);

  bool is_static() const { return kind != UtilityKind::one_switch; }

  friend bool operator==(const UtilitySpec&, const UtilitySpec&) = default;
};

struct CostOutcome {
  double probability = 1.0;
  double cost = -1.0;

  friend bool operator==(const CostOutcome&, const CostOutcome&) = default;
};

using CostDistribution = std::vector<CostOutcome>;

// Per-step outcome indices of one plan execution.
using Trajectory = std::vector<std::size_t>;

// U_c(cost) for the static family. Throws ModelError for one-switch specs.
double eval_static(const UtilitySpec& spec, double cost);

// U_d(resource_after) for one-switch specs. Throws ModelError otherwise.
double eval_one_switch(const UtilitySpec& spec, double resource_after);

// Utility of a realised total plan cost: U_c(total) for static specs and
// U_d(R0 + total) for one-switch specs.
double realized_utility(const UtilitySpec& spec, double total_cost);

// EU(o) = sum_i U_c(c_i) p_i. Throws ModelError for one-switch specs or an
// empty distribution.
double operator_eu(const UtilitySpec& spec, std::span<const CostOutcome> outcomes);

inline constexpr std::size_t kDefaultTrajectoryCap = 10'000'000;

// Full enumeration over every joint outcome: sum_traj (prod p) U(sum c).
// Throws ResourceLimitError when the trajectory count exceeds `cap`.
double plan_eu_exact(const UtilitySpec& spec, std::span<const CostDistribution> plan,
                     std::size_t cap = kDefaultTrajectoryCap);

// Segmented evaluation: sum of operator EUs (linear) or the product of
// per-step factors E[exp(a alpha c)] normalised once (exponential). Equal to
// plan_eu_exact up to rounding. Throws ModelError for one-switch specs.
double plan_eu_segmented(const UtilitySpec& spec, std::span<const CostDistribution> plan);

// sum_k p(chosen_k) * U_c(cost(chosen_k)). Throws ModelError on a length
// mismatch or an out-of-range outcome index.
double trajectory_eu(const UtilitySpec& spec, std::span<const CostDistribution> plan,
                     const Trajectory& trajectory);

// (prod success probabilities) * (prod success utilities); failures score 0.
// Throws ModelError for probabilities outside (0, 1] or mismatched lengths.
double plan_eu_success_model(std::span<const double> success_probabilities,
                             std::span<const double> success_utilities);

// Segment algebra for the static family.
//
// risk_cost(o) > 0 is an additive per-operator quantity such that the exact
// expected utility of any plan equals eu_from_risk_cost(sum of risk costs):
//   linear:       w = -EU(o),                      EU(W) = -W
//   exponential:  w = -a * log E[exp(a alpha c)],  EU(W) = a * expm1(-a W) / alpha
// For exponential specs exp(-a * W) is the product of the per-step factors,
// so adding risk costs is multiplying segment factors.
// eu_from_risk_cost is strictly decreasing in W; W = +inf marks an
// unreachable goal and maps to -inf for every attitude.
double risk_cost(const UtilitySpec& spec, std::span<const CostOutcome> outcomes);
double eu_from_risk_cost(const UtilitySpec& spec, double total_risk_cost);
double risk_cost_from_eu(const UtilitySpec& spec, double eu);

// Product-form "core" of a segment: exp(-a W) for exponential specs
// (the product of E[exp(a alpha c)] over its steps). Linear specs have no
// multiplicative core; this throws ModelError for them.
double segment_core(const UtilitySpec& spec, double total_risk_cost);

}  // namespace riskhtn

#endif  // RISKHTN_UTILITY_HPP_
