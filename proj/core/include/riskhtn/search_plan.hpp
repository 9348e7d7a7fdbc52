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

#ifndef RISKHTN_SEARCH_PLAN_HPP_
#define RISKHTN_SEARCH_PLAN_HPP_

// Plan-space best-first HTN search over partial plans (task networks),
// ordered by the decomposition-graph EU estimate.

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include "riskhtn/cvtdg.hpp"
#include "riskhtn/ground_model.hpp"
#include "riskhtn/search.hpp"
#include "riskhtn/utility.hpp"

namespace riskhtn {

struct PartialPlan {
  TaskNetwork network;
  std::vector<TraceEntry> trace;
  int depth = 0;  // refinements applied
};

// Risk cost estimate of completing `network`: primitive tasks contribute
// risk_cost(o), compound tasks their annotation, each minimised over the
// compatible groundings; guards contribute nothing. +inf when some task has
// no compatible grounding.
double partial_plan_risk_cost(const TaskNetwork& network, const Cvtdg& graph);

// eu_from_risk_cost of partial_plan_risk_cost; 0 for an empty network and
// -inf for a dead partial plan. Uses the graph's annotation utility.
double partial_plan_eu(const TaskNetwork& network, const Cvtdg& graph);

// One successor per (compound task, ground method of a compatible grounding)
// pair, each with a guard node carrying the method's preconditions. When no
// compound task is left, the first primitive task with unbound arguments is
// grounded instead, one successor per compatible operator instance.
std::vector<PartialPlan> refine(const PartialPlan& plan, const GroundModel& model);

inline constexpr std::size_t kDefaultLinearizationBound = 10'000;

// First executable linearization of a network of ground primitive tasks and
// guards from `state`, exploring topological orders depth-first in node id
// order. Gives up after `max_orders` dead ends.
std::optional<Plan> linearize(const GroundModel& model, const TaskNetwork& network, const State& state,
                              std::size_t max_orders = kDefaultLinearizationBound);

using RefineObserver = std::function<void(const PartialPlan&, double f_eu)>;

// A* over partial plans with a closed set on canonical networks. A solution
// is a network of ground primitive tasks with an executable linearization.
// Throws ModelError for one-switch utilities and non-effect-deterministic
// models. `on_expand` sees every partial plan before it is refined.
SearchResult find_plans_planspace(const GroundModel& model, const UtilitySpec& spec,
                                  const SearchBounds& bounds = {}, int k_unfold = kDefaultUnfold,
                                  const RefineObserver& on_expand = {});

}  // namespace riskhtn

#endif  // RISKHTN_SEARCH_PLAN_HPP_
