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

#ifndef RISKHTN_SEARCH_STATE_HPP_
#define RISKHTN_SEARCH_STATE_HPP_

// State-based best-first HTN search guided by a relaxed classical model.
//
// Costs along a search path are the additive risk costs of utility.hpp, so
// g, h and f live on one scale for every static attitude; the EU-valued
// accessors convert back with eu_from_risk_cost.

#include <functional>
#include <limits>
#include <vector>

#include "riskhtn/ground_model.hpp"
#include "riskhtn/search.hpp"
#include "riskhtn/utility.hpp"

namespace riskhtn {

struct SearchNode {
  State state;
  TaskNetwork network;
  std::vector<int> plan_prefix;  // ground operator ids
  std::vector<TraceEntry> trace;
  double g_cost = 0;  // risk cost of plan_prefix
  double h_cost = 0;  // admissible estimate of the remaining risk cost
  int depth = 0;      // decompositions applied so far

  double f_cost() const { return g_cost + h_cost; }
};

// Relaxed classical model: facts are the atoms plus one achievement fact per
// ground task. Each operator becomes an action adding its effects and its
// task's fact, at cost risk_cost(o) > 0; each method becomes a zero-cost
// action from its subtasks' facts to its task's fact. Built once per model
// and utility; h_max is evaluated per node.
class RcHeuristic {
 public:
  RcHeuristic(const GroundModel& model, const UtilitySpec& spec);

  // h_max of reaching the achievement facts of every task in `network` from
  // `state`; +inf when some fact is unreachable. A lifted task is satisfied
  // by any compatible ground task.
  double cost(const State& state, const TaskNetwork& network) const;

  const GroundModel& model() const { return *model_; }
  const UtilitySpec& spec() const { return spec_; }
  std::size_t num_facts() const { return num_facts_; }
  std::size_t num_actions() const { return actions_.size(); }
  // Cost of relaxed action `i`; operator actions come first, in operator id
  // order, followed by method actions.
  double action_cost(std::size_t i) const { return actions_[i].cost; }

 private:
  struct Action {
    std::vector<int> pre;
    std::vector<int> add;
    double cost = 0;
  };

  const GroundModel* model_;
  UtilitySpec spec_;
  std::size_t num_facts_ = 0;
  std::vector<Action> actions_;
  std::vector<std::vector<int>> consumers_;  // fact -> actions with it as precondition
};

// EU estimate for completing the node: eu_from_risk_cost of the h_max cost,
// -inf when unreachable and 0 for an empty network.
double compute_rc_heuristic(const SearchNode& node, const GroundModel& model, const UtilitySpec& spec);

// Combines an accumulated EU with an EU estimate of the rest. Linear: g + h.
// Exponential: the segment cores P = 1 + a alpha EU multiply, f = a (P_g P_h - 1) / alpha.
double combine(double g_eu, double h_eu, const UtilitySpec& spec);

// Successors of a node: each unconstrained primitive task executed with an
// applicable operator instance, and each unconstrained compound task
// decomposed with each applicable method. h_cost is filled in from
// `heuristic`. Successor order is deterministic.
std::vector<SearchNode> expand(const SearchNode& node, const GroundModel& model,
                               const RcHeuristic& heuristic);

using ExpandObserver = std::function<void(const SearchNode&)>;

// A* over (state, network) nodes ordered by f cost, then fewer remaining
// tasks, then lexicographic plan prefix, then generation order. Returns the
// maximum-EU plan within bounds. Throws ModelError for one-switch utilities
// and for models that are not effect-deterministic. `on_expand` sees every
// node before it is expanded.
SearchResult find_plans(const GroundModel& model, const UtilitySpec& spec,
                        const SearchBounds& bounds = {}, const ExpandObserver& on_expand = {});

}  // namespace riskhtn

#endif  // RISKHTN_SEARCH_STATE_HPP_
