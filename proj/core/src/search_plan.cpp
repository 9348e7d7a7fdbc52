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

#include "riskhtn/search_plan.hpp"

#include <chrono>
#include <limits>
#include <memory>
#include <queue>
#include <unordered_set>

#include "riskhtn/error.hpp"

namespace riskhtn {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Entry {
  std::shared_ptr<const PartialPlan> plan;
  double f_cost;
  std::uint64_t seq;
};

struct EntryOrder {
  bool operator()(const Entry& a, const Entry& b) const {
    if (a.f_cost != b.f_cost) return a.f_cost > b.f_cost;
    const auto ra = a.plan->network.size(), rb = b.plan->network.size();
    if (ra != rb) return ra > rb;
    return a.seq > b.seq;
  }
};

bool has_compound(const TaskNetwork& network) {
  for (const auto& [id, t] : network.nodes())
    if (t.kind == TaskKind::compound) return true;
  return false;
}

bool is_solution_candidate(const TaskNetwork& network) {
  for (const auto& [id, t] : network.nodes())
    if (t.kind == TaskKind::compound || !t.is_ground()) return false;
  return true;
}

class Linearizer {
 public:
  Linearizer(const GroundModel& model, std::size_t max_orders) : model_(model), max_orders_(max_orders) {}

  std::optional<Plan> run(const State& state, const TaskNetwork& network) {
    Plan plan;
    if (search(state, network, plan)) return plan;
    return std::nullopt;
  }

 private:
  bool search(const State& state, const TaskNetwork& network, Plan& plan) {
    if (network.empty()) return true;
    if (dead_ends_ >= max_orders_) return false;
    std::string key;
    for (AtomId a : state.atoms()) key += std::to_string(a) + ",";
    key += network.canonical_key();
    if (failed_.contains(key)) return false;
    for (const auto& id : find_unconstrained_tasks(network)) {
      const TaskInstance& t = network.task(id);
      TaskNetwork rest = network;
      rest.remove_unconstrained(id);
      if (t.kind == TaskKind::guard) {
        if (applicable(model_.methods()[t.name], state) && search(state, rest, plan)) return true;
        continue;
      }
      auto task = model_.ground_task_of(t);
      if (!task || model_.tasks()[*task].op < 0) continue;
      const GroundOperator& op = model_.operators()[model_.tasks()[*task].op];
      if (!applicable(op, state)) continue;
      plan.steps.push_back(op.id);
      if (search(progress(state, op, 0), rest, plan)) return true;
      plan.steps.pop_back();
    }
    ++dead_ends_;
    failed_.insert(std::move(key));
    return false;
  }

  const GroundModel& model_;
  std::size_t max_orders_;
  std::size_t dead_ends_ = 0;
  std::unordered_set<std::string> failed_;
};

}  // namespace

double partial_plan_risk_cost(const TaskNetwork& network, const Cvtdg& graph) {
  if (!graph.annotated()) throw ModelError("partial plan estimate needs an annotated graph");
  double total = 0;
  for (const auto& [id, task] : network.nodes()) {
    if (task.kind == TaskKind::guard) continue;
    double best = kInf;
    for (int v : compatible_groundings(task, graph)) best = std::min(best, graph.annotation(v).risk_cost);
    total += best;
  }
  return total;
}

double partial_plan_eu(const TaskNetwork& network, const Cvtdg& graph) {
  return eu_from_risk_cost(graph.spec(), partial_plan_risk_cost(network, graph));
}

std::vector<PartialPlan> refine(const PartialPlan& plan, const GroundModel& model) {
  std::vector<PartialPlan> out;
  const auto& nodes = plan.network.nodes();
  if (has_compound(plan.network)) {
    for (const auto& [id, task] : nodes) {
      if (task.kind != TaskKind::compound) continue;
      for (int t : model.compatible_tasks(task))
        for (int m : model.tasks()[t].methods) {
          PartialPlan child;
          child.network = decompose(plan.network, id, model.methods()[m], model, /*insert_guard=*/true);
          child.trace = plan.trace;
          child.trace.push_back({TraceEntry::Kind::decompose, id, m});
          child.depth = plan.depth + 1;
          out.push_back(std::move(child));
        }
    }
    return out;
  }
  for (const auto& [id, task] : nodes) {
    if (task.kind != TaskKind::primitive || task.is_ground()) continue;
    for (int t : model.compatible_tasks(task)) {
      const int op = model.tasks()[t].op;
      if (op < 0) continue;
      PartialPlan child;
      child.network = bind_primitive(plan.network, id, model.operators()[op], model);
      child.trace = plan.trace;
      child.trace.push_back({TraceEntry::Kind::bind, id, op});
      child.depth = plan.depth;
      out.push_back(std::move(child));
    }
    break;
  }
  return out;
}

std::optional<Plan> linearize(const GroundModel& model, const TaskNetwork& network, const State& state,
                              std::size_t max_orders) {
  return Linearizer(model, max_orders).run(state, network);
}

SearchResult find_plans_planspace(const GroundModel& model, const UtilitySpec& spec,
                                  const SearchBounds& bounds, int k_unfold,
                                  const RefineObserver& on_expand) {
  if (!spec.is_static()) throw ModelError("planning needs a static utility; one-switch does not segment");
  if (!model.effect_deterministic())
    throw ModelError("plan-space search needs an effect-deterministic model");
  const auto start = std::chrono::steady_clock::now();
  SearchResult result;
  auto finish = [&](SearchStatus status) {
    result.status = status;
    result.stats.runtime_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    return result;
  };

  const TaskNetwork& initial = model.initial_network();
  // An initial task that cannot be grounded or decomposed at all makes the
  // problem unsolvable; the graph builder would reject it as malformed.
  for (const auto& [id, task] : initial.nodes()) {
    bool viable = false;
    for (int t : model.compatible_tasks(task))
      viable = viable || (model.is_primitive_task(t) ? model.tasks()[t].op >= 0
                                                     : !model.tasks()[t].methods.empty());
    if (!viable) return finish(SearchStatus::proven_failure);
  }
  const Cvtdg graph = annotate_expected_utilities(build_cvtdg(model, initial), spec, k_unfold);

  auto root = std::make_shared<PartialPlan>();
  root->network = initial;
  const double root_cost = partial_plan_risk_cost(root->network, graph);
  if (root_cost == kInf) return finish(SearchStatus::proven_failure);

  std::priority_queue<Entry, std::vector<Entry>, EntryOrder> fringe;
  std::unordered_set<std::string> seen{root->network.canonical_key()};
  std::uint64_t seq = 0;
  fringe.push({root, root_cost, seq++});
  result.stats.nodes_generated = 1;
  bool depth_pruned = false;

  while (!fringe.empty()) {
    Entry e = fringe.top();
    fringe.pop();
    const PartialPlan& pp = *e.plan;
    if (is_solution_candidate(pp.network)) {
      if (auto plan = linearize(model, pp.network, model.initial_state())) {
        result.plan = *plan;
        result.expected_utility = plan_eu_segmented(spec, model.distributions(*plan));
        result.trace = pp.trace;
        return finish(SearchStatus::solved);
      }
      continue;
    }
    if (result.stats.nodes_expanded >= bounds.max_nodes) return finish(SearchStatus::bounds_exhausted);
    if (on_expand) on_expand(pp, eu_from_risk_cost(spec, e.f_cost));
    ++result.stats.nodes_expanded;
    for (auto& child : refine(pp, model)) {
      if (child.depth > bounds.max_depth) {
        depth_pruned = true;
        continue;
      }
      const double f = partial_plan_risk_cost(child.network, graph);
      if (f == kInf) continue;
      if (!seen.insert(child.network.canonical_key()).second) continue;
      ++result.stats.nodes_generated;
      fringe.push({std::make_shared<const PartialPlan>(std::move(child)), f, seq++});
    }
  }
  return finish(depth_pruned ? SearchStatus::bounds_exhausted : SearchStatus::proven_failure);
}

}  // namespace riskhtn
