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

#include "riskhtn/evaluation.hpp"

#include <algorithm>
#include <set>

#include "riskhtn/error.hpp"

namespace riskhtn {

namespace {

class Enumerator {
 public:
  Enumerator(const GroundModel& model, const OracleBounds& bounds) : model_(model), bounds_(bounds) {}

  void run(const State& state, const TaskNetwork& network, int depth) {
    Plan prefix;
    visit(state, network, depth, prefix);
  }

  std::set<Plan> plans;
  std::size_t visited = 0;
  bool depth_limited = false;

 private:
  void visit(const State& state, const TaskNetwork& network, int depth, Plan& prefix) {
    if (++visited > bounds_.max_nodes)
      throw ResourceLimitError("oracle visited more than " + std::to_string(bounds_.max_nodes) + " nodes");
    if (network.empty()) {
      plans.insert(prefix);
      return;
    }
    for (const auto& id : find_unconstrained_tasks(network)) {
      const TaskInstance& t = network.task(id);
      if (t.kind == TaskKind::guard) {
        if (!applicable(model_.methods()[t.name], state)) continue;
        TaskNetwork rest = network;
        rest.remove_unconstrained(id);
        visit(state, rest, depth, prefix);
        continue;
      }
      for (int task : model_.compatible_tasks(t)) {
        const GroundTask& gt = model_.tasks()[task];
        if (t.kind == TaskKind::primitive) {
          if (gt.op < 0) continue;
          const GroundOperator& op = model_.operators()[gt.op];
          if (!applicable(op, state)) continue;
          TaskNetwork rest = t.is_ground() ? network : bind_primitive(network, id, op, model_);
          rest.remove_unconstrained(id);
          prefix.steps.push_back(op.id);
          // Effects may differ between outcomes; every branch is followed.
          std::set<State> successors;
          for (std::size_t k = 0; k < op.effects.size(); ++k) successors.insert(progress(state, op, k));
          for (const auto& s : successors) visit(s, rest, depth, prefix);
          prefix.steps.pop_back();
        } else {
          for (int m : gt.methods) {
            const GroundMethod& method = model_.methods()[m];
            if (!applicable(method, state)) continue;
            if (depth + 1 > bounds_.max_depth) {
              depth_limited = true;
              continue;
            }
            visit(state, decompose(network, id, method, model_), depth + 1, prefix);
          }
        }
      }
    }
  }

  const GroundModel& model_;
  const OracleBounds& bounds_;
};

double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

}  // namespace

OracleResult oracle_enumerate_from(const GroundModel& model, const UtilitySpec& spec, const State& state,
                                   const TaskNetwork& network, const OracleBounds& bounds, int depth) {
  Enumerator e(model, bounds);
  e.run(state, network, depth);
  OracleResult r;
  r.nodes_visited = e.visited;
  r.depth_limited = e.depth_limited;
  for (const auto& p : e.plans) {
    const double eu = plan_eu_exact(spec, model.distributions(p));
    if (!r.best || eu > r.plans[*r.best].expected_utility) r.best = r.plans.size();
    r.plans.push_back({p, eu});
  }
  return r;
}

OracleResult oracle_enumerate(const GroundModel& model, const UtilitySpec& spec, const OracleBounds& bounds) {
  return oracle_enumerate_from(model, spec, model.initial_state(), model.initial_network(), bounds, 0);
}

SimulationRun simulate_once(std::span<const CostDistribution> plan, const UtilitySpec& spec,
                            std::mt19937_64& rng) {
  SimulationRun run;
  const bool dynamic = spec.kind == UtilityKind::one_switch;
  if (dynamic) run.resources.push_back(spec.initial_resource);
  for (const auto& dist : plan) {
    if (dist.empty()) throw ModelError("plan step with an empty distribution");
    const double u = uniform01(rng);
    std::size_t k = 0;
    double cumulative = dist[0].probability;
    while (u >= cumulative && k + 1 < dist.size()) cumulative += dist[++k].probability;
    run.trajectory.push_back(k);
    run.total_cost += dist[k].cost;
    if (dynamic) {
      const double r = run.resources.back() + dist[k].cost;
      run.resources.push_back(r);
      run.utilities.push_back(eval_one_switch(spec, r));
    }
  }
  run.utility = realized_utility(spec, run.total_cost);
  return run;
}

SimulationSummary simulate(std::span<const CostDistribution> plan, const UtilitySpec& spec,
                           std::size_t n_runs, std::uint64_t seed, const RunObserver& observer) {
  if (n_runs == 0) throw ModelError("simulate needs at least one run");
  std::mt19937_64 rng(seed);
  SimulationSummary s;
  s.runs = n_runs;
  s.seed = seed;
  for (const auto& d : plan) s.outcome_frequencies.emplace_back(d.size(), 0.0);
  // Welford's running mean and variance.
  double mean = 0, m2 = 0, cost_sum = 0;
  for (std::size_t i = 0; i < n_runs; ++i) {
    SimulationRun run = simulate_once(plan, spec, rng);
    const double delta = run.utility - mean;
    mean += delta / static_cast<double>(i + 1);
    m2 += delta * (run.utility - mean);
    cost_sum += run.total_cost;
    for (std::size_t k = 0; k < run.trajectory.size(); ++k) s.outcome_frequencies[k][run.trajectory[k]] += 1;
    if (std::any_of(run.resources.begin(), run.resources.end(), [](double r) { return r < 0; }))
      ++s.depletions;
    if (observer) observer(i, run);
  }
  s.mean_utility = mean;
  s.variance = n_runs > 1 ? m2 / static_cast<double>(n_runs - 1) : 0.0;
  s.mean_total_cost = cost_sum / static_cast<double>(n_runs);
  for (auto& step : s.outcome_frequencies)
    for (auto& f : step) f /= static_cast<double>(n_runs);
  return s;
}

}  // namespace riskhtn
