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

#ifndef RISKHTN_EVALUATION_HPP_
#define RISKHTN_EVALUATION_HPP_

// Ground truth for the planners: exhaustive plan enumeration and Monte Carlo
// execution of a plan.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "riskhtn/ground_model.hpp"
#include "riskhtn/utility.hpp"

namespace riskhtn {

struct OracleBounds {
  int max_depth = 64;                 // decompositions along one derivation
  std::size_t max_nodes = 1'000'000;  // visited (state, network) pairs
};

struct ScoredPlan {
  Plan plan;
  double expected_utility = 0;
};

struct OracleResult {
  std::vector<ScoredPlan> plans;  // distinct, in lexicographic plan order
  std::optional<std::size_t> best;  // index of the first plan with maximal EU
  std::size_t nodes_visited = 0;
  bool depth_limited = false;  // some derivation was cut by max_depth
};

// Every plan derivable from the initial network by decomposing and executing
// unconstrained tasks in every possible order, scored with plan_eu_exact
// (one-switch utilities included). Method preconditions are checked when a
// task is decomposed. Throws ResourceLimitError past max_nodes.
OracleResult oracle_enumerate(const GroundModel& model, const UtilitySpec& spec,
                              const OracleBounds& bounds = {});

// Same, starting from an arbitrary state and network (guards and lifted tasks
// allowed); `depth` decompositions have already been spent.
OracleResult oracle_enumerate_from(const GroundModel& model, const UtilitySpec& spec, const State& state,
                                   const TaskNetwork& network, const OracleBounds& bounds = {},
                                   int depth = 0);

struct SimulationRun {
  Trajectory trajectory;
  double total_cost = 0;
  std::vector<double> resources;  // one-switch: R_0 .. R_n with R_{k+1} = R_k + c_k
  std::vector<double> utilities;  // one-switch: U_d(R_{k+1}) per step
  double utility = 0;             // realized_utility(spec, total_cost)
};

struct SimulationSummary {
  std::size_t runs = 0;
  std::uint64_t seed = 0;
  double mean_utility = 0;
  double variance = 0;  // sample variance (n - 1)
  double mean_total_cost = 0;
  std::vector<std::vector<double>> outcome_frequencies;  // [step][outcome]
  std::size_t depletions = 0;  // one-switch runs whose resource dropped below zero
};

// Samples one execution. Outcome k of a step is drawn with its probability
// from a uniform double built from the top 53 bits of one generator output.
SimulationRun simulate_once(std::span<const CostDistribution> plan, const UtilitySpec& spec,
                            std::mt19937_64& rng);

using RunObserver = std::function<void(std::size_t index, const SimulationRun&)>;

// n_runs independent executions from one mt19937_64 seeded with `seed`.
// Throws ModelError when n_runs is zero.
SimulationSummary simulate(std::span<const CostDistribution> plan, const UtilitySpec& spec,
                           std::size_t n_runs, std::uint64_t seed, const RunObserver& observer = {});

}  // namespace riskhtn

#endif  // RISKHTN_EVALUATION_HPP_
