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

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "doctest.h"
#include "instances.hpp"
#include "riskhtn/error.hpp"
#include "riskhtn/evaluation.hpp"
#include "riskhtn/search_state.hpp"

using namespace riskhtn;
using riskhtn::testing::load_instance;

namespace {

const UtilitySpec kLinear = UtilitySpec::linear();
const UtilitySpec kAverse = UtilitySpec::exponential(-1, 0.2);
const UtilitySpec kSeeking = UtilitySpec::exponential(1, 0.2);

std::vector<std::string> step_names(const GroundModel& model, const Plan& plan) {
  std::vector<std::string> out;
  for (int op : plan.steps) out.push_back(model.operators()[op].name);
  return out;
}

// Re-applies a derivation from the initial network; returns the final
// network and checks every step is legal on the way.
TaskNetwork replay(const GroundModel& model, const std::vector<TraceEntry>& trace, Plan& plan) {
  TaskNetwork net = model.initial_network();
  State state = model.initial_state();
  for (const auto& e : trace) {
    REQUIRE(net.contains(e.node));
    REQUIRE(find_unconstrained_tasks(net) != std::vector<NodeId>{});
    const auto free = find_unconstrained_tasks(net);
    REQUIRE(std::find(free.begin(), free.end(), e.node) != free.end());
    if (e.kind == TraceEntry::Kind::decompose) {
      const auto& m = model.methods()[e.ref];
      REQUIRE(applicable(m, state));
      net = decompose(net, e.node, m, model);
    } else {
      const auto& op = model.operators()[e.ref];
      REQUIRE(applicable(op, state));
      if (!net.task(e.node).is_ground()) net = bind_primitive(net, e.node, op, model);
      REQUIRE(model.ground_task_of(net.task(e.node)) == op.task);
      net.remove_unconstrained(e.node);
      state = progress(state, op, 0);
      plan.steps.push_back(op.id);
    }
  }
  return net;
}

}  // namespace

TEST_CASE("marine plans per attitude") {
  const auto in = load_instance("marine.htn.json", "marine.prob.json");
  const auto model = ground(in.domain, in.problem);
  // Reference EUs from tests/oracles/reference_values.py.
  struct Case {
    UtilitySpec spec;
    const char* last_step;
    double eu;
  };
  for (const auto& c : {Case{kLinear, "go_without_glider", -31.5},
                        Case{kAverse, "go_with_glider", -10542.742951389024},
                        Case{kSeeking, "go_without_glider", -4.975730991408784}}) {
    const SearchResult r = find_plans(model, c.spec);
    REQUIRE(r.status == SearchStatus::solved);
    CHECK(step_names(model, r.plan) ==
          std::vector<std::string>{"move_to_target", "collect_data", c.last_step});
    CHECK(r.expected_utility == doctest::Approx(c.eu).epsilon(1e-12));
    CHECK(r.stats.nodes_expanded > 0);
    CHECK(r.stats.nodes_generated >= r.stats.nodes_expanded);
  }
}

TEST_CASE("traces replay to the returned plan") {
  const auto in = load_instance("marine.htn.json", "marine.prob.json");
  const auto model = ground(in.domain, in.problem);
  for (const auto& spec : {kLinear, kAverse, kSeeking}) {
    const SearchResult r = find_plans(model, spec);
    Plan replayed;
    CHECK(replay(model, r.trace, replayed).empty());
    CHECK(replayed == r.plan);
    CHECK(is_executable(model, r.plan, model.initial_state()));
  }
}

TEST_CASE("search is deterministic") {
  const auto in = load_instance("marine.htn.json", "marine.prob.json");
  const auto model = ground(in.domain, in.problem);
  const SearchResult a = find_plans(model, kAverse), b = find_plans(model, kAverse);
  CHECK(a.plan == b.plan);
  CHECK(a.trace == b.trace);
  CHECK(a.stats.nodes_expanded == b.stats.nodes_expanded);
  CHECK(a.stats.nodes_generated == b.stats.nodes_generated);
}

TEST_CASE("expansion of the return task") {
  const auto in = load_instance("marine.htn.json", "marine_return.prob.json");
  const auto model = ground(in.domain, in.problem);
  const RcHeuristic h(model, kLinear);
  SearchNode root;
  root.state = model.initial_state();
  root.network = model.initial_network();
  const auto succ = expand(root, model, h);
  REQUIRE(succ.size() == 2);  // m6 and m7
  for (const auto& s : succ) {
    CHECK(s.depth == 1);
    CHECK(s.g_cost == 0);
    CHECK(s.trace.size() == 1);
    CHECK(s.network.size() == 1);
  }
  CHECK(expand(succ[0], model, h).size() == 1);
}

TEST_CASE("relaxed heuristic values") {
  const auto in = load_instance("marine.htn.json", "marine_return.prob.json");
  const auto model = ground(in.domain, in.problem);
  SearchNode root;
  root.state = model.initial_state();
  root.network = model.initial_network();
  CHECK(compute_rc_heuristic(root, model, kLinear) == doctest::Approx(-5.6).epsilon(1e-12));
  CHECK(compute_rc_heuristic(root, model, kAverse) == doctest::Approx(eval_static(kAverse, -10)).epsilon(1e-12));
  CHECK(compute_rc_heuristic(root, model, kSeeking) ==
        doctest::Approx(operator_eu(kSeeking, CostDistribution{{0.8, -2}, {0.2, -20}})).epsilon(1e-12));

  SearchNode done;
  CHECK(compute_rc_heuristic(done, model, kAverse) == 0);

  // Nobody is at the target any more, so neither return operator applies.
  SearchNode stuck = root;
  stuck.state = State{};
  CHECK(compute_rc_heuristic(stuck, model, kLinear) == -INFINITY);

  const RcHeuristic h(model, kAverse);
  CHECK(h.num_actions() == model.operators().size() + model.methods().size());
  for (std::size_t i = 0; i < model.operators().size(); ++i) CHECK(h.action_cost(i) > 0);
  for (std::size_t i = model.operators().size(); i < h.num_actions(); ++i) CHECK(h.action_cost(i) == 0);
}

TEST_CASE("combining accumulated and estimated utility") {
  CHECK(combine(-3, -4, kLinear) == -7);
  // Cores P = 1 + a alpha EU of 2 and 3 multiply to 6.
  CHECK(combine(-5, -10, kAverse) == doctest::Approx(-25).epsilon(1e-12));
  CHECK(combine(0, -10, kAverse) == doctest::Approx(-10).epsilon(1e-12));
  CHECK(combine(-1, -INFINITY, kSeeking) == -INFINITY);
  for (const auto& spec : {kLinear, kAverse, kSeeking}) {
    const double w1 = 1.7, w2 = 0.4;
    CHECK(combine(eu_from_risk_cost(spec, w1), eu_from_risk_cost(spec, w2), spec) ==
          doctest::Approx(eu_from_risk_cost(spec, w1 + w2)).epsilon(1e-12));
  }
}

TEST_CASE("failure and bounds") {
  const auto in = load_instance("marine.htn.json", "marine.prob.json");
  const auto model = ground(in.domain, in.problem);
  CHECK(find_plans(model, kLinear, {.max_depth = 64, .max_nodes = 1}).status == SearchStatus::bounds_exhausted);
  CHECK(find_plans(model, kLinear, {.max_depth = 0, .max_nodes = 1000}).status == SearchStatus::bounds_exhausted);
  CHECK_THROWS_AS(find_plans(model, UtilitySpec::one_switch(5, 0.04, 100)), ModelError);

  auto stranded = load_instance("marine.htn.json", "marine_return.prob.json");
  stranded.problem.init.erase(stranded.problem.init.begin());  // d1 is nowhere
  const auto m2 = ground(stranded.domain, stranded.problem);
  const SearchResult r = find_plans(m2, kLinear);
  CHECK(r.status == SearchStatus::proven_failure);
  CHECK(r.plan.steps.empty());
}

TEST_CASE("expanded nodes never overestimate their best completion") {
  for (std::uint64_t seed = 1; seed <= 12; ++seed) {
    const auto in = testing::random_instance(seed);
    const auto model = ground(in.domain, in.problem);
    for (const auto& spec : {kLinear, kAverse, kSeeking}) {
      const OracleResult truth = oracle_enumerate(model, spec);
      const SearchResult r = find_plans(model, spec, {}, [&](const SearchNode& n) {
        const OracleResult rest = oracle_enumerate_from(model, spec, n.state, n.network, {}, n.depth);
        if (!rest.best) return;
        const double h_eu = eu_from_risk_cost(spec, n.h_cost);
        const double best_rest = rest.plans[*rest.best].expected_utility;
        CHECK(h_eu >= best_rest - 1e-9 * std::max(1.0, std::abs(best_rest)));
      });
      if (truth.best) {
        REQUIRE(r.status == SearchStatus::solved);
        const double want = truth.plans[*truth.best].expected_utility;
        CHECK(r.expected_utility == doctest::Approx(want).epsilon(1e-9));
      } else {
        CHECK(r.status == SearchStatus::proven_failure);
      }
    }
  }
}
