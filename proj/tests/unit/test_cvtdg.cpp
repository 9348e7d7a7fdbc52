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
#include "riskhtn/cvtdg.hpp"
#include "riskhtn/error.hpp"
#include "riskhtn/io_formats.hpp"

using namespace riskhtn;
using riskhtn::testing::load_instance;

namespace {

// Exact EU by enumerating joint outcomes; kept separate from the library.
double brute_force_eu(const UtilitySpec& spec, const std::vector<CostDistribution>& plan) {
  std::vector<std::pair<double, double>> acc{{1.0, 0.0}};
  for (const auto& d : plan) {
    std::vector<std::pair<double, double>> next;
    for (const auto& [p, c] : acc)
      for (const auto& o : d) next.emplace_back(p * o.probability, c + o.cost);
    acc = std::move(next);
  }
  double eu = 0;
  for (const auto& [p, c] : acc)
    eu += p * (spec.kind == UtilityKind::linear ? c : spec.a * (std::exp(spec.a * spec.alpha * c) - 1) / spec.alpha);
  return eu;
}

int vertex_named(const Cvtdg& g, const std::string& name) {
  for (std::size_t v = 0; v < g.vertices().size(); ++v)
    if (g.describe_vertex(static_cast<int>(v)) == name) return static_cast<int>(v);
  FAIL("no vertex " << name);
  return -1;
}

// One compound task `c` over ground operators a (-1) and b (-2). `base`
// methods expand to three a's; `rec` methods to b followed by c again.
testing::Instance loop_instance(bool with_base, bool dead_end = false) {
  testing::Instance in;
  Domain& d = in.domain;
  d.name = "loop";
  for (const auto& [name, cost] : {std::pair{"a", -1.0}, std::pair{"b", -2.0}}) {
    OperatorSchema op;
    op.name = name;
    op.outcomes = {{1.0, {}, {}, cost}};
    d.operators.push_back(op);
  }
  d.compound_tasks = {{"c", {}}, {"stuck", {}}};
  MethodSchema rec;
  rec.name = "rec";
  rec.task = {"c", {}};
  rec.subtasks = {{"s1", "b", {}}, {"s2", "c", {}}};
  rec.ordering = {{"s1", "s2"}};
  d.methods.push_back(rec);
  if (with_base) {
    MethodSchema base;
    base.name = "base";
    base.task = {"c", {}};
    base.subtasks = {{"s1", "a", {}}, {"s2", "a", {}}, {"s3", "a", {}}};
    base.ordering = {{"s1", "s2"}, {"s2", "s3"}};
    d.methods.push_back(base);
  }
  if (dead_end) {
    MethodSchema side;
    side.name = "side";
    side.task = {"c", {}};
    side.subtasks = {{"s1", "stuck", {}}};
    d.methods.push_back(side);
  }
  in.problem.tasks.subtasks = {{"t", "c", {}}};
  validate_domain(d);
  validate_problem(d, in.problem);
  return in;
}

}  // namespace

TEST_CASE("marine graph shape") {
  const auto in = load_instance("marine.htn.json", "marine.prob.json");
  const auto model = ground(in.domain, in.problem);
  const Cvtdg g = build_cvtdg(model, model.initial_network());
  CHECK(g.count(VertexKind::method) == 7);
  CHECK(g.vertices().size() == 18);
  CHECK(g.roots().size() == 1);
  CHECK(g.diagnostics().empty());
  CHECK_FALSE(g.annotated());
  // Every edge leaves a compound towards a method or a method towards a task.
  for (const auto& v : g.vertices())
    for (int c : v.children) {
      const VertexKind k = g.vertices()[c].kind;
      CHECK((v.kind == VertexKind::method) == (k != VertexKind::method));
      CHECK(v.kind != VertexKind::primitive);
    }
}

TEST_CASE("abstract graph shape and annotations") {
  const auto in = load_instance("abstract.htn.json", "abstract.prob.json");
  const auto model = ground(in.domain, in.problem);
  const Cvtdg g = build_cvtdg(model, model.initial_network());
  CHECK(g.count(VertexKind::compound) == 4);
  CHECK(g.count(VertexKind::primitive) == 10);
  CHECK(g.count(VertexKind::method) == 8);
  CHECK(g.num_edges() == 8 + 13);

  // Distributions as written in data/abstract.htn.json.
  const CostDistribution tp1{{0.5, -3}, {0.5, -5}}, tp2{{1.0, -2}}, tp3{{0.6, -1}, {0.3, -4}, {0.1, -9}},
      tp4{{0.9, -6}, {0.1, -7}}, tp5{{1.0, -1.5}}, tp6{{0.25, -2}, {0.75, -3}}, tp7{{0.5, -4}, {0.5, -6}},
      tp8{{1.0, -2.5}}, tp9{{0.7, -1}, {0.3, -11}}, tp10{{0.4, -3}, {0.6, -8}};
  const std::vector<std::vector<CostDistribution>> tc2{{tp2, tp3}, {tp4}}, tc3{{tp5, tp6}, {tp7}},
      tc4{{tp8, tp9}, {tp10}};
  std::vector<std::vector<CostDistribution>> plans;
  for (const auto& x : tc2)
    for (const auto& y : tc3) {
      auto p = x;
      p.insert(p.end(), y.begin(), y.end());
      plans.push_back(p);
    }
  for (const auto& z : tc4) {
    std::vector<CostDistribution> p{tp1};
    p.insert(p.end(), z.begin(), z.end());
    plans.push_back(p);
  }

  for (const auto& spec : {UtilitySpec::linear(), UtilitySpec::exponential(-1, 0.2), UtilitySpec::exponential(1, 0.2)}) {
    const Cvtdg a = annotate_expected_utilities(g, spec);
    double best = -INFINITY;
    for (const auto& p : plans) best = std::max(best, brute_force_eu(spec, p));
    CHECK(a.annotation(vertex_named(a, "tc1()")).eu == doctest::Approx(best).epsilon(1e-12));
    double best_tc2 = -INFINITY;
    for (const auto& p : tc2) best_tc2 = std::max(best_tc2, brute_force_eu(spec, p));
    CHECK(a.annotation(vertex_named(a, "tc2()")).eu == doctest::Approx(best_tc2).epsilon(1e-12));
    CHECK(a.annotation(vertex_named(a, "m3[]")).eu == doctest::Approx(brute_force_eu(spec, tc2[0])).epsilon(1e-12));
    CHECK(a.annotation(vertex_named(a, "tp3()")).eu == doctest::Approx(operator_eu(spec, tp3)).epsilon(1e-12));
    for (std::size_t v = 0; v < a.vertices().size(); ++v) CHECK(a.annotation(static_cast<int>(v)).bounded);
  }
}

TEST_CASE("annotation of the return task") {
  const auto in = load_instance("marine.htn.json", "marine_return.prob.json");
  const auto model = ground(in.domain, in.problem);
  const Cvtdg g = build_cvtdg(model, model.initial_network());
  CHECK(g.vertices().size() == 5);
  const Cvtdg lin = annotate_expected_utilities(g, UtilitySpec::linear());
  CHECK(lin.annotation(0).eu == doctest::Approx(-5.6).epsilon(1e-12));
  const auto averse = UtilitySpec::exponential(-1, 0.2);
  const Cvtdg av = annotate_expected_utilities(g, averse);
  CHECK(av.annotation(0).eu == doctest::Approx(eval_static(averse, -10)).epsilon(1e-12));
  const int task = *model.ground_task_of(model.initial_network().task("t1"));
  CHECK(av.task_eu(task) == av.annotation(0).eu);
  CHECK(av.task_risk_cost(task) == doctest::Approx(risk_cost_from_eu(averse, av.annotation(0).eu)));
  CHECK_THROWS_AS(annotate_expected_utilities(g, UtilitySpec::one_switch(1, 1, 10)), ModelError);
  CHECK_THROWS_AS(annotate_expected_utilities(g, UtilitySpec::linear(), 0), ModelError);
}

TEST_CASE("recursive components") {
  const auto in = loop_instance(true);
  const auto model = ground(in.domain, in.problem);
  const Cvtdg g = build_cvtdg(model, model.initial_network());
  const int c = vertex_named(g, "c()");
  // Fixed point of c = max(-3, -2 + c) is -3.
  const Cvtdg k10 = annotate_expected_utilities(g, UtilitySpec::linear(), 10);
  CHECK(k10.annotation(c).bounded);
  CHECK(k10.annotation(c).eu == -3);
  const Cvtdg k1 = annotate_expected_utilities(g, UtilitySpec::linear(), 1);
  CHECK_FALSE(k1.annotation(c).bounded);
  CHECK(k1.annotation(c).eu == 0);

  double previous = INFINITY;
  for (int k = 1; k <= 12; ++k) {
    const double eu = annotate_expected_utilities(g, UtilitySpec::exponential(-1, 0.3), k).annotation(c).eu;
    CHECK(eu <= previous);
    CHECK(eu >= eval_static(UtilitySpec::exponential(-1, 0.3), -3) - 1e-12);
    previous = eu;
  }
}

TEST_CASE("recursion without a base case stays optimistic") {
  const auto in = loop_instance(false);
  const auto model = ground(in.domain, in.problem);
  const Cvtdg g = build_cvtdg(model, model.initial_network());
  for (int k : {1, 5, 50}) {
    const Cvtdg a = annotate_expected_utilities(g, UtilitySpec::linear(), k);
    CHECK_FALSE(a.annotation(vertex_named(a, "c()")).bounded);
    CHECK(a.annotation(vertex_named(a, "c()")).eu == 0);
    CHECK_FALSE(a.annotation(vertex_named(a, "rec[]")).bounded);
  }
}

TEST_CASE("dead ends") {
  const auto in = loop_instance(true, true);
  const auto model = ground(in.domain, in.problem);
  const Cvtdg g = build_cvtdg(model, model.initial_network());
  CHECK(g.diagnostics().size() == 1);
  const Cvtdg a = annotate_expected_utilities(g, UtilitySpec::linear());
  CHECK(a.annotation(vertex_named(a, "stuck()")).eu == -INFINITY);
  CHECK(a.annotation(vertex_named(a, "side[]")).eu == -INFINITY);
  CHECK(a.annotation(vertex_named(a, "c()")).eu == -3);

  testing::Instance bad = in;
  bad.problem.tasks.subtasks = {{"t", "stuck", {}}};
  const auto bad_model = ground(bad.domain, bad.problem);
  CHECK_THROWS_AS(build_cvtdg(bad_model, bad_model.initial_network()), ModelError);
}

TEST_CASE("rebuilding gives identical output") {
  const auto in = load_instance("marine.htn.json", "marine.prob.json");
  const auto model = ground(in.domain, in.problem);
  const auto spec = UtilitySpec::exponential(1, 0.2);
  const Cvtdg a = annotate_expected_utilities(build_cvtdg(model, model.initial_network()), spec);
  const Cvtdg b = annotate_expected_utilities(build_cvtdg(model, model.initial_network()), spec);
  CHECK(dump_annotations(a) == dump_annotations(b));
  CHECK(export_dot(a) == export_dot(b));
}

TEST_CASE("compatible groundings") {
  const auto in = load_instance("marine.htn.json", "marine.prob.json");
  const auto model = ground(in.domain, in.problem);
  const Cvtdg g = build_cvtdg(model, model.initial_network());
  const int sig = *model.find_signature("move_to_shore");
  const int d1 = *model.universe().object_id("d1");
  const int target = *model.universe().object_id("target");
  const int shore = *model.universe().object_id("shore");
  const TaskInstance ground_task{TaskKind::compound, sig, {d1, target, shore}};
  const auto one = compatible_groundings(ground_task, g);
  REQUIRE(one.size() == 1);
  CHECK(g.describe_vertex(one[0]) == "move_to_shore(d1,target,shore)");
  const TaskInstance lifted{TaskKind::compound, sig, {d1, variable_term(0), variable_term(1)}};
  const auto many = compatible_groundings(lifted, g);
  CHECK(std::find(many.begin(), many.end(), one[0]) != many.end());
  CHECK(std::is_sorted(many.begin(), many.end()));
  const TaskInstance guard{TaskKind::guard, 0, {}};
  CHECK_THROWS_AS(compatible_groundings(guard, g), ModelError);
}
