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

#include <benchmark/benchmark.h>

#include <random>
#include <string>
#include <vector>

#include "riskhtn/cvtdg.hpp"
#include "riskhtn/evaluation.hpp"
#include "riskhtn/io_formats.hpp"
#include "riskhtn/search_plan.hpp"
#include "riskhtn/search_state.hpp"

namespace {

using namespace riskhtn;

const GroundModel& marine() {
  static const GroundModel model = [] {
    const std::string dir = RISKHTN_BENCH_DATA_DIR;
    const Domain d = parse_domain(read_file(dir + "/marine.htn.json"));
    const Problem p = parse_problem(read_file(dir + "/marine.prob.json"), d);
    return ground(d, p);
  }();
  return model;
}

UtilitySpec spec_for(int attitude) {
  if (attitude == 0) return UtilitySpec::linear();
  return UtilitySpec::exponential(attitude, 0.2);
}

void BM_Ground(benchmark::State& state) {
  const std::string dir = RISKHTN_BENCH_DATA_DIR;
  const Domain d = parse_domain(read_file(dir + "/marine.htn.json"));
  const Problem p = parse_problem(read_file(dir + "/marine.prob.json"), d);
  for (auto _ : state) benchmark::DoNotOptimize(ground(d, p));
}
BENCHMARK(BM_Ground);

void BM_StateSearch(benchmark::State& state) {
  const auto spec = spec_for(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(find_plans(marine(), spec));
}
BENCHMARK(BM_StateSearch)->Arg(-1)->Arg(0)->Arg(1);

void BM_PlanSpaceSearch(benchmark::State& state) {
  const auto spec = spec_for(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(find_plans_planspace(marine(), spec));
}
BENCHMARK(BM_PlanSpaceSearch)->Arg(-1)->Arg(0)->Arg(1);

void BM_Oracle(benchmark::State& state) {
  const auto spec = UtilitySpec::exponential(-1, 0.2);
  for (auto _ : state) benchmark::DoNotOptimize(oracle_enumerate(marine(), spec));
}
BENCHMARK(BM_Oracle);

void BM_Annotate(benchmark::State& state) {
  const Cvtdg graph = build_cvtdg(marine(), marine().initial_network());
  const auto spec = UtilitySpec::exponential(-1, 0.2);
  for (auto _ : state) benchmark::DoNotOptimize(annotate_expected_utilities(graph, spec));
}
BENCHMARK(BM_Annotate);

// Exact enumeration grows with the number of joint outcomes; the segmented
// form stays linear in the plan length.
std::vector<CostDistribution> coin_plan(int steps) {
  return std::vector<CostDistribution>(steps, CostDistribution{{0.5, -1}, {0.5, -3}});
}

void BM_PlanEuExact(benchmark::State& state) {
  const auto plan = coin_plan(static_cast<int>(state.range(0)));
  const auto spec = UtilitySpec::exponential(-1, 0.2);
  for (auto _ : state) benchmark::DoNotOptimize(plan_eu_exact(spec, plan));
}
BENCHMARK(BM_PlanEuExact)->DenseRange(4, 16, 4);

void BM_PlanEuSegmented(benchmark::State& state) {
  const auto plan = coin_plan(static_cast<int>(state.range(0)));
  const auto spec = UtilitySpec::exponential(-1, 0.2);
  for (auto _ : state) benchmark::DoNotOptimize(plan_eu_segmented(spec, plan));
}
BENCHMARK(BM_PlanEuSegmented)->DenseRange(4, 16, 4);

void BM_Simulate(benchmark::State& state) {
  const std::vector<CostDistribution> plan{{{0.7, -5}, {0.3, -8}}, {{0.5, -15}, {0.5, -25}}, {{0.8, -2}, {0.2, -20}}};
  const auto spec = UtilitySpec::one_switch(5, 0.04, 100);
  for (auto _ : state) benchmark::DoNotOptimize(simulate(plan, spec, 10'000, 1));
}
BENCHMARK(BM_Simulate);

}  // namespace

BENCHMARK_MAIN();
