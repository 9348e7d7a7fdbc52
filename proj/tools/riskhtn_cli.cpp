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

// riskhtn: plan, evaluate, enumerate, simulate and inspect risk-aware HTN
// problems.
//
// Exit codes: 0 success, 1 usage or input error, 2 proven failure,
// 3 search or enumeration bounds exhausted.

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <iterator>
#include <optional>
#include <string>

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "CLI11.hpp"
#include "json.hpp"
#include "riskhtn/cvtdg.hpp"
#include "riskhtn/error.hpp"
#include "riskhtn/evaluation.hpp"
#include "riskhtn/ground_model.hpp"
#include "riskhtn/io_formats.hpp"
#include "riskhtn/search_plan.hpp"
#include "riskhtn/search_state.hpp"

namespace {

using Json = nlohmann::ordered_json;

enum ExitCode { kOk = 0, kUsage = 1, kFailure = 2, kBounds = 3 };

struct Inputs {
  std::string domain;
  std::string problem;
  std::string utility;
  std::string plan;
  std::string out;
};

struct Options {
  std::string engine = "state";
  int max_depth = riskhtn::SearchBounds{}.max_depth;
  std::size_t max_nodes = riskhtn::SearchBounds{}.max_nodes;
  int k_unfold = riskhtn::kDefaultUnfold;
  std::uint64_t seed = 1;
  std::size_t runs = 10'000;
  bool timing = false;
  std::string format = "dot";
};

void configure_logging() {
  auto logger = spdlog::stderr_color_mt("riskhtn");
  logger->set_pattern("[%l] %v");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::err);
  const char* env = std::getenv("RISKHTN_LOG");
  if (!env) return;
  const std::string level = env;
  if (level == "error") {
    spdlog::set_level(spdlog::level::err);
  } else if (level == "info") {
    spdlog::set_level(spdlog::level::info);
  } else if (level == "debug") {
    spdlog::set_level(spdlog::level::debug);
  } else {
    spdlog::error("ignoring RISKHTN_LOG={} (expected error, info or debug)", level);
  }
}

std::string read_input(const std::string& path) {
  if (path == "-") return std::string(std::istreambuf_iterator<char>(std::cin), {});
  return riskhtn::read_file(path);
}

void write_output(const std::string& text, const std::string& out) {
  if (out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(out, std::ios::binary);
  if (!f) throw riskhtn::Error("cannot write '" + out + "'");
  f << text;
}

struct Loaded {
  riskhtn::Domain domain;
  riskhtn::Problem problem;
  riskhtn::GroundModel model;
};

Loaded load(const Inputs& in) {
  Loaded l;
  l.domain = riskhtn::parse_domain(read_input(in.domain));
  l.problem = riskhtn::parse_problem(read_input(in.problem), l.domain);
  l.model = riskhtn::ground(l.domain, l.problem);
  spdlog::info("grounded {}: {} atoms, {} operators, {} methods, {} tasks", l.model.domain_name(),
               l.model.num_atoms(), l.model.operators().size(), l.model.methods().size(),
               l.model.tasks().size());
  return l;
}

int exit_for(riskhtn::SearchStatus status) {
  switch (status) {
    case riskhtn::SearchStatus::solved:
      return kOk;
    case riskhtn::SearchStatus::proven_failure:
      return kFailure;
    case riskhtn::SearchStatus::bounds_exhausted:
      return kBounds;
  }
  return kUsage;
}

int run_plan(const Inputs& in, const Options& opt) {
  const Loaded l = load(in);
  const auto spec = riskhtn::parse_utility(read_input(in.utility));
  const riskhtn::SearchBounds bounds{opt.max_depth, opt.max_nodes};
  riskhtn::SearchResult result;
  if (opt.engine == "state") {
    result = riskhtn::find_plans(l.model, spec, bounds);
  } else {
    result = riskhtn::find_plans_planspace(l.model, spec, bounds, opt.k_unfold);
  }
  spdlog::info("{} search: {} after {} expansions, {} generated", opt.engine,
               riskhtn::to_string(result.status), result.stats.nodes_expanded,
               result.stats.nodes_generated);
  if (result.status != riskhtn::SearchStatus::solved) {
    spdlog::error("no plan found: {} ({} nodes expanded)", riskhtn::to_string(result.status),
                  result.stats.nodes_expanded);
    return exit_for(result.status);
  }
  for (const auto& e : result.trace)
    if (e.kind == riskhtn::TraceEntry::Kind::decompose)
      spdlog::debug("decompose {} with {}", e.node, l.model.describe_method(e.ref));
  riskhtn::ReportInfo info{opt.engine, result.status, result.stats, opt.timing};
  write_output(riskhtn::emit_plan_report(l.model, result.plan, spec, info), in.out);
  return kOk;
}

int run_eval(const Inputs& in) {
  const Loaded l = load(in);
  const auto spec = riskhtn::parse_utility(read_input(in.utility));
  const auto plan = riskhtn::resolve_plan(l.model, riskhtn::parse_plan(read_input(in.plan)));
  if (!riskhtn::is_executable(l.model, plan, l.model.initial_state()))
    spdlog::warn("plan is not executable from the initial state");
  write_output(riskhtn::emit_plan_report(l.model, plan, spec, {}), in.out);
  return kOk;
}

Json plan_json(const riskhtn::GroundModel& model, const riskhtn::Plan& plan) {
  Json steps = Json::array();
  for (int op : plan.steps) {
    Json args = Json::array();
    for (int a : model.operators()[op].args) args.push_back(model.universe().object_name(a));
    steps.push_back(Json{{"name", model.operators()[op].name}, {"args", args}});
  }
  return steps;
}

int run_oracle(const Inputs& in, const Options& opt) {
  const Loaded l = load(in);
  const auto spec = riskhtn::parse_utility(read_input(in.utility));
  const auto result = riskhtn::oracle_enumerate(l.model, spec, {opt.max_depth, opt.max_nodes});
  Json j = Json::object();
  Json plans = Json::array();
  for (const auto& p : result.plans)
    plans.push_back(Json{{"plan", plan_json(l.model, p.plan)},
                         {"expected_utility", riskhtn::round_significant(p.expected_utility)}});
  j["plans"] = plans;
  j["best"] = result.best ? Json(*result.best) : Json(nullptr);
  j["nodes_visited"] = result.nodes_visited;
  j["depth_limited"] = result.depth_limited;
  write_output(j.dump(2) + "\n", in.out);
  if (result.plans.empty()) {
    spdlog::error("no plan within bounds");
    return result.depth_limited ? kBounds : kFailure;
  }
  return kOk;
}

int run_simulate(const Inputs& in, const Options& opt) {
  const Loaded l = load(in);
  const auto spec = riskhtn::parse_utility(read_input(in.utility));
  const auto plan = riskhtn::resolve_plan(l.model, riskhtn::parse_plan(read_input(in.plan)));
  const auto dists = l.model.distributions(plan);
  std::vector<double> first_run_utilities;
  std::vector<double> step_utility_sum(plan.steps.size(), 0.0);
  const auto summary = riskhtn::simulate(dists, spec, opt.runs, opt.seed,
                                         [&](std::size_t i, const riskhtn::SimulationRun& run) {
                                           if (i == 0) first_run_utilities = run.utilities;
                                           for (std::size_t k = 0; k < run.utilities.size(); ++k)
                                             step_utility_sum[k] += run.utilities[k];
                                         });
  Json j = Json::object();
  j["runs"] = summary.runs;
  j["seed"] = summary.seed;
  j["expected_utility"] = riskhtn::round_significant(riskhtn::plan_eu_exact(spec, dists));
  j["mean_utility"] = riskhtn::round_significant(summary.mean_utility);
  j["variance"] = riskhtn::round_significant(summary.variance);
  j["std_error"] = riskhtn::round_significant(std::sqrt(summary.variance / static_cast<double>(summary.runs)));
  j["mean_total_cost"] = riskhtn::round_significant(summary.mean_total_cost);
  Json freq = Json::array();
  for (const auto& step : summary.outcome_frequencies) {
    Json s = Json::array();
    for (double f : step) s.push_back(riskhtn::round_significant(f));
    freq.push_back(s);
  }
  j["outcome_frequencies"] = freq;
  if (spec.kind == riskhtn::UtilityKind::one_switch) {
    Json first = Json::array(), mean = Json::array();
    for (double u : first_run_utilities) first.push_back(riskhtn::round_significant(u));
    for (double u : step_utility_sum) mean.push_back(riskhtn::round_significant(u / static_cast<double>(summary.runs)));
    j["first_run_step_utilities"] = first;
    j["mean_step_utilities"] = mean;
    j["depletions"] = summary.depletions;
    if (summary.depletions > 0) spdlog::warn("resource fell below zero in {} runs", summary.depletions);
  }
  write_output(j.dump(2) + "\n", in.out);
  return kOk;
}

int run_tdg(const Inputs& in, const Options& opt) {
  const Loaded l = load(in);
  riskhtn::Cvtdg graph = riskhtn::build_cvtdg(l.model, l.model.initial_network());
  for (const auto& d : graph.diagnostics()) spdlog::warn("{}", d);
  if (!in.utility.empty())
    graph = riskhtn::annotate_expected_utilities(graph, riskhtn::parse_utility(read_input(in.utility)),
                                                 opt.k_unfold);
  write_output(opt.format == "dot" ? riskhtn::export_dot(graph) : riskhtn::dump_annotations(graph), in.out);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  configure_logging();
  CLI::App app{"Risk-aware HTN planning"};
  app.require_subcommand(1);
  Inputs in;
  Options opt;

  auto add_model = [&](CLI::App* cmd, bool utility_required) {
    cmd->add_option("-d,--domain", in.domain, "Domain file (*.htn.json)")->required();
    cmd->add_option("-p,--problem", in.problem, "Problem file (*.prob.json)")->required();
    auto* u = cmd->add_option("-u,--utility", in.utility, "Utility file (*.util.json)");
    if (utility_required) u->required();
    cmd->add_option("--out", in.out, "Write the result here instead of stdout");
  };
  auto add_bounds = [&](CLI::App* cmd) {
    cmd->add_option("--max-depth", opt.max_depth, "Decomposition depth bound")->check(CLI::NonNegativeNumber);
    cmd->add_option("--max-nodes", opt.max_nodes, "Node bound")->check(CLI::PositiveNumber);
  };

  auto* plan = app.add_subcommand("plan", "Find a maximum expected-utility plan");
  add_model(plan, true);
  add_bounds(plan);
  plan->add_option("--engine", opt.engine, "Search engine")->check(CLI::IsMember({"state", "planspace"}));
  plan->add_option("--k-unfold", opt.k_unfold, "Annotation rounds for recursive tasks")
      ->check(CLI::PositiveNumber);
  plan->add_flag("--timing", opt.timing, "Include the search runtime in the report");

  auto* eval = app.add_subcommand("eval", "Evaluate a given plan");
  add_model(eval, true);
  eval->add_option("plan", in.plan, "Plan file or report ('-' for stdin)")->required();

  auto* oracle = app.add_subcommand("oracle", "Enumerate every plan with its exact expected utility");
  add_model(oracle, true);
  add_bounds(oracle);

  auto* sim = app.add_subcommand("simulate", "Monte Carlo execution of a plan");
  add_model(sim, true);
  sim->add_option("plan", in.plan, "Plan file or report ('-' for stdin)")->required();
  sim->add_option("--runs", opt.runs, "Number of runs")->check(CLI::PositiveNumber);
  sim->add_option("--seed", opt.seed, "Random seed");

  auto* tdg = app.add_subcommand("tdg", "Export the task decomposition graph");
  add_model(tdg, false);
  tdg->add_option("--k-unfold", opt.k_unfold, "Annotation rounds for recursive tasks")
      ->check(CLI::PositiveNumber);
  tdg->add_option("--format", opt.format, "Output format")->check(CLI::IsMember({"dot", "annotations"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*plan) return run_plan(in, opt);
    if (*eval) return run_eval(in);
    if (*oracle) return run_oracle(in, opt);
    if (*sim) return run_simulate(in, opt);
    if (*tdg) return run_tdg(in, opt);
  } catch (const riskhtn::ResourceLimitError& e) {
    spdlog::error("{}", e.what());
    return kBounds;
  } catch (const riskhtn::Error& e) {
    spdlog::error("{}", e.what());
    return kUsage;
  }
  return kUsage;
}
