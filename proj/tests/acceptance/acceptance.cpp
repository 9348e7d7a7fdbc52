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

// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit status
// when any criterion fails. Reference numbers come from
// tests/oracles/reference_values.py.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "instances.hpp"
#include "riskhtn/evaluation.hpp"
#include "riskhtn/io_formats.hpp"
#include "riskhtn/search_plan.hpp"
#include "riskhtn/search_state.hpp"

using namespace riskhtn;

namespace {

constexpr double kLinearSolo = -5.6;
constexpr double kLinearGlider = -10.0;
constexpr double kAverseSolo = -55.56544882370932;
constexpr double kAverseGlider = -31.94528049465325;
constexpr double kSeekingSolo = -2.3004041769687085;
constexpr double kSeekingGlider = -4.323323583816936;
constexpr double kThresholdAlpha = 0.12662348201905158;

const UtilitySpec kLinear = UtilitySpec::linear();
const UtilitySpec kAverse = UtilitySpec::exponential(-1, 0.2);
const UtilitySpec kSeeking = UtilitySpec::exponential(1, 0.2);

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

double rel_err(double got, double want) { return std::abs(got - want) / std::max(std::abs(want), 1e-300); }

bool close(double got, double want, double tol) {
  if (got == want) return true;
  return rel_err(got, want) <= tol;
}

// Both engines on the one-task return problem; returns the chosen operator
// name of each and the EU of each.
struct ReturnChoice {
  std::string state_op, plan_op;
  double state_eu = 0, plan_eu = 0;
};

ReturnChoice solve_return(const GroundModel& model, const UtilitySpec& spec) {
  ReturnChoice c;
  const SearchResult a = find_plans(model, spec);
  const SearchResult b = find_plans_planspace(model, spec);
  if (a.status == SearchStatus::solved && a.plan.steps.size() == 1)
    c.state_op = model.operators()[a.plan.steps[0]].name;
  if (b.status == SearchStatus::solved && b.plan.steps.size() == 1)
    c.plan_op = model.operators()[b.plan.steps[0]].name;
  c.state_eu = a.expected_utility;
  c.plan_eu = b.expected_utility;
  return c;
}

GroundModel return_model() {
  const auto in = testing::load_instance("marine.htn.json", "marine_return.prob.json");
  return ground(in.domain, in.problem);
}

std::string attitude_flip() {
  const GroundModel model = return_model();
  struct Case {
    const char* name;
    UtilitySpec spec;
    const char* want;
    double chosen, other;
  };
  const Case cases[] = {{"linear", kLinear, "go_without_glider", kLinearSolo, kLinearGlider},
                        {"averse", kAverse, "go_with_glider", kAverseGlider, kAverseSolo},
                        {"seeking", kSeeking, "go_without_glider", kSeekingSolo, kSeekingGlider}};
  for (const auto& c : cases) {
    const ReturnChoice r = solve_return(model, c.spec);
    if (r.state_op != c.want || r.plan_op != c.want)
      return std::string(c.name) + ": chose " + r.state_op + " / " + r.plan_op + ", want " + c.want;
    if (!close(r.state_eu, c.chosen, 1e-6) || !close(r.plan_eu, c.chosen, 1e-6))
      return std::string(c.name) + ": EU " + std::to_string(r.state_eu) + " / " + std::to_string(r.plan_eu);
    // The rejected alternative, scored directly.
    for (const auto& op : model.operators()) {
      if (op.name == c.want || (op.name != "go_with_glider" && op.name != "go_without_glider")) continue;
      if (!close(operator_eu(c.spec, op.costs), c.other, 1e-6))
        return std::string(c.name) + ": alternative " + op.name + " has EU " + std::to_string(operator_eu(c.spec, op.costs));
    }
  }
  return "";
}

std::string attitude_threshold(double& found) {
  const GroundModel model = return_model();
  auto averse_choice = [&](double alpha) {
    const ReturnChoice r = solve_return(model, UtilitySpec::exponential(-1, alpha));
    if (r.state_op != r.plan_op) throw std::runtime_error("engines disagree at alpha " + std::to_string(alpha));
    return r.state_op == "go_with_glider";
  };
  double lo = 0.01, hi = 1.0;
  if (averse_choice(lo) || !averse_choice(hi)) return "no flip inside [0.01, 1]";
  while (hi - lo > 1e-7) {
    const double mid = 0.5 * (lo + hi);
    (averse_choice(mid) ? hi : lo) = mid;
  }
  found = 0.5 * (lo + hi);
  if (std::abs(found - kThresholdAlpha) > 1e-4)
    return "flip at " + std::to_string(found) + ", reference " + std::to_string(kThresholdAlpha);
  return "";
}

struct OracleStats {
  int instances = 0;
  int solvable = 0;
  std::size_t state_nodes_audited = 0;
  std::size_t plan_nodes_audited = 0;
  std::size_t violations = 0;
  std::string first_mismatch;
  std::string first_violation;
};

testing::RandomOptions options_for(std::uint64_t seed) {
  testing::RandomOptions o;
  o.preconditions = seed % 3 != 0;
  o.total_order = seed % 4 == 1;
  o.lifted = seed % 2 == 0;
  return o;
}

// Runs until `count` instances with at least one plan have been checked;
// unsolvable instances are checked too (both engines must report failure).
OracleStats run_oracle_equivalence(int count) {
  OracleStats st;
  // Completions never need more than the hierarchy depth per task; the
  // random hierarchies have at most 3 compound levels and 2 initial tasks.
  const OracleBounds oracle_bounds{.max_depth = 8, .max_nodes = 2'000'000};
  for (std::uint64_t seed = 1; st.solvable < count && st.instances < 10 * count; ++seed) {
    const auto in = testing::random_instance(seed, options_for(seed));
    const GroundModel model = ground(in.domain, in.problem);
    ++st.instances;
    bool solvable = false;
    for (const auto& spec : {kLinear, kAverse, kSeeking}) {
      const OracleResult truth = oracle_enumerate(model, spec, oracle_bounds);
      const bool has_plan = truth.best.has_value();
      solvable = solvable || has_plan;
      const double best = has_plan ? truth.plans[*truth.best].expected_utility : 0;

      auto audit = [&](double estimate, const OracleResult& rest, const char* engine) {
        if (!rest.best) return;
        const double completion = rest.plans[*rest.best].expected_utility;
        if (estimate < completion && !close(estimate, completion, 1e-9)) {
          ++st.violations;
          if (st.first_violation.empty())
            st.first_violation = std::string(engine) + " seed " + std::to_string(seed) + ": h " +
                                 std::to_string(estimate) + " < " + std::to_string(completion);
        }
      };
      const SearchResult a = find_plans(model, spec, {}, [&](const SearchNode& n) {
        ++st.state_nodes_audited;
        audit(eu_from_risk_cost(spec, n.h_cost),
              oracle_enumerate_from(model, spec, n.state, n.network, oracle_bounds, n.depth), "state");
      });
      const SearchResult b = find_plans_planspace(model, spec, {}, kDefaultUnfold,
                                                  [&](const PartialPlan& p, double f_eu) {
        ++st.plan_nodes_audited;
        audit(f_eu, oracle_enumerate_from(model, spec, model.initial_state(), p.network, oracle_bounds, p.depth),
              "planspace");
      });

      auto check = [&](const SearchResult& r, const char* engine) {
        std::string why;
        if (has_plan != (r.status == SearchStatus::solved))
          why = std::string("status ") + std::string(to_string(r.status));
        else if (has_plan && !close(r.expected_utility, best, 1e-9))
          why = "EU " + std::to_string(r.expected_utility) + " vs oracle " + std::to_string(best);
        if (!why.empty() && st.first_mismatch.empty())
          st.first_mismatch = std::string(engine) + " seed " + std::to_string(seed) + ": " + why;
      };
      check(a, "state");
      check(b, "planspace");
    }
    st.solvable += solvable;
  }
  return st;
}

std::string segmentation_identity() {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> steps(0, 6);
  std::uniform_real_distribution<double> alpha(0.01, 0.5);
  for (int i = 0; i < 1000; ++i) {
    std::vector<CostDistribution> plan(steps(rng));
    for (auto& d : plan) d = testing::random_distribution(rng);
    const double al = alpha(rng);
    for (const auto& spec : {kLinear, UtilitySpec::exponential(-1, al), UtilitySpec::exponential(1, al)}) {
      const double seg = plan_eu_segmented(spec, plan), exact = plan_eu_exact(spec, plan);
      if (!close(seg, exact, 1e-9))
        return "plan " + std::to_string(i) + ": " + std::to_string(seg) + " vs " + std::to_string(exact);
    }
  }
  return "";
}

std::string monte_carlo() {
  const GroundModel model = return_model();
  const Plan plan = resolve_plan(model, parse_plan(read_file(testing::data_path("marine_solo_return.plan.json"))));
  const auto dists = model.distributions(plan);
  struct Case {
    const char* name;
    UtilitySpec spec;
    double eu;
  };
  const std::size_t n = 100'000;
  for (const auto& c : {Case{"linear", kLinear, kLinearSolo}, Case{"averse", kAverse, kAverseSolo},
                        Case{"seeking", kSeeking, kSeekingSolo}}) {
    // Analytic standard deviation of the realised utility.
    double second = 0;
    for (const auto& o : dists[0]) second += o.probability * std::pow(eval_static(c.spec, o.cost), 2);
    const double sigma = std::sqrt(second - c.eu * c.eu);
    const SimulationSummary s = simulate(dists, c.spec, n, 20240601);
    const double bound = 3 * sigma / std::sqrt(static_cast<double>(n));
    if (std::abs(s.mean_utility - c.eu) > bound)
      return std::string(c.name) + ": mean " + std::to_string(s.mean_utility) + " vs " + std::to_string(c.eu) +
             " (3 sigma/sqrt n = " + std::to_string(bound) + ")";
  }
  return "";
}

std::string utility_shape() {
  const double alpha = 0.04;
  const auto averse = UtilitySpec::exponential(-1, alpha), seeking = UtilitySpec::exponential(1, alpha);
  std::size_t checks = 0;
  for (int i = -1000; i < 0; ++i) {
    const double c = i * 0.1, d = c + 0.1;  // c in [-100, -0.1]
    for (const auto& spec : {averse, seeking})
      if (!(eval_static(spec, c) < eval_static(spec, d))) return "not increasing at " + std::to_string(c);
    for (int j = i + 1; j <= 0; j += 37) {
      const double e = j * 0.1, mid = 0.5 * (c + e);
      const double chord_av = 0.5 * (eval_static(averse, c) + eval_static(averse, e));
      const double chord_sk = 0.5 * (eval_static(seeking, c) + eval_static(seeking, e));
      if (!(eval_static(averse, mid) > chord_av)) return "averse not concave on [" + std::to_string(c) + "]";
      if (!(eval_static(seeking, mid) < chord_sk)) return "seeking not convex on [" + std::to_string(c) + "]";
      checks += 2;
    }
    // Linear limit: |U(c) - c| within 1e-3 relative for alpha = 1e-6.
    for (int a : {-1, 1}) {
      const double u = eval_static(UtilitySpec::exponential(a, 1e-6), c);
      if (std::abs(u - c) > 1e-3 * std::abs(c)) return "no linear limit at " + std::to_string(c);
    }
  }
  // One-switch: U' > 0, U'' < 0, U''' > 0 by central differences, checked
  // against the closed forms.
  const auto os = UtilitySpec::one_switch(5, alpha, 100);
  const double h = 0.01;
  for (double x = 0; x <= 200; x += 0.5) {
    auto u = [&](double y) { return eval_one_switch(os, y); };
    const double d1 = (u(x + h) - u(x - h)) / (2 * h);
    const double d2 = (u(x + h) - 2 * u(x) + u(x - h)) / (h * h);
    const double d3 = (u(x + 2 * h) - 2 * u(x + h) + 2 * u(x - h) - u(x - 2 * h)) / (2 * h * h * h);
    const double e = std::exp(-alpha * x);
    const double a1 = 1 + os.trade_off * e, a2 = -alpha * os.trade_off * e, a3 = alpha * alpha * os.trade_off * e;
    if (!(d1 > 0 && d2 < 0 && d3 > 0)) return "one-switch derivative sign at x = " + std::to_string(x);
    if (std::abs(d1 - a1) > 1e-6 || std::abs(d2 - a2) > 1e-6 || std::abs(d3 - a3) > 1e-6)
      return "one-switch finite differences off at x = " + std::to_string(x);
    checks += 6;
  }
  return checks > 0 ? "" : "nothing checked";
}

}  // namespace

int main() {
  int failures = 0;
  auto report = [&](int number, const std::string& title, double budget, double elapsed, const std::string& why) {
    std::string reason = why;
    if (reason.empty() && elapsed > budget)
      reason = "took " + std::to_string(elapsed) + " s, budget " + std::to_string(budget) + " s";
    std::printf("%s criterion %d: %s (%.3f s)%s%s\n", reason.empty() ? "PASS" : "FAIL", number, title.c_str(),
                elapsed, reason.empty() ? "" : ": ", reason.c_str());
    std::fflush(stdout);
    failures += !reason.empty();
  };
  auto timed = [&](int number, const std::string& title, double budget, const std::function<std::string()>& f) {
    const auto start = Clock::now();
    std::string why;
    try {
      why = f();
    } catch (const std::exception& e) {
      why = std::string("exception: ") + e.what();
    }
    report(number, title, budget, seconds_since(start), why);
  };

  timed(1, "marine attitude flip, both engines", 1.0, attitude_flip);

  double alpha = 0;
  timed(2, "attitude threshold by bisection", 5.0, [&] {
    std::string why = attitude_threshold(alpha);
    if (why.empty()) std::printf("  flip at alpha = %.9f (reference %.9f)\n", alpha, kThresholdAlpha);
    return why;
  });

  // Criteria 3 and 5 share one run; 5 is audited on the nodes of 3.
  OracleStats st;
  const auto start = Clock::now();
  std::string oracle_error;
  try {
    st = run_oracle_equivalence(50);
  } catch (const std::exception& e) {
    oracle_error = std::string("exception: ") + e.what();
  }
  const double elapsed = seconds_since(start);
  std::printf("  %d instances (%d with plans), %zu state and %zu plan-space nodes audited\n", st.instances,
              st.solvable, st.state_nodes_audited, st.plan_nodes_audited);
  std::string why3 = oracle_error.empty() ? st.first_mismatch : oracle_error;
  if (why3.empty() && st.solvable < 50)
    why3 = "only " + std::to_string(st.solvable) + " instances with plans";
  report(3, "oracle equivalence on random instances", 60.0, elapsed, why3);
  std::string why5 = oracle_error.empty() ? st.first_violation : oracle_error;
  if (why5.empty() && st.violations > 0) why5 = std::to_string(st.violations) + " violations";
  if (why5.empty() && st.state_nodes_audited + st.plan_nodes_audited == 0) why5 = "no nodes audited";
  report(5, "admissibility audit on expanded nodes", 60.0, elapsed, why5);

  timed(4, "segmentation identity on 1000 random plans", 10.0, segmentation_identity);
  timed(6, "Monte Carlo consistency, n = 100000", 10.0, monte_carlo);
  timed(7, "utility shape properties", 10.0, utility_shape);

  return failures == 0 ? 0 : 1;
}
