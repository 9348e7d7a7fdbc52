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

#ifndef RISKHTN_IO_FORMATS_HPP_
#define RISKHTN_IO_FORMATS_HPP_

// JSON domain/problem/utility/plan documents, plan reports and DOT export.
//
// Every parse failure is reported as a ParseError whose location is
// "line:col" for malformed JSON and a JSON pointer for schema or model
// violations.

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "riskhtn/cvtdg.hpp"
#include "riskhtn/ground_model.hpp"
#include "riskhtn/model.hpp"
#include "riskhtn/search.hpp"
#include "riskhtn/utility.hpp"

namespace riskhtn {

// Parses and validates (see validate_domain) a domain document.
Domain parse_domain(std::string_view text);
// Parses a problem document and validates it against `domain`.
Problem parse_problem(std::string_view text, const Domain& domain);
UtilitySpec parse_utility(std::string_view text);

std::string serialize_domain(const Domain& domain);
std::string serialize_problem(const Problem& problem);
std::string serialize_utility(const UtilitySpec& spec);

// Reads a whole file; throws Error when it cannot be opened.
std::string read_file(const std::filesystem::path& path);

struct PlanStepRef {
  std::string name;
  std::vector<std::string> args;

  friend bool operator==(const PlanStepRef&, const PlanStepRef&) = default;
};

// Reads the "plan" array of a plan document or plan report; other keys are
// ignored.
std::vector<PlanStepRef> parse_plan(std::string_view text);
// Maps named steps to ground operators. Throws ModelError for unknown
// operators or objects, or operator instances removed during grounding.
Plan resolve_plan(const GroundModel& model, const std::vector<PlanStepRef>& steps);

struct ReportInfo {
  std::string engine;  // empty for plain evaluation
  std::optional<SearchStatus> status;
  SearchStats stats;
  bool include_runtime = false;
};

// Deterministic JSON report: plan, expected_utility (9 significant digits),
// utility, per-step operator EU table (static utilities) and search stats.
std::string emit_plan_report(const GroundModel& model, const Plan& plan, const UtilitySpec& spec,
                             const ReportInfo& info);

// Rounds to 9 significant digits, as printed in reports.
double round_significant(double value, int digits = 9);

// DOT digraph of the graph: compound tasks as boxes, primitive tasks as
// ellipses labelled with their (p, c) pairs, methods as filled diamonds.
// Annotated graphs also show each vertex's EU.
std::string export_dot(const Cvtdg& graph);

// One line per vertex: id, kind, name, EU, bounded/unbounded.
std::string dump_annotations(const Cvtdg& graph);

}  // namespace riskhtn

#endif  // RISKHTN_IO_FORMATS_HPP_
