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

#include "riskhtn/io_formats.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <limits>
#include <sstream>

#include "json.hpp"

#include "riskhtn/error.hpp"

namespace riskhtn {

namespace {

using Json = nlohmann::ordered_json;

std::string line_col(std::string_view text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < text.size() && i + 1 < byte; ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return std::to_string(line) + ":" + std::to_string(col);
}

Json parse_json(std::string_view text) {
  try {
    return Json::parse(text.begin(), text.end());
  } catch (const Json::parse_error& e) {
    std::string what = e.what();
    auto pos = what.find("syntax error");
    throw ParseError(line_col(text, e.byte), pos == std::string::npos ? what : what.substr(pos));
  }
}

std::string child(const std::string& path, const std::string& key) { return path + "/" + key; }
std::string child(const std::string& path, std::size_t index) {
  return path + "/" + std::to_string(index);
}
std::string shown(const std::string& path) { return path.empty() ? "/" : path; }

// Thin schema-checking accessors; every failure names the JSON pointer.
const Json& expect_object(const Json& j, const std::string& path,
                          std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw ParseError(shown(path), "expected an object");
  for (const auto& [key, value] : j.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) throw ParseError(child(path, key), "unknown key '" + key + "'");
  }
  return j;
}

const Json& expect_array(const Json& j, const std::string& path) {
  if (!j.is_array()) throw ParseError(shown(path), "expected an array");
  return j;
}

const Json* member(const Json& obj, const char* key, const std::string& path, bool required) {
  auto it = obj.find(key);
  if (it == obj.end()) {
    if (required) throw ParseError(child(path, key), "missing required key '" + std::string(key) + "'");
    return nullptr;
  }
  return &*it;
}

std::string get_string(const Json& j, const std::string& path) {
  if (!j.is_string()) throw ParseError(shown(path), "expected a string");
  return j.get<std::string>();
}

double get_number(const Json& j, const std::string& path) {
  if (!j.is_number()) throw ParseError(shown(path), "expected a number");
  return j.get<double>();
}

std::string string_member(const Json& obj, const char* key, const std::string& path) {
  return get_string(*member(obj, key, path, true), child(path, key));
}

std::vector<std::string> string_array(const Json& j, const std::string& path) {
  expect_array(j, path);
  std::vector<std::string> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(get_string(j[i], child(path, i)));
  return out;
}

std::vector<std::string> optional_strings(const Json& obj, const char* key, const std::string& path) {
  const Json* j = member(obj, key, path, false);
  return j ? string_array(*j, child(path, key)) : std::vector<std::string>{};
}

template <typename T, typename F>
std::vector<T> read_list(const Json& obj, const char* key, const std::string& path, bool required, F read) {
  std::vector<T> out;
  const Json* j = member(obj, key, path, required);
  if (!j) return out;
  const std::string p = child(path, key);
  expect_array(*j, p);
  for (std::size_t i = 0; i < j->size(); ++i) out.push_back(read((*j)[i], child(p, i)));
  return out;
}

std::vector<std::pair<std::string, std::string>> read_string_map(const Json& obj, const char* key,
                                                                 const std::string& path, bool required) {
  std::vector<std::pair<std::string, std::string>> out;
  const Json* j = member(obj, key, path, required);
  if (!j) return out;
  const std::string p = child(path, key);
  if (!j->is_object()) throw ParseError(p, "expected an object");
  for (const auto& [k, v] : j->items()) out.emplace_back(k, get_string(v, child(p, k)));
  return out;
}

Atom read_atom(const Json& j, const std::string& path) {
  expect_object(j, path, {"pred", "args"});
  return Atom{string_member(j, "pred", path), optional_strings(j, "args", path)};
}

Literal read_literal(const Json& j, const std::string& path) {
  expect_object(j, path, {"pred", "args", "neg"});
  Literal l{string_member(j, "pred", path), optional_strings(j, "args", path), false};
  if (const Json* neg = member(j, "neg", path, false)) {
    if (!neg->is_boolean()) throw ParseError(child(path, "neg"), "expected a boolean");
    l.negated = neg->get<bool>();
  }
  return l;
}

Parameter read_parameter(const Json& j, const std::string& path) {
  expect_object(j, path, {"name", "type"});
  return Parameter{string_member(j, "name", path), string_member(j, "type", path)};
}

Outcome read_outcome(const Json& j, const std::string& path) {
  expect_object(j, path, {"p", "add", "del", "cost"});
  Outcome o;
  o.probability = get_number(*member(j, "p", path, true), child(path, "p"));
  o.add = read_list<Atom>(j, "add", path, false, read_atom);
  o.del = read_list<Atom>(j, "del", path, false, read_atom);
  o.cost = get_number(*member(j, "cost", path, true), child(path, "cost"));
  return o;
}

SubtaskSchema read_subtask(const Json& j, const std::string& path) {
  expect_object(j, path, {"id", "name", "args"});
  return SubtaskSchema{string_member(j, "id", path), string_member(j, "name", path),
                       optional_strings(j, "args", path)};
}

OrderingPair read_ordering(const Json& j, const std::string& path) {
  expect_array(j, path);
  if (j.size() != 2) throw ParseError(path, "an ordering pair has exactly two ids");
  return {get_string(j[0], child(path, 0)), get_string(j[1], child(path, 1))};
}

OperatorSchema read_operator(const Json& j, const std::string& path) {
  expect_object(j, path, {"name", "params", "precond", "outcomes"});
  OperatorSchema op;
  op.name = string_member(j, "name", path);
  op.params = read_list<Parameter>(j, "params", path, false, read_parameter);
  op.precondition = read_list<Literal>(j, "precond", path, false, read_literal);
  op.outcomes = read_list<Outcome>(j, "outcomes", path, true, read_outcome);
  return op;
}

PredicateSchema read_predicate(const Json& j, const std::string& path) {
  expect_object(j, path, {"name", "params"});
  return PredicateSchema{string_member(j, "name", path), optional_strings(j, "params", path)};
}

CompoundTaskSchema read_compound(const Json& j, const std::string& path) {
  expect_object(j, path, {"name", "params"});
  return CompoundTaskSchema{string_member(j, "name", path), optional_strings(j, "params", path)};
}

MethodSchema read_method(const Json& j, const std::string& path) {
  expect_object(j, path, {"name", "task", "params", "precond", "subtasks", "ordering"});
  MethodSchema m;
  m.name = string_member(j, "name", path);
  const std::string tp = child(path, "task");
  const Json& task = expect_object(*member(j, "task", path, true), tp, {"name", "args"});
  m.task = TaskRef{string_member(task, "name", tp), optional_strings(task, "args", tp)};
  m.params = read_list<Parameter>(j, "params", path, false, read_parameter);
  m.precondition = read_list<Literal>(j, "precond", path, false, read_literal);
  m.subtasks = read_list<SubtaskSchema>(j, "subtasks", path, false, read_subtask);
  m.ordering = read_list<OrderingPair>(j, "ordering", path, false, read_ordering);
  return m;
}

template <typename F>
auto model_errors_as_parse_errors(F&& f) {
  try {
    return f();
  } catch (const ModelError& e) {
    throw ParseError(e.path().empty() ? "/" : e.path(), e.detail());
  }
}

Json atom_json(const std::string& pred, const std::vector<std::string>& args) {
  Json j = Json::object();
  j["pred"] = pred;
  j["args"] = args;
  return j;
}

Json atoms_json(const std::vector<Atom>& atoms) {
  Json j = Json::array();
  for (const auto& a : atoms) j.push_back(atom_json(a.predicate, a.args));
  return j;
}

Json literals_json(const std::vector<Literal>& lits) {
  Json j = Json::array();
  for (const auto& l : lits) {
    Json x = atom_json(l.predicate, l.args);
    x["neg"] = l.negated;
    j.push_back(std::move(x));
  }
  return j;
}

Json params_json(const std::vector<Parameter>& params) {
  Json j = Json::array();
  for (const auto& p : params) j.push_back(Json{{"name", p.name}, {"type", p.type}});
  return j;
}

Json subtasks_json(const std::vector<SubtaskSchema>& subtasks) {
  Json j = Json::array();
  for (const auto& s : subtasks) j.push_back(Json{{"id", s.id}, {"name", s.name}, {"args", s.args}});
  return j;
}

Json ordering_json(const std::vector<OrderingPair>& ordering) {
  Json j = Json::array();
  for (const auto& [a, b] : ordering) j.push_back(Json::array({a, b}));
  return j;
}

Json utility_json(const UtilitySpec& spec) {
  Json j = Json::object();
  switch (spec.kind) {
    case UtilityKind::linear:
      j["kind"] = "linear";
      break;
    case UtilityKind::exponential:
      j["kind"] = "exponential";
      j["a"] = spec.a;
      j["alpha"] = spec.alpha;
      break;
    case UtilityKind::one_switch:
      j["kind"] = "one_switch";
      j["D"] = spec.trade_off;
      j["alpha"] = spec.alpha;
      j["initial_resource"] = spec.initial_resource;
      break;
  }
  return j;
}

std::string format_g(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

std::string dot_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

const char* kind_name(VertexKind k) {
  switch (k) {
    case VertexKind::compound:
      return "compound";
    case VertexKind::primitive:
      return "primitive";
    case VertexKind::method:
      return "method";
  }
  return "?";
}

}  // namespace

Domain parse_domain(std::string_view text) {
  const Json j = parse_json(text);
  expect_object(j, "", {"name", "types", "predicates", "operators", "compound_tasks", "methods"});
  Domain d;
  d.name = string_member(j, "name", "");
  d.types = read_string_map(j, "types", "", false);
  d.predicates = read_list<PredicateSchema>(j, "predicates", "", false, read_predicate);
  d.operators = read_list<OperatorSchema>(j, "operators", "", true, read_operator);
  d.compound_tasks = read_list<CompoundTaskSchema>(j, "compound_tasks", "", false, read_compound);
  d.methods = read_list<MethodSchema>(j, "methods", "", false, read_method);
  model_errors_as_parse_errors([&] {
    validate_domain(d);
    return 0;
  });
  return d;
}

Problem parse_problem(std::string_view text, const Domain& domain) {
  const Json j = parse_json(text);
  expect_object(j, "", {"objects", "init", "tasks"});
  Problem p;
  p.objects = read_string_map(j, "objects", "", false);
  p.init = read_list<Atom>(j, "init", "", false, read_atom);
  if (const Json* tasks = member(j, "tasks", "", true)) {
    expect_object(*tasks, "/tasks", {"subtasks", "ordering"});
    p.tasks.subtasks = read_list<SubtaskSchema>(*tasks, "subtasks", "/tasks", false, read_subtask);
    p.tasks.ordering = read_list<OrderingPair>(*tasks, "ordering", "/tasks", false, read_ordering);
  }
  model_errors_as_parse_errors([&] {
    validate_problem(domain, p);
    return 0;
  });
  return p;
}

UtilitySpec parse_utility(std::string_view text) {
  const Json j = parse_json(text);
  expect_object(j, "", {"kind", "a", "alpha", "D", "initial_resource"});
  const std::string kind = string_member(j, "kind", "");
  auto positive = [&](const char* key) {
    double v = get_number(*member(j, key, "", true), child("", key));
    if (!(v > 0) || !std::isfinite(v)) throw ParseError(child("", key), std::string(key) + " must be > 0");
    return v;
  };
  auto reject = [&](std::initializer_list<const char*> keys) {
    for (const char* k : keys)
      if (j.contains(k)) throw ParseError(child("", k), "'" + std::string(k) + "' is not used by " + kind);
  };
  if (kind == "linear") {
    reject({"a", "alpha", "D", "initial_resource"});
    return UtilitySpec::linear();
  }
  if (kind == "exponential") {
    reject({"D", "initial_resource"});
    double a = get_number(*member(j, "a", "", true), "/a");
    if (a != 1.0 && a != -1.0) throw ParseError("/a", "a must be -1 or +1");
    return UtilitySpec::exponential(static_cast<int>(a), positive("alpha"));
  }
  if (kind == "one_switch") {
    reject({"a"});
    double d = positive("D");
    double alpha = positive("alpha");
    return UtilitySpec::one_switch(d, alpha, positive("initial_resource"));
  }
  throw ParseError("/kind", "unknown utility kind '" + kind + "'");
}

std::string serialize_domain(const Domain& d) {
  Json j = Json::object();
  j["name"] = d.name;
  Json types = Json::object();
  for (const auto& [c, p] : d.types) types[c] = p;
  j["types"] = types;
  Json preds = Json::array();
  for (const auto& p : d.predicates) preds.push_back(Json{{"name", p.name}, {"params", p.param_types}});
  j["predicates"] = preds;
  Json ops = Json::array();
  for (const auto& op : d.operators) {
    Json o = Json::object();
    o["name"] = op.name;
    o["params"] = params_json(op.params);
    o["precond"] = literals_json(op.precondition);
    Json outs = Json::array();
    for (const auto& out : op.outcomes) {
      Json x = Json::object();
      x["p"] = out.probability;
      x["add"] = atoms_json(out.add);
      x["del"] = atoms_json(out.del);
      x["cost"] = out.cost;
      outs.push_back(std::move(x));
    }
    o["outcomes"] = outs;
    ops.push_back(std::move(o));
  }
  j["operators"] = ops;
  Json cts = Json::array();
  for (const auto& c : d.compound_tasks) cts.push_back(Json{{"name", c.name}, {"params", c.param_types}});
  j["compound_tasks"] = cts;
  Json methods = Json::array();
  for (const auto& m : d.methods) {
    Json x = Json::object();
    x["name"] = m.name;
    x["task"] = Json{{"name", m.task.name}, {"args", m.task.args}};
    x["params"] = params_json(m.params);
    x["precond"] = literals_json(m.precondition);
    x["subtasks"] = subtasks_json(m.subtasks);
    x["ordering"] = ordering_json(m.ordering);
    methods.push_back(std::move(x));
  }
  j["methods"] = methods;
  return j.dump(2) + "\n";
}

std::string serialize_problem(const Problem& p) {
  Json j = Json::object();
  Json objects = Json::object();
  for (const auto& [name, type] : p.objects) objects[name] = type;
  j["objects"] = objects;
  j["init"] = atoms_json(p.init);
  j["tasks"] = Json{{"subtasks", subtasks_json(p.tasks.subtasks)}, {"ordering", ordering_json(p.tasks.ordering)}};
  return j.dump(2) + "\n";
}

std::string serialize_utility(const UtilitySpec& spec) { return utility_json(spec).dump(2) + "\n"; }

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<PlanStepRef> parse_plan(std::string_view text) {
  const Json j = parse_json(text);
  if (!j.is_object()) throw ParseError("/", "expected an object");
  return read_list<PlanStepRef>(j, "plan", "", true, [](const Json& s, const std::string& path) {
    if (!s.is_object()) throw ParseError(path, "expected an object");
    return PlanStepRef{string_member(s, "name", path), optional_strings(s, "args", path)};
  });
}

Plan resolve_plan(const GroundModel& model, const std::vector<PlanStepRef>& steps) {
  Plan plan;
  for (std::size_t k = 0; k < steps.size(); ++k) {
    const auto& s = steps[k];
    const std::string where = "/plan/" + std::to_string(k);
    auto sig = model.find_signature(s.name);
    if (!sig || !model.signatures()[*sig].primitive)
      throw ModelError(where, "unknown operator '" + s.name + "'");
    std::vector<int> args;
    for (const auto& a : s.args) {
      auto obj = model.universe().object_id(a);
      if (!obj) throw ModelError(where, "unknown object '" + a + "'");
      args.push_back(*obj);
    }
    auto task = model.find_task(*sig, args);
    if (!task || model.tasks()[*task].op < 0)
      throw ModelError(where, "no ground instance of operator '" + s.name + "' with these arguments");
    plan.steps.push_back(model.tasks()[*task].op);
  }
  return plan;
}

double round_significant(double value, int digits) {
  if (!std::isfinite(value) || value == 0) return value;
  return std::stod(format_g(value, digits));
}

std::string emit_plan_report(const GroundModel& model, const Plan& plan, const UtilitySpec& spec,
                             const ReportInfo& info) {
  const auto dists = model.distributions(plan);
  const double eu = spec.is_static() ? plan_eu_segmented(spec, dists) : plan_eu_exact(spec, dists);
  Json j = Json::object();
  Json steps = Json::array();
  for (int op : plan.steps) {
    std::vector<std::string> args;
    for (int a : model.operators()[op].args) args.push_back(model.universe().object_name(a));
    steps.push_back(Json{{"name", model.operators()[op].name}, {"args", args}});
  }
  j["plan"] = steps;
  j["expected_utility"] = round_significant(eu);
  j["utility"] = utility_json(spec);
  if (spec.is_static()) {
    Json table = Json::array();
    for (std::size_t k = 0; k < plan.steps.size(); ++k)
      table.push_back(Json{{"step", k},
                           {"operator", model.describe_operator(plan.steps[k])},
                           {"eu", round_significant(operator_eu(spec, dists[k]))}});
    j["operator_eu"] = table;
  }
  if (!info.engine.empty() || info.status) {
    Json stats = Json::object();
    if (!info.engine.empty()) stats["engine"] = info.engine;
    if (info.status) stats["status"] = std::string(to_string(*info.status));
    stats["nodes_expanded"] = info.stats.nodes_expanded;
    stats["nodes_generated"] = info.stats.nodes_generated;
    if (info.include_runtime) stats["runtime_ms"] = round_significant(info.stats.runtime_ms, 6);
    j["stats"] = stats;
  }
  return j.dump(2) + "\n";
}

std::string export_dot(const Cvtdg& graph) {
  if (graph.vertices().empty()) return "digraph cvtdg { }\n";
  std::ostringstream out;
  out << "digraph cvtdg {\n";
  const auto& vs = graph.vertices();
  for (std::size_t v = 0; v < vs.size(); ++v) {
    std::string label = dot_escape(graph.describe_vertex(static_cast<int>(v)));
    const char* shape = "box";
    std::string extra;
    if (vs[v].kind == VertexKind::primitive) {
      shape = "ellipse";
      std::string pairs;
      for (const auto& o : vs[v].costs) {
        if (!pairs.empty()) pairs += " ";
        pairs += "(" + format_g(o.probability, 9) + ", " + format_g(o.cost, 9) + ")";
      }
      label += "\\n" + pairs;
    } else if (vs[v].kind == VertexKind::method) {
      shape = "diamond";
      extra = ", style=filled, fillcolor=gray";
    }
    if (graph.annotated()) {
      const auto& a = graph.annotation(static_cast<int>(v));
      label += "\\nEU=" + format_g(a.eu, 9);
      if (!a.bounded) label += " (unbounded)";
    }
    out << "  \"v" << v << "\" [label=\"" << label << "\", shape=" << shape << extra << "];\n";
  }
  for (std::size_t v = 0; v < vs.size(); ++v)
    for (int c : vs[v].children) out << "  \"v" << v << "\" -> \"v" << c << "\";\n";
  out << "}\n";
  return out.str();
}

std::string dump_annotations(const Cvtdg& graph) {
  std::ostringstream out;
  for (std::size_t v = 0; v < graph.vertices().size(); ++v) {
    out << "v" << v << '\t' << kind_name(graph.vertices()[v].kind) << '\t'
        << graph.describe_vertex(static_cast<int>(v));
    if (graph.annotated()) {
      const auto& a = graph.annotation(static_cast<int>(v));
      out << '\t' << format_g(a.eu, 12) << '\t' << (a.bounded ? "bounded" : "unbounded");
    }
    out << '\n';
  }
  return out.str();
}

std::string_view to_string(SearchStatus status) {
  switch (status) {
    case SearchStatus::solved:
      return "solved";
    case SearchStatus::proven_failure:
      return "proven_failure";
    case SearchStatus::bounds_exhausted:
      return "bounds_exhausted";
  }
  return "unknown";
}

}  // namespace riskhtn
