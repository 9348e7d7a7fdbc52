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

#include "riskhtn/model.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <set>
#include <sstream>

#include "riskhtn/error.hpp"

namespace riskhtn {

namespace {

std::string at(const std::string& base, std::size_t index) {
  return base + "/" + std::to_string(index);
}

template <typename T>
const T* find_by_name(const std::vector<T>& items, const std::string& name) {
  auto it = std::find_if(items.begin(), items.end(), [&](const T& t) { return t.name == name; });
  return it == items.end() ? nullptr : &*it;
}

// Checks that the ordering pairs only mention known ids and that their
// transitive closure is irreflexive.
void check_ordering(const std::vector<std::string>& ids, const std::vector<OrderingPair>& ordering,
                    const std::string& path) {
  std::map<std::string, int> index;
  for (std::size_t i = 0; i < ids.size(); ++i) index[ids[i]] = static_cast<int>(i);
  std::vector<std::vector<int>> succ(ids.size());
  for (std::size_t k = 0; k < ordering.size(); ++k) {
    const auto& [a, b] = ordering[k];
    auto ia = index.find(a);
    auto ib = index.find(b);
    if (ia == index.end()) throw ModelError(at(path, k), "unknown subtask id '" + a + "'");
    if (ib == index.end()) throw ModelError(at(path, k), "unknown subtask id '" + b + "'");
    succ[ia->second].push_back(ib->second);
  }
  // Kahn's algorithm; leftover nodes sit on a cycle.
  std::vector<int> indegree(ids.size(), 0);
  for (const auto& s : succ)
    for (int v : s) ++indegree[v];
  std::vector<int> ready;
  for (std::size_t i = 0; i < ids.size(); ++i)
    if (indegree[i] == 0) ready.push_back(static_cast<int>(i));
  std::size_t seen = 0;
  while (!ready.empty()) {
    int u = ready.back();
    ready.pop_back();
    ++seen;
    for (int v : succ[u])
      if (--indegree[v] == 0) ready.push_back(v);
  }
  if (seen != ids.size()) throw ModelError(path, "ordering contains a cycle");
}

class DomainChecker {
 public:
  explicit DomainChecker(Domain& domain) : domain_(domain) {}

  void run() {
    check_types();
    check_predicates();
    check_compound_tasks();
    check_operators();
    check_methods();
  }

 private:
  void check_types() {
    std::set<std::string> seen;
    for (std::size_t i = 0; i < domain_.types.size(); ++i) {
      const auto& [child, parent] = domain_.types[i];
      if (child.empty()) throw ModelError("/types", "empty type name");
      if (!seen.insert(child).second)
        throw ModelError("/types/" + child, "duplicate type '" + child + "'");
    }
    // Throws on unknown parents and cycles.
    try {
      universe_ = TypedObjectUniverse(domain_.types, {});
    } catch (const ModelError& e) {
      throw ModelError("/types", e.detail());
    }
  }

  int require_type(const std::string& type, const std::string& path) const {
    auto id = universe_.type_id(type);
    if (!id) throw ModelError(path, "unknown type '" + type + "'");
    return *id;
  }

  void check_predicates() {
    std::set<std::string> seen;
    for (std::size_t i = 0; i < domain_.predicates.size(); ++i) {
      const auto& p = domain_.predicates[i];
      const auto path = at("/predicates", i);
      if (p.name.empty()) throw ModelError(path + "/name", "empty predicate name");
      if (!seen.insert(p.name).second)
        throw ModelError(path + "/name", "duplicate predicate '" + p.name + "'");
      for (std::size_t k = 0; k < p.param_types.size(); ++k)
        require_type(p.param_types[k], at(path + "/params", k));
    }
  }

  void check_compound_tasks() {
    std::set<std::string> seen;
    for (std::size_t i = 0; i < domain_.compound_tasks.size(); ++i) {
      const auto& t = domain_.compound_tasks[i];
      const auto path = at("/compound_tasks", i);
      if (t.name.empty()) throw ModelError(path + "/name", "empty task name");
      if (!seen.insert(t.name).second)
        throw ModelError(path + "/name", "duplicate compound task '" + t.name + "'");
      for (std::size_t k = 0; k < t.param_types.size(); ++k)
        require_type(t.param_types[k], at(path + "/params", k));
    }
  }

  using Scope = std::map<std::string, int>;  // variable -> type id

  Scope check_params(const std::vector<Parameter>& params, const std::string& path) const {
    Scope scope;
    for (std::size_t k = 0; k < params.size(); ++k) {
      const auto& p = params[k];
      const auto ppath = at(path, k);
      if (!is_variable(p.name))
        throw ModelError(ppath + "/name", "parameter '" + p.name + "' must start with '?'");
      int type = require_type(p.type, ppath + "/type");
      if (!scope.emplace(p.name, type).second)
        throw ModelError(ppath + "/name", "duplicate parameter '" + p.name + "'");
    }
    return scope;
  }

  // Arguments against declared parameter types; constants are resolved at
  // grounding time.
  void check_args(const std::vector<std::string>& args, const std::vector<std::string>& types,
                  const Scope& scope, const std::string& what, const std::string& path) const {
    if (args.size() != types.size()) {
      std::ostringstream msg;
      msg << "arity mismatch for '" << what << "': expected " << types.size() << " argument(s), got "
          << args.size();
      throw ModelError(path, msg.str());
    }
    for (std::size_t k = 0; k < args.size(); ++k) {
      if (!is_variable(args[k])) continue;
      auto it = scope.find(args[k]);
      if (it == scope.end())
        throw ModelError(at(path, k), "unbound variable '" + args[k] + "'");
      int expected = require_type(types[k], at(path, k));
      if (!universe_.is_subtype(it->second, expected))
        throw ModelError(at(path, k), "type mismatch: variable '" + args[k] + "' of type '" +
                                          universe_.type_name(it->second) + "' used as '" +
                                          types[k] + "'");
    }
  }

  void check_atom(const std::string& predicate, const std::vector<std::string>& args,
                  const Scope& scope, const std::string& path) const {
    const auto* p = domain_.find_predicate(predicate);
    if (!p) throw ModelError(path + "/pred", "undeclared predicate '" + predicate + "'");
    check_args(args, p->param_types, scope, predicate, path + "/args");
  }

  void check_operators() {
    std::set<std::string> seen;
    for (std::size_t i = 0; i < domain_.operators.size(); ++i) {
      auto& op = domain_.operators[i];
      const auto path = at("/operators", i);
      if (op.name.empty()) throw ModelError(path + "/name", "empty operator name");
      if (!seen.insert(op.name).second)
        throw ModelError(path + "/name", "duplicate operator '" + op.name + "'");
      if (domain_.find_compound(op.name))
        throw ModelError(path + "/name", "'" + op.name + "' is both an operator and a compound task");
      Scope scope = check_params(op.params, path + "/params");
      for (std::size_t k = 0; k < op.precondition.size(); ++k)
        check_atom(op.precondition[k].predicate, op.precondition[k].args, scope,
                   at(path + "/precond", k));
      check_outcomes(op, scope, path + "/outcomes");
    }
  }

  void check_outcomes(OperatorSchema& op, const Scope& scope, const std::string& path) const {
    if (op.outcomes.empty()) throw ModelError(path, "operator needs at least one outcome");
    double sum = 0.0;
    for (std::size_t k = 0; k < op.outcomes.size(); ++k) {
      const auto& o = op.outcomes[k];
      const auto opath = at(path, k);
      if (!std::isfinite(o.probability) || o.probability < 0.0 || o.probability > 1.0)
        throw ModelError(opath + "/p", "probability must lie in (0, 1]");
      if (!std::isfinite(o.cost) || !(o.cost < 0.0))
        throw ModelError(opath + "/cost", "cost must be strictly negative");
      for (std::size_t j = 0; j < o.add.size(); ++j)
        check_atom(o.add[j].predicate, o.add[j].args, scope, at(opath + "/add", j));
      for (std::size_t j = 0; j < o.del.size(); ++j) {
        check_atom(o.del[j].predicate, o.del[j].args, scope, at(opath + "/del", j));
        if (std::find(o.add.begin(), o.add.end(), o.del[j]) != o.add.end())
          throw ModelError(at(opath + "/del", j), "atom '" + o.del[j].predicate +
                                                     "' is both added and deleted");
      }
      sum += o.probability;
    }
    if (std::abs(sum - 1.0) > kProbabilityTolerance) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "outcome probabilities sum to " << sum << ", expected 1";
      throw ModelError(path, msg.str());
    }
    std::erase_if(op.outcomes, [](const Outcome& o) { return o.probability == 0.0; });
    if (op.outcomes.empty()) throw ModelError(path, "operator needs at least one outcome");
    // Sums off by rounding alone are left as written, so validation is
    // idempotent and documents round-trip unchanged.
    const double rounding = 4.0 * std::numeric_limits<double>::epsilon() * static_cast<double>(op.outcomes.size());
    if (std::abs(sum - 1.0) > rounding)
      for (auto& o : op.outcomes) o.probability /= sum;
  }

  void check_methods() {
    std::set<std::string> seen;
    for (std::size_t i = 0; i < domain_.methods.size(); ++i) {
      auto& m = domain_.methods[i];
      const auto path = at("/methods", i);
      if (m.name.empty()) throw ModelError(path + "/name", "empty method name");
      if (!seen.insert(m.name).second)
        throw ModelError(path + "/name", "duplicate method '" + m.name + "'");
      const auto* ct = domain_.find_compound(m.task.name);
      if (!ct) {
        if (domain_.find_operator(m.task.name))
          throw ModelError(path + "/task/name", "method decomposes primitive task '" + m.task.name + "'");
        throw ModelError(path + "/task/name", "unknown compound task '" + m.task.name + "'");
      }
      Scope scope = check_params(m.params, path + "/params");
      // Variables of the decomposed task not listed among the parameters
      // take the task's parameter type.
      if (m.task.args.size() == ct->param_types.size()) {
        for (std::size_t k = 0; k < m.task.args.size(); ++k) {
          const auto& v = m.task.args[k];
          if (is_variable(v) && !scope.contains(v)) {
            m.params.push_back({v, ct->param_types[k]});
            scope.emplace(v, require_type(ct->param_types[k], path + "/task"));
          }
        }
      }
      check_args(m.task.args, ct->param_types, scope, m.task.name, path + "/task/args");
      for (std::size_t k = 0; k < m.precondition.size(); ++k)
        check_atom(m.precondition[k].predicate, m.precondition[k].args, scope,
                   at(path + "/precond", k));
      std::vector<std::string> ids;
      std::set<std::string> id_set;
      for (std::size_t k = 0; k < m.subtasks.size(); ++k) {
        const auto& st = m.subtasks[k];
        const auto spath = at(path + "/subtasks", k);
        if (st.id.empty()) throw ModelError(spath + "/id", "empty subtask id");
        if (!id_set.insert(st.id).second)
          throw ModelError(spath + "/id", "duplicate subtask id '" + st.id + "'");
        ids.push_back(st.id);
        if (const auto* op = domain_.find_operator(st.name)) {
          std::vector<std::string> types;
          for (const auto& p : op->params) types.push_back(p.type);
          check_args(st.args, types, scope, st.name, spath + "/args");
        } else if (const auto* c = domain_.find_compound(st.name)) {
          check_args(st.args, c->param_types, scope, st.name, spath + "/args");
        } else {
          throw ModelError(spath + "/name", "unknown task '" + st.name + "'");
        }
      }
      check_ordering(ids, m.ordering, path + "/ordering");
    }
  }

  Domain& domain_;
  TypedObjectUniverse universe_;
};

}  // namespace

const OperatorSchema* Domain::find_operator(const std::string& name) const {
  return find_by_name(operators, name);
}
const CompoundTaskSchema* Domain::find_compound(const std::string& name) const {
  return find_by_name(compound_tasks, name);
}
const PredicateSchema* Domain::find_predicate(const std::string& name) const {
  return find_by_name(predicates, name);
}

TypedObjectUniverse::TypedObjectUniverse(
    const std::vector<std::pair<std::string, std::string>>& types,
    const std::vector<std::pair<std::string, std::string>>& objects) {
  for (const auto& [child, parent] : types) {
    if (type_index_.contains(child)) throw ModelError("duplicate type '" + child + "'");
    type_index_.emplace(child, static_cast<int>(type_names_.size()));
    type_names_.push_back(child);
  }
  parents_.assign(type_names_.size(), -1);
  for (const auto& [child, parent] : types) {
    if (parent.empty()) continue;
    auto it = type_index_.find(parent);
    if (it == type_index_.end())
      throw ModelError("unknown parent type '" + parent + "' of '" + child + "'");
    parents_[type_index_.at(child)] = it->second;
  }
  for (int t = 0; t < num_types(); ++t) {
    int steps = 0;
    for (int p = parents_[t]; p != -1; p = parents_[p])
      if (++steps > num_types()) throw ModelError("type hierarchy has a cycle through '" + type_names_[t] + "'");
  }
  objects_by_type_.resize(type_names_.size());
  for (const auto& [name, type] : objects) {
    if (object_index_.contains(name)) throw ModelError("duplicate object '" + name + "'");
    auto it = type_index_.find(type);
    if (it == type_index_.end())
      throw ModelError("object '" + name + "' has unknown type '" + type + "'");
    const int id = static_cast<int>(object_names_.size());
    object_index_.emplace(name, id);
    object_names_.push_back(name);
    object_types_.push_back(it->second);
    for (int t = it->second; t != -1; t = parents_[t]) objects_by_type_[t].push_back(id);
  }
}

std::optional<int> TypedObjectUniverse::type_id(const std::string& name) const {
  auto it = type_index_.find(name);
  if (it == type_index_.end()) return std::nullopt;
  return it->second;
}

std::optional<int> TypedObjectUniverse::object_id(const std::string& name) const {
  auto it = object_index_.find(name);
  if (it == object_index_.end()) return std::nullopt;
  return it->second;
}

bool TypedObjectUniverse::is_subtype(int type, int ancestor) const {
  for (int t = type; t != -1; t = parents_[t])
    if (t == ancestor) return true;
  return false;
}

void validate_domain(Domain& domain) { DomainChecker(domain).run(); }

void validate_problem(const Domain& domain, const Problem& problem) {
  TypedObjectUniverse universe;
  try {
    universe = TypedObjectUniverse(domain.types, problem.objects);
  } catch (const ModelError& e) {
    throw ModelError("/objects", e.detail());
  }
  auto check_object_args = [&](const std::vector<std::string>& args,
                               const std::vector<std::string>& types, const std::string& what,
                               const std::string& path, bool allow_variables) {
    if (args.size() != types.size())
      throw ModelError(path, "arity mismatch for '" + what + "': expected " +
                                 std::to_string(types.size()) + " argument(s), got " +
                                 std::to_string(args.size()));
    for (std::size_t k = 0; k < args.size(); ++k) {
      if (is_variable(args[k])) {
        if (!allow_variables) throw ModelError(at(path, k), "init atoms must be ground");
        continue;
      }
      auto obj = universe.object_id(args[k]);
      if (!obj) throw ModelError(at(path, k), "unknown object '" + args[k] + "'");
      auto expected = universe.type_id(types[k]);
      if (!expected || !universe.is_subtype(universe.object_type(*obj), *expected))
        throw ModelError(at(path, k), "type mismatch: object '" + args[k] + "' of type '" +
                                          universe.type_name(universe.object_type(*obj)) +
                                          "' used as '" + types[k] + "'");
    }
  };
  for (std::size_t i = 0; i < problem.init.size(); ++i) {
    const auto& a = problem.init[i];
    const auto path = at("/init", i);
    const auto* p = domain.find_predicate(a.predicate);
    if (!p) throw ModelError(path + "/pred", "undeclared predicate '" + a.predicate + "'");
    check_object_args(a.args, p->param_types, a.predicate, path + "/args", false);
  }
  std::vector<std::string> ids;
  std::set<std::string> id_set;
  std::map<std::string, std::string> variable_types;
  for (std::size_t i = 0; i < problem.tasks.subtasks.size(); ++i) {
    const auto& st = problem.tasks.subtasks[i];
    const auto path = at("/tasks/subtasks", i);
    if (st.id.empty()) throw ModelError(path + "/id", "empty task id");
    if (!id_set.insert(st.id).second) throw ModelError(path + "/id", "duplicate task id '" + st.id + "'");
    ids.push_back(st.id);
    std::vector<std::string> types;
    if (const auto* op = domain.find_operator(st.name)) {
      for (const auto& p : op->params) types.push_back(p.type);
    } else if (const auto* c = domain.find_compound(st.name)) {
      types = c->param_types;
    } else {
      throw ModelError(path + "/name", "unknown task '" + st.name + "' in initial network");
    }
    check_object_args(st.args, types, st.name, path + "/args", true);
    for (std::size_t k = 0; k < st.args.size(); ++k) {
      if (!is_variable(st.args[k])) continue;
      auto [it, inserted] = variable_types.emplace(st.args[k], types[k]);
      if (!inserted && it->second != types[k])
        throw ModelError(at(path + "/args", k), "variable '" + st.args[k] +
                                                    "' used with types '" + it->second +
                                                    "' and '" + types[k] + "'");
    }
  }
  check_ordering(ids, problem.tasks.ordering, "/tasks/ordering");
}

}  // namespace riskhtn
