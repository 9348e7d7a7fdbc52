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
#include <functional>
#include <set>

#include "riskhtn/error.hpp"
#include "riskhtn/ground_model.hpp"

namespace riskhtn {

namespace {

using Binding = std::map<std::string, int>;

void sort_unique(std::vector<AtomId>& v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

// Calls fn for every typed tuple of objects for `params`.
void for_each_binding(const TypedObjectUniverse& universe, const std::vector<Parameter>& params,
                      const std::function<void(const Binding&, const std::vector<int>&)>& fn) {
  std::vector<const std::vector<int>*> domains;
  for (const auto& p : params) {
    auto t = universe.type_id(p.type);
    if (!t) throw ModelError("unknown type '" + p.type + "' of parameter '" + p.name + "'");
    domains.push_back(&universe.objects_of(*t));
    if (domains.back()->empty()) return;
  }
  std::vector<std::size_t> idx(params.size(), 0);
  Binding binding;
  std::vector<int> tuple(params.size());
  while (true) {
    for (std::size_t k = 0; k < params.size(); ++k) {
      tuple[k] = (*domains[k])[idx[k]];
      binding[params[k].name] = tuple[k];
    }
    fn(binding, tuple);
    std::size_t k = params.size();
    while (k > 0) {
      --k;
      if (++idx[k] < domains[k]->size()) break;
      idx[k] = 0;
      if (k == 0) return;
    }
    if (params.empty()) return;
  }
}

}  // namespace

class GroundModelBuilder {
 public:
  GroundModelBuilder(const Domain& domain, const Problem& problem, const GroundingOptions& options)
      : domain_(domain), problem_(problem), options_(options) {}

  GroundModel build() {
    m_.domain_name_ = domain_.name;
    m_.universe_ = TypedObjectUniverse(domain_.types, problem_.objects);
    for (const auto& p : domain_.predicates) {
      m_.predicate_index_[p.name] = static_cast<int>(m_.predicate_names_.size());
      m_.predicate_names_.push_back(p.name);
    }
    for (const auto& op : domain_.operators) {
      TaskSignature sig{op.name, true, {}};
      for (const auto& p : op.params) sig.param_types.push_back(type_of(p.type));
      add_signature(std::move(sig));
    }
    for (const auto& ct : domain_.compound_tasks) {
      TaskSignature sig{ct.name, false, {}};
      for (const auto& t : ct.param_types) sig.param_types.push_back(type_of(t));
      add_signature(std::move(sig));
    }
    find_fluents();

    std::vector<AtomId> init;
    for (const auto& a : problem_.init) {
      AtomId id = intern_atom(a.predicate, a.args, {});
      init.push_back(id);
      init_atoms_.insert(id);
    }
    m_.initial_state_ = State(std::move(init));

    for (const auto& op : domain_.operators) ground_operator(op);
    for (const auto& method : domain_.methods) ground_method(method);
    build_initial_network();
    return std::move(m_);
  }

 private:
  int type_of(const std::string& name) const {
    auto t = m_.universe_.type_id(name);
    if (!t) throw ModelError("unknown type '" + name + "'");
    return *t;
  }

  void add_signature(TaskSignature sig) {
    if (m_.signature_index_.contains(sig.name))
      throw ModelError("task name '" + sig.name + "' declared twice");
    m_.signature_index_[sig.name] = static_cast<int>(m_.signatures_.size());
    m_.signatures_.push_back(std::move(sig));
    m_.tasks_by_signature_.emplace_back();
  }

  void find_fluents() {
    for (const auto& op : domain_.operators)
      for (const auto& o : op.outcomes) {
        for (const auto& a : o.add) fluents_.insert(a.predicate);
        for (const auto& a : o.del) fluents_.insert(a.predicate);
      }
  }

  int resolve_term(const std::string& term, const Binding& binding) const {
    if (is_variable(term)) {
      auto it = binding.find(term);
      if (it == binding.end()) throw ModelError("unbound variable '" + term + "'");
      return it->second;
    }
    auto obj = m_.universe_.object_id(term);
    if (!obj) throw ModelError("unknown object '" + term + "'");
    return *obj;
  }

  std::vector<int> resolve_args(const std::vector<std::string>& args, const Binding& binding) const {
    std::vector<int> out;
    out.reserve(args.size());
    for (const auto& a : args) out.push_back(resolve_term(a, binding));
    return out;
  }

  AtomId intern_atom(const std::string& predicate, const std::vector<std::string>& args,
                     const Binding& binding) {
    auto p = m_.predicate_index_.find(predicate);
    if (p == m_.predicate_index_.end()) throw ModelError("undeclared predicate '" + predicate + "'");
    auto key = std::make_pair(p->second, resolve_args(args, binding));
    auto [it, inserted] = m_.atom_index_.emplace(key, static_cast<AtomId>(m_.atoms_.size()));
    if (inserted) m_.atoms_.push_back(std::move(key));
    return it->second;
  }

  int intern_task(int signature, std::vector<int> args) {
    auto key = std::make_pair(signature, args);
    auto [it, inserted] = m_.task_index_.emplace(key, static_cast<int>(m_.tasks_.size()));
    if (inserted) {
      m_.tasks_.push_back(GroundTask{signature, std::move(args), -1, {}});
      m_.tasks_by_signature_[signature].push_back(it->second);
    }
    return it->second;
  }

  // Splits a lifted precondition into ground atom ids. Returns false when the
  // relevance filter proves it unsatisfiable through a rigid predicate.
  bool ground_precondition(const std::vector<Literal>& pre, const Binding& binding,
                           std::vector<AtomId>& pos, std::vector<AtomId>& neg) {
    for (const auto& lit : pre) {
      AtomId a = intern_atom(lit.predicate, lit.args, binding);
      if (options_.relevance_filter && !fluents_.contains(lit.predicate) &&
          init_atoms_.contains(a) == lit.negated)
        return false;
      (lit.negated ? neg : pos).push_back(a);
    }
    sort_unique(pos);
    sort_unique(neg);
    return true;
  }

  void ground_operator(const OperatorSchema& schema) {
    const int sig = m_.signature_index_.at(schema.name);
    for_each_binding(m_.universe_, schema.params, [&](const Binding& b, const std::vector<int>& tuple) {
      GroundOperator op;
      op.name = schema.name;
      op.args = tuple;
      if (!ground_precondition(schema.precondition, b, op.pre_pos, op.pre_neg)) return;
      for (const auto& o : schema.outcomes) {
        Effect e;
        for (const auto& a : o.add) e.add.push_back(intern_atom(a.predicate, a.args, b));
        for (const auto& a : o.del) e.del.push_back(intern_atom(a.predicate, a.args, b));
        sort_unique(e.add);
        sort_unique(e.del);
        op.effects.push_back(std::move(e));
        op.costs.push_back({o.probability, o.cost});
      }
      for (const auto& e : op.effects)
        if (!(e == op.effects.front())) m_.effect_deterministic_ = false;
      op.id = static_cast<int>(m_.operators_.size());
      op.task = intern_task(sig, tuple);
      m_.tasks_[op.task].op = op.id;
      m_.operators_.push_back(std::move(op));
    });
  }

  void ground_method(const MethodSchema& schema) {
    auto sig_it = m_.signature_index_.find(schema.task.name);
    if (sig_it == m_.signature_index_.end() || m_.signatures_[sig_it->second].primitive)
      throw ModelError("method '" + schema.name + "' decomposes unknown compound task '" +
                       schema.task.name + "'");
    std::vector<int> sub_sigs;
    for (const auto& st : schema.subtasks) {
      auto it = m_.signature_index_.find(st.name);
      if (it == m_.signature_index_.end())
        throw ModelError("method '" + schema.name + "' uses unknown task '" + st.name + "'");
      sub_sigs.push_back(it->second);
    }
    std::vector<std::pair<int, int>> ordering;
    auto index_of = [&](const std::string& id) {
      for (std::size_t i = 0; i < schema.subtasks.size(); ++i)
        if (schema.subtasks[i].id == id) return static_cast<int>(i);
      throw ModelError("method '" + schema.name + "' orders unknown subtask '" + id + "'");
    };
    for (const auto& [a, b] : schema.ordering) ordering.emplace_back(index_of(a), index_of(b));

    for_each_binding(m_.universe_, schema.params, [&](const Binding& b, const std::vector<int>& tuple) {
      GroundMethod gm;
      gm.name = schema.name;
      gm.bindings = tuple;
      if (!ground_precondition(schema.precondition, b, gm.pre_pos, gm.pre_neg)) return;
      gm.task = intern_task(sig_it->second, resolve_args(schema.task.args, b));
      for (std::size_t i = 0; i < schema.subtasks.size(); ++i)
        gm.subtasks.push_back(
            {schema.subtasks[i].id, intern_task(sub_sigs[i], resolve_args(schema.subtasks[i].args, b))});
      gm.ordering = ordering;
      gm.id = static_cast<int>(m_.methods_.size());
      m_.tasks_[gm.task].methods.push_back(gm.id);
      m_.methods_.push_back(std::move(gm));
    });
  }

  void build_initial_network() {
    std::map<std::string, int> variables;
    for (const auto& st : problem_.tasks.subtasks) {
      auto sig = m_.signature_index_.find(st.name);
      if (sig == m_.signature_index_.end())
        throw ModelError("unknown task '" + st.name + "' in initial network");
      TaskInstance inst;
      inst.kind = m_.signatures_[sig->second].primitive ? TaskKind::primitive : TaskKind::compound;
      inst.name = sig->second;
      for (const auto& arg : st.args) {
        if (is_variable(arg)) {
          auto [it, inserted] = variables.emplace(arg, static_cast<int>(m_.variable_names_.size()));
          if (inserted) m_.variable_names_.push_back(arg);
          inst.args.push_back(variable_term(it->second));
        } else {
          inst.args.push_back(resolve_term(arg, {}));
        }
      }
      if (inst.is_ground()) intern_task(inst.name, inst.args);
      m_.initial_network_.add_node(st.id, std::move(inst));
    }
    for (const auto& [a, b] : problem_.tasks.ordering) m_.initial_network_.add_order(a, b);
  }

  const Domain& domain_;
  const Problem& problem_;
  GroundingOptions options_;
  GroundModel m_;
  std::set<std::string> fluents_;
  std::set<AtomId> init_atoms_;
};

GroundModel ground(const Domain& domain, const Problem& problem, const GroundingOptions& options) {
  return GroundModelBuilder(domain, problem, options).build();
}

std::string GroundModel::atom_name(AtomId atom) const {
  const auto& [pred, args] = atoms_.at(atom);
  std::string out = predicate_names_[pred] + "(";
  for (std::size_t k = 0; k < args.size(); ++k) {
    if (k) out += ",";
    out += universe_.object_name(args[k]);
  }
  return out + ")";
}

std::optional<AtomId> GroundModel::find_atom(const std::string& predicate,
                                             const std::vector<int>& args) const {
  auto p = predicate_index_.find(predicate);
  if (p == predicate_index_.end()) return std::nullopt;
  auto it = atom_index_.find({p->second, args});
  if (it == atom_index_.end()) return std::nullopt;
  return it->second;
}

std::optional<int> GroundModel::find_signature(const std::string& name) const {
  auto it = signature_index_.find(name);
  if (it == signature_index_.end()) return std::nullopt;
  return it->second;
}

std::optional<int> GroundModel::find_task(int signature, const std::vector<int>& args) const {
  auto it = task_index_.find({signature, args});
  if (it == task_index_.end()) return std::nullopt;
  return it->second;
}

std::vector<int> GroundModel::compatible_tasks(const TaskInstance& task) const {
  std::vector<int> out;
  if (task.kind == TaskKind::guard || task.name < 0 ||
      task.name >= static_cast<int>(signatures_.size()))
    return out;
  for (int t : tasks_by_signature_[task.name]) {
    const auto& args = tasks_[t].args;
    if (args.size() != task.args.size()) continue;
    std::map<int, int> seen;
    bool ok = true;
    for (std::size_t k = 0; k < args.size() && ok; ++k) {
      int term = task.args[k];
      if (is_variable_term(term)) {
        auto [it, inserted] = seen.emplace(term, args[k]);
        ok = inserted || it->second == args[k];
      } else {
        ok = term == args[k];
      }
    }
    if (ok) out.push_back(t);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::optional<int> GroundModel::ground_task_of(const TaskInstance& task) const {
  if (task.kind == TaskKind::guard || !task.is_ground()) return std::nullopt;
  return find_task(task.name, task.args);
}

TaskInstance GroundModel::instance_of_task(int task) const {
  const GroundTask& gt = tasks_.at(task);
  return TaskInstance{signatures_[gt.signature].primitive ? TaskKind::primitive : TaskKind::compound,
                      gt.signature, gt.args};
}

std::string GroundModel::describe_task(int task) const { return describe(instance_of_task(task)); }

std::string GroundModel::describe(const TaskInstance& task) const {
  if (task.kind == TaskKind::guard) return "pre(" + describe_method(task.name) + ")";
  std::string out = signatures_.at(task.name).name + "(";
  for (std::size_t k = 0; k < task.args.size(); ++k) {
    if (k) out += ",";
    int term = task.args[k];
    if (is_variable_term(term)) {
      int v = variable_index(term);
      out += v < static_cast<int>(variable_names_.size()) ? variable_names_[v]
                                                          : "?_" + std::to_string(v);
    } else {
      out += universe_.object_name(term);
    }
  }
  return out + ")";
}

std::string GroundModel::describe_operator(int op) const {
  return describe_task(operators_.at(op).task);
}

std::string GroundModel::describe_method(int method) const {
  const GroundMethod& m = methods_.at(method);
  std::string out = m.name + "[";
  for (std::size_t k = 0; k < m.bindings.size(); ++k) {
    if (k) out += ",";
    out += universe_.object_name(m.bindings[k]);
  }
  return out + "]";
}

std::vector<CostDistribution> GroundModel::distributions(const Plan& plan) const {
  std::vector<CostDistribution> out;
  out.reserve(plan.steps.size());
  for (int step : plan.steps) out.push_back(operators_.at(step).costs);
  return out;
}

}  // namespace riskhtn
