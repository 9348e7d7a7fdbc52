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
#include <map>
#include <sstream>

#include "riskhtn/error.hpp"
#include "riskhtn/ground_model.hpp"

namespace riskhtn {

State::State(std::vector<AtomId> atoms) : atoms_(std::move(atoms)) {
  std::sort(atoms_.begin(), atoms_.end());
  atoms_.erase(std::unique(atoms_.begin(), atoms_.end()), atoms_.end());
}

bool State::contains(AtomId atom) const {
  return std::binary_search(atoms_.begin(), atoms_.end(), atom);
}

State State::apply(const std::vector<AtomId>& add, const std::vector<AtomId>& del) const {
  std::vector<AtomId> next;
  next.reserve(atoms_.size() + add.size());
  for (AtomId a : atoms_)
    if (std::find(del.begin(), del.end(), a) == del.end()) next.push_back(a);
  next.insert(next.end(), add.begin(), add.end());
  return State(std::move(next));
}

bool TaskInstance::is_ground() const {
  return std::none_of(args.begin(), args.end(), [](int t) { return is_variable_term(t); });
}

void TaskNetwork::add_node(const NodeId& id, TaskInstance task) {
  if (!nodes_.emplace(id, std::move(task)).second)
    throw ModelError("duplicate task id '" + id + "'");
}

// The order set is kept transitively closed, so two networks with the same
// nodes and the same induced partial order compare equal.
void TaskNetwork::add_order(const NodeId& before, const NodeId& after) {
  if (!contains(before)) throw ModelError("unknown task id '" + before + "'");
  if (!contains(after)) throw ModelError("unknown task id '" + after + "'");
  if (before == after || order_.contains({after, before}))
    throw ModelError("ordering " + before + " < " + after + " creates a cycle");
  std::vector<NodeId> lower = predecessors(before);
  lower.push_back(before);
  std::vector<NodeId> upper = successors(after);
  upper.push_back(after);
  for (const auto& x : lower)
    for (const auto& y : upper) order_.emplace(x, y);
}

const TaskInstance& TaskNetwork::task(const NodeId& id) const {
  auto it = nodes_.find(id);
  if (it == nodes_.end()) throw ModelError("unknown task id '" + id + "'");
  return it->second;
}

std::vector<NodeId> TaskNetwork::predecessors(const NodeId& id) const {
  std::vector<NodeId> out;
  for (const auto& [a, b] : order_)
    if (b == id) out.push_back(a);
  return out;
}

std::vector<NodeId> TaskNetwork::successors(const NodeId& id) const {
  std::vector<NodeId> out;
  for (auto it = order_.lower_bound({id, NodeId{}}); it != order_.end() && it->first == id; ++it)
    out.push_back(it->second);
  return out;
}

void TaskNetwork::remove_unconstrained(const NodeId& id) {
  if (!contains(id)) throw ModelError("unknown task id '" + id + "'");
  if (!predecessors(id).empty()) throw ModelError("task '" + id + "' still has predecessors");
  remove_node(id);
}

void TaskNetwork::remove_node(const NodeId& id) {
  if (nodes_.erase(id) == 0) throw ModelError("unknown task id '" + id + "'");
  std::erase_if(order_, [&](const auto& p) { return p.first == id || p.second == id; });
}

void TaskNetwork::bind(int variable, int object) {
  const int term = variable_term(variable);
  for (auto& [id, task] : nodes_)
    std::replace(task.args.begin(), task.args.end(), term, object);
}

bool TaskNetwork::is_acyclic() const {
  std::map<NodeId, int> indegree;
  for (const auto& [id, task] : nodes_) indegree[id] = 0;
  for (const auto& [a, b] : order_) ++indegree[b];
  std::vector<NodeId> ready;
  for (const auto& [id, d] : indegree)
    if (d == 0) ready.push_back(id);
  std::size_t seen = 0;
  while (!ready.empty()) {
    NodeId u = ready.back();
    ready.pop_back();
    ++seen;
    for (const auto& v : successors(u))
      if (--indegree[v] == 0) ready.push_back(v);
  }
  return seen == nodes_.size();
}

std::string TaskNetwork::canonical_key() const {
  std::ostringstream out;
  for (const auto& [id, task] : nodes_) {
    out << id << '=' << static_cast<int>(task.kind) << ':' << task.name << '(';
    for (int a : task.args) out << a << ',';
    out << ");";
  }
  out << '|';
  for (const auto& [a, b] : order_) out << a << '<' << b << ';';
  return out.str();
}

bool applicable(const GroundOperator& op, const State& state) {
  return std::all_of(op.pre_pos.begin(), op.pre_pos.end(), [&](AtomId a) { return state.contains(a); }) &&
         std::none_of(op.pre_neg.begin(), op.pre_neg.end(), [&](AtomId a) { return state.contains(a); });
}

bool applicable(const GroundMethod& method, const State& state) {
  return std::all_of(method.pre_pos.begin(), method.pre_pos.end(),
                     [&](AtomId a) { return state.contains(a); }) &&
         std::none_of(method.pre_neg.begin(), method.pre_neg.end(),
                      [&](AtomId a) { return state.contains(a); });
}

bool applicable(const GroundModel& model, const TaskInstance& task, const State& state) {
  if (!task.is_ground())
    throw ModelError("applicability of non-ground task " + model.describe(task));
  if (task.kind == TaskKind::guard) return applicable(model.methods().at(task.name), state);
  auto ground = model.ground_task_of(task);
  if (!ground) return false;
  const GroundTask& gt = model.tasks()[*ground];
  if (task.kind == TaskKind::primitive)
    return gt.op >= 0 && applicable(model.operators()[gt.op], state);
  return std::any_of(gt.methods.begin(), gt.methods.end(),
                     [&](int m) { return applicable(model.methods()[m], state); });
}

State progress(const State& state, const GroundOperator& op, std::size_t outcome) {
  if (outcome >= op.effects.size())
    throw ModelError("outcome index " + std::to_string(outcome) + " out of range for operator '" +
                     op.name + "'");
  if (!applicable(op, state)) throw ModelError("operator '" + op.name + "' is not applicable");
  const Effect& e = op.effects[outcome];
  return state.apply(e.add, e.del);
}

std::vector<NodeId> find_unconstrained_tasks(const TaskNetwork& network) {
  std::set<NodeId> constrained;
  for (const auto& [a, b] : network.order()) constrained.insert(b);
  std::vector<NodeId> out;
  for (const auto& [id, task] : network.nodes())
    if (!constrained.contains(id)) out.push_back(id);
  return out;
}

namespace {

// Unifies a network instance with a ground task; returns variable bindings.
std::vector<std::pair<int, int>> unify_or_throw(const TaskInstance& inst, const GroundTask& target,
                                                const GroundModel& model, const std::string& what) {
  if (inst.name != target.signature || inst.args.size() != target.args.size())
    throw ModelError(what + ": task " + model.describe(inst) + " does not match " +
                     model.signatures()[target.signature].name);
  std::vector<std::pair<int, int>> bindings;
  for (std::size_t k = 0; k < inst.args.size(); ++k) {
    int term = inst.args[k];
    if (!is_variable_term(term)) {
      if (term != target.args[k])
        throw ModelError(what + ": argument " + std::to_string(k) + " of " + model.describe(inst) +
                         " does not unify");
      continue;
    }
    int var = variable_index(term);
    auto it = std::find_if(bindings.begin(), bindings.end(), [&](auto& b) { return b.first == var; });
    if (it == bindings.end()) {
      bindings.emplace_back(var, target.args[k]);
    } else if (it->second != target.args[k]) {
      throw ModelError(what + ": repeated variable of " + model.describe(inst) + " bound twice");
    }
  }
  return bindings;
}

}  // namespace

TaskNetwork decompose(const TaskNetwork& network, const NodeId& node, const GroundMethod& method,
                      const GroundModel& model, bool insert_guard) {
  const TaskInstance& inst = network.task(node);
  if (inst.kind != TaskKind::compound)
    throw ModelError("decompose: task '" + node + "' is not compound");
  const auto bindings =
      unify_or_throw(inst, model.tasks()[method.task], model, "decompose with " + method.name);

  const auto preds = network.predecessors(node);
  const auto succs = network.successors(node);
  TaskNetwork out = network;
  out.remove_node(node);

  std::vector<NodeId> inserted;
  inserted.reserve(method.subtasks.size());
  for (const auto& st : method.subtasks) {
    NodeId id = node + "." + st.id;
    out.add_node(id, model.instance_of_task(st.task));
    inserted.push_back(std::move(id));
  }
  for (const auto& [a, b] : method.ordering) out.add_order(inserted[a], inserted[b]);
  for (const auto& id : inserted) {
    for (const auto& p : preds) out.add_order(p, id);
    for (const auto& s : succs) out.add_order(id, s);
  }
  if (insert_guard) {
    NodeId guard = node + ".pre";
    out.add_node(guard, TaskInstance{TaskKind::guard, method.id, {}});
    for (const auto& p : preds) out.add_order(p, guard);
    for (const auto& id : inserted) out.add_order(guard, id);
    for (const auto& s : succs) out.add_order(guard, s);
  }
  for (const auto& [var, obj] : bindings) out.bind(var, obj);
  return out;
}

TaskNetwork bind_primitive(const TaskNetwork& network, const NodeId& node, const GroundOperator& op,
                           const GroundModel& model) {
  const TaskInstance& inst = network.task(node);
  if (inst.kind != TaskKind::primitive)
    throw ModelError("bind_primitive: task '" + node + "' is not primitive");
  const auto bindings = unify_or_throw(inst, model.tasks()[op.task], model, "bind " + op.name);
  TaskNetwork out = network;
  for (const auto& [var, obj] : bindings) out.bind(var, obj);
  return out;
}

bool is_executable(const GroundModel& model, const Plan& plan, const State& state) {
  State current = state;
  for (int step : plan.steps) {
    if (step < 0 || step >= static_cast<int>(model.operators().size())) return false;
    const auto& op = model.operators()[step];
    if (!applicable(op, current)) return false;
    current = progress(current, op, 0);
  }
  return true;
}

}  // namespace riskhtn
