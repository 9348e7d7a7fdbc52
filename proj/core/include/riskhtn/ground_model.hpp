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

#ifndef RISKHTN_GROUND_MODEL_HPP_
#define RISKHTN_GROUND_MODEL_HPP_

// Ground (variable-free) HTN model: states, cost-variable operators,
// methods, task networks, and the primitive operations on them.

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "riskhtn/model.hpp"
#include "riskhtn/utility.hpp"

namespace riskhtn {

using AtomId = int;

// Closed-world state: the set of ground atoms that hold.
class State {
 public:
  State() = default;
  explicit State(std::vector<AtomId> atoms);

  bool contains(AtomId atom) const;
  const std::vector<AtomId>& atoms() const { return atoms_; }
  std::size_t size() const { return atoms_.size(); }

  // (this \ del) U add
  State apply(const std::vector<AtomId>& add, const std::vector<AtomId>& del) const;

  friend bool operator==(const State&, const State&) = default;
  friend auto operator<=>(const State&, const State&) = default;

 private:
  std::vector<AtomId> atoms_;  // sorted, unique
};

struct Effect {
  std::vector<AtomId> add;
  std::vector<AtomId> del;

  friend bool operator==(const Effect&, const Effect&) = default;
};

struct GroundOperator {
  int id = -1;
  int task = -1;  // ground primitive task this operator executes
  std::string name;
  std::vector<int> args;
  std::vector<AtomId> pre_pos;
  std::vector<AtomId> pre_neg;
  std::vector<Effect> effects;  // parallel to costs
  CostDistribution costs;
};

struct GroundSubtask {
  std::string id;
  int task = -1;
};

struct GroundMethod {
  int id = -1;
  int task = -1;  // ground compound task this method decomposes
  std::string name;
  std::vector<int> bindings;  // one object per method parameter
  std::vector<AtomId> pre_pos;
  std::vector<AtomId> pre_neg;
  std::vector<GroundSubtask> subtasks;
  std::vector<std::pair<int, int>> ordering;  // indices into subtasks
};

// A task name with its parameter types; primitive names coincide with
// operator names.
struct TaskSignature {
  std::string name;
  bool primitive = false;
  std::vector<int> param_types;
};

struct GroundTask {
  int signature = -1;
  std::vector<int> args;
  int op = -1;               // primitive: the executing operator, -1 if none survived grounding
  std::vector<int> methods;  // compound: decomposing methods
};

enum class TaskKind : std::uint8_t { primitive, compound, guard };

// A task occurrence inside a task network. Arguments are object ids (>= 0)
// or network variables (< 0, see variable_term()). Guard nodes carry the
// preconditions of a method whose check has been deferred; `name` is then
// the ground method id and `args` is empty.
struct TaskInstance {
  TaskKind kind = TaskKind::primitive;
  int name = -1;
  std::vector<int> args;

  bool is_ground() const;

  friend bool operator==(const TaskInstance&, const TaskInstance&) = default;
  friend auto operator<=>(const TaskInstance&, const TaskInstance&) = default;
};

constexpr int variable_term(int index) { return -(index + 1); }
constexpr bool is_variable_term(int term) { return term < 0; }
constexpr int variable_index(int term) { return -term - 1; }

using NodeId = std::string;

// A set of uniquely identified task instances with a strict partial order.
// The order is stored transitively closed, so equal partial orders give equal
// networks regardless of the order in which constraints were added.
class TaskNetwork {
 public:
  void add_node(const NodeId& id, TaskInstance task);
  void add_order(const NodeId& before, const NodeId& after);

  bool empty() const { return nodes_.empty(); }
  std::size_t size() const { return nodes_.size(); }
  bool contains(const NodeId& id) const { return nodes_.contains(id); }
  const TaskInstance& task(const NodeId& id) const;
  const std::map<NodeId, TaskInstance>& nodes() const { return nodes_; }
  const std::set<std::pair<NodeId, NodeId>>& order() const { return order_; }

  std::vector<NodeId> predecessors(const NodeId& id) const;
  std::vector<NodeId> successors(const NodeId& id) const;

  // Removes a node with no predecessors (an executed primitive or a checked
  // guard). Throws ModelError if the node is unknown or still constrained.
  void remove_unconstrained(const NodeId& id);

  // Removes a node anywhere in the network; every (predecessor, successor)
  // pair of the removed node is kept ordered.
  void remove_node(const NodeId& id);

  // Replaces every occurrence of network variable `variable` by `object`.
  void bind(int variable, int object);

  bool is_acyclic() const;
  // Stable textual key; equal networks have equal keys.
  std::string canonical_key() const;

  friend bool operator==(const TaskNetwork&, const TaskNetwork&) = default;

 private:
  std::map<NodeId, TaskInstance> nodes_;
  std::set<std::pair<NodeId, NodeId>> order_;
};

struct Plan {
  std::vector<int> steps;  // ground operator ids

  friend bool operator==(const Plan&, const Plan&) = default;
  friend auto operator<=>(const Plan&, const Plan&) = default;
};

struct GroundingOptions {
  // Drop operators and methods whose preconditions contradict a rigid atom
  // (one that no operator adds or deletes) of the initial state.
  bool relevance_filter = true;
};

class GroundModel {
 public:
  const TypedObjectUniverse& universe() const { return universe_; }
  const std::string& domain_name() const { return domain_name_; }

  int num_atoms() const { return static_cast<int>(atoms_.size()); }
  std::string atom_name(AtomId atom) const;
  std::optional<AtomId> find_atom(const std::string& predicate, const std::vector<int>& args) const;

  const std::vector<TaskSignature>& signatures() const { return signatures_; }
  std::optional<int> find_signature(const std::string& name) const;
  const std::vector<GroundTask>& tasks() const { return tasks_; }
  std::optional<int> find_task(int signature, const std::vector<int>& args) const;
  bool is_primitive_task(int task) const { return signatures_[tasks_[task].signature].primitive; }

  const std::vector<GroundOperator>& operators() const { return operators_; }
  const std::vector<GroundMethod>& methods() const { return methods_; }

  const State& initial_state() const { return initial_state_; }
  const TaskNetwork& initial_network() const { return initial_network_; }
  const std::vector<std::string>& variable_names() const { return variable_names_; }

  // True iff every operator's outcomes share one add/delete effect.
  bool effect_deterministic() const { return effect_deterministic_; }

  // Ground tasks whose signature matches and whose arguments unify with the
  // (possibly partially bound) instance, in ascending id order.
  std::vector<int> compatible_tasks(const TaskInstance& task) const;

  // The ground task of a fully ground primitive/compound instance.
  std::optional<int> ground_task_of(const TaskInstance& task) const;

  TaskInstance instance_of_task(int task) const;

  std::string describe_task(int task) const;
  std::string describe(const TaskInstance& task) const;
  std::string describe_operator(int op) const;
  std::string describe_method(int method) const;

  // Cost distributions of a plan's steps, in order.
  std::vector<CostDistribution> distributions(const Plan& plan) const;

 private:
  friend GroundModel ground(const Domain&, const Problem&, const GroundingOptions&);
  friend class GroundModelBuilder;

  std::string domain_name_;
  TypedObjectUniverse universe_;
  std::vector<std::string> predicate_names_;
  std::map<std::string, int> predicate_index_;
  std::vector<std::pair<int, std::vector<int>>> atoms_;
  std::map<std::pair<int, std::vector<int>>, AtomId> atom_index_;
  std::vector<TaskSignature> signatures_;
  std::map<std::string, int> signature_index_;
  std::vector<GroundTask> tasks_;
  std::map<std::pair<int, std::vector<int>>, int> task_index_;
  std::vector<std::vector<int>> tasks_by_signature_;
  std::vector<GroundOperator> operators_;
  std::vector<GroundMethod> methods_;
  State initial_state_;
  TaskNetwork initial_network_;
  std::vector<std::string> variable_names_;
  bool effect_deterministic_ = true;
};

// Full typed instantiation of every operator and method. Throws ModelError
// on argument/parameter type mismatches and undeclared predicates or objects.
GroundModel ground(const Domain& domain, const Problem& problem,
                   const GroundingOptions& options = {});

// Every positive precondition holds and no negated one does.
bool applicable(const GroundOperator& op, const State& state);
bool applicable(const GroundMethod& method, const State& state);
// Applicability of a network task: primitive -> its operator, guard -> its
// method's preconditions, compound -> some decomposing method. Throws
// ModelError for non-ground instances.
bool applicable(const GroundModel& model, const TaskInstance& task, const State& state);

// (state \ del_i) U add_i. Throws ModelError if the operator is not
// applicable or the outcome index is out of range.
State progress(const State& state, const GroundOperator& op, std::size_t outcome);

// Ids of the nodes without predecessors, in id order.
std::vector<NodeId> find_unconstrained_tasks(const TaskNetwork& network);

// Replaces compound node `node` by the method's subtasks, with ids
// node + "." + subtask id. Unifies the node's arguments with the method's
// task (binding network variables throughout). Predecessors and successors
// of the node are inherited by every inserted task. With `insert_guard`, a
// guard node node + ".pre" carrying the method preconditions is placed
// after the node's predecessors and before the inserted tasks.
// Throws ModelError on an unknown node or a task/method mismatch.
TaskNetwork decompose(const TaskNetwork& network, const NodeId& node, const GroundMethod& method,
                      const GroundModel& model, bool insert_guard = false);

// Binds the variables of primitive node `node` to the arguments of ground
// operator `op`. Throws ModelError when they do not unify.
TaskNetwork bind_primitive(const TaskNetwork& network, const NodeId& node, const GroundOperator& op,
                           const GroundModel& model);

// Sequential applicability of the plan from `state`, taking each step's
// first outcome (all outcomes share effects in effect-deterministic models).
bool is_executable(const GroundModel& model, const Plan& plan, const State& state);

}  // namespace riskhtn

#endif  // RISKHTN_GROUND_MODEL_HPP_
