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

#ifndef RISKHTN_MODEL_HPP_
#define RISKHTN_MODEL_HPP_

// Lifted (parameterised) HTN domain and problem descriptions, as read from
// the domain/problem files. Names are kept as strings here; grounding.hpp
// turns them into the integer-indexed ground model used by the planners.

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace riskhtn {

// Terms starting with '?' are variables, anything else names an object.
inline bool is_variable(const std::string& term) {
  return !term.empty() && term.front() == '?';
}

struct Atom {
  std::string predicate;
  std::vector<std::string> args;

  friend bool operator==(const Atom&, const Atom&) = default;
};

struct Literal {
  std::string predicate;
  std::vector<std::string> args;
  bool negated = false;

  friend bool operator==(const Literal&, const Literal&) = default;
};

struct Parameter {
  std::string name;
  std::string type;

  friend bool operator==(const Parameter&, const Parameter&) = default;
};

// One (probability, effect, cost) triple of a cost-variable operator.
struct Outcome {
  double probability = 1.0;
  std::vector<Atom> add;
  std::vector<Atom> del;
  double cost = -1.0;

  friend bool operator==(const Outcome&, const Outcome&) = default;
};

struct OperatorSchema {
  std::string name;
  std::vector<Parameter> params;
  std::vector<Literal> precondition;
  std::vector<Outcome> outcomes;

  friend bool operator==(const OperatorSchema&, const OperatorSchema&) = default;
};

struct PredicateSchema {
  std::string name;
  std::vector<std::string> param_types;

  friend bool operator==(const PredicateSchema&, const PredicateSchema&) = default;
};

struct CompoundTaskSchema {
  std::string name;
  std::vector<std::string> param_types;

  friend bool operator==(const CompoundTaskSchema&, const CompoundTaskSchema&) = default;
};

struct TaskRef {
  std::string name;
  std::vector<std::string> args;

  friend bool operator==(const TaskRef&, const TaskRef&) = default;
};

struct SubtaskSchema {
  std::string id;
  std::string name;
  std::vector<std::string> args;

  friend bool operator==(const SubtaskSchema&, const SubtaskSchema&) = default;
};

using OrderingPair = std::pair<std::string, std::string>;

struct MethodSchema {
  std::string name;
  TaskRef task;
  std::vector<Parameter> params;
  std::vector<Literal> precondition;
  std::vector<SubtaskSchema> subtasks;
  std::vector<OrderingPair> ordering;

  friend bool operator==(const MethodSchema&, const MethodSchema&) = default;
};

struct Domain {
  std::string name;
  // child -> parent; an empty parent marks a root type.
  std::vector<std::pair<std::string, std::string>> types;
  std::vector<PredicateSchema> predicates;
  std::vector<OperatorSchema> operators;
  std::vector<CompoundTaskSchema> compound_tasks;
  std::vector<MethodSchema> methods;

  friend bool operator==(const Domain&, const Domain&) = default;

  const OperatorSchema* find_operator(const std::string& name) const;
  const CompoundTaskSchema* find_compound(const std::string& name) const;
  const PredicateSchema* find_predicate(const std::string& name) const;
};

struct InitialNetwork {
  std::vector<SubtaskSchema> subtasks;
  std::vector<OrderingPair> ordering;

  friend bool operator==(const InitialNetwork&, const InitialNetwork&) = default;
};

struct Problem {
  std::vector<std::pair<std::string, std::string>> objects;  // name -> type
  std::vector<Atom> init;
  InitialNetwork tasks;

  friend bool operator==(const Problem&, const Problem&) = default;
};

// Type hierarchy plus the typed objects of one problem.
class TypedObjectUniverse {
 public:
  TypedObjectUniverse() = default;
  // Throws ModelError on unknown parent types, cycles, duplicate objects or
  // objects of undeclared types.
  TypedObjectUniverse(const std::vector<std::pair<std::string, std::string>>& types,
                      const std::vector<std::pair<std::string, std::string>>& objects);

  std::optional<int> type_id(const std::string& name) const;
  std::optional<int> object_id(const std::string& name) const;
  const std::string& type_name(int type) const { return type_names_[type]; }
  const std::string& object_name(int object) const { return object_names_[object]; }
  int object_type(int object) const { return object_types_[object]; }
  int num_types() const { return static_cast<int>(type_names_.size()); }
  int num_objects() const { return static_cast<int>(object_names_.size()); }

  bool is_subtype(int type, int ancestor) const;
  // Objects whose type is `type` or one of its descendants, in declaration order.
  const std::vector<int>& objects_of(int type) const { return objects_by_type_[type]; }

 private:
  std::vector<std::string> type_names_;
  std::vector<int> parents_;
  std::map<std::string, int> type_index_;
  std::vector<std::string> object_names_;
  std::vector<int> object_types_;
  std::map<std::string, int> object_index_;
  std::vector<std::vector<int>> objects_by_type_;
};

// Probabilities within this distance of summing to one are renormalised.
inline constexpr double kProbabilityTolerance = 1e-9;

// Validates a lifted domain in place: checks names, arities, variable
// binding, orderings and outcome distributions; drops zero-probability
// outcomes and renormalises sums within kProbabilityTolerance. Throws
// ModelError with a path-qualified message on the first violation.
void validate_domain(Domain& domain);

// Checks problem objects, init atoms and the initial network against a
// validated domain.
void validate_problem(const Domain& domain, const Problem& problem);

}  // namespace riskhtn

#endif  // RISKHTN_MODEL_HPP_
