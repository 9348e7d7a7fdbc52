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

#ifndef RISKHTN_CVTDG_HPP_
#define RISKHTN_CVTDG_HPP_

// Cost-variable task decomposition graph: the ground task/method graph
// reachable from an initial network, with expected-utility annotations
// used as planner heuristics.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "riskhtn/ground_model.hpp"
#include "riskhtn/utility.hpp"

namespace riskhtn {

enum class VertexKind : std::uint8_t { compound, primitive, method };

struct CvtdgVertex {
  VertexKind kind = VertexKind::compound;
  int ref = -1;               // ground task id, or ground method id for method vertices
  std::vector<int> children;  // compound -> methods, method -> subtasks (vertex ids)
  CostDistribution costs;     // primitive vertices only
};

struct VertexAnnotation {
  double eu = 0;
  double risk_cost = 0;  // additive form of eu, see risk_cost()
  bool bounded = true;   // false: unconverged recursion, reported as EU 0^-
};

// Holds a pointer to the ground model it was built from; the model must
// outlive the graph.
class Cvtdg {
 public:
  const GroundModel& model() const { return *model_; }
  const std::vector<CvtdgVertex>& vertices() const { return vertices_; }
  std::optional<int> vertex_of_task(int task) const;
  std::optional<int> vertex_of_method(int method) const;
  const std::vector<int>& roots() const { return roots_; }

  std::size_t count(VertexKind kind) const;
  std::size_t num_edges() const;

  // Reachable compound tasks without methods and methods dropped because a
  // primitive subtask has no applicable operator instance.
  const std::vector<std::string>& diagnostics() const { return diagnostics_; }

  bool annotated() const { return !annotations_.empty(); }
  const UtilitySpec& spec() const { return spec_; }
  const VertexAnnotation& annotation(int vertex) const { return annotations_.at(vertex); }
  // Annotation of a ground task's vertex; +inf risk cost for tasks outside
  // the graph.
  double task_risk_cost(int task) const;
  double task_eu(int task) const;

  std::string describe_vertex(int vertex) const;

 private:
  friend Cvtdg build_cvtdg(const GroundModel&, const TaskNetwork&);
  friend Cvtdg annotate_expected_utilities(const Cvtdg&, const UtilitySpec&, int);

  const GroundModel* model_ = nullptr;
  std::vector<CvtdgVertex> vertices_;
  std::vector<int> task_vertex_;    // ground task id -> vertex or -1
  std::vector<int> method_vertex_;  // ground method id -> vertex or -1
  std::vector<int> roots_;
  std::vector<std::string> diagnostics_;
  UtilitySpec spec_;
  std::vector<VertexAnnotation> annotations_;
};

// Vertices reachable by decomposition from the network's tasks (lifted tasks
// contribute every compatible ground task). Throws ModelError when a task of
// the initial network has no grounding or is a compound task without methods.
Cvtdg build_cvtdg(const GroundModel& model, const TaskNetwork& network);

inline constexpr int kDefaultUnfold = 10;

// Primitive: EU(o). Method: eu_from_risk_cost of the summed child risk
// costs (an empty method has EU 0). Compound: max over its methods.
// Recursive components are iterated k_unfold rounds from the optimistic
// value 0; components that do not reach a fixed point, and everything above
// them, are reported unbounded (EU 0^-). Dead ends get -inf.
// Throws ModelError for one-switch specs or k_unfold < 1.
Cvtdg annotate_expected_utilities(const Cvtdg& graph, const UtilitySpec& spec,
                                  int k_unfold = kDefaultUnfold);

// Compound/primitive vertices whose task name matches and whose arguments
// unify with the instance, ascending. Throws ModelError for an unknown task
// name (or a guard instance).
std::vector<int> compatible_groundings(const TaskInstance& task, const Cvtdg& graph);

}  // namespace riskhtn

#endif  // RISKHTN_CVTDG_HPP_
