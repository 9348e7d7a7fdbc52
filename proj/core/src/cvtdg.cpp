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

#include "riskhtn/cvtdg.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <limits>

#include "riskhtn/error.hpp"

namespace riskhtn {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

std::optional<int> Cvtdg::vertex_of_task(int task) const {
  if (task < 0 || task >= static_cast<int>(task_vertex_.size()) || task_vertex_[task] < 0)
    return std::nullopt;
  return task_vertex_[task];
}

std::optional<int> Cvtdg::vertex_of_method(int method) const {
  if (method < 0 || method >= static_cast<int>(method_vertex_.size()) || method_vertex_[method] < 0)
    return std::nullopt;
  return method_vertex_[method];
}

std::size_t Cvtdg::count(VertexKind kind) const {
  return static_cast<std::size_t>(
      std::count_if(vertices_.begin(), vertices_.end(), [&](const auto& v) { return v.kind == kind; }));
}

std::size_t Cvtdg::num_edges() const {
  std::size_t n = 0;
  for (const auto& v : vertices_) n += v.children.size();
  return n;
}

double Cvtdg::task_risk_cost(int task) const {
  auto v = vertex_of_task(task);
  if (!v) return kInf;
  return annotation(*v).risk_cost;
}

double Cvtdg::task_eu(int task) const {
  auto v = vertex_of_task(task);
  if (!v) return -kInf;
  return annotation(*v).eu;
}

std::string Cvtdg::describe_vertex(int vertex) const {
  const auto& v = vertices_.at(vertex);
  if (v.kind == VertexKind::method) return model_->describe_method(v.ref);
  return model_->describe_task(v.ref);
}

Cvtdg build_cvtdg(const GroundModel& model, const TaskNetwork& network) {
  Cvtdg g;
  g.model_ = &model;
  g.task_vertex_.assign(model.tasks().size(), -1);
  g.method_vertex_.assign(model.methods().size(), -1);

  std::deque<int> queue;
  auto task_vertex = [&](int task) {
    if (g.task_vertex_[task] >= 0) return g.task_vertex_[task];
    CvtdgVertex v;
    const GroundTask& gt = model.tasks()[task];
    v.ref = task;
    if (model.is_primitive_task(task)) {
      v.kind = VertexKind::primitive;
      v.costs = model.operators()[gt.op].costs;
    } else {
      v.kind = VertexKind::compound;
    }
    g.task_vertex_[task] = static_cast<int>(g.vertices_.size());
    g.vertices_.push_back(std::move(v));
    queue.push_back(g.task_vertex_[task]);
    return g.task_vertex_[task];
  };

  for (const auto& [id, inst] : network.nodes()) {
    if (inst.kind == TaskKind::guard) continue;
    auto tasks = model.compatible_tasks(inst);
    std::erase_if(tasks, [&](int t) { return model.is_primitive_task(t) && model.tasks()[t].op < 0; });
    if (tasks.empty())
      throw ModelError("initial task '" + id + "' (" + model.describe(inst) + ") has no grounding");
    for (int t : tasks) {
      if (!model.is_primitive_task(t) && model.tasks()[t].methods.empty() && inst.is_ground())
        throw ModelError("initial task '" + id + "' (" + model.describe(inst) +
                         ") is a compound task without methods");
      int v = task_vertex(t);
      if (std::find(g.roots_.begin(), g.roots_.end(), v) == g.roots_.end()) g.roots_.push_back(v);
    }
  }

  while (!queue.empty()) {
    const int vid = queue.front();
    queue.pop_front();
    if (g.vertices_[vid].kind != VertexKind::compound) continue;
    const int task = g.vertices_[vid].ref;
    const auto& methods = model.tasks()[task].methods;
    if (methods.empty()) {
      g.diagnostics_.push_back("dead-end compound task " + model.describe_task(task));
      continue;
    }
    for (int m : methods) {
      const GroundMethod& gm = model.methods()[m];
      auto missing = std::find_if(gm.subtasks.begin(), gm.subtasks.end(), [&](const GroundSubtask& st) {
        return model.is_primitive_task(st.task) && model.tasks()[st.task].op < 0;
      });
      if (missing != gm.subtasks.end()) {
        g.diagnostics_.push_back("method " + model.describe_method(m) + " dropped: no operator for " +
                                 model.describe_task(missing->task));
        continue;
      }
      int mv = g.method_vertex_[m];
      if (mv < 0) {
        mv = static_cast<int>(g.vertices_.size());
        g.method_vertex_[m] = mv;
        g.vertices_.push_back(CvtdgVertex{VertexKind::method, m, {}, {}});
        std::vector<int> children;
        for (const auto& st : gm.subtasks) children.push_back(task_vertex(st.task));
        g.vertices_[mv].children = std::move(children);
      }
      g.vertices_[vid].children.push_back(mv);
    }
  }
  return g;
}

Cvtdg annotate_expected_utilities(const Cvtdg& graph, const UtilitySpec& spec, int k_unfold) {
  if (!spec.is_static())
    throw ModelError("the decomposition graph cannot be annotated with a one-switch utility");
  if (k_unfold < 1) throw ModelError("k_unfold must be at least 1");
  Cvtdg g = graph;
  g.spec_ = spec;
  const auto& vs = g.vertices_;
  const std::size_t n = vs.size();
  std::vector<double> cost(n, 0.0);
  std::vector<bool> bounded(n, true);

  for (std::size_t v = 0; v < n; ++v)
    if (vs[v].kind == VertexKind::primitive) cost[v] = risk_cost(spec, vs[v].costs);

  auto update = [&](int v) {
    const auto& vx = vs[v];
    if (vx.kind == VertexKind::method) {
      double s = 0;
      for (int c : vx.children) s += cost[c];
      return s;
    }
    double best = kInf;
    for (int c : vx.children) best = std::min(best, cost[c]);
    return best;
  };

  // Tarjan's algorithm; components come out children-first.
  std::vector<int> index(n, -1), low(n, 0), comp(n, -1);
  std::vector<bool> on_stack(n, false);
  std::vector<int> stack;
  std::vector<std::vector<int>> components;
  int counter = 0;
  std::function<void(int)> strongconnect = [&](int v) {
    index[v] = low[v] = counter++;
    stack.push_back(v);
    on_stack[v] = true;
    for (int w : vs[v].children) {
      if (index[w] < 0) {
        strongconnect(w);
        low[v] = std::min(low[v], low[w]);
      } else if (on_stack[w]) {
        low[v] = std::min(low[v], index[w]);
      }
    }
    if (low[v] == index[v]) {
      std::vector<int> c;
      int w;
      do {
        w = stack.back();
        stack.pop_back();
        on_stack[w] = false;
        comp[w] = static_cast<int>(components.size());
        c.push_back(w);
      } while (w != v);
      std::sort(c.begin(), c.end());
      components.push_back(std::move(c));
    }
  };
  for (std::size_t v = 0; v < n; ++v)
    if (index[v] < 0) strongconnect(static_cast<int>(v));

  for (const auto& c : components) {
    if (vs[c.front()].kind == VertexKind::primitive) continue;
    bool tainted = false;
    for (int v : c)
      for (int w : vs[v].children)
        if (comp[w] != comp[v] && !bounded[w]) tainted = true;
    const bool cyclic =
        c.size() > 1 || std::find(vs[c[0]].children.begin(), vs[c[0]].children.end(), c[0]) !=
                            vs[c[0]].children.end();
    if (!cyclic && !tainted) {
      cost[c[0]] = update(c[0]);
      continue;
    }
    bool converged = false;
    if (!tainted) {
      for (int v : c) cost[v] = 0.0;
      for (int round = 0; round < k_unfold && !converged; ++round) {
        std::vector<double> next(c.size());
        for (std::size_t i = 0; i < c.size(); ++i) next[i] = update(c[i]);
        converged = true;
        for (std::size_t i = 0; i < c.size(); ++i) {
          if (next[i] != cost[c[i]]) converged = false;
          cost[c[i]] = next[i];
        }
      }
    }
    if (!converged)
      for (int v : c) {
        cost[v] = 0.0;
        bounded[v] = false;
      }
  }

  g.annotations_.resize(n);
  for (std::size_t v = 0; v < n; ++v) {
    auto& a = g.annotations_[v];
    a.risk_cost = cost[v];
    a.bounded = bounded[v];
    a.eu = vs[v].kind == VertexKind::primitive ? operator_eu(spec, vs[v].costs)
                                               : eu_from_risk_cost(spec, cost[v]);
  }
  return g;
}

std::vector<int> compatible_groundings(const TaskInstance& task, const Cvtdg& graph) {
  const GroundModel& model = graph.model();
  if (task.kind == TaskKind::guard || task.name < 0 ||
      task.name >= static_cast<int>(model.signatures().size()))
    throw ModelError("compatible_groundings: unknown task name");
  std::vector<int> out;
  for (int t : model.compatible_tasks(task))
    if (auto v = graph.vertex_of_task(t)) out.push_back(*v);
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace riskhtn
