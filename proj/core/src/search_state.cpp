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

#include "riskhtn/search_state.hpp"

#include <chrono>
#include <memory>
#include <queue>
#include <unordered_map>

#include "riskhtn/error.hpp"

namespace riskhtn {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct FringeEntry {
  std::shared_ptr<const SearchNode> node;
  std::uint64_t seq;
};

// std::priority_queue pops the largest element, so "a < b" means b first.
struct FringeOrder {
  bool operator()(const FringeEntry& a, const FringeEntry& b) const {
    const double fa = a.node->f_cost(), fb = b.node->f_cost();
    if (fa != fb) return fa > fb;
    const auto ra = a.node->network.size(), rb = b.node->network.size();
    if (ra != rb) return ra > rb;
    if (a.node->plan_prefix != b.node->plan_prefix) return a.node->plan_prefix > b.node->plan_prefix;
    return a.seq > b.seq;
  }
};

std::string node_key(const SearchNode& n) {
  std::string key;
  for (AtomId a : n.state.atoms()) key += std::to_string(a) + ",";
  key += "#";
  key += n.network.canonical_key();
  return key;
}

}  // namespace

RcHeuristic::RcHeuristic(const GroundModel& model, const UtilitySpec& spec) : model_(&model), spec_(spec) {
  if (!spec.is_static()) throw ModelError("the relaxed-model heuristic needs a static utility");
  const int atoms = model.num_atoms();
  num_facts_ = static_cast<std::size_t>(atoms) + model.tasks().size();
  for (const auto& op : model.operators()) {
    Action a;
    a.pre = op.pre_pos;
    for (const auto& e : op.effects) a.add.insert(a.add.end(), e.add.begin(), e.add.end());
    a.add.push_back(atoms + op.task);
    a.cost = risk_cost(spec, op.costs);
    actions_.push_back(std::move(a));
  }
  for (const auto& m : model.methods()) {
    Action a;
    for (const auto& st : m.subtasks) a.pre.push_back(atoms + st.task);
    std::sort(a.pre.begin(), a.pre.end());
    a.pre.erase(std::unique(a.pre.begin(), a.pre.end()), a.pre.end());
    a.add.push_back(atoms + m.task);
    actions_.push_back(std::move(a));
  }
  consumers_.resize(num_facts_);
  for (std::size_t i = 0; i < actions_.size(); ++i)
    for (int f : actions_[i].pre) consumers_[f].push_back(static_cast<int>(i));
}

double RcHeuristic::cost(const State& state, const TaskNetwork& network) const {
  if (network.empty()) return 0.0;
  std::vector<double> fact_cost(num_facts_, kInf);
  std::vector<int> missing(actions_.size());
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
  auto reach = [&](int f, double c) {
    if (c < fact_cost[f]) {
      fact_cost[f] = c;
      queue.emplace(c, f);
    }
  };
  for (AtomId a : state.atoms()) reach(a, 0.0);
  for (std::size_t i = 0; i < actions_.size(); ++i) {
    missing[i] = static_cast<int>(actions_[i].pre.size());
    if (missing[i] == 0)
      for (int f : actions_[i].add) reach(f, actions_[i].cost);
  }
  std::vector<bool> done(num_facts_, false);
  while (!queue.empty()) {
    auto [c, f] = queue.top();
    queue.pop();
    if (done[f]) continue;
    done[f] = true;
    for (int i : consumers_[f]) {
      if (--missing[i] != 0) continue;
      // h_max: the action becomes reachable at the cost of its latest precondition.
      for (int g : actions_[i].add) reach(g, c + actions_[i].cost);
    }
  }
  const int atoms = model_->num_atoms();
  double h = 0;
  for (const auto& [id, task] : network.nodes()) {
    if (task.kind == TaskKind::guard) continue;
    double best = kInf;
    if (task.is_ground()) {
      if (auto t = model_->ground_task_of(task)) best = fact_cost[atoms + *t];
    } else {
      for (int t : model_->compatible_tasks(task)) best = std::min(best, fact_cost[atoms + t]);
    }
    h = std::max(h, best);
  }
  return h;
}

double compute_rc_heuristic(const SearchNode& node, const GroundModel& model, const UtilitySpec& spec) {
  RcHeuristic h(model, spec);
  return eu_from_risk_cost(spec, h.cost(node.state, node.network));
}

double combine(double g_eu, double h_eu, const UtilitySpec& spec) {
  if (!spec.is_static()) throw ModelError("combine needs a static utility");
  if (h_eu == -kInf || g_eu == -kInf) return -kInf;
  if (spec.kind == UtilityKind::linear) return g_eu + h_eu;
  const double k = spec.a * spec.alpha;
  const double pg = 1 + k * g_eu, ph = 1 + k * h_eu;
  return spec.a * (pg * ph - 1) / spec.alpha;
}

std::vector<SearchNode> expand(const SearchNode& node, const GroundModel& model,
                               const RcHeuristic& heuristic) {
  std::vector<SearchNode> out;
  for (const auto& id : find_unconstrained_tasks(node.network)) {
    const TaskInstance& inst = node.network.task(id);
    if (inst.kind == TaskKind::guard) continue;
    std::vector<int> candidates;
    if (inst.is_ground()) {
      if (auto t = model.ground_task_of(inst)) candidates.push_back(*t);
    } else {
      candidates = model.compatible_tasks(inst);
    }
    for (int t : candidates) {
      const GroundTask& gt = model.tasks()[t];
      if (inst.kind == TaskKind::primitive) {
        if (gt.op < 0) continue;
        const GroundOperator& op = model.operators()[gt.op];
        if (!applicable(op, node.state)) continue;
        SearchNode s;
        s.network = inst.is_ground() ? node.network : bind_primitive(node.network, id, op, model);
        s.network.remove_unconstrained(id);
        s.state = progress(node.state, op, 0);
        s.plan_prefix = node.plan_prefix;
        s.plan_prefix.push_back(op.id);
        s.trace = node.trace;
        s.trace.push_back({TraceEntry::Kind::execute, id, op.id});
        s.g_cost = node.g_cost + heuristic.action_cost(static_cast<std::size_t>(op.id));
        s.depth = node.depth;
        out.push_back(std::move(s));
      } else {
        for (int m : gt.methods) {
          const GroundMethod& method = model.methods()[m];
          if (!applicable(method, node.state)) continue;
          SearchNode s;
          s.network = decompose(node.network, id, method, model);
          s.state = node.state;
          s.plan_prefix = node.plan_prefix;
          s.trace = node.trace;
          s.trace.push_back({TraceEntry::Kind::decompose, id, m});
          s.g_cost = node.g_cost;
          s.depth = node.depth + 1;
          out.push_back(std::move(s));
        }
      }
    }
  }
  for (auto& s : out) s.h_cost = heuristic.cost(s.state, s.network);
  return out;
}

SearchResult find_plans(const GroundModel& model, const UtilitySpec& spec, const SearchBounds& bounds,
                        const ExpandObserver& on_expand) {
  if (!spec.is_static()) throw ModelError("planning needs a static utility; one-switch does not segment");
  if (!model.effect_deterministic())
    throw ModelError("state-based search needs an effect-deterministic model");
  const auto start = std::chrono::steady_clock::now();
  const RcHeuristic heuristic(model, spec);
  SearchResult result;
  auto finish = [&](SearchStatus status) {
    result.status = status;
    result.stats.runtime_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    return result;
  };

  auto root = std::make_shared<SearchNode>();
  root->state = model.initial_state();
  root->network = model.initial_network();
  root->h_cost = heuristic.cost(root->state, root->network);
  if (root->h_cost == kInf) return finish(SearchStatus::proven_failure);

  std::priority_queue<FringeEntry, std::vector<FringeEntry>, FringeOrder> fringe;
  struct Seen {
    double g;
    int depth;
  };
  std::unordered_map<std::string, Seen> seen;
  std::uint64_t seq = 0;
  seen[node_key(*root)] = {0.0, 0};
  fringe.push({root, seq++});
  result.stats.nodes_generated = 1;
  bool depth_pruned = false;

  while (!fringe.empty()) {
    auto node = fringe.top().node;
    fringe.pop();
    const Seen& best = seen.at(node_key(*node));
    if (best.g < node->g_cost && best.depth <= node->depth) continue;
    if (node->network.empty()) {
      const Plan plan{node->plan_prefix};
      if (!is_executable(model, plan, model.initial_state())) continue;
      result.plan = plan;
      result.expected_utility = plan_eu_segmented(spec, model.distributions(plan));
      result.trace = node->trace;
      return finish(SearchStatus::solved);
    }
    if (result.stats.nodes_expanded >= bounds.max_nodes) return finish(SearchStatus::bounds_exhausted);
    if (on_expand) on_expand(*node);
    ++result.stats.nodes_expanded;
    for (auto& s : expand(*node, model, heuristic)) {
      if (s.depth > bounds.max_depth) {
        depth_pruned = true;
        continue;
      }
      if (s.h_cost == kInf) continue;
      ++result.stats.nodes_generated;
      const std::string key = node_key(s);
      auto it = seen.find(key);
      if (it != seen.end() && it->second.g <= s.g_cost && it->second.depth <= s.depth) continue;
      seen[key] = {s.g_cost, s.depth};
      fringe.push({std::make_shared<const SearchNode>(std::move(s)), seq++});
    }
  }
  return finish(depth_pruned ? SearchStatus::bounds_exhausted : SearchStatus::proven_failure);
}

}  // namespace riskhtn
