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

#ifndef RISKHTN_SEARCH_HPP_
#define RISKHTN_SEARCH_HPP_

// Result types shared by the state-based and plan-space planners.

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "riskhtn/ground_model.hpp"

namespace riskhtn {

struct SearchBounds {
  int max_depth = 64;                // decompositions along one path
  std::size_t max_nodes = 1'000'000;  // node expansions
};

enum class SearchStatus : std::uint8_t { solved, proven_failure, bounds_exhausted };

std::string_view to_string(SearchStatus status);

struct SearchStats {
  std::size_t nodes_expanded = 0;
  std::size_t nodes_generated = 0;
  double runtime_ms = 0;
};

// One step of the derivation that produced a plan.
struct TraceEntry {
  enum class Kind : std::uint8_t { decompose, execute, bind };
  Kind kind = Kind::decompose;
  NodeId node;
  int ref = -1;  // ground method (decompose) or ground operator (execute, bind)

  friend bool operator==(const TraceEntry&, const TraceEntry&) = default;
};

struct SearchResult {
  SearchStatus status = SearchStatus::proven_failure;
  Plan plan;
  double expected_utility = 0;
  SearchStats stats;
  std::vector<TraceEntry> trace;
};

}  // namespace riskhtn

#endif  // RISKHTN_SEARCH_HPP_
