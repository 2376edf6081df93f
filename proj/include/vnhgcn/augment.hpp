// Copyright 2026 The vnhgcn Authors.
//
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


#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "vnhgcn/graph.hpp"

namespace vnhgcn {

enum class Assignment { kUniformRandom, kRoundRobin };

std::string to_string(Assignment a);
Assignment parse_assignment(const std::string& s);

struct AugmentationConfig {
  Index n_virtual = 16;
  std::uint64_t seed = 0;
  Index central_dim = 64;
  Assignment assignment = Assignment::kUniformRandom;

  void validate() const;
};

/// A graph rewritten with N_V type-level virtual nodes per real type and
/// one central node. Real types keep their ids; the virtual type of real
/// type t is num_real + t and the central type is 2 * num_real.
struct AugmentedGraph {
  HeteroGraph graph;
  std::vector<Index> real_type_map;
  std::vector<Index> virtual_type_map;
  Index central_type = 0;
  /// Real <-> virtual relations; the only ones drop-edge may touch.
  std::vector<Index> virtual_edge_relations;
  /// Per relation id, true if it is a real <-> virtual relation.
  std::vector<bool> droppable;
  /// assignment_table[t][v] = virtual node that real node v of type t attaches to.
  std::vector<std::vector<Index>> assignment_table;
  AugmentationConfig config;

  Index num_real_types() const { return static_cast<Index>(real_type_map.size()); }
};

AugmentedGraph augment(const HeteroGraph& graph, const AugmentationConfig& cfg);

/// Adjacency of every relation of `graph` after removing each connection of
/// the listed relations independently with probability `rate`. A dropped
/// connection disappears from the relation and from its inverse.
std::vector<TypedAdjacency> drop_edges(const HeteroGraph& graph, std::span<const Index> relations, double rate,
                                       std::uint64_t seed);

/// Adjacency of every relation after removing each real <-> virtual
/// connection independently with probability `rate`. A dropped connection
/// disappears from both directions. Other relations are returned unchanged.
std::vector<TypedAdjacency> drop_virtual_edges(const AugmentedGraph& aug, double rate, std::uint64_t seed);

/// Copy of `aug` whose adjacency has been through drop_virtual_edges.
AugmentedGraph sample_drop_edge(const AugmentedGraph& aug, double rate, std::uint64_t seed);

/// Human-readable dump of the augmented schema and assignment table.
std::string describe(const AugmentedGraph& aug, Index max_rows_per_type = 20);

}  // namespace vnhgcn
