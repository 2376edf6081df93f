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

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "vnhgcn/common.hpp"
#include "vnhgcn/sparse.hpp"

namespace vnhgcn {

struct NodeType {
  Index index = 0;
  std::string name;
  bool operator==(const NodeType&) const = default;
};

/// A directed relation src_type -> dst_type. Every relation is paired with
/// its inverse so an undirected connection is stored once per direction.
struct Relation {
  Index index = 0;
  std::string name;
  Index src_type = 0;
  Index dst_type = 0;
  Index inverse = 0;
  bool operator==(const Relation&) const = default;
};

/// Meta-graph over node types whose edges are the permitted relations.
class NetworkSchema {
 public:
  Index add_node_type(std::string name);
  /// Adds `name` (src -> dst) and `inverse_name` (dst -> src); returns both ids.
  std::pair<Index, Index> add_relation_pair(std::string name, std::string inverse_name, Index src_type,
                                            Index dst_type);

  const std::vector<NodeType>& node_types() const { return node_types_; }
  const std::vector<Relation>& relations() const { return relations_; }
  Index num_types() const { return static_cast<Index>(node_types_.size()); }
  Index num_relations() const { return static_cast<Index>(relations_.size()); }
  const NodeType& type(Index t) const { return node_types_.at(static_cast<std::size_t>(t)); }
  const Relation& relation(Index r) const { return relations_.at(static_cast<std::size_t>(r)); }

  std::optional<Index> find_type(std::string_view name) const;
  std::optional<Index> find_relation(std::string_view name) const;

  /// Relations whose destination (row) type is `type`, in id order.
  std::vector<Index> incoming(Index type) const;

  /// Throws StructuralError on dangling endpoint types, duplicate names or a
  /// broken inverse pairing.
  void validate() const;

  bool operator==(const NetworkSchema&) const = default;

 private:
  std::vector<NodeType> node_types_;
  std::vector<Relation> relations_;
};

/// Binary adjacency of one relation: rows are destination-type nodes,
/// columns are source-type nodes.
using TypedAdjacency = CsrMatrix<double>;
/// D^-1 A of a TypedAdjacency.
using RowNormalizedAdjacency = CsrMatrix<double>;

/// (src, dst) node pairs of one relation, 0-based within each type.
using EdgeList = std::vector<std::pair<Index, Index>>;

/// Class labels on the designated target type; -1 marks an unlabeled node.
struct TargetLabels {
  Index type = 0;
  Index num_classes = 0;
  std::vector<int> labels;

  /// Indices of nodes carrying a label, ascending.
  std::vector<Index> labeled_nodes() const;
  bool operator==(const TargetLabels&) const = default;
};

struct NodeRef {
  Index type = 0;
  Index node = 0;
  auto operator<=>(const NodeRef&) const = default;
};

struct HeteroGraph {
  NetworkSchema schema;
  std::vector<Index> node_counts;
  std::vector<Matrix> features;
  std::vector<TypedAdjacency> adjacency;
  std::optional<TargetLabels> target;

  Index num_types() const { return schema.num_types(); }
  Index total_nodes() const;
  Index feature_dim(Index t) const { return features.at(static_cast<std::size_t>(t)).cols(); }
  const TypedAdjacency& adj(Index r) const { return adjacency.at(static_cast<std::size_t>(r)); }

  /// Checks every structural invariant; throws StructuralError/ShapeError/DataError.
  void validate() const;
};

/// Assembles a graph. features[t] fixes node_counts[t]. The adjacency of a
/// relation is the union of its own edge list and the transposed edge list
/// of its inverse, so supplying one direction is enough. Parallel edges
/// collapse to a single binary entry.
HeteroGraph build_graph(NetworkSchema schema, std::vector<Matrix> features, const std::vector<EdgeList>& edge_lists,
                        std::optional<TargetLabels> labels = std::nullopt);

RowNormalizedAdjacency row_normalize(const TypedAdjacency& adj);

/// BFS hop distance from `start` to every node, treating every relation as
/// undirected. Unreachable nodes get -1. Indexed [type][node].
std::vector<std::vector<int>> hop_distances(const HeteroGraph& graph, NodeRef start);

/// Nodes at exactly `k` hops from `start`, sorted by (type, node).
std::vector<NodeRef> khop_nodes(const HeteroGraph& graph, NodeRef start, int k);

}  // namespace vnhgcn
