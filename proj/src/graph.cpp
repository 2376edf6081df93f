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


#include "vnhgcn/graph.hpp"

#include <deque>
#include <set>

namespace vnhgcn {

Index NetworkSchema::add_node_type(std::string name) {
  Index id = num_types();
  node_types_.push_back({id, std::move(name)});
  return id;
}

std::pair<Index, Index> NetworkSchema::add_relation_pair(std::string name, std::string inverse_name, Index src_type,
                                                         Index dst_type) {
  Index fwd = num_relations();
  Index bwd = fwd + 1;
  relations_.push_back({fwd, std::move(name), src_type, dst_type, bwd});
  relations_.push_back({bwd, std::move(inverse_name), dst_type, src_type, fwd});
  return {fwd, bwd};
}

std::optional<Index> NetworkSchema::find_type(std::string_view name) const {
  for (const auto& t : node_types_)
    if (t.name == name) return t.index;
  return std::nullopt;
}

std::optional<Index> NetworkSchema::find_relation(std::string_view name) const {
  for (const auto& r : relations_)
    if (r.name == name) return r.index;
  return std::nullopt;
}

std::vector<Index> NetworkSchema::incoming(Index type) const {
  std::vector<Index> out;
  for (const auto& r : relations_)
    if (r.dst_type == type) out.push_back(r.index);
  return out;
}

void NetworkSchema::validate() const {
  std::set<std::string> names;
  for (std::size_t i = 0; i < node_types_.size(); ++i) {
    if (node_types_[i].index != static_cast<Index>(i)) throw StructuralError("node type ids must be dense");
    if (!names.insert(node_types_[i].name).second)
      throw StructuralError("duplicate node type name '" + node_types_[i].name + "'");
  }
  names.clear();
  for (std::size_t i = 0; i < relations_.size(); ++i) {
    const Relation& r = relations_[i];
    if (r.index != static_cast<Index>(i)) throw StructuralError("relation ids must be dense");
    if (!names.insert(r.name).second) throw StructuralError("duplicate relation name '" + r.name + "'");
    if (r.src_type < 0 || r.src_type >= num_types() || r.dst_type < 0 || r.dst_type >= num_types())
      throw StructuralError("relation '" + r.name + "' references an unknown node type");
    if (r.inverse < 0 || r.inverse >= num_relations())
      throw StructuralError("relation '" + r.name + "' has no inverse");
    const Relation& inv = relations_[static_cast<std::size_t>(r.inverse)];
    if (inv.inverse != r.index || inv.src_type != r.dst_type || inv.dst_type != r.src_type)
      throw StructuralError("relation '" + r.name + "' and '" + inv.name + "' are not a valid inverse pair");
  }
}

std::vector<Index> TargetLabels::labeled_nodes() const {
  std::vector<Index> out;
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (labels[i] >= 0) out.push_back(static_cast<Index>(i));
  return out;
}

Index HeteroGraph::total_nodes() const {
  Index n = 0;
  for (Index c : node_counts) n += c;
  return n;
}

void HeteroGraph::validate() const {
  schema.validate();
  const auto ntypes = static_cast<std::size_t>(schema.num_types());
  if (node_counts.size() != ntypes || features.size() != ntypes)
    throw ShapeError("graph: per-type arrays do not match the schema's " + std::to_string(ntypes) + " types");
  for (std::size_t t = 0; t < ntypes; ++t) {
    if (features[t].rows() != node_counts[t])
      throw ShapeError("graph: features of type '" + schema.type(static_cast<Index>(t)).name + "' have " +
                       std::to_string(features[t].rows()) + " rows, expected " + std::to_string(node_counts[t]));
    if (!features[t].allFinite())
      throw DataError("graph: non-finite feature for type '" + schema.type(static_cast<Index>(t)).name + "'");
  }
  if (adjacency.size() != static_cast<std::size_t>(schema.num_relations()))
    throw ShapeError("graph: adjacency count does not match relation count");
  for (const Relation& r : schema.relations()) {
    const TypedAdjacency& a = adj(r.index);
    if (a.rows != node_counts[static_cast<std::size_t>(r.dst_type)] ||
        a.cols != node_counts[static_cast<std::size_t>(r.src_type)])
      throw ShapeError("graph: adjacency of '" + r.name + "' has shape " + shape_str(a.rows, a.cols));
    if (a.row_ptr.size() != static_cast<std::size_t>(a.rows) + 1 || a.row_ptr.front() != 0 ||
        a.row_ptr.back() != a.nnz() || a.values.size() != a.col_idx.size())
      throw StructuralError("graph: malformed CSR for '" + r.name + "'");
    for (Index i = 0; i < a.rows; ++i) {
      if (a.row_end(i) < a.row_begin(i)) throw StructuralError("graph: row pointers of '" + r.name + "' decrease");
      for (Index p = a.row_begin(i); p < a.row_end(i); ++p) {
        if (a.col_idx[p] < 0 || a.col_idx[p] >= a.cols)
          throw StructuralError("graph: column out of range in '" + r.name + "'");
        if (p > a.row_begin(i) && a.col_idx[p] <= a.col_idx[p - 1])
          throw StructuralError("graph: columns of '" + r.name + "' not strictly sorted");
      }
    }
    if (transpose(a) != adj(r.inverse))
      throw StructuralError("graph: '" + r.name + "' is not the transpose of its inverse '" +
                            schema.relation(r.inverse).name + "'");
  }
  if (target) {
    if (target->type < 0 || target->type >= schema.num_types()) throw StructuralError("graph: unknown target type");
    if (static_cast<Index>(target->labels.size()) != node_counts[static_cast<std::size_t>(target->type)])
      throw ShapeError("graph: label count does not match target node count");
    for (int l : target->labels)
      if (l < -1 || l >= target->num_classes)
        throw DataError("graph: label " + std::to_string(l) + " outside 0.." + std::to_string(target->num_classes - 1));
  }
}

HeteroGraph build_graph(NetworkSchema schema, std::vector<Matrix> features, const std::vector<EdgeList>& edge_lists,
                        std::optional<TargetLabels> labels) {
  schema.validate();
  if (features.size() != static_cast<std::size_t>(schema.num_types()))
    throw ShapeError("build_graph: got " + std::to_string(features.size()) + " feature matrices for " +
                     std::to_string(schema.num_types()) + " node types");
  if (edge_lists.size() != static_cast<std::size_t>(schema.num_relations()))
    throw ShapeError("build_graph: got " + std::to_string(edge_lists.size()) + " edge lists for " +
                     std::to_string(schema.num_relations()) + " relations");

  HeteroGraph g;
  for (const Matrix& f : features) g.node_counts.push_back(f.rows());

  for (const Relation& r : schema.relations()) {
    const Index nsrc = g.node_counts[static_cast<std::size_t>(r.src_type)];
    const Index ndst = g.node_counts[static_cast<std::size_t>(r.dst_type)];
    std::vector<std::pair<Index, Index>> coords;  // (row = dst, col = src)
    auto add = [&](Index src, Index dst) {
      if (src < 0 || src >= nsrc || dst < 0 || dst >= ndst)
        throw StructuralError("build_graph: edge (" + std::to_string(src) + "," + std::to_string(dst) +
                              ") out of range for relation '" + r.name + "' (" + std::to_string(nsrc) + " src, " +
                              std::to_string(ndst) + " dst nodes)");
      if (r.src_type == r.dst_type && src == dst)
        throw StructuralError("build_graph: self-loop on node " + std::to_string(src) + " in relation '" + r.name + "'");
      coords.emplace_back(dst, src);
    };
    for (const auto& [s, d] : edge_lists[static_cast<std::size_t>(r.index)]) add(s, d);
    for (const auto& [s, d] : edge_lists[static_cast<std::size_t>(r.inverse)]) add(d, s);
    g.adjacency.push_back(csr_from_pairs<double>(ndst, nsrc, std::move(coords)));
  }
  g.schema = std::move(schema);
  g.features = std::move(features);
  g.target = std::move(labels);
  g.validate();
  return g;
}

RowNormalizedAdjacency row_normalize(const TypedAdjacency& adj) { return row_normalized(adj); }

std::vector<std::vector<int>> hop_distances(const HeteroGraph& graph, NodeRef start) {
  if (start.type < 0 || start.type >= graph.num_types() || start.node < 0 ||
      start.node >= graph.node_counts[static_cast<std::size_t>(start.type)])
    throw StructuralError("hop_distances: invalid start node (" + std::to_string(start.type) + "," +
                          std::to_string(start.node) + ")");
  std::vector<std::vector<int>> dist(static_cast<std::size_t>(graph.num_types()));
  for (Index t = 0; t < graph.num_types(); ++t) dist[t].assign(static_cast<std::size_t>(graph.node_counts[t]), -1);

  // Every relation is paired with its inverse, so scanning the rows of
  // relations whose dst is the current type covers all undirected neighbors.
  std::vector<std::vector<Index>> incoming(static_cast<std::size_t>(graph.num_types()));
  for (Index t = 0; t < graph.num_types(); ++t) incoming[t] = graph.schema.incoming(t);

  std::deque<NodeRef> queue{start};
  dist[start.type][start.node] = 0;
  while (!queue.empty()) {
    NodeRef u = queue.front();
    queue.pop_front();
    const int du = dist[u.type][u.node];
    for (Index r : incoming[u.type]) {
      const TypedAdjacency& a = graph.adj(r);
      const Index src_type = graph.schema.relation(r).src_type;
      for (Index p = a.row_begin(u.node); p < a.row_end(u.node); ++p) {
        int& dv = dist[src_type][a.col_idx[p]];
        if (dv < 0) {
          dv = du + 1;
          queue.push_back({src_type, a.col_idx[p]});
        }
      }
    }
  }
  return dist;
}

std::vector<NodeRef> khop_nodes(const HeteroGraph& graph, NodeRef start, int k) {
  if (k < 0) throw ConfigError("khop_nodes: negative hop count");
  const auto dist = hop_distances(graph, start);
  std::vector<NodeRef> out;
  for (std::size_t t = 0; t < dist.size(); ++t)
    for (std::size_t v = 0; v < dist[t].size(); ++v)
      if (dist[t][v] == k) out.push_back({static_cast<Index>(t), static_cast<Index>(v)});
  return out;
}

}  // namespace vnhgcn
