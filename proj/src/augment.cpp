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


#include "vnhgcn/augment.hpp"

#include <algorithm>
#include <random>
#include <sstream>

namespace vnhgcn {

std::string to_string(Assignment a) {
  return a == Assignment::kUniformRandom ? "uniform-random" : "round-robin";
}

Assignment parse_assignment(const std::string& s) {
  if (s == "uniform-random") return Assignment::kUniformRandom;
  if (s == "round-robin") return Assignment::kRoundRobin;
  throw ConfigError("unknown assignment '" + s + "' (expected uniform-random or round-robin)");
}

void AugmentationConfig::validate() const {
  if (n_virtual < 1) throw ConfigError("n_virtual must be >= 1, got " + std::to_string(n_virtual));
  if (central_dim < 1) throw ConfigError("central_dim must be >= 1, got " + std::to_string(central_dim));
}

namespace {

std::vector<Index> assign_nodes(Index count, const AugmentationConfig& cfg, std::uint64_t seed) {
  std::vector<Index> out(static_cast<std::size_t>(count));
  std::mt19937_64 rng(seed);
  if (cfg.assignment == Assignment::kUniformRandom) {
    std::uniform_int_distribution<Index> pick(0, cfg.n_virtual - 1);
    for (auto& v : out) v = pick(rng);
  } else {
    // Balanced: a seeded permutation dealt out in turn.
    std::vector<Index> order(out.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<Index>(i);
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t i = 0; i < order.size(); ++i) out[order[i]] = static_cast<Index>(i) % cfg.n_virtual;
  }
  return out;
}

}  // namespace

AugmentedGraph augment(const HeteroGraph& graph, const AugmentationConfig& cfg) {
  cfg.validate();
  graph.validate();
  const Index nreal = graph.num_types();

  AugmentedGraph aug;
  aug.config = cfg;
  NetworkSchema schema = graph.schema;
  for (Index t = 0; t < nreal; ++t) aug.real_type_map.push_back(t);
  for (Index t = 0; t < nreal; ++t) aug.virtual_type_map.push_back(schema.add_node_type("vn_" + graph.schema.type(t).name));
  aug.central_type = schema.add_node_type("central");

  std::vector<Matrix> features = graph.features;
  std::vector<EdgeList> edges(static_cast<std::size_t>(graph.schema.num_relations()));
  for (const Relation& r : graph.schema.relations()) {
    if (r.index > r.inverse) continue;
    const TypedAdjacency& a = graph.adj(r.index);
    auto& list = edges[static_cast<std::size_t>(r.index)];
    for (Index i = 0; i < a.rows; ++i)
      for (Index p = a.row_begin(i); p < a.row_end(i); ++p) list.emplace_back(a.col_idx[p], i);
  }

  for (Index t = 0; t < nreal; ++t) {
    const Index n = graph.node_counts[static_cast<std::size_t>(t)];
    const auto& x = graph.features[static_cast<std::size_t>(t)];
    auto table = assign_nodes(n, cfg, derive_seed(cfg.seed, 0xA551, static_cast<std::uint64_t>(t)));

    Matrix pooled = Matrix::Zero(cfg.n_virtual, x.cols());
    Vector counts = Vector::Zero(cfg.n_virtual);
    for (Index v = 0; v < n; ++v) {
      pooled.row(table[v]) += x.row(v);
      counts(table[v]) += 1.0;
    }
    for (Index k = 0; k < cfg.n_virtual; ++k)
      if (counts(k) > 0) pooled.row(k) /= counts(k);
    features.push_back(std::move(pooled));

    const std::string& name = graph.schema.type(t).name;
    auto [up, down] = schema.add_relation_pair(name + "-to-vn", "vn-to-" + name, t, aug.virtual_type_map[t]);
    EdgeList up_edges;
    for (Index v = 0; v < n; ++v) up_edges.emplace_back(v, table[v]);
    edges.push_back(std::move(up_edges));
    edges.emplace_back();
    aug.virtual_edge_relations.push_back(up);
    aug.virtual_edge_relations.push_back(down);
    aug.assignment_table.push_back(std::move(table));
  }
  features.push_back(Matrix::Ones(1, cfg.central_dim));
  for (Index t = 0; t < nreal; ++t) {
    const std::string& name = graph.schema.type(t).name;
    schema.add_relation_pair("vn_" + name + "-to-central", "central-to-vn_" + name, aug.virtual_type_map[t],
                             aug.central_type);
    EdgeList to_central;
    for (Index k = 0; k < cfg.n_virtual; ++k) to_central.emplace_back(k, 0);
    edges.push_back(std::move(to_central));
    edges.emplace_back();
  }

  aug.droppable.assign(static_cast<std::size_t>(schema.num_relations()), false);
  for (Index r : aug.virtual_edge_relations) aug.droppable[static_cast<std::size_t>(r)] = true;
  aug.graph = build_graph(std::move(schema), std::move(features), edges, graph.target);
  return aug;
}

std::vector<TypedAdjacency> drop_edges(const HeteroGraph& graph, std::span<const Index> relations, double rate,
                                       std::uint64_t seed) {
  if (!(rate >= 0.0 && rate <= 1.0)) throw ConfigError("drop-edge rate must lie in [0, 1], got " + std::to_string(rate));
  std::vector<TypedAdjacency> out = graph.adjacency;
  if (rate == 0.0) return out;
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution drop(rate);
  for (Index r : relations) {
    const Relation& rel = graph.schema.relation(r);
    // Sample on the lower id of each pair; the partner is its transpose.
    if (rel.index > rel.inverse) {
      if (std::find(relations.begin(), relations.end(), rel.inverse) != relations.end()) continue;
    }
    const TypedAdjacency& a = graph.adj(r);
    std::vector<std::pair<Index, Index>> kept;
    for (Index i = 0; i < a.rows; ++i)
      for (Index p = a.row_begin(i); p < a.row_end(i); ++p)
        if (!drop(rng)) kept.emplace_back(i, a.col_idx[p]);
    out[static_cast<std::size_t>(r)] = csr_from_pairs<double>(a.rows, a.cols, std::move(kept));
    out[static_cast<std::size_t>(rel.inverse)] = transpose(out[static_cast<std::size_t>(r)]);
  }
  return out;
}

std::vector<TypedAdjacency> drop_virtual_edges(const AugmentedGraph& aug, double rate, std::uint64_t seed) {
  return drop_edges(aug.graph, aug.virtual_edge_relations, rate, seed);
}

AugmentedGraph sample_drop_edge(const AugmentedGraph& aug, double rate, std::uint64_t seed) {
  AugmentedGraph out = aug;
  out.graph.adjacency = drop_virtual_edges(aug, rate, seed);
  return out;
}

std::string describe(const AugmentedGraph& aug, Index max_rows_per_type) {
  std::ostringstream os;
  const auto& g = aug.graph;
  os << "node types (" << g.num_types() << "):\n";
  for (const auto& t : g.schema.node_types())
    os << "  [" << t.index << "] " << t.name << "  nodes=" << g.node_counts[t.index] << "  dim=" << g.feature_dim(t.index)
       << "\n";
  os << "relations (" << g.schema.num_relations() << "):\n";
  for (const auto& r : g.schema.relations())
    os << "  [" << r.index << "] " << r.name << "  " << g.schema.type(r.src_type).name << " -> "
       << g.schema.type(r.dst_type).name << "  edges=" << g.adj(r.index).nnz()
       << (aug.droppable[r.index] ? "  (drop-edge)" : "") << "\n";
  os << "assignment (" << to_string(aug.config.assignment) << ", n_virtual=" << aug.config.n_virtual
     << ", seed=" << aug.config.seed << "):\n";
  for (Index t = 0; t < aug.num_real_types(); ++t) {
    const auto& table = aug.assignment_table[t];
    std::vector<Index> load(static_cast<std::size_t>(aug.config.n_virtual), 0);
    for (Index v : table) ++load[v];
    os << "  " << g.schema.type(t).name << " virtual-node loads:";
    for (Index c : load) os << " " << c;
    os << "\n";
    const Index shown = std::min<Index>(max_rows_per_type, static_cast<Index>(table.size()));
    for (Index v = 0; v < shown; ++v) os << "    " << g.schema.type(t).name << ":" << v << " -> vn:" << table[v] << "\n";
    if (shown < static_cast<Index>(table.size()))
      os << "    ... " << (static_cast<Index>(table.size()) - shown) << " more\n";
  }
  return os.str();
}

}  // namespace vnhgcn
