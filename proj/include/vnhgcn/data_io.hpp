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
#include <filesystem>
#include <string>
#include <vector>

#include "vnhgcn/graph.hpp"

namespace vnhgcn {

/// Reads a dataset directory (or its manifest.json directly) and returns a
/// validated graph with labels on the target type.
///
/// Directory layout:
///   manifest.json          schema, file names, target type, class count
///   <type>.csv             header "id,f0,...", one row per node
///   <relation>.csv         header "src,dst", one row per edge
///   labels.csv             header "id,label", one row per labeled node
///
/// A relation whose inverse is named but not declared gets the inverse
/// created with transposed edges.
HeteroGraph load_dataset(const std::filesystem::path& manifest_path);

/// Writes `graph` in the format read by load_dataset. Only the lower-id
/// relation of each inverse pair carries an edge file.
void save_dataset(const HeteroGraph& graph, const std::filesystem::path& dir);

struct SyntheticSpec {
  enum class Kind { kPlantedPartition, kTypedChain };
  Kind kind = Kind::kPlantedPartition;

  // planted-partition
  Index target_nodes = 300;
  std::vector<Index> bridge_nodes{60, 30};
  Index num_classes = 3;
  Index feature_dim = 16;
  Index bridge_feature_dim = 8;
  double separation = 10.0;
  double noise = 1.0;
  double p_in = 0.1;
  double p_out = 0.005;

  // typed-chain
  Index chain_length = 12;

  std::uint64_t seed = 0;

  void validate() const;
};

/// planted-partition: target-type features are separation * e_class plus
/// N(0, noise^2) noise; each bridge node belongs to a class and links to
/// target nodes with probability p_in (same class) or p_out (otherwise).
/// typed-chain: a path over alternating types "A" and "P" with Gaussian
/// features; position i is node i/2 of type i%2, labels live on "A".
HeteroGraph generate_synthetic(const SyntheticSpec& spec);

}  // namespace vnhgcn
