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

#include "vnhgcn/augment.hpp"
#include "vnhgcn/graph.hpp"

namespace vnhgcn {

/// Per-layer, per-type embedding widths. dims[0] are the feature widths and
/// dims[l + 1] the output widths of layer l.
struct DimPlan {
  std::vector<std::vector<Index>> dims;

  Index num_layers() const { return dims.empty() ? 0 : static_cast<Index>(dims.size()) - 1; }
  Index in_dim(Index layer, Index type) const { return dims[layer][type]; }
  Index out_dim(Index layer, Index type) const { return dims[layer + 1][type]; }
  bool operator==(const DimPlan&) const = default;
};

/// Uniform hidden width everywhere except the last layer's target-type
/// output, which is `num_classes` wide.
DimPlan make_dim_plan(const HeteroGraph& graph, Index layers, Index hidden_dim, Index num_classes, Index target_type);

struct LayerParams {
  std::vector<Matrix> self_weight;     // per type: d_in(t) x d_out(t)
  std::vector<Matrix> cross_weight;    // per relation r: d_in(src r) x d_out(dst r)
  std::vector<Matrix> attention_proj;  // per type: d_out(t) x d_a
  std::vector<Matrix> attention_vec;   // per type: d_a x 1
};

struct ModelParams {
  DimPlan plan;
  Index attention_dim = 0;
  Index target_type = 0;
  std::vector<LayerParams> layers;

  /// Every trainable tensor in a fixed order (layer, W self, W cross, E, q).
  std::vector<Matrix*> tensors();
  std::vector<const Matrix*> tensors() const;
  /// Names aligned with tensors(), e.g. "L0.W.paper", "L0.W.author-paper".
  std::vector<std::string> tensor_names(const NetworkSchema& schema) const;
};

/// q starts as all ones; W and E are uniform in +-sqrt(6 / (fan_in + fan_out)).
ModelParams init_params(const NetworkSchema& schema, const DimPlan& plan, Index attention_dim, Index target_type,
                        std::uint64_t seed);

/// Throws ShapeError naming the first tensor inconsistent with the schema/plan.
void check_params(const NetworkSchema& schema, const ModelParams& params);

/// Checks params against a graph's feature widths and class count; throws
/// ShapeError listing every mismatch.
void check_params_for_graph(const HeteroGraph& graph, const ModelParams& params);

std::size_t param_count(const ModelParams& params);

struct ForwardOptions {
  bool training = false;
  double dropout = 0.0;
  double drop_edge = 0.0;
  std::uint64_t seed = 0;
};

/// Softmax weights of one target type's attention group for one layer.
struct AttentionColumns {
  Vector self;
  std::vector<Index> relations;
  std::vector<Vector> cross;  // aligned with `relations`
};

struct ForwardArtifacts {
  std::vector<std::vector<Matrix>> embeddings;          // [layer 0..K][type]
  std::vector<std::vector<AttentionColumns>> attention;  // [layer 0..K-1][type]

  const Matrix& output(Index type) const { return embeddings.back()[type]; }
};

/// Runs the K-layer transform / node-level aggregation / type-level
/// attention stack. Relations listed in `droppable` are subject to
/// drop-edge when training.
ForwardArtifacts forward(const HeteroGraph& graph, std::span<const Index> droppable, const ModelParams& params,
                         const ForwardOptions& opts);
ForwardArtifacts forward(const AugmentedGraph& aug, const ModelParams& params, const ForwardOptions& opts);
ForwardArtifacts forward(const HeteroGraph& graph, const ModelParams& params, const ForwardOptions& opts);

struct LossGradient {
  double cross_entropy = 0.0;
  double l2_term = 0.0;
  double total() const { return cross_entropy + l2_term; }
  std::vector<Matrix> grads;  // aligned with ModelParams::tensors()
};

/// Cross-entropy over `mask` target nodes plus l2 * sum of squared entries of
/// every tensor, with its gradient with respect to every tensor.
LossGradient loss_and_gradient(const HeteroGraph& graph, std::span<const Index> droppable, const ModelParams& params,
                               const ForwardOptions& opts, std::span<const Index> mask, double l2);

/// l2 * sum over every tensor of its squared entries.
double l2_penalty(const ModelParams& params, double l2);

/// Row-wise softmax of the target type's final embeddings.
Matrix predict(const HeteroGraph& graph, const ModelParams& params);
Matrix predict(const AugmentedGraph& aug, const ModelParams& params);
std::vector<int> argmax_rows(const Matrix& probs);

}  // namespace vnhgcn
