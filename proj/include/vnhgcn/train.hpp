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
#include <optional>
#include <string>
#include <vector>

#include "vnhgcn/augment.hpp"
#include "vnhgcn/model.hpp"

namespace vnhgcn {

struct TrainConfig {
  double learning_rate = 1e-3;
  double l2 = 1e-4;
  Index epochs = 1000;
  double dropout = 0.2;
  double drop_edge = 0.2;
  Index layers = 4;
  Index hidden_dim = 64;
  Index attention_dim = 64;
  Index n_virtual = 16;
  Index central_dim = 64;
  Assignment assignment = Assignment::kUniformRandom;
  /// false trains the same architecture on the graph without virtual nodes.
  bool virtual_nodes = true;
  std::uint64_t seed = 0;

  AugmentationConfig augmentation() const;
  void validate() const;
};

struct Split {
  std::vector<Index> train;
  std::vector<Index> val;
  std::vector<Index> test;
  double ratio = 0.0;
};

/// Seeded shuffle of the labeled nodes; the first ceil(ratio * n) train,
/// the rest halved into val (floor) and test.
Split make_split(const TargetLabels& labels, double ratio, std::uint64_t seed);

/// The split a run with root seed `seed` uses (train, eval and sweep agree).
Split make_run_split(const TargetLabels& labels, double ratio, std::uint64_t seed);

struct AdamState {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  long step = 0;
  std::vector<Matrix> first_moment;
  std::vector<Matrix> second_moment;
};

/// One bias-corrected Adam update of every tensor. `names` labels tensors in
/// the NumericError raised for a non-finite gradient.
void adam_step(std::span<Matrix* const> params, std::span<const Matrix> grads, AdamState& state, double lr,
               std::span<const std::string> names = {});

struct EpochMetrics {
  Index epoch = 0;
  double train_loss = 0.0;
  double val_micro_f1 = 0.0;
  double val_macro_f1 = 0.0;
};

/// Graph a model runs on: the augmented graph, or the original graph
/// wrapped with no virtual types when virtual nodes are disabled.
struct PreparedGraph {
  AugmentedGraph aug;
  bool has_virtual_nodes = true;

  const HeteroGraph& graph() const { return aug.graph; }
  std::span<const Index> droppable() const { return aug.virtual_edge_relations; }
};

PreparedGraph prepare_graph(const HeteroGraph& graph, const TrainConfig& cfg);

/// Builds fresh parameters for `prepared` according to `cfg`.
ModelParams init_model(const PreparedGraph& prepared, const TrainConfig& cfg);

struct FitResult {
  ModelParams params;  // best-validation epoch
  std::vector<EpochMetrics> log;
  Index best_epoch = 0;
  PreparedGraph prepared;
};

FitResult fit(const HeteroGraph& graph, const TrainConfig& cfg, const Split& split);

/// CSV with header epoch,train_loss,val_micro_f1,val_macro_f1.
std::string metrics_csv(const std::vector<EpochMetrics>& log);

}  // namespace vnhgcn
