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


#include "vnhgcn/train.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "vnhgcn/eval.hpp"

namespace vnhgcn {

namespace {
enum : std::uint64_t { kAugmentStream = 1, kInitStream = 2, kEpochStream = 3, kSplitStream = 4 };
}

AugmentationConfig TrainConfig::augmentation() const {
  AugmentationConfig a;
  a.n_virtual = n_virtual;
  a.central_dim = central_dim;
  a.assignment = assignment;
  a.seed = derive_seed(seed, kAugmentStream);
  return a;
}

void TrainConfig::validate() const {
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) throw ConfigError("learning rate must be >= 0");
  if (!(l2 >= 0.0) || !std::isfinite(l2)) throw ConfigError("l2 must be >= 0");
  if (epochs < 1) throw ConfigError("epochs must be >= 1");
  if (!(dropout >= 0.0 && dropout < 1.0)) throw ConfigError("dropout must lie in [0, 1)");
  if (!(drop_edge >= 0.0 && drop_edge <= 1.0)) throw ConfigError("drop_edge must lie in [0, 1]");
  if (layers < 1) throw ConfigError("layers must be >= 1");
  if (hidden_dim < 1) throw ConfigError("hidden_dim must be >= 1");
  if (attention_dim < 1) throw ConfigError("d_a must be >= 1");
  if (virtual_nodes) augmentation().validate();
}

Split make_split(const TargetLabels& labels, double ratio, std::uint64_t seed) {
  if (!(ratio > 0.0 && ratio < 1.0)) throw ConfigError("split ratio must lie in (0, 1), got " + std::to_string(ratio));
  std::vector<Index> nodes = labels.labeled_nodes();
  if (nodes.empty()) throw DataError("cannot split: no labeled nodes");
  std::mt19937_64 rng(seed);
  std::shuffle(nodes.begin(), nodes.end(), rng);
  const auto n = static_cast<Index>(nodes.size());
  // ceil with a small guard so 0.2 * 10 stays 2 despite rounding.
  const Index ntrain = std::min<Index>(n, static_cast<Index>(std::ceil(ratio * static_cast<double>(n) - 1e-9)));
  const Index nval = (n - ntrain) / 2;
  Split s;
  s.ratio = ratio;
  s.train.assign(nodes.begin(), nodes.begin() + ntrain);
  s.val.assign(nodes.begin() + ntrain, nodes.begin() + ntrain + nval);
  s.test.assign(nodes.begin() + ntrain + nval, nodes.end());
  return s;
}

Split make_run_split(const TargetLabels& labels, double ratio, std::uint64_t seed) {
  return make_split(labels, ratio, derive_seed(seed, kSplitStream));
}

void adam_step(std::span<Matrix* const> params, std::span<const Matrix> grads, AdamState& state, double lr,
               std::span<const std::string> names) {
  if (params.size() != grads.size())
    throw ShapeError("adam: " + std::to_string(grads.size()) + " gradients for " + std::to_string(params.size()) +
                     " tensors");
  if (state.first_moment.empty()) {
    for (const Matrix* p : params) {
      state.first_moment.push_back(Matrix::Zero(p->rows(), p->cols()));
      state.second_moment.push_back(Matrix::Zero(p->rows(), p->cols()));
    }
  }
  if (state.first_moment.size() != params.size()) throw ShapeError("adam: state does not match the parameter list");
  for (std::size_t k = 0; k < params.size(); ++k) {
    if (grads[k].rows() != params[k]->rows() || grads[k].cols() != params[k]->cols())
      throw ShapeError("adam: gradient " + shape_str(grads[k]) + " for tensor " + shape_str(*params[k]));
    if (!grads[k].allFinite())
      throw NumericError("adam: non-finite gradient for tensor " +
                         (k < names.size() ? "'" + names[k] + "'" : "#" + std::to_string(k)));
  }
  ++state.step;
  const double c1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
  const double c2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));
  for (std::size_t k = 0; k < params.size(); ++k) {
    Matrix& m = state.first_moment[k];
    Matrix& v = state.second_moment[k];
    m = state.beta1 * m + (1.0 - state.beta1) * grads[k];
    v = state.beta2 * v + (1.0 - state.beta2) * grads[k].cwiseProduct(grads[k]);
    params[k]->array() -= lr * (m.array() / c1) / ((v.array() / c2).sqrt() + state.epsilon);
  }
}

PreparedGraph prepare_graph(const HeteroGraph& graph, const TrainConfig& cfg) {
  PreparedGraph p;
  p.has_virtual_nodes = cfg.virtual_nodes;
  if (cfg.virtual_nodes) {
    p.aug = augment(graph, cfg.augmentation());
  } else {
    graph.validate();
    p.aug.graph = graph;
    for (Index t = 0; t < graph.num_types(); ++t) p.aug.real_type_map.push_back(t);
    p.aug.droppable.assign(static_cast<std::size_t>(graph.schema.num_relations()), false);
    p.aug.central_type = -1;
  }
  return p;
}

ModelParams init_model(const PreparedGraph& prepared, const TrainConfig& cfg) {
  const HeteroGraph& g = prepared.graph();
  if (!g.target) throw DataError("graph has no target labels");
  DimPlan plan = make_dim_plan(g, cfg.layers, cfg.hidden_dim, g.target->num_classes, g.target->type);
  return init_params(g.schema, plan, cfg.attention_dim, g.target->type, derive_seed(cfg.seed, kInitStream));
}

FitResult fit(const HeteroGraph& graph, const TrainConfig& cfg, const Split& split) {
  cfg.validate();
  if (!graph.target) throw DataError("fit: graph has no labels on a target type");
  if (split.train.empty()) throw ConfigError("fit: empty training set");

  FitResult result;
  result.prepared = prepare_graph(graph, cfg);
  const PreparedGraph& prepared = result.prepared;
  ModelParams params = init_model(prepared, cfg);
  const auto names = params.tensor_names(prepared.graph().schema);
  const std::vector<Index>& selection = split.val.empty() ? split.train : split.val;

  AdamState adam;
  double best = -1.0;
  for (Index epoch = 1; epoch <= cfg.epochs; ++epoch) {
    ForwardOptions opts{true, cfg.dropout, cfg.drop_edge, derive_seed(cfg.seed, kEpochStream, epoch)};
    LossGradient lg = loss_and_gradient(prepared.graph(), prepared.droppable(), params, opts, split.train, cfg.l2);
    if (!std::isfinite(lg.total())) throw NumericError("fit: non-finite loss at epoch " + std::to_string(epoch));
    auto tensors = params.tensors();
    adam_step(tensors, lg.grads, adam, cfg.learning_rate, names);

    const F1Report val = evaluate(prepared, params, selection);
    result.log.push_back({epoch, lg.total(), val.micro_f1, val.macro_f1});
    if (val.micro_f1 > best) {
      best = val.micro_f1;
      result.best_epoch = epoch;
      result.params = params;
    }
  }
  return result;
}

std::string metrics_csv(const std::vector<EpochMetrics>& log) {
  std::ostringstream os;
  os.precision(17);
  os << "epoch,train_loss,val_micro_f1,val_macro_f1\n";
  for (const auto& m : log) os << m.epoch << "," << m.train_loss << "," << m.val_micro_f1 << "," << m.val_macro_f1 << "\n";
  return os.str();
}

}  // namespace vnhgcn
