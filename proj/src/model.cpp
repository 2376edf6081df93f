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


#include "vnhgcn/model.hpp"

#include <cmath>
#include <memory>
#include <random>

#include "vnhgcn/tape.hpp"

namespace vnhgcn {

DimPlan make_dim_plan(const HeteroGraph& graph, Index layers, Index hidden_dim, Index num_classes, Index target_type) {
  if (layers < 0) throw ConfigError("layer count must be >= 0");
  if (hidden_dim < 1) throw ConfigError("hidden_dim must be >= 1");
  if (num_classes < 1) throw ConfigError("num_classes must be >= 1");
  if (target_type < 0 || target_type >= graph.num_types()) throw ConfigError("target type out of range");
  DimPlan plan;
  plan.dims.emplace_back();
  for (Index t = 0; t < graph.num_types(); ++t) plan.dims[0].push_back(graph.feature_dim(t));
  for (Index l = 0; l < layers; ++l) {
    std::vector<Index> out(static_cast<std::size_t>(graph.num_types()), hidden_dim);
    if (l == layers - 1) out[static_cast<std::size_t>(target_type)] = num_classes;
    plan.dims.push_back(std::move(out));
  }
  return plan;
}

std::vector<Matrix*> ModelParams::tensors() {
  std::vector<Matrix*> out;
  for (auto& layer : layers) {
    for (auto& m : layer.self_weight) out.push_back(&m);
    for (auto& m : layer.cross_weight) out.push_back(&m);
    for (auto& m : layer.attention_proj) out.push_back(&m);
    for (auto& m : layer.attention_vec) out.push_back(&m);
  }
  return out;
}

std::vector<const Matrix*> ModelParams::tensors() const {
  auto mutable_ptrs = const_cast<ModelParams*>(this)->tensors();
  return {mutable_ptrs.begin(), mutable_ptrs.end()};
}

std::vector<std::string> ModelParams::tensor_names(const NetworkSchema& schema) const {
  std::vector<std::string> out;
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const std::string prefix = "L" + std::to_string(l) + ".";
    for (std::size_t t = 0; t < layers[l].self_weight.size(); ++t)
      out.push_back(prefix + "W." + schema.type(static_cast<Index>(t)).name);
    for (std::size_t r = 0; r < layers[l].cross_weight.size(); ++r)
      out.push_back(prefix + "W." + schema.relation(static_cast<Index>(r)).name);
    for (std::size_t t = 0; t < layers[l].attention_proj.size(); ++t)
      out.push_back(prefix + "E." + schema.type(static_cast<Index>(t)).name);
    for (std::size_t t = 0; t < layers[l].attention_vec.size(); ++t)
      out.push_back(prefix + "q." + schema.type(static_cast<Index>(t)).name);
  }
  return out;
}

namespace {

Matrix glorot(Index fan_in, Index fan_out, std::uint64_t seed) {
  Matrix m(fan_in, fan_out);
  if (m.size() == 0) return m;
  const double bound = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-bound, bound);
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j) m(i, j) = u(rng);
  return m;
}

}  // namespace

ModelParams init_params(const NetworkSchema& schema, const DimPlan& plan, Index attention_dim, Index target_type,
                        std::uint64_t seed) {
  if (attention_dim < 1) throw ConfigError("attention dim must be >= 1");
  for (const auto& d : plan.dims)
    if (d.size() != static_cast<std::size_t>(schema.num_types()))
      throw ConfigError("dimension plan has " + std::to_string(d.size()) + " types, schema has " +
                        std::to_string(schema.num_types()));
  ModelParams p;
  p.plan = plan;
  p.attention_dim = attention_dim;
  p.target_type = target_type;
  std::uint64_t tag = 0;
  for (Index l = 0; l < plan.num_layers(); ++l) {
    LayerParams layer;
    for (Index t = 0; t < schema.num_types(); ++t)
      layer.self_weight.push_back(glorot(plan.in_dim(l, t), plan.out_dim(l, t), derive_seed(seed, l, tag++)));
    for (const Relation& r : schema.relations())
      layer.cross_weight.push_back(
          glorot(plan.in_dim(l, r.src_type), plan.out_dim(l, r.dst_type), derive_seed(seed, l, tag++)));
    for (Index t = 0; t < schema.num_types(); ++t)
      layer.attention_proj.push_back(glorot(plan.out_dim(l, t), attention_dim, derive_seed(seed, l, tag++)));
    for (Index t = 0; t < schema.num_types(); ++t) layer.attention_vec.push_back(Matrix::Ones(attention_dim, 1));
    p.layers.push_back(std::move(layer));
  }
  return p;
}

void check_params(const NetworkSchema& schema, const ModelParams& params) {
  const auto& plan = params.plan;
  if (static_cast<Index>(params.layers.size()) != plan.num_layers())
    throw ShapeError("params: " + std::to_string(params.layers.size()) + " layers but the plan has " +
                     std::to_string(plan.num_layers()));
  for (const auto& d : plan.dims)
    if (d.size() != static_cast<std::size_t>(schema.num_types()))
      throw ShapeError("params: dimension plan does not cover the schema's node types");
  auto expect = [](const Matrix& m, Index r, Index c, const std::string& what) {
    if (m.rows() != r || m.cols() != c)
      throw ShapeError("params: " + what + " is " + shape_str(m) + ", expected " + shape_str(r, c));
  };
  for (Index l = 0; l < plan.num_layers(); ++l) {
    const LayerParams& lp = params.layers[l];
    const std::string at = "layer " + std::to_string(l) + " ";
    if (lp.self_weight.size() != static_cast<std::size_t>(schema.num_types()) ||
        lp.attention_proj.size() != static_cast<std::size_t>(schema.num_types()) ||
        lp.attention_vec.size() != static_cast<std::size_t>(schema.num_types()) ||
        lp.cross_weight.size() != static_cast<std::size_t>(schema.num_relations()))
      throw ShapeError("params: " + at + "tensor counts do not match the schema");
    for (Index t = 0; t < schema.num_types(); ++t) {
      const std::string& n = schema.type(t).name;
      expect(lp.self_weight[t], plan.in_dim(l, t), plan.out_dim(l, t), at + "W." + n);
      expect(lp.attention_proj[t], plan.out_dim(l, t), params.attention_dim, at + "E." + n);
      expect(lp.attention_vec[t], params.attention_dim, 1, at + "q." + n);
    }
    for (const Relation& r : schema.relations())
      expect(lp.cross_weight[r.index], plan.in_dim(l, r.src_type), plan.out_dim(l, r.dst_type), at + "W." + r.name);
  }
}

void check_params_for_graph(const HeteroGraph& graph, const ModelParams& params) {
  std::string problems;
  if (params.plan.dims.empty() || params.plan.dims[0].size() != static_cast<std::size_t>(graph.num_types())) {
    problems += "\n  model has " + std::to_string(params.plan.dims.empty() ? 0 : params.plan.dims[0].size()) +
                " node types, graph has " + std::to_string(graph.num_types());
  } else {
    for (Index t = 0; t < graph.num_types(); ++t)
      if (params.plan.in_dim(0, t) != graph.feature_dim(t))
        problems += "\n  input width of '" + graph.schema.type(t).name + "': model " +
                    std::to_string(params.plan.in_dim(0, t)) + ", data " + std::to_string(graph.feature_dim(t));
    if (graph.target && params.plan.num_layers() > 0) {
      const Index out = params.plan.dims.back()[params.target_type];
      if (params.target_type != graph.target->type)
        problems += "\n  target type differs: model '" + graph.schema.type(params.target_type).name + "', data '" +
                    graph.schema.type(graph.target->type).name + "'";
      if (out != graph.target->num_classes)
        problems += "\n  output head: model has " + std::to_string(out) + " classes, data has " +
                    std::to_string(graph.target->num_classes);
    }
  }
  if (!problems.empty()) throw ShapeError("model does not fit the graph:" + problems);
  check_params(graph.schema, params);
}

std::size_t param_count(const ModelParams& params) {
  std::size_t n = 0;
  for (const Matrix* m : params.tensors()) n += static_cast<std::size_t>(m->size());
  return n;
}

namespace {

using ad::Tape;
using ad::Var;

struct Recording {
  std::vector<Var> param_vars;                       // aligned with tensors()
  std::vector<std::vector<Var>> embeddings;          // [layer][type]
  std::vector<std::vector<std::vector<Var>>> alpha;  // [layer][type][group]
};

enum : std::uint64_t { kDropEdgeStream = 0xD509, kDropoutStream = 0xD507 };

Recording record_forward(Tape& tape, const HeteroGraph& graph, std::span<const Index> droppable,
                         const ModelParams& params, const ForwardOptions& opts, bool trainable) {
  check_params(graph.schema, params);
  const NetworkSchema& schema = graph.schema;
  const Index ntypes = schema.num_types();
  for (Index t = 0; t < ntypes; ++t)
    if (graph.feature_dim(t) != params.plan.in_dim(0, t))
      throw ShapeError("forward: type '" + schema.type(t).name + "' has feature dim " +
                       std::to_string(graph.feature_dim(t)) + ", params expect " +
                       std::to_string(params.plan.in_dim(0, t)));
  if (!(opts.dropout >= 0.0 && opts.dropout < 1.0))
    throw ConfigError("dropout rate must lie in [0, 1), got " + std::to_string(opts.dropout));

  std::vector<TypedAdjacency> adjacency;
  if (opts.training && opts.drop_edge > 0.0 && !droppable.empty())
    adjacency = drop_edges(graph, droppable, opts.drop_edge, derive_seed(opts.seed, kDropEdgeStream));
  std::vector<std::shared_ptr<const RowNormalizedAdjacency>> norm;
  for (Index r = 0; r < schema.num_relations(); ++r)
    norm.push_back(std::make_shared<const RowNormalizedAdjacency>(
        row_normalize(adjacency.empty() ? graph.adj(r) : adjacency[static_cast<std::size_t>(r)])));

  std::vector<std::vector<Index>> incoming;
  for (Index t = 0; t < ntypes; ++t) incoming.push_back(schema.incoming(t));

  Recording rec;
  for (const Matrix* m : params.tensors())
    rec.param_vars.push_back(trainable ? tape.parameter(*m) : tape.constant(*m));

  std::vector<Var> h;
  for (Index t = 0; t < ntypes; ++t) h.push_back(tape.constant(graph.features[t]));
  rec.embeddings.push_back(h);

  const Index layers = params.plan.num_layers();
  std::size_t cursor = 0;
  for (Index l = 0; l < layers; ++l) {
    const std::size_t self_base = cursor;
    const std::size_t cross_base = self_base + static_cast<std::size_t>(ntypes);
    const std::size_t proj_base = cross_base + static_cast<std::size_t>(schema.num_relations());
    const std::size_t vec_base = proj_base + static_cast<std::size_t>(ntypes);
    cursor = vec_base + static_cast<std::size_t>(ntypes);

    std::vector<Var> input;
    for (Index t = 0; t < ntypes; ++t)
      input.push_back(ad::dropout(tape, h[t], opts.dropout, derive_seed(opts.seed, kDropoutStream, l * ntypes + t),
                                  opts.training));

    std::vector<Var> next;
    std::vector<std::vector<Var>> layer_alpha;
    for (Index i = 0; i < ntypes; ++i) {
      std::vector<Var> z{ad::matmul(tape, input[i], rec.param_vars[self_base + i])};
      for (Index r : incoming[i]) {
        Var y = ad::matmul(tape, input[schema.relation(r).src_type], rec.param_vars[cross_base + r]);
        z.push_back(ad::spmm(tape, norm[r], y));
      }
      std::vector<Var> logits;
      for (Var zk : z) {
        Var projected = ad::matmul(tape, zk, rec.param_vars[proj_base + i]);
        logits.push_back(ad::tanh(tape, ad::matmul(tape, projected, rec.param_vars[vec_base + i])));
      }
      std::vector<Var> alpha = ad::grouped_row_softmax(tape, logits);
      std::vector<Var> terms;
      for (std::size_t k = 0; k < z.size(); ++k) terms.push_back(ad::row_scale(tape, z[k], alpha[k]));
      Var mixed = ad::add(tape, terms);
      const bool logit_head = (l == layers - 1) && i == params.target_type;
      next.push_back(logit_head ? mixed : ad::relu(tape, mixed));
      layer_alpha.push_back(std::move(alpha));
    }
    h = next;
    rec.embeddings.push_back(std::move(next));
    rec.alpha.push_back(std::move(layer_alpha));
  }
  return rec;
}

}  // namespace

ForwardArtifacts forward(const HeteroGraph& graph, std::span<const Index> droppable, const ModelParams& params,
                         const ForwardOptions& opts) {
  Tape tape;
  Recording rec = record_forward(tape, graph, droppable, params, opts, false);
  ForwardArtifacts out;
  for (const auto& layer : rec.embeddings) {
    std::vector<Matrix> values;
    for (Var v : layer) values.push_back(tape.value(v));
    out.embeddings.push_back(std::move(values));
  }
  for (const auto& layer : rec.alpha) {
    std::vector<AttentionColumns> cols;
    for (std::size_t t = 0; t < layer.size(); ++t) {
      AttentionColumns ac;
      ac.self = tape.value(layer[t][0]).col(0);
      ac.relations = graph.schema.incoming(static_cast<Index>(t));
      for (std::size_t k = 1; k < layer[t].size(); ++k) ac.cross.push_back(tape.value(layer[t][k]).col(0));
      cols.push_back(std::move(ac));
    }
    out.attention.push_back(std::move(cols));
  }
  return out;
}

ForwardArtifacts forward(const AugmentedGraph& aug, const ModelParams& params, const ForwardOptions& opts) {
  return forward(aug.graph, aug.virtual_edge_relations, params, opts);
}

ForwardArtifacts forward(const HeteroGraph& graph, const ModelParams& params, const ForwardOptions& opts) {
  return forward(graph, {}, params, opts);
}

double l2_penalty(const ModelParams& params, double l2) {
  double sum = 0.0;
  for (const Matrix* m : params.tensors()) sum += m->squaredNorm();
  return l2 * sum;
}

LossGradient loss_and_gradient(const HeteroGraph& graph, std::span<const Index> droppable, const ModelParams& params,
                               const ForwardOptions& opts, std::span<const Index> mask, double l2) {
  if (!graph.target) throw DataError("loss: graph has no labels");
  if (graph.target->type != params.target_type) throw ShapeError("loss: label type differs from the model's target type");
  if (params.plan.num_layers() == 0) throw ConfigError("loss: model has no layers");
  Tape tape;
  Recording rec = record_forward(tape, graph, droppable, params, opts, true);
  Var logits = rec.embeddings.back()[params.target_type];
  Var loss = ad::softmax_cross_entropy(tape, logits, graph.target->labels, mask);
  tape.backward(loss);

  LossGradient out;
  out.cross_entropy = tape.value(loss)(0, 0);
  out.l2_term = l2_penalty(params, l2);
  const auto tensors = params.tensors();
  for (std::size_t k = 0; k < tensors.size(); ++k) {
    Matrix g = tape.grad(rec.param_vars[k]);
    if (l2 != 0.0) g += 2.0 * l2 * (*tensors[k]);
    out.grads.push_back(std::move(g));
  }
  return out;
}

Matrix predict(const HeteroGraph& graph, const ModelParams& params) {
  if (params.plan.num_layers() == 0) throw ConfigError("predict: model has no layers");
  return ad::row_softmax(forward(graph, params, {}).output(params.target_type));
}

Matrix predict(const AugmentedGraph& aug, const ModelParams& params) { return predict(aug.graph, params); }

std::vector<int> argmax_rows(const Matrix& probs) {
  std::vector<int> out(static_cast<std::size_t>(probs.rows()));
  for (Index i = 0; i < probs.rows(); ++i) {
    Index best = 0;
    probs.row(i).maxCoeff(&best);
    out[static_cast<std::size_t>(i)] = static_cast<int>(best);
  }
  return out;
}

}  // namespace vnhgcn
