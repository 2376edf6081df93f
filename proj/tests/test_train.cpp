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


#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <set>

#include "test_support.hpp"
#include "vnhgcn/data_io.hpp"
#include "vnhgcn/eval.hpp"
#include "vnhgcn/train.hpp"

namespace vnhgcn {
namespace {

TargetLabels labels_of(Index n) {
  TargetLabels t{0, 2, std::vector<int>(static_cast<std::size_t>(n), 0)};
  return t;
}

TEST(Split, SizesFollowCeilThenHalve) {
  Split a = make_split(labels_of(10), 0.2, 1);
  EXPECT_EQ(a.train.size(), 2u);
  EXPECT_EQ(a.val.size(), 4u);
  EXPECT_EQ(a.test.size(), 4u);
  Split b = make_split(labels_of(11), 0.2, 1);
  EXPECT_EQ(b.train.size(), 3u);
  EXPECT_EQ(b.val.size(), 4u);
  EXPECT_EQ(b.test.size(), 4u);
}

TEST(Split, PartitionsLabeledNodes) {
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<int> cls(-1, 2);
  for (double ratio : {0.2, 0.4, 0.6, 0.8, 0.37}) {
    TargetLabels t{0, 3, {}};
    for (int i = 0; i < 97; ++i) t.labels.push_back(cls(rng));
    Split s = make_split(t, ratio, 5);
    std::vector<Index> all(s.train);
    all.insert(all.end(), s.val.begin(), s.val.end());
    all.insert(all.end(), s.test.begin(), s.test.end());
    std::sort(all.begin(), all.end());
    EXPECT_EQ(all, t.labeled_nodes());
    EXPECT_LE(std::abs(static_cast<long>(s.val.size()) - static_cast<long>(s.test.size())), 1);
  }
}

TEST(Split, DeterministicAndSeedSensitive) {
  Split a = make_split(labels_of(50), 0.4, 9), b = make_split(labels_of(50), 0.4, 9),
        c = make_split(labels_of(50), 0.4, 10);
  EXPECT_EQ(a.train, b.train);
  EXPECT_EQ(a.val, b.val);
  EXPECT_EQ(a.test, b.test);
  EXPECT_NE(a.train, c.train);
}

TEST(Split, NoLabeledNodesIsDataError) {
  TargetLabels t{0, 2, {-1, -1}};
  EXPECT_THROW(make_split(t, 0.2, 0), DataError);
}

TEST(Adam, ZeroGradientLeavesParamsUnchanged) {
  Matrix w = Matrix::Constant(2, 3, 0.7);
  const Matrix before = w;
  AdamState state;
  std::vector<Matrix*> params{&w};
  std::vector<Matrix> grads{Matrix::Zero(2, 3)};
  for (int i = 0; i < 10; ++i) adam_step(params, grads, state, 0.1);
  EXPECT_EQ(w, before);
  EXPECT_EQ(state.step, 10);
}

TEST(Adam, FirstStepMovesByLearningRate) {
  Matrix w = Matrix::Constant(1, 1, 2.0);
  AdamState state;
  std::vector<Matrix*> params{&w};
  std::vector<Matrix> grads{Matrix::Ones(1, 1)};
  adam_step(params, grads, state, 1e-3);
  // m_hat = 1, v_hat = 1 -> step = lr / (1 + eps).
  EXPECT_NEAR(2.0 - w(0, 0), 1e-3 / (1.0 + 1e-8), 1e-15);
}

TEST(Adam, MatchesClosedFormOverSeveralSteps) {
  Matrix w = Matrix::Constant(1, 1, 0.0);
  AdamState state;
  std::vector<Matrix*> params{&w};
  double m = 0, v = 0, x = 0;
  const double g[] = {0.5, -1.5, 2.0, 0.1};
  for (int t = 1; t <= 4; ++t) {
    std::vector<Matrix> grads{Matrix::Constant(1, 1, g[t - 1])};
    adam_step(params, grads, state, 0.01);
    m = 0.9 * m + 0.1 * g[t - 1];
    v = 0.999 * v + 0.001 * g[t - 1] * g[t - 1];
    x -= 0.01 * (m / (1 - std::pow(0.9, t))) / (std::sqrt(v / (1 - std::pow(0.999, t))) + 1e-8);
  }
  EXPECT_NEAR(w(0, 0), x, 1e-15);
}

TEST(Adam, NonFiniteGradientNamesTheTensor) {
  Matrix a = Matrix::Zero(1, 1), b = Matrix::Zero(1, 1);
  AdamState state;
  std::vector<Matrix*> params{&a, &b};
  std::vector<Matrix> grads{Matrix::Zero(1, 1), Matrix::Constant(1, 1, std::numeric_limits<double>::quiet_NaN())};
  std::vector<std::string> names{"L0.W.x", "L0.q.x"};
  try {
    adam_step(params, grads, state, 0.1, names);
    FAIL() << "expected NumericError";
  } catch (const NumericError& e) {
    EXPECT_NE(std::string(e.what()).find("L0.q.x"), std::string::npos);
  }
}

SyntheticSpec separable() {
  SyntheticSpec s;
  s.seed = 3;
  return s;
}

TrainConfig small_config() {
  TrainConfig cfg;
  cfg.epochs = 30;
  cfg.layers = 2;
  cfg.hidden_dim = 8;
  cfg.attention_dim = 4;
  cfg.n_virtual = 4;
  cfg.central_dim = 4;
  return cfg;
}

TEST(Fit, ZeroLearningRateAndL2KeepInitialParams) {
  HeteroGraph g = generate_synthetic(separable());
  TrainConfig cfg = small_config();
  cfg.learning_rate = 0.0;
  cfg.l2 = 0.0;
  cfg.epochs = 5;
  Split split = make_run_split(*g.target, 0.2, cfg.seed);
  FitResult r = fit(g, cfg, split);
  ModelParams init = init_model(r.prepared, cfg);
  auto a = init.tensors();
  auto b = r.params.tensors();
  for (std::size_t k = 0; k < a.size(); ++k) EXPECT_EQ(*a[k], *b[k]);
}

TEST(Fit, L2TermIsDirectSum) {
  std::mt19937_64 rng(4);
  HeteroGraph g = testing::random_graph(rng, 3, 20, 0.3);
  TrainConfig cfg = small_config();
  PreparedGraph prepared = prepare_graph(g, cfg);
  ModelParams p = init_model(prepared, cfg);
  double direct = 0;
  for (const LayerParams& lp : p.layers) {
    for (const auto* group : {&lp.self_weight, &lp.cross_weight, &lp.attention_proj, &lp.attention_vec})
      for (const Matrix& m : *group)
        for (Index i = 0; i < m.size(); ++i) direct += m.data()[i] * m.data()[i];
  }
  EXPECT_NEAR(l2_penalty(p, 1e-4), 1e-4 * direct, 1e-15 * direct);
  std::vector<Index> mask = g.target->labeled_nodes();
  LossGradient lg = loss_and_gradient(prepared.graph(), {}, p, {}, mask, 1e-4);
  EXPECT_NEAR(lg.l2_term, 1e-4 * direct, 1e-15 * direct);
}

TEST(Fit, SeparableGraphReachesFullTrainAccuracy) {
  HeteroGraph g = generate_synthetic(separable());
  TrainConfig cfg;
  cfg.epochs = 200;
  Split split = make_run_split(*g.target, 0.2, cfg.seed);
  FitResult r = fit(g, cfg, split);
  EXPECT_GE(evaluate(r.prepared, r.params, split.train).micro_f1, 0.99);
}

TEST(Fit, LossTrendsDownwardOverWindows) {
  HeteroGraph g = generate_synthetic(separable());
  TrainConfig cfg = small_config();
  cfg.epochs = 100;
  FitResult r = fit(g, cfg, make_run_split(*g.target, 0.2, cfg.seed));
  auto window = [&](Index begin) {
    double s = 0;
    for (Index e = begin; e < begin + 25; ++e) s += r.log[e].train_loss;
    return s / 25.0;
  };
  EXPECT_LT(r.log[99].train_loss, r.log[0].train_loss);
  for (Index w = 25; w < 100; w += 25) EXPECT_LT(window(w), window(w - 25));
}

TEST(Fit, ReturnsEarliestBestValidationEpoch) {
  HeteroGraph g = generate_synthetic(separable());
  TrainConfig cfg = small_config();
  Split split = make_run_split(*g.target, 0.2, cfg.seed);
  FitResult r = fit(g, cfg, split);
  double best = -1;
  Index best_epoch = 0;
  for (const EpochMetrics& m : r.log)
    if (m.val_micro_f1 > best) {
      best = m.val_micro_f1;
      best_epoch = m.epoch;
    }
  EXPECT_EQ(r.best_epoch, best_epoch);
  EXPECT_DOUBLE_EQ(evaluate(r.prepared, r.params, split.val).micro_f1, best);
}

TEST(Fit, Reproducible) {
  HeteroGraph g = generate_synthetic(separable());
  TrainConfig cfg = small_config();
  Split split = make_run_split(*g.target, 0.2, cfg.seed);
  FitResult a = fit(g, cfg, split), b = fit(g, cfg, split);
  EXPECT_EQ(metrics_csv(a.log), metrics_csv(b.log));
  auto ta = a.params.tensors();
  auto tb = b.params.tensors();
  for (std::size_t k = 0; k < ta.size(); ++k) EXPECT_EQ(*ta[k], *tb[k]);
}

TEST(Fit, WithoutVirtualNodesUsesThePlainSchema) {
  HeteroGraph g = generate_synthetic(separable());
  TrainConfig cfg = small_config();
  cfg.virtual_nodes = false;
  cfg.epochs = 3;
  FitResult r = fit(g, cfg, make_run_split(*g.target, 0.2, cfg.seed));
  EXPECT_FALSE(r.prepared.has_virtual_nodes);
  EXPECT_EQ(r.prepared.graph().num_types(), g.num_types());
}

TEST(Config, RejectsBadValues) {
  TrainConfig cfg;
  cfg.learning_rate = -1;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg = {};
  cfg.dropout = 1.0;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg = {};
  cfg.layers = 0;
  EXPECT_THROW(cfg.validate(), ConfigError);
}

TEST(MetricsCsv, Header) {
  EXPECT_EQ(metrics_csv({}), "epoch,train_loss,val_micro_f1,val_macro_f1\n");
}

}  // namespace
}  // namespace vnhgcn
