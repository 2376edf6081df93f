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

#include <cmath>
#include <random>

#include "vnhgcn/data_io.hpp"
#include "vnhgcn/eval.hpp"

namespace vnhgcn {
namespace {

std::vector<Index> all_of(std::size_t n) {
  std::vector<Index> m(n);
  for (std::size_t i = 0; i < n; ++i) m[i] = static_cast<Index>(i);
  return m;
}

TEST(F1, PerfectPredictions) {
  std::vector<int> y{0, 1, 2, 2, 1, 0};
  F1Report r = f1_scores(y, y, all_of(y.size()), 3);
  EXPECT_EQ(r.micro_f1, 1.0);
  EXPECT_EQ(r.macro_f1, 1.0);
}

TEST(F1, BinaryHandExample) {
  std::vector<int> pred{0, 0, 0, 0}, gold{0, 0, 1, 1};
  F1Report r = f1_scores(pred, gold, all_of(4), 2);
  EXPECT_DOUBLE_EQ(r.micro_f1, 0.5);
  EXPECT_DOUBLE_EQ(r.macro_f1, 1.0 / 3.0);
}

TEST(F1, MatchesBruteForceCountingOracle) {
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<int> cls(0, 3);
  std::bernoulli_distribution keep(0.8);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<int> pred, gold;
    std::vector<Index> mask;
    for (int i = 0; i < 100; ++i) {
      pred.push_back(cls(rng));
      gold.push_back(cls(rng));
      if (keep(rng)) mask.push_back(i);
    }
    const int C = 4;
    double tp_all = 0, fp_all = 0, fn_all = 0, macro = 0;
    for (int c = 0; c < C; ++c) {
      double tp = 0, fp = 0, fn = 0;
      for (Index i : mask) {
        tp += pred[i] == c && gold[i] == c;
        fp += pred[i] == c && gold[i] != c;
        fn += pred[i] != c && gold[i] == c;
      }
      tp_all += tp;
      fp_all += fp;
      fn_all += fn;
      macro += (tp + fp + fn) > 0 ? tp / (tp + 0.5 * (fp + fn)) : 0.0;
    }
    F1Report r = f1_scores(pred, gold, mask, C);
    EXPECT_DOUBLE_EQ(r.micro_f1, tp_all / (tp_all + 0.5 * (fp_all + fn_all)));
    EXPECT_DOUBLE_EQ(r.macro_f1, macro / C);
    long correct = 0;
    for (Index i : mask) correct += pred[i] == gold[i];
    EXPECT_EQ(r.micro_f1, static_cast<double>(r.confusion.diagonal().sum()) / static_cast<double>(r.confusion.sum()));
    EXPECT_EQ(r.confusion.diagonal().sum(), correct);
    for (int c = 0; c < C; ++c) {
      long support = 0;
      for (Index i : mask) support += gold[i] == c;
      EXPECT_EQ(r.confusion.row(c).sum(), support);
    }
  }
}

TEST(F1, EmptyMaskIsAnError) {
  std::vector<int> y{0};
  EXPECT_THROW(f1_scores(y, y, std::vector<Index>{}, 2), DataError);
}

TEST(F1, AbsentClassScoresZeroInMacro) {
  std::vector<int> y{0, 0, 1};
  F1Report r = f1_scores(y, y, all_of(3), 3);
  EXPECT_DOUBLE_EQ(r.macro_f1, 2.0 / 3.0);
  EXPECT_EQ(r.micro_f1, 1.0);
}

class Perturbation : public ::testing::Test {
 protected:
  void SetUp() override {
    SyntheticSpec spec;
    spec.kind = SyntheticSpec::Kind::kTypedChain;
    spec.chain_length = 12;
    graph_ = generate_synthetic(spec);
    TrainConfig cfg;
    cfg.layers = 4;
    cfg.hidden_dim = 8;
    cfg.attention_dim = 4;
    cfg.n_virtual = 2;
    cfg.central_dim = 4;
    vn_ = prepare_graph(graph_, cfg);
    params_vn_ = init_model(vn_, cfg);
    cfg.virtual_nodes = false;
    plain_ = prepare_graph(graph_, cfg);
    params_plain_ = init_model(plain_, cfg);
  }
  std::pair<PerturbationGrid, PerturbationGrid> run(PerturbationOptions opts) {
    return perturbation_study(graph_, vn_, params_vn_, plain_, params_plain_, opts);
  }
  HeteroGraph graph_;
  PreparedGraph vn_, plain_;
  ModelParams params_vn_, params_plain_;
};

TEST_F(Perturbation, ZeroVarianceGivesZero) {
  PerturbationOptions opts;
  opts.variances = {0.0};
  opts.same_type_only = false;
  auto [vn, plain] = run(opts);
  for (const auto* g : {&vn, &plain})
    for (const auto& cell : g->values[0]) {
      ASSERT_TRUE(cell.has_value());
      EXPECT_EQ(*cell, 0.0);
    }
}

TEST_F(Perturbation, PlainModelIsBlindBeyondItsDepth) {
  PerturbationOptions opts;
  opts.same_type_only = false;
  auto [vn, plain] = run(opts);
  for (std::size_t v = 0; v < opts.variances.size(); ++v)
    for (std::size_t h = 0; h < opts.hops.size(); ++h)
      if (opts.hops[h] > 4) {
        ASSERT_TRUE(plain.values[v][h].has_value());
        EXPECT_EQ(*plain.values[v][h], 0.0) << "hop " << opts.hops[h];
      }
}

TEST_F(Perturbation, VirtualNodesReachEightHops) {
  PerturbationOptions opts;
  opts.hops = {8};
  auto [vn, plain] = run(opts);
  for (std::size_t v = 0; v < opts.variances.size(); ++v) {
    ASSERT_TRUE(vn.values[v][0].has_value());
    EXPECT_GT(*vn.values[v][0], 0.0);
    EXPECT_EQ(*plain.values[v][0], 0.0);
  }
}

TEST_F(Perturbation, SameTypeShellsAtOddHopsAreEmpty) {
  PerturbationOptions opts;
  auto [vn, plain] = run(opts);
  for (std::size_t h = 0; h < opts.hops.size(); ++h)
    EXPECT_EQ(vn.values[0][h].has_value(), opts.hops[h] % 2 == 0) << "hop " << opts.hops[h];
  EXPECT_NE(grid_csv(vn).find("variance,hop_3,hop_4"), std::string::npos);
}

TEST_F(Perturbation, DeterministicForFixedSeed) {
  PerturbationOptions opts;
  opts.same_type_only = false;
  auto a = run(opts);
  auto b = run(opts);
  EXPECT_EQ(grid_csv(a.first), grid_csv(b.first));
  EXPECT_EQ(grid_csv(a.second), grid_csv(b.second));
}

TEST_F(Perturbation, TargetOutOfRangeIsConfigError) {
  PerturbationOptions opts;
  opts.target_node = 100;
  EXPECT_THROW(run(opts), ConfigError);
}

TrainConfig sweep_config() {
  TrainConfig cfg;
  cfg.epochs = 8;
  cfg.layers = 2;
  cfg.hidden_dim = 8;
  cfg.attention_dim = 4;
  cfg.n_virtual = 4;
  cfg.central_dim = 4;
  return cfg;
}

HeteroGraph small_partition() {
  SyntheticSpec spec;
  spec.target_nodes = 60;
  spec.bridge_nodes = {12, 6};
  return generate_synthetic(spec);
}

TEST(Sweep, SingleCellEqualsDirectFit) {
  HeteroGraph g = small_partition();
  TrainConfig cfg = sweep_config();
  std::vector<Index> values{8};
  std::vector<std::uint64_t> seeds{5};
  auto rows = sweep(g, cfg, SweepAxis::kHiddenDim, values, seeds, 0.2);
  ASSERT_EQ(rows.size(), 1u);
  cfg.seed = 5;
  Split split = make_run_split(*g.target, 0.2, 5);
  FitResult r = fit(g, cfg, split);
  F1Report direct = evaluate(r.prepared, r.params, split.test);
  EXPECT_EQ(rows[0].value, 8);
  EXPECT_EQ(rows[0].runs, 1);
  EXPECT_EQ(rows[0].micro_mean, direct.micro_f1);
  EXPECT_EQ(rows[0].macro_mean, direct.macro_f1);
  EXPECT_EQ(rows[0].micro_std, 0.0);
}

TEST(Sweep, TwoSeedsUseSampleStd) {
  HeteroGraph g = small_partition();
  TrainConfig cfg = sweep_config();
  std::vector<Index> values{2};
  std::vector<std::uint64_t> seeds{1, 2};
  auto rows = sweep(g, cfg, SweepAxis::kLayers, values, seeds, 0.2);
  ASSERT_EQ(rows.size(), 1u);
  double m[2];
  for (int k = 0; k < 2; ++k) {
    cfg.seed = seeds[k];
    Split split = make_run_split(*g.target, 0.2, seeds[k]);
    FitResult r = fit(g, cfg, split);
    m[k] = evaluate(r.prepared, r.params, split.test).micro_f1;
  }
  const double mean = (m[0] + m[1]) / 2;
  const double sd = std::sqrt(((m[0] - mean) * (m[0] - mean) + (m[1] - mean) * (m[1] - mean)) / 1.0);
  EXPECT_EQ(rows[0].runs, 2);
  EXPECT_NEAR(rows[0].micro_mean, mean, 1e-15);
  EXPECT_NEAR(rows[0].micro_std, sd, 1e-15);
}

TEST(Sweep, LayersAxisGivesOneRowPerValueAndJobsDoNotMatter) {
  HeteroGraph g = small_partition();
  TrainConfig cfg = sweep_config();
  cfg.epochs = 3;
  std::vector<Index> values{2, 4, 6, 8};
  std::vector<std::uint64_t> seeds{0};
  auto serial = sweep(g, cfg, SweepAxis::kLayers, values, seeds, 0.2, 1);
  auto parallel = sweep(g, cfg, SweepAxis::kLayers, values, seeds, 0.2, 3);
  ASSERT_EQ(serial.size(), 4u);
  for (std::size_t i = 0; i < 4; ++i) EXPECT_EQ(serial[i].value, values[i]);
  EXPECT_EQ(sweep_csv(serial, SweepAxis::kLayers), sweep_csv(parallel, SweepAxis::kLayers));
}

TEST(Sweep, AxisNames) {
  EXPECT_EQ(parse_sweep_axis("n_virtual"), SweepAxis::kNVirtual);
  EXPECT_EQ(to_string(parse_sweep_axis("hidden_dim")), "hidden_dim");
  try {
    parse_sweep_axis("depth");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("layers"), std::string::npos);
  }
}

TEST(Sweep, EmptyValuesIsConfigError) {
  HeteroGraph g = small_partition();
  std::vector<Index> values;
  std::vector<std::uint64_t> seeds{0};
  EXPECT_THROW(sweep(g, sweep_config(), SweepAxis::kLayers, values, seeds, 0.2), ConfigError);
}

}  // namespace
}  // namespace vnhgcn
