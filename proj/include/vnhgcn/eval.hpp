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
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "vnhgcn/train.hpp"

namespace vnhgcn {

struct F1Report {
  double micro_f1 = 0.0;
  double macro_f1 = 0.0;
  std::vector<double> precision;
  std::vector<double> recall;
  std::vector<double> f1;
  /// confusion(gold, predicted) counts over the masked nodes.
  Eigen::Matrix<long, Eigen::Dynamic, Eigen::Dynamic> confusion;
};

/// Micro-F1 pools TP/FP/FN over classes (equal to accuracy here); Macro-F1
/// is the unweighted mean of per-class F1, where a class that is neither
/// predicted nor present scores 0.
F1Report f1_scores(std::span<const int> predictions, std::span<const int> labels, std::span<const Index> mask,
                   Index num_classes);

/// Inference-mode predictions of `params` on `prepared`, scored over `mask`.
F1Report evaluate(const PreparedGraph& prepared, const ModelParams& params, std::span<const Index> mask);

std::string format_report(const F1Report& report, const std::string& title);
/// CSV rows: class,precision,recall,f1,support plus micro/macro summary rows.
std::string report_csv(const F1Report& report);

struct PerturbationGrid {
  std::string model;
  NodeRef target;
  std::vector<int> hops;
  std::vector<double> variances;
  /// values[v][h] = ||delta H_target||_2, or empty when hop h has no node to perturb.
  std::vector<std::vector<std::optional<double>>> values;
};

struct PerturbationOptions {
  Index target_node = 0;
  std::vector<int> hops{3, 4, 5, 6, 7, 8, 9, 10};
  std::vector<double> variances{0.1, 0.5, 1.0, 2.0};
  std::uint64_t seed = 0;
  /// Only perturb nodes of the target's own type.
  bool same_type_only = true;
};

/// Adds N(0, variance) noise to the features of nodes exactly k hops (in
/// `graph`) from the target and records how far the target's final
/// embedding moves, for both models under identical noise draws.
std::pair<PerturbationGrid, PerturbationGrid> perturbation_study(const HeteroGraph& graph, const PreparedGraph& vn,
                                                                 const ModelParams& params_vn,
                                                                 const PreparedGraph& plain,
                                                                 const ModelParams& params_plain,
                                                                 const PerturbationOptions& opts);

/// Rows are variances, columns hops; empty cells are left blank.
std::string grid_csv(const PerturbationGrid& grid);

enum class SweepAxis { kHiddenDim, kLayers, kNVirtual };

SweepAxis parse_sweep_axis(const std::string& s);
std::string to_string(SweepAxis axis);

struct SweepRow {
  Index value = 0;
  Index runs = 0;
  double micro_mean = 0.0;
  double micro_std = 0.0;
  double macro_mean = 0.0;
  double macro_std = 0.0;
};

/// One fit per (value, seed) with the split and model seeded by `seed`;
/// aggregates test Micro/Macro-F1 (sample std, 0 for a single run). Up to
/// `jobs` cells run concurrently; results do not depend on `jobs`.
std::vector<SweepRow> sweep(const HeteroGraph& graph, const TrainConfig& base, SweepAxis axis,
                            std::span<const Index> values, std::span<const std::uint64_t> seeds, double ratio,
                            int jobs = 1);

std::string sweep_csv(const std::vector<SweepRow>& rows, SweepAxis axis);

}  // namespace vnhgcn
