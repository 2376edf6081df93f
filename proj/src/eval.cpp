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


#include "vnhgcn/eval.hpp"

#include <cmath>
#include <exception>
#include <iomanip>
#include <mutex>
#include <random>
#include <sstream>
#include <thread>

namespace vnhgcn {

F1Report f1_scores(std::span<const int> predictions, std::span<const int> labels, std::span<const Index> mask,
                   Index num_classes) {
  if (mask.empty()) throw DataError("f1_scores: empty evaluation mask");
  if (num_classes < 1) throw ConfigError("f1_scores: num_classes must be >= 1");
  F1Report r;
  r.confusion = Eigen::Matrix<long, Eigen::Dynamic, Eigen::Dynamic>::Zero(num_classes, num_classes);
  for (Index i : mask) {
    const int gold = labels[static_cast<std::size_t>(i)];
    const int pred = predictions[static_cast<std::size_t>(i)];
    if (gold < 0 || gold >= num_classes || pred < 0 || pred >= num_classes)
      throw DataError("f1_scores: class index out of range on node " + std::to_string(i));
    ++r.confusion(gold, pred);
  }
  long tp_all = 0, fp_all = 0, fn_all = 0;
  double f1_sum = 0.0;
  for (Index c = 0; c < num_classes; ++c) {
    const long tp = r.confusion(c, c);
    const long fp = r.confusion.col(c).sum() - tp;
    const long fn = r.confusion.row(c).sum() - tp;
    tp_all += tp;
    fp_all += fp;
    fn_all += fn;
    r.precision.push_back(tp + fp > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0);
    r.recall.push_back(tp + fn > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 0.0);
    const double denom = static_cast<double>(tp) + 0.5 * static_cast<double>(fp + fn);
    r.f1.push_back(denom > 0.0 ? static_cast<double>(tp) / denom : 0.0);
    f1_sum += r.f1.back();
  }
  const double denom = static_cast<double>(tp_all) + 0.5 * static_cast<double>(fp_all + fn_all);
  r.micro_f1 = denom > 0.0 ? static_cast<double>(tp_all) / denom : 0.0;
  r.macro_f1 = f1_sum / static_cast<double>(num_classes);
  return r;
}

F1Report evaluate(const PreparedGraph& prepared, const ModelParams& params, std::span<const Index> mask) {
  const HeteroGraph& g = prepared.graph();
  if (!g.target) throw DataError("evaluate: graph has no labels");
  const auto pred = argmax_rows(predict(g, params));
  return f1_scores(pred, g.target->labels, mask, g.target->num_classes);
}

std::string format_report(const F1Report& report, const std::string& title) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(4);
  os << title << "\n";
  os << "  micro-F1 " << report.micro_f1 << "  macro-F1 " << report.macro_f1 << "\n";
  os << "  class  precision  recall     f1         support\n";
  for (std::size_t c = 0; c < report.f1.size(); ++c)
    os << "  " << std::setw(5) << c << "  " << report.precision[c] << "     " << report.recall[c] << "     "
       << report.f1[c] << "     " << report.confusion.row(static_cast<Index>(c)).sum() << "\n";
  os << "  confusion (rows gold, cols predicted):\n";
  for (Index i = 0; i < report.confusion.rows(); ++i) {
    os << "   ";
    for (Index j = 0; j < report.confusion.cols(); ++j) os << " " << std::setw(6) << report.confusion(i, j);
    os << "\n";
  }
  return os.str();
}

std::string report_csv(const F1Report& report) {
  std::ostringstream os;
  os.precision(17);
  os << "class,precision,recall,f1,support\n";
  for (std::size_t c = 0; c < report.f1.size(); ++c)
    os << c << "," << report.precision[c] << "," << report.recall[c] << "," << report.f1[c] << ","
       << report.confusion.row(static_cast<Index>(c)).sum() << "\n";
  os << "micro,,," << report.micro_f1 << "," << report.confusion.sum() << "\n";
  os << "macro,,," << report.macro_f1 << "," << report.confusion.sum() << "\n";
  return os.str();
}

std::pair<PerturbationGrid, PerturbationGrid> perturbation_study(const HeteroGraph& graph, const PreparedGraph& vn,
                                                                 const ModelParams& params_vn,
                                                                 const PreparedGraph& plain,
                                                                 const ModelParams& params_plain,
                                                                 const PerturbationOptions& opts) {
  if (!graph.target) throw DataError("perturbation: graph has no target type");
  const Index ttype = graph.target->type;
  const NodeRef target{ttype, opts.target_node};
  if (opts.target_node < 0 || opts.target_node >= graph.node_counts[ttype])
    throw ConfigError("perturbation: target node " + std::to_string(opts.target_node) + " out of range for type '" +
                      graph.schema.type(ttype).name + "'");
  for (double v : opts.variances)
    if (!(v >= 0.0) || !std::isfinite(v)) throw ConfigError("perturbation: variances must be finite and >= 0");
  for (const PreparedGraph* p : {&vn, &plain})
    for (Index t = 0; t < graph.num_types(); ++t)
      if (p->graph().features[t].rows() != graph.features[t].rows() ||
          p->graph().features[t].cols() != graph.features[t].cols())
        throw ShapeError("perturbation: model graph does not extend the given graph");

  const auto dist = hop_distances(graph, target);
  auto embedding = [&](const HeteroGraph& g, const ModelParams& p) -> Vector {
    return forward(g, p, {}).output(ttype).row(opts.target_node).transpose();
  };
  const Vector clean_vn = embedding(vn.graph(), params_vn);
  const Vector clean_plain = embedding(plain.graph(), params_plain);

  PerturbationGrid gv{"vn", target, opts.hops, opts.variances, {}};
  PerturbationGrid gp{"plain", target, opts.hops, opts.variances, {}};
  gv.values.assign(opts.variances.size(), std::vector<std::optional<double>>(opts.hops.size()));
  gp.values = gv.values;

  for (std::size_t h = 0; h < opts.hops.size(); ++h) {
    const int k = opts.hops[h];
    std::vector<NodeRef> shell;
    for (Index t = 0; t < graph.num_types(); ++t) {
      if (opts.same_type_only && t != ttype) continue;
      for (std::size_t v = 0; v < dist[t].size(); ++v)
        if (dist[t][v] == k) shell.push_back({t, static_cast<Index>(v)});
    }
    if (shell.empty()) continue;

    // One standard-normal draw per cell, shared by both models and scaled
    // by sqrt(variance).
    std::mt19937_64 rng(derive_seed(opts.seed, static_cast<std::uint64_t>(k)));
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<Vector> noise;
    for (const NodeRef& n : shell) {
      Vector z(graph.feature_dim(n.type));
      for (Index j = 0; j < z.size(); ++j) z(j) = gauss(rng);
      noise.push_back(std::move(z));
    }
    for (std::size_t vi = 0; vi < opts.variances.size(); ++vi) {
      const double scale = std::sqrt(opts.variances[vi]);
      auto perturbed = [&](const HeteroGraph& base) {
        HeteroGraph g = base;
        for (std::size_t s = 0; s < shell.size(); ++s)
          g.features[shell[s].type].row(shell[s].node) += scale * noise[s].transpose();
        return g;
      };
      gv.values[vi][h] = (embedding(perturbed(vn.graph()), params_vn) - clean_vn).norm();
      gp.values[vi][h] = (embedding(perturbed(plain.graph()), params_plain) - clean_plain).norm();
    }
  }
  return {std::move(gv), std::move(gp)};
}

std::string grid_csv(const PerturbationGrid& grid) {
  std::ostringstream os;
  os.precision(17);
  os << "# perturbation grid: ||delta H|| of the target's final embedding\n";
  os << "# model=" << grid.model << " target_type=" << grid.target.type << " target_node=" << grid.target.node
     << " rows=variance columns=hop empty=no node at that hop\n";
  os << "variance";
  for (int k : grid.hops) os << ",hop_" << k;
  os << "\n";
  for (std::size_t v = 0; v < grid.variances.size(); ++v) {
    os << grid.variances[v];
    for (std::size_t h = 0; h < grid.hops.size(); ++h) {
      os << ",";
      if (grid.values[v][h]) os << *grid.values[v][h];
    }
    os << "\n";
  }
  return os.str();
}

SweepAxis parse_sweep_axis(const std::string& s) {
  if (s == "hidden_dim") return SweepAxis::kHiddenDim;
  if (s == "layers") return SweepAxis::kLayers;
  if (s == "n_virtual") return SweepAxis::kNVirtual;
  throw ConfigError("unknown sweep axis '" + s + "' (valid axes: hidden_dim, layers, n_virtual)");
}

std::string to_string(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::kHiddenDim:
      return "hidden_dim";
    case SweepAxis::kLayers:
      return "layers";
    case SweepAxis::kNVirtual:
      return "n_virtual";
  }
  return "?";
}

namespace {

std::pair<double, double> mean_std(const std::vector<double>& xs) {
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(xs.size());
  if (xs.size() < 2) return {mean, 0.0};
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return {mean, std::sqrt(ss / static_cast<double>(xs.size() - 1))};
}

}  // namespace

std::vector<SweepRow> sweep(const HeteroGraph& graph, const TrainConfig& base, SweepAxis axis,
                            std::span<const Index> values, std::span<const std::uint64_t> seeds, double ratio,
                            int jobs) {
  if (values.empty()) throw ConfigError("sweep: no values given");
  if (seeds.empty()) throw ConfigError("sweep: no seeds given");
  if (!graph.target) throw DataError("sweep: graph has no labels");

  const std::size_t ncells = values.size() * seeds.size();
  std::vector<F1Report> results(ncells);
  std::vector<std::exception_ptr> errors(ncells);
  auto run_cell = [&](std::size_t cell) {
    const std::size_t vi = cell / seeds.size();
    const std::size_t si = cell % seeds.size();
    try {
      TrainConfig cfg = base;
      cfg.seed = seeds[si];
      switch (axis) {
        case SweepAxis::kHiddenDim:
          cfg.hidden_dim = values[vi];
          break;
        case SweepAxis::kLayers:
          cfg.layers = values[vi];
          break;
        case SweepAxis::kNVirtual:
          cfg.n_virtual = values[vi];
          break;
      }
      const Split split = make_run_split(*graph.target, ratio, seeds[si]);
      FitResult fr = fit(graph, cfg, split);
      results[cell] = evaluate(fr.prepared, fr.params, split.test);
    } catch (const Error& e) {
      const std::string where = "sweep cell (" + to_string(axis) + "=" + std::to_string(values[vi]) +
                                ", seed=" + std::to_string(seeds[si]) + "): ";
      switch (e.category()) {
        case ErrorCategory::kConfig:
          errors[cell] = std::make_exception_ptr(ConfigError(where + e.what()));
          break;
        case ErrorCategory::kData:
          errors[cell] = std::make_exception_ptr(DataError(where + e.what()));
          break;
        case ErrorCategory::kNumeric:
          errors[cell] = std::make_exception_ptr(NumericError(where + e.what()));
          break;
      }
    } catch (...) {
      errors[cell] = std::current_exception();
    }
  };

  const std::size_t nthreads = std::max<std::size_t>(1, std::min<std::size_t>(static_cast<std::size_t>(std::max(jobs, 1)), ncells));
  if (nthreads == 1) {
    for (std::size_t c = 0; c < ncells; ++c) run_cell(c);
  } else {
    std::mutex mu;
    std::size_t next = 0;
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < nthreads; ++w)
      pool.emplace_back([&] {
        for (;;) {
          std::size_t c;
          {
            std::lock_guard<std::mutex> lock(mu);
            if (next == ncells) return;
            c = next++;
          }
          run_cell(c);
        }
      });
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);

  std::vector<SweepRow> rows;
  for (std::size_t vi = 0; vi < values.size(); ++vi) {
    std::vector<double> micro, macro;
    for (std::size_t si = 0; si < seeds.size(); ++si) {
      micro.push_back(results[vi * seeds.size() + si].micro_f1);
      macro.push_back(results[vi * seeds.size() + si].macro_f1);
    }
    SweepRow row;
    row.value = values[vi];
    row.runs = static_cast<Index>(seeds.size());
    std::tie(row.micro_mean, row.micro_std) = mean_std(micro);
    std::tie(row.macro_mean, row.macro_std) = mean_std(macro);
    rows.push_back(row);
  }
  return rows;
}

std::string sweep_csv(const std::vector<SweepRow>& rows, SweepAxis axis) {
  std::ostringstream os;
  os.precision(17);
  os << "# sweep over " << to_string(axis) << ": test-set F1, mean and sample std over seeds\n";
  os << to_string(axis) << ",runs,micro_f1_mean,micro_f1_std,macro_f1_mean,macro_f1_std\n";
  for (const auto& r : rows)
    os << r.value << "," << r.runs << "," << r.micro_mean << "," << r.micro_std << "," << r.macro_mean << ","
       << r.macro_std << "\n";
  return os.str();
}

}  // namespace vnhgcn
