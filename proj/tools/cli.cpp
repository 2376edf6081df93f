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


#include "cli.hpp"

#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "vnhgcn/checkpoint.hpp"
#include "vnhgcn/data_io.hpp"
#include "vnhgcn/eval.hpp"

namespace vnhgcn::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json to_json_object(const RunConfig& c, bool with_out) {
  const TrainConfig& t = c.train;
  json j = {{"data", c.data},
            {"ratio", c.ratio},
            {"seed", t.seed},
            {"epochs", t.epochs},
            {"lr", t.learning_rate},
            {"l2", t.l2},
            {"dropout", t.dropout},
            {"drop_edge", t.drop_edge},
            {"layers", t.layers},
            {"hidden_dim", t.hidden_dim},
            {"d_a", t.attention_dim},
            {"n_virtual", t.n_virtual},
            {"central_dim", t.central_dim},
            {"assignment", to_string(t.assignment)},
            {"virtual_nodes", t.virtual_nodes}};
  if (with_out) j["out"] = c.out;
  return j;
}

std::string read_text(const fs::path& p) {
  std::ifstream in(p);
  if (!in) throw ConfigError("cannot read '" + p.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Run-level flags shared by train, perturb and sweep. Values given on the
/// command line override the config file.
struct RunFlags {
  std::string config_file;
  RunConfig values;
  std::string assignment = "uniform-random";
  bool no_virtual_nodes = false;
  std::vector<std::pair<CLI::Option*, std::function<void(RunConfig&)>>> setters;

  template <typename T>
  void bind(CLI::App* app, const std::string& name, T& slot, const std::string& help,
            std::function<void(RunConfig&)> apply) {
    setters.emplace_back(app->add_option(name, slot, help), std::move(apply));
  }

  void attach(CLI::App* app, bool with_out) {
    app->add_option("--config", config_file, "JSON run config; flags override its values");
    auto& v = values;
    bind(app, "--data", v.data, "dataset directory or manifest.json", [this](RunConfig& c) { c.data = values.data; });
    if (with_out)
      bind(app, "--out", v.out, "output directory (default: run)", [this](RunConfig& c) { c.out = values.out; });
    bind(app, "--ratio", v.ratio, "training fraction of labeled nodes (default 0.2)",
         [this](RunConfig& c) { c.ratio = values.ratio; });
    bind(app, "--seed", v.train.seed, "root seed (default 0)", [this](RunConfig& c) { c.train.seed = values.train.seed; });
    bind(app, "--epochs", v.train.epochs, "training epochs (default 1000)",
         [this](RunConfig& c) { c.train.epochs = values.train.epochs; });
    bind(app, "--lr", v.train.learning_rate, "Adam learning rate (default 1e-3)",
         [this](RunConfig& c) { c.train.learning_rate = values.train.learning_rate; });
    bind(app, "--l2", v.train.l2, "L2 coefficient (default 1e-4)", [this](RunConfig& c) { c.train.l2 = values.train.l2; });
    bind(app, "--dropout", v.train.dropout, "dropout rate (default 0.2)",
         [this](RunConfig& c) { c.train.dropout = values.train.dropout; });
    bind(app, "--drop-edge", v.train.drop_edge, "virtual drop-edge rate (default 0.2)",
         [this](RunConfig& c) { c.train.drop_edge = values.train.drop_edge; });
    bind(app, "--layers", v.train.layers, "number of layers (default 4)",
         [this](RunConfig& c) { c.train.layers = values.train.layers; });
    bind(app, "--hidden-dim", v.train.hidden_dim, "hidden width (default 64)",
         [this](RunConfig& c) { c.train.hidden_dim = values.train.hidden_dim; });
    bind(app, "--d-a", v.train.attention_dim, "attention width (default 64)",
         [this](RunConfig& c) { c.train.attention_dim = values.train.attention_dim; });
    bind(app, "--n-virtual", v.train.n_virtual, "virtual nodes per type (default 16)",
         [this](RunConfig& c) { c.train.n_virtual = values.train.n_virtual; });
    bind(app, "--central-dim", v.train.central_dim, "central node feature width (default 64)",
         [this](RunConfig& c) { c.train.central_dim = values.train.central_dim; });
    bind(app, "--assignment", assignment, "uniform-random | round-robin",
         [this](RunConfig& c) { c.train.assignment = parse_assignment(assignment); });
    setters.emplace_back(app->add_flag("--no-virtual-nodes", no_virtual_nodes, "train without virtual nodes"),
                         [](RunConfig& c) { c.train.virtual_nodes = false; });
  }

  RunConfig resolve() const {
    RunConfig cfg;
    if (!config_file.empty()) merge_json(cfg, read_text(config_file), config_file);
    for (const auto& [opt, apply] : setters)
      if (opt->count() > 0) apply(cfg);
    if (cfg.data.empty()) throw ConfigError("no dataset given: pass --data <dir> (or set \"data\" in --config)");
    if (!(cfg.ratio > 0.0 && cfg.ratio < 1.0)) throw ConfigError("--ratio must lie in (0, 1)");
    cfg.train.validate();
    return cfg;
  }
};

void ensure_dir(const fs::path& p) {
  std::error_code ec;
  fs::create_directories(p, ec);
  if (ec) throw ConfigError("cannot create output directory '" + p.string() + "': " + ec.message());
}

HeteroGraph load_labeled(const std::string& path) {
  HeteroGraph g = load_dataset(path);
  if (!g.target) throw DataError("dataset '" + path + "' has no target labels");
  return g;
}

Checkpoint make_checkpoint(const FitResult& fr, const RunConfig& cfg) {
  Checkpoint ckpt = to_checkpoint(fr.params, fr.prepared.graph().schema);
  ckpt.meta["run_config"] = to_json_object(cfg, false).dump();
  ckpt.meta["virtual_nodes"] = cfg.train.virtual_nodes ? "1" : "0";
  ckpt.meta["best_epoch"] = std::to_string(fr.best_epoch);
  return ckpt;
}

struct LoadedModel {
  RunConfig cfg;
  PreparedGraph prepared;
  ModelParams params;
};

LoadedModel load_model(const std::string& checkpoint_path, const HeteroGraph& graph, const RunConfig& stored) {
  const Checkpoint ckpt = read_checkpoint(checkpoint_path);
  LoadedModel m;
  m.cfg = stored;
  m.prepared = prepare_graph(graph, m.cfg.train);
  m.params = params_from_checkpoint(ckpt, m.prepared.graph().schema);
  check_params_for_graph(m.prepared.graph(), m.params);
  return m;
}

RunConfig stored_config(const std::string& checkpoint_path) {
  const Checkpoint ckpt = read_checkpoint(checkpoint_path);
  RunConfig cfg;
  merge_json(cfg, ckpt.require("run_config"), checkpoint_path);
  return cfg;
}

std::string summary(const HeteroGraph& g) {
  std::ostringstream os;
  os << "node types:\n";
  for (const auto& t : g.schema.node_types())
    os << "  " << t.name << "  nodes=" << g.node_counts[t.index] << "  features=" << g.feature_dim(t.index) << "\n";
  os << "relations:\n";
  for (const auto& r : g.schema.relations())
    os << "  " << r.name << "  " << g.schema.type(r.src_type).name << " -> " << g.schema.type(r.dst_type).name
       << "  edges=" << g.adj(r.index).nnz() << "  inverse=" << g.schema.relation(r.inverse).name << "\n";
  if (g.target)
    os << "target: " << g.schema.type(g.target->type).name << "  classes=" << g.target->num_classes
       << "  labeled=" << g.target->labeled_nodes().size() << "\n";
  return os.str();
}

int cmd_train(const RunConfig& cfg, std::ostream& out) {
  const HeteroGraph graph = load_labeled(cfg.data);
  const Split split = make_run_split(*graph.target, cfg.ratio, cfg.train.seed);
  const FitResult fr = fit(graph, cfg.train, split);
  const fs::path dir = cfg.out;
  ensure_dir(dir);
  write_checkpoint(dir / "checkpoint.bin", make_checkpoint(fr, cfg));
  write_file_atomic(dir / "metrics.csv", metrics_csv(fr.log));
  write_file_atomic(dir / "config.json", to_json_object(cfg, true).dump(2) + "\n");
  const F1Report test = evaluate(fr.prepared, fr.params, split.test);
  out << "trained " << cfg.train.epochs << " epochs; best epoch " << fr.best_epoch << " (val micro-F1 "
      << fr.log[fr.best_epoch - 1].val_micro_f1 << ")\n";
  out << "test micro-F1 " << test.micro_f1 << "  macro-F1 " << test.macro_f1 << "\n";
  out << "wrote " << (dir / "checkpoint.bin").string() << ", metrics.csv, config.json\n";
  return 0;
}

}  // namespace

std::string to_json(const RunConfig& cfg) { return to_json_object(cfg, true).dump(2) + "\n"; }

void merge_json(RunConfig& cfg, const std::string& text, const std::string& origin) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(origin + ": " + e.what());
  }
  if (!j.is_object()) throw ConfigError(origin + ": expected a JSON object");
  TrainConfig& t = cfg.train;
  for (const auto& [key, value] : j.items()) {
    try {
      if (key == "data") cfg.data = value.get<std::string>();
      else if (key == "out") cfg.out = value.get<std::string>();
      else if (key == "ratio") cfg.ratio = value.get<double>();
      else if (key == "seed") t.seed = value.get<std::uint64_t>();
      else if (key == "epochs") t.epochs = value.get<Index>();
      else if (key == "lr") t.learning_rate = value.get<double>();
      else if (key == "l2") t.l2 = value.get<double>();
      else if (key == "dropout") t.dropout = value.get<double>();
      else if (key == "drop_edge") t.drop_edge = value.get<double>();
      else if (key == "layers") t.layers = value.get<Index>();
      else if (key == "hidden_dim") t.hidden_dim = value.get<Index>();
      else if (key == "d_a") t.attention_dim = value.get<Index>();
      else if (key == "n_virtual") t.n_virtual = value.get<Index>();
      else if (key == "central_dim") t.central_dim = value.get<Index>();
      else if (key == "assignment") t.assignment = parse_assignment(value.get<std::string>());
      else if (key == "virtual_nodes") t.virtual_nodes = value.get<bool>();
      else throw ConfigError(origin + ": unknown config key '" + key + "'");
    } catch (const json::exception&) {
      throw ConfigError(origin + ": config key '" + key + "' has the wrong type");
    }
  }
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"vnhgcn: heterogeneous graph convolution with hierarchical virtual nodes"};
  app.require_subcommand(1);

  RunFlags train_flags;
  auto* train = app.add_subcommand("train", "train a model; writes checkpoint.bin, metrics.csv, config.json");
  train_flags.attach(train, true);

  std::string eval_ckpt, eval_data, eval_out;
  double eval_ratio = 0.0;
  std::uint64_t eval_seed = 0;
  auto* eval = app.add_subcommand("eval", "score a checkpoint on its validation and test split");
  eval->add_option("--checkpoint", eval_ckpt, "checkpoint.bin from train")->required();
  eval->add_option("--data", eval_data, "dataset (default: the one recorded in the checkpoint)");
  auto* eval_ratio_opt = eval->add_option("--ratio", eval_ratio, "override the split ratio");
  auto* eval_seed_opt = eval->add_option("--seed", eval_seed, "override the split seed");
  eval->add_option("--out", eval_out, "directory for report_val.csv / report_test.csv");

  RunFlags perturb_flags;
  std::string ckpt_vn, ckpt_plain;
  bool train_both = false, all_types = false;
  PerturbationOptions popts;
  auto* perturb = app.add_subcommand("perturb", "long-range perturbation study (vn vs plain model)");
  perturb_flags.attach(perturb, true);
  perturb->add_option("--checkpoint-vn", ckpt_vn, "checkpoint trained with virtual nodes");
  perturb->add_option("--checkpoint-plain", ckpt_plain, "checkpoint trained without virtual nodes");
  perturb->add_flag("--train-both", train_both, "train both models from the run flags first");
  perturb->add_option("--hops", popts.hops, "hop distances (default 3..10)");
  perturb->add_option("--variances", popts.variances, "noise variances (default 0.1 0.5 1 2)");
  perturb->add_option("--target", popts.target_node, "target node id within the target type (default 0)");
  perturb->add_flag("--all-types", all_types, "perturb nodes of every type, not only the target's");

  RunFlags sweep_flags;
  std::string axis_name;
  std::vector<Index> sweep_values;
  std::vector<std::uint64_t> sweep_seeds;
  int jobs = 1;
  auto* sweep_cmd = app.add_subcommand("sweep", "hyperparameter sensitivity sweep");
  sweep_flags.attach(sweep_cmd, true);
  sweep_cmd->add_option("--axis", axis_name, "hidden_dim | layers | n_virtual")->required();
  sweep_cmd->add_option("--values", sweep_values, "axis values")->required();
  sweep_cmd->add_option("--seeds", sweep_seeds, "seeds (default: --seed)");
  sweep_cmd->add_option("--jobs", jobs, "concurrent cells (default 1)");

  std::string inspect_data, inspect_assignment = "uniform-random";
  TrainConfig inspect_cfg;
  Index max_rows = 20;
  auto* inspect = app.add_subcommand("augment-inspect", "print the augmented schema and virtual-node assignment");
  inspect->add_option("--data", inspect_data, "dataset directory")->required();
  inspect->add_option("--n-virtual", inspect_cfg.n_virtual, "virtual nodes per type (default 16)");
  inspect->add_option("--seed", inspect_cfg.seed, "root seed (default 0)");
  inspect->add_option("--central-dim", inspect_cfg.central_dim, "central node width (default 64)");
  inspect->add_option("--assignment", inspect_assignment, "uniform-random | round-robin");
  inspect->add_option("--max-rows", max_rows, "assignment rows shown per type (default 20)");

  std::string validate_data;
  auto* validate = app.add_subcommand("validate-data", "load a dataset and check every invariant");
  validate->add_option("--data", validate_data, "dataset directory")->required();

  std::string gen_out, gen_kind = "planted-partition";
  SyntheticSpec gen_spec;
  auto* generate = app.add_subcommand("generate-synthetic", "write a synthetic dataset directory");
  generate->add_option("--out", gen_out, "output directory")->required();
  generate->add_option("--kind", gen_kind, "planted-partition | typed-chain");
  generate->add_option("--seed", gen_spec.seed, "generator seed (default 0)");
  generate->add_option("--target-nodes", gen_spec.target_nodes, "target-type nodes (default 300)");
  generate->add_option("--classes", gen_spec.num_classes, "number of classes (default 3)");
  generate->add_option("--feature-dim", gen_spec.feature_dim, "target feature width (default 16)");
  generate->add_option("--separation", gen_spec.separation, "distance between class means (default 10)");
  generate->add_option("--noise", gen_spec.noise, "feature noise standard deviation (default 1)");
  generate->add_option("--chain-length", gen_spec.chain_length, "typed-chain length (default 12)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : static_cast<int>(ErrorCategory::kConfig);
  }

  try {
    if (train->parsed()) return cmd_train(train_flags.resolve(), out);

    if (eval->parsed()) {
      RunConfig cfg = stored_config(eval_ckpt);
      if (!eval_data.empty()) cfg.data = eval_data;
      if (eval_ratio_opt->count()) cfg.ratio = eval_ratio;
      if (eval_seed_opt->count()) cfg.train.seed = eval_seed;
      const HeteroGraph graph = load_labeled(cfg.data);
      const LoadedModel m = load_model(eval_ckpt, graph, cfg);
      const Split split = make_run_split(*graph.target, cfg.ratio, cfg.train.seed);
      std::string text;
      std::vector<std::pair<std::string, F1Report>> reports;
      if (!split.val.empty()) reports.emplace_back("val", evaluate(m.prepared, m.params, split.val));
      if (!split.test.empty()) reports.emplace_back("test", evaluate(m.prepared, m.params, split.test));
      for (const auto& [name, rep] : reports) text += format_report(rep, name + " (" + std::to_string(rep.confusion.sum()) + " nodes)");
      out << text;
      if (!eval_out.empty()) {
        ensure_dir(eval_out);
        for (const auto& [name, rep] : reports)
          write_file_atomic(fs::path(eval_out) / ("report_" + name + ".csv"), report_csv(rep));
        write_file_atomic(fs::path(eval_out) / "report.txt", text);
      }
      return 0;
    }

    if (perturb->parsed()) {
      popts.same_type_only = !all_types;
      LoadedModel vn, plain;
      RunConfig cfg;
      HeteroGraph graph;
      if (train_both) {
        cfg = perturb_flags.resolve();
        graph = load_labeled(cfg.data);
        const Split split = make_run_split(*graph.target, cfg.ratio, cfg.train.seed);
        RunConfig vcfg = cfg, pcfg = cfg;
        vcfg.train.virtual_nodes = true;
        pcfg.train.virtual_nodes = false;
        FitResult fv = fit(graph, vcfg.train, split);
        FitResult fp = fit(graph, pcfg.train, split);
        ensure_dir(cfg.out);
        write_checkpoint(fs::path(cfg.out) / "checkpoint_vn.bin", make_checkpoint(fv, vcfg));
        write_checkpoint(fs::path(cfg.out) / "checkpoint_plain.bin", make_checkpoint(fp, pcfg));
        vn = {vcfg, std::move(fv.prepared), std::move(fv.params)};
        plain = {pcfg, std::move(fp.prepared), std::move(fp.params)};
      } else {
        if (ckpt_vn.empty() || ckpt_plain.empty())
          throw ConfigError("perturb needs --checkpoint-vn and --checkpoint-plain, or --train-both");
        RunConfig vcfg = stored_config(ckpt_vn);
        RunConfig pcfg = stored_config(ckpt_plain);
        if (!vcfg.train.virtual_nodes) throw ConfigError("--checkpoint-vn was trained without virtual nodes");
        if (pcfg.train.virtual_nodes) throw ConfigError("--checkpoint-plain was trained with virtual nodes");
        cfg = vcfg;
        for (const auto& [opt, apply] : perturb_flags.setters)
          if (opt->count() > 0) apply(cfg);
        vcfg.data = pcfg.data = cfg.data;
        graph = load_labeled(cfg.data);
        vn = load_model(ckpt_vn, graph, vcfg);
        plain = load_model(ckpt_plain, graph, pcfg);
      }
      popts.seed = derive_seed(cfg.train.seed, 5);
      auto [gv, gp] = perturbation_study(graph, vn.prepared, vn.params, plain.prepared, plain.params, popts);
      ensure_dir(cfg.out);
      write_file_atomic(fs::path(cfg.out) / "perturb_vn.csv", grid_csv(gv));
      write_file_atomic(fs::path(cfg.out) / "perturb_plain.csv", grid_csv(gp));
      write_file_atomic(fs::path(cfg.out) / "config.json", to_json(cfg));
      out << grid_csv(gv) << "\n" << grid_csv(gp);
      return 0;
    }

    if (sweep_cmd->parsed()) {
      const SweepAxis axis = parse_sweep_axis(axis_name);
      const RunConfig cfg = sweep_flags.resolve();
      if (sweep_seeds.empty()) sweep_seeds.push_back(cfg.train.seed);
      const HeteroGraph graph = load_labeled(cfg.data);
      const auto rows = sweep(graph, cfg.train, axis, sweep_values, sweep_seeds, cfg.ratio, jobs);
      const std::string csv = sweep_csv(rows, axis);
      ensure_dir(cfg.out);
      write_file_atomic(fs::path(cfg.out) / "sweep.csv", csv);
      write_file_atomic(fs::path(cfg.out) / "config.json", to_json(cfg));
      out << csv;
      return 0;
    }

    if (inspect->parsed()) {
      inspect_cfg.assignment = parse_assignment(inspect_assignment);
      const HeteroGraph graph = load_dataset(inspect_data);
      out << describe(augment(graph, inspect_cfg.augmentation()), max_rows);
      return 0;
    }

    if (generate->parsed()) {
      if (gen_kind == "planted-partition") gen_spec.kind = SyntheticSpec::Kind::kPlantedPartition;
      else if (gen_kind == "typed-chain") gen_spec.kind = SyntheticSpec::Kind::kTypedChain;
      else throw ConfigError("unknown --kind '" + gen_kind + "' (expected planted-partition or typed-chain)");
      const HeteroGraph graph = generate_synthetic(gen_spec);
      save_dataset(graph, gen_out);
      out << summary(graph) << "wrote " << (fs::path(gen_out) / "manifest.json").string() << "\n";
      return 0;
    }

    if (validate->parsed()) {
      const HeteroGraph graph = load_dataset(validate_data);
      out << summary(graph) << "ok\n";
      return 0;
    }
  } catch (const Error& e) {
    static const char* kNames[] = {"", "config error", "data error", "numeric error"};
    err << kNames[static_cast<int>(e.category())] << ": " << e.what() << "\n";
    return static_cast<int>(e.category());
  } catch (const fs::filesystem_error& e) {
    err << "data error: " << e.what() << "\n";
    return static_cast<int>(ErrorCategory::kData);
  } catch (const std::exception& e) {
    err << "config error: " << e.what() << "\n";
    return static_cast<int>(ErrorCategory::kConfig);
  }
  return 0;
}

}  // namespace vnhgcn::cli
