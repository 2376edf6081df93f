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

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "test_support.hpp"
#include "vnhgcn/data_io.hpp"

namespace fs = std::filesystem;

namespace vnhgcn {
namespace {

struct Result {
  int code = 0;
  std::string out, err;
};

Result invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "vnhgcn");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  Result r;
  r.code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

class Cli : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    root_ = fs::temp_directory_path() / testing::scratch_name("cli");
    fs::remove_all(root_);
    SyntheticSpec spec;
    spec.target_nodes = 60;
    spec.bridge_nodes = {12, 6};
    save_dataset(generate_synthetic(spec), root_ / "pp3");
    spec.num_classes = 4;
    save_dataset(generate_synthetic(spec), root_ / "pp4");
    SyntheticSpec chain;
    chain.kind = SyntheticSpec::Kind::kTypedChain;
    save_dataset(generate_synthetic(chain), root_ / "chain");
  }
  static void TearDownTestSuite() { fs::remove_all(root_); }

  static std::string path(const std::string& name) { return (root_ / name).string(); }
  static std::vector<std::string> small_flags(const std::string& layers) {
    return {"--epochs", "6", "--layers", layers, "--hidden-dim", "8", "--d-a", "4", "--n-virtual", "4", "--central-dim", "4"};
  }
  static Result train(const std::string& data, const std::string& out, std::vector<std::string> extra = {},
                      const std::string& layers = "2") {
    std::vector<std::string> args{"train", "--data", path(data), "--out", path(out)};
    auto flags = small_flags(layers);
    args.insert(args.end(), flags.begin(), flags.end());
    args.insert(args.end(), extra.begin(), extra.end());
    return invoke(args);
  }

  static fs::path root_;
};
fs::path Cli::root_;

TEST_F(Cli, MissingDataIsConfigErrorNamingTheFlag) {
  Result r = invoke({"train", "--epochs", "1"});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("--data"), std::string::npos) << r.err;
}

TEST_F(Cli, UnknownFlagIsConfigError) {
  EXPECT_EQ(invoke({"train", "--bogus"}).code, 1);
  EXPECT_EQ(invoke({}).code, 1);
}

TEST_F(Cli, DefaultsFillTheSnapshot) {
  Result r = invoke({"train", "--data", path("pp3"), "--out", path("defaults"), "--epochs", "1"});
  ASSERT_EQ(r.code, 0) << r.err;
  const std::string cfg = slurp(root_ / "defaults" / "config.json");
  for (const char* expect : {"\"layers\": 4", "\"n_virtual\": 16", "\"lr\": 0.001", "\"l2\": 0.0001",
                             "\"hidden_dim\": 64", "\"d_a\": 64", "\"central_dim\": 64", "\"epochs\": 1"})
    EXPECT_NE(cfg.find(expect), std::string::npos) << expect << "\n" << cfg;
  EXPECT_EQ(lines(slurp(root_ / "defaults" / "metrics.csv")).size(), 2u);
}

TEST_F(Cli, EvalMatchesLoggedBestValidationScore) {
  ASSERT_EQ(train("pp3", "evalrun").code, 0);
  Result e = invoke({"eval", "--checkpoint", path("evalrun/checkpoint.bin"), "--out", path("evalrun")});
  ASSERT_EQ(e.code, 0) << e.err;
  double best = -1;
  for (const auto& l : lines(slurp(root_ / "evalrun" / "metrics.csv"))) {
    if (l.rfind("epoch", 0) == 0) continue;
    std::vector<std::string> f;
    std::stringstream ss(l);
    for (std::string x; std::getline(ss, x, ',');) f.push_back(x);
    best = std::max(best, std::stod(f[2]));
  }
  double micro = -1;
  for (const auto& l : lines(slurp(root_ / "evalrun" / "report_val.csv")))
    if (l.rfind("micro,", 0) == 0) micro = std::stod(l.substr(l.find(",,,") + 3));
  EXPECT_EQ(micro, best);
}

TEST_F(Cli, RepeatedEvalIsByteIdentical) {
  ASSERT_EQ(train("pp3", "repeat").code, 0);
  Result a = invoke({"eval", "--checkpoint", path("repeat/checkpoint.bin"), "--out", path("repeat/a")});
  Result b = invoke({"eval", "--checkpoint", path("repeat/checkpoint.bin"), "--out", path("repeat/b")});
  ASSERT_EQ(a.code, 0);
  EXPECT_EQ(a.out, b.out);
  for (const char* f : {"report_val.csv", "report_test.csv", "report.txt"})
    EXPECT_EQ(slurp(root_ / "repeat/a" / f), slurp(root_ / "repeat/b" / f));
}

TEST_F(Cli, CheckpointOnDataWithMoreClassesIsShapeError) {
  ASSERT_EQ(train("pp3", "three").code, 0);
  Result r = invoke({"eval", "--checkpoint", path("three/checkpoint.bin"), "--data", path("pp4")});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("class"), std::string::npos) << r.err;
}

TEST_F(Cli, SnapshotRerunReproducesOutputs) {
  ASSERT_EQ(train("pp3", "snap1").code, 0);
  Result r = invoke({"train", "--config", path("snap1/config.json"), "--out", path("snap2")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(slurp(root_ / "snap1/checkpoint.bin"), slurp(root_ / "snap2/checkpoint.bin"));
  EXPECT_EQ(slurp(root_ / "snap1/metrics.csv"), slurp(root_ / "snap2/metrics.csv"));
}

TEST_F(Cli, FlagsOverrideConfigFile) {
  std::ofstream(root_ / "override.json") << R"({"data": ")" << path("pp3") << R"(", "epochs": 50, "layers": 2,
    "hidden_dim": 8, "d_a": 4, "n_virtual": 4, "central_dim": 4})";
  Result r = invoke({"train", "--config", path("override.json"), "--epochs", "2", "--out", path("override")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(lines(slurp(root_ / "override/metrics.csv")).size(), 3u);
  std::ofstream(root_ / "bad.json") << R"({"epoch": 3})";
  EXPECT_EQ(invoke({"train", "--config", path("bad.json"), "--data", path("pp3")}).code, 1);
}

TEST_F(Cli, PerturbDefaultHopsAndZeroVariance) {
  std::vector<std::string> args{"perturb", "--train-both", "--data", path("chain"), "--out", path("perturb"),
                                "--variances", "0", "--layers", "4"};
  for (const auto& f : {"--epochs", "2", "--hidden-dim", "8", "--d-a", "4", "--n-virtual", "2", "--central-dim", "4"})
    args.push_back(f);
  args.push_back("--all-types");
  Result r = invoke(args);
  ASSERT_EQ(r.code, 0) << r.err;
  for (const char* f : {"perturb_vn.csv", "perturb_plain.csv"}) {
    auto ls = lines(slurp(root_ / "perturb" / f));
    ASSERT_EQ(ls.size(), 4u);
    EXPECT_EQ(ls[2], "variance,hop_3,hop_4,hop_5,hop_6,hop_7,hop_8,hop_9,hop_10");
    EXPECT_EQ(ls[3], "0,0,0,0,0,0,0,0,0");
  }
}

TEST_F(Cli, PerturbPlainModelIsZeroBeyondFourHops) {
  ASSERT_EQ(train("chain", "vnck", {}, "4").code, 0);
  ASSERT_EQ(train("chain", "plainck", {"--no-virtual-nodes"}, "4").code, 0);
  Result r = invoke({"perturb", "--checkpoint-vn", path("vnck/checkpoint.bin"), "--checkpoint-plain",
                     path("plainck/checkpoint.bin"), "--hops", "5", "6", "7", "8", "--all-types", "--out",
                     path("perturb2")});
  ASSERT_EQ(r.code, 0) << r.err;
  auto ls = lines(slurp(root_ / "perturb2/perturb_plain.csv"));
  ASSERT_EQ(ls.size(), 7u);
  for (std::size_t i = 3; i < ls.size(); ++i) EXPECT_EQ(ls[i].substr(ls[i].find(',')), ",0,0,0,0") << ls[i];
  // Swapped checkpoints are refused.
  EXPECT_EQ(invoke({"perturb", "--checkpoint-vn", path("plainck/checkpoint.bin"), "--checkpoint-plain",
                    path("vnck/checkpoint.bin")})
                .code,
            1);
}

TEST_F(Cli, SweepOverVirtualNodeCounts) {
  std::vector<std::string> args{"sweep", "--data", path("pp3"), "--out", path("sweep"), "--axis", "n_virtual",
                                "--values", "4", "8", "16", "32", "--epochs", "2", "--layers", "2", "--hidden-dim", "8",
                                "--d-a", "4", "--central-dim", "4"};
  Result r = invoke(args);
  ASSERT_EQ(r.code, 0) << r.err;
  auto ls = lines(slurp(root_ / "sweep/sweep.csv"));
  std::size_t rows = 0;
  for (const auto& l : ls)
    if (!l.empty() && l[0] != '#' && l.rfind("n_virtual", 0) != 0) ++rows;
  EXPECT_EQ(rows, 4u);
}

TEST_F(Cli, SweepBadAxisListsValidOnes) {
  Result r = invoke({"sweep", "--data", path("pp3"), "--axis", "width", "--values", "4"});
  EXPECT_EQ(r.code, 1);
  for (const char* axis : {"hidden_dim", "layers", "n_virtual"}) EXPECT_NE(r.err.find(axis), std::string::npos) << r.err;
}

TEST_F(Cli, InspectValidateAndGenerate) {
  Result g = invoke({"generate-synthetic", "--kind", "typed-chain", "--chain-length", "5", "--out", path("gen")});
  ASSERT_EQ(g.code, 0) << g.err;
  Result v = invoke({"validate-data", "--data", path("gen")});
  EXPECT_EQ(v.code, 0);
  EXPECT_NE(v.out.find("ok"), std::string::npos);
  Result i = invoke({"augment-inspect", "--data", path("gen"), "--n-virtual", "2"});
  EXPECT_EQ(i.code, 0) << i.err;
  EXPECT_NE(i.out.find("central"), std::string::npos) << i.out;
  EXPECT_EQ(invoke({"validate-data", "--data", path("nowhere")}).code, 2);
  EXPECT_EQ(invoke({"generate-synthetic", "--kind", "ring", "--out", path("gen2")}).code, 1);
}

}  // namespace
}  // namespace vnhgcn
