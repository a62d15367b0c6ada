// Copyright 2026 The snaprec Authors. All Rights Reserved.
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
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "io.hpp"
#include "synthetic.hpp"

namespace snaprec {
namespace {

namespace fs = std::filesystem;

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "snaprec");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    root = fs::temp_directory_path() /
           ("snaprec_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(root);
    fs::create_directories(root);
    testing::DriftOptions o;
    o.n_users = 60;
    o.n_items = 60;
    o.blocks = 4;
    o.pretrain_periods = 3;
    o.snapshots = 3;
    o.rotate_every = 3;
    o.preferred_blocks = 1;
    Rng rng(3);
    std::ofstream d(data());
    for (const auto& e : testing::drift_series(o, rng)) {
      d << 100 + e.user << '\t' << 900 + e.item << '\t' << 1'600'000'000 + e.ts << '\n';
    }
    std::ofstream c(config());
    c << "dim = 8\nlayers = 2\npretrain_span_hours = 72\nmax_epochs = 5\nbatch_size = 128\n"
         "learning_rate = 0.01\nfinetune_epochs = 3\nfinetune_patience = 3\n";
  }
  void TearDown() override { fs::remove_all(root); }
  std::string data() const { return (root / "data.tsv").string(); }
  std::string config() const { return (root / "config.txt").string(); }
  std::string dir(const char* name) const { return (root / name).string(); }
  fs::path root;
};

TEST_F(CliTest, UnknownCommandPrintsUsage) {
  const auto r = run({"train-everything"});
  EXPECT_NE(r.code, 0);
  EXPECT_NE(r.err.find("run-dynamic"), std::string::npos);
  EXPECT_NE(run({}).code, 0);
}

TEST_F(CliTest, MissingDataIsUsageError) {
  const auto r = run({"run-dynamic", "--config", config(), "--out", dir("o")});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("--data"), std::string::npos);
  EXPECT_FALSE(fs::exists(dir("o")));
}

TEST_F(CliTest, HelpExitsCleanly) {
  const auto r = run({"--help"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("pretrain"), std::string::npos);
}

TEST_F(CliTest, RunDynamicWritesRecordsAndSummary) {
  const auto r = run({"run-dynamic", "--data", data(), "--config", config(), "--out", dir("o"),
                      "--per-user", dir("users.csv")});
  ASSERT_EQ(r.code, 0) << r.err;
  for (const char* f : {"manifest.json", "config.txt", "snapshots.json", "summary.csv",
                        "snapshot_001.json", "snapshot_002.json", "pretrained.bin", "final.bin",
                        "pretrain_log.csv"}) {
    EXPECT_TRUE(fs::exists(root / "o" / f)) << f;
  }
  EXPECT_FALSE(fs::exists(root / "o" / "snapshot_003.json"));

  const auto rec = cli::read_json(root / "o" / "snapshot_001.json");
  for (const char* key : {"snapshot", "recall@20", "ndcg@20", "tuned_user_metrics",
                          "untuned_user_metrics", "epochs", "wall_time"}) {
    EXPECT_TRUE(rec.contains(key)) << key;
  }
  EXPECT_TRUE(rec.at("wall_time").is_null());

  const auto m = cli::read_json(root / "o" / "manifest.json");
  EXPECT_EQ(m.at("seed").get<std::uint64_t>(), 2024u);
  EXPECT_EQ(m.at("input_hash").get<std::string>(), cli::sha256_file(data()));
  EXPECT_EQ(m.at("config_hash").get<std::string>(), cli::sha256_hex(slurp(root / "o" / "config.txt")));
  EXPECT_EQ(m.at("files").at("summary.csv").get<std::string>(), cli::sha256_file(root / "o" / "summary.csv"));

  const auto snaps = cli::read_json(root / "o" / "snapshots.json");
  EXPECT_EQ(snaps.at("edge_counts").size(), 3u);
  EXPECT_EQ(snaps.at("boundaries").size(), 3u);
  EXPECT_TRUE(snaps.contains("pretrain_end"));

  const std::string summary = slurp(root / "o" / "summary.csv");
  EXPECT_EQ(summary.rfind("average,snapshots,recall@20,ndcg@20\nmacro,", 0), 0u);
  EXPECT_NE(summary.find("\nmicro,"), std::string::npos);
  EXPECT_EQ(slurp(dir("users.csv")).rfind("snapshot,user,recall,ndcg,relevant,tuned\n", 0), 0u);
}

TEST_F(CliTest, ManifestConfigReproducesTheRun) {
  ASSERT_EQ(run({"run-dynamic", "--data", data(), "--config", config(), "--out", dir("a"),
                 "--set", "seed=5", "--quiet"}).code, 0);
  // The saved config alone is enough to repeat the run.
  ASSERT_EQ(run({"run-dynamic", "--data", data(), "--config", (root / "a" / "config.txt").string(),
                 "--out", dir("b"), "--quiet"}).code, 0);
  EXPECT_EQ(slurp(root / "a" / "manifest.json"), slurp(root / "b" / "manifest.json"));
  EXPECT_EQ(slurp(root / "a" / "final.bin"), slurp(root / "b" / "final.bin"));
}

TEST_F(CliTest, OverridesChangeTheConfigHash) {
  ASSERT_EQ(run({"pretrain", "--data", data(), "--config", config(), "--out", dir("a"), "--quiet"}).code, 0);
  ASSERT_EQ(run({"pretrain", "--data", data(), "--config", config(), "--out", dir("b"), "--quiet",
                 "--set", "seed=9"}).code, 0);
  const auto a = cli::read_json(root / "a" / "manifest.json");
  const auto b = cli::read_json(root / "b" / "manifest.json");
  EXPECT_NE(a.at("config_hash"), b.at("config_hash"));
  EXPECT_EQ(b.at("seed").get<std::uint64_t>(), 9u);
}

TEST_F(CliTest, ReportIsIdempotent) {
  ASSERT_EQ(run({"run-dynamic", "--data", data(), "--config", config(), "--out", dir("o"), "--quiet"}).code, 0);
  const auto a = run({"report", "--in", dir("o")});
  const auto b = run({"report", "--in", dir("o")});
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
  EXPECT_NE(a.out.find("recall@20"), std::string::npos);
  EXPECT_NE(a.out.find("mean (macro)"), std::string::npos);
  EXPECT_NE(run({"report", "--in", dir("nothing")}).code, 0);
}

TEST_F(CliTest, PretrainFinetuneEvaluateMatchesRunDynamicFirstStep) {
  ASSERT_EQ(run({"pretrain", "--data", data(), "--config", config(), "--out", dir("p"), "--quiet"}).code, 0);
  const auto ft = run({"finetune", "--pretrained", dir("p"), "--snapshot", "1", "--out", dir("f"), "--quiet"});
  ASSERT_EQ(ft.code, 0) << ft.err;
  EXPECT_TRUE(fs::exists(root / "f" / "gate.bin"));
  const auto m = cli::read_json(root / "f" / "manifest.json");
  EXPECT_EQ(m.at("trainable_parameters").get<int>(), 8 * 8 + 8);
  EXPECT_EQ(m.at("pretrained_manifest_hash").get<std::string>(), cli::sha256_file(root / "p" / "manifest.json"));
  EXPECT_EQ(m.at("x_n0_hash").get<std::string>().size(), 64u);

  // The first dynamic step starts from the same pre-trained table.
  ASSERT_EQ(run({"run-dynamic", "--data", data(), "--config", config(), "--out", dir("d"), "--quiet"}).code, 0);
  const auto step = cli::read_json(root / "d" / "snapshot_001.json");
  const auto metrics = cli::read_json(root / "f" / "metrics.json");
  EXPECT_EQ(metrics.at("recall@20"), step.at("recall@20"));

  const auto ev = run({"evaluate", "--model", dir("f"), "--snapshot", "2", "--quiet"});
  ASSERT_EQ(ev.code, 0) << ev.err;
  EXPECT_NE(ev.out.find(metrics.at("recall@20").dump()), std::string::npos);
  EXPECT_EQ(run({"evaluate", "--model", dir("p"), "--snapshot", "2", "--quiet"}).code, 0);
  EXPECT_EQ(run({"evaluate", "--model", dir("p"), "--snapshot", "9", "--quiet"}).code, 1);
}

TEST_F(CliTest, FinetuneRejectsChangedData) {
  ASSERT_EQ(run({"pretrain", "--data", data(), "--config", config(), "--out", dir("p"), "--quiet"}).code, 0);
  std::ofstream(data(), std::ios::app) << "1\t2\t3\n";
  const auto r = run({"finetune", "--pretrained", dir("p"), "--snapshot", "1", "--out", dir("f")});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("input hash"), std::string::npos);
}

TEST_F(CliTest, BadInputsReportLineAndKey) {
  std::ofstream(root / "bad.tsv") << "1\t2\t3\n1\tx\t4\n";
  auto r = run({"pretrain", "--data", (root / "bad.tsv").string(), "--out", dir("o")});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("bad.tsv:2"), std::string::npos) << r.err;

  r = run({"pretrain", "--data", data(), "--out", dir("o"), "--set", "omgea=3"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("omgea"), std::string::npos);
}

}  // namespace
}  // namespace snaprec
