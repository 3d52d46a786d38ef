/*
 * Copyright 2026 The Stabcert Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "cli.h"

namespace stabcert::cli {
namespace {

using Json = nlohmann::json;

struct CliRun {
  int code = 0;
  std::string out;
  std::string err;
};

CliRun Invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "stabcert");
  std::ostringstream out, err;
  CliRun r;
  r.code = RunCli(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

Json InvokeJson(const std::vector<std::string>& args) {
  const CliRun r = Invoke(args);
  EXPECT_EQ(r.code, kExitOk) << r.err;
  return Json::parse(r.out);
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = std::filesystem::temp_directory_path() /
           ("stabcert_cli_test_" +
            std::string(::testing::UnitTest::GetInstance()
                            ->current_test_info()
                            ->name()));
    std::filesystem::create_directories(dir_);
  }
  void TearDown() override { std::filesystem::remove_all(dir_); }

  std::string Path(const std::string& name) const {
    return (dir_ / name).string();
  }
  std::string Write(const std::string& name, const std::string& text) const {
    std::ofstream f(Path(name));
    f << text;
    return Path(name);
  }
  static std::string Read(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(f), {});
  }

  std::filesystem::path dir_;
};

TEST_F(CliTest, CertifyDemoRecordsSampleSize) {
  const Json j = InvokeJson({"certify", "--demo", "3", "--features", "16",
                             "--radius", "2", "--seed", "5"});
  EXPECT_EQ(j["command"], "certify");
  ASSERT_EQ(j["items"].size(), 3u);
  for (const auto& row : j["items"]) {
    EXPECT_EQ(row["report"]["samples"], 150);
    EXPECT_EQ(row["report"]["evaluations"], 151);
    EXPECT_EQ(row["k"], 4);
  }
  EXPECT_EQ(j["evaluations"], 3 * 151);
  EXPECT_EQ(j["summary"]["bootstrap_ci"]["resamples"], 1000);
}

TEST_F(CliTest, ZeroRadiusIsFullyStable) {
  const Json j = InvokeJson(
      {"certify", "--model", "and", "--demo", "4", "--radius", "0"});
  for (const auto& row : j["items"]) EXPECT_EQ(row["report"]["tau_hat"], 1.0);
}

TEST_F(CliTest, ExactColumnAgreesWithinEpsilon) {
  const Json j = InvokeJson({"certify", "--demo", "10", "--features", "12",
                             "--radius", "3", "--exact", "--seed", "2"});
  EXPECT_GE(j["summary"]["within_epsilon_fraction"].get<double>(), 0.9);
  for (const auto& row : j["items"]) EXPECT_TRUE(row.contains("exact_tau"));
}

TEST_F(CliTest, OutputsAreByteIdenticalAcrossRuns) {
  for (const std::string cmd : {"certify", "curve", "bise", "smooth"}) {
    const std::vector<std::string> base = {
        cmd, "--demo", "3", "--features", "10", "--seed", "7"};
    auto a = base, b = base;
    a.insert(a.end(), {"--out", Path("a.json")});
    b.insert(b.end(), {"--out", Path("b.json")});
    ASSERT_EQ(Invoke(a).code, kExitOk) << cmd;
    ASSERT_EQ(Invoke(b).code, kExitOk) << cmd;
    EXPECT_EQ(Read(Path("a.json")), Read(Path("b.json"))) << cmd;
    EXPECT_FALSE(Read(Path("a.json")).empty());
  }
}

TEST_F(CliTest, WorkersDoNotChangeResults) {
  const Json a = InvokeJson({"certify", "--demo", "4", "--features", "12",
                             "--seed", "3", "--workers", "1"});
  const Json b = InvokeJson({"certify", "--demo", "4", "--features", "12",
                             "--seed", "3", "--workers", "3"});
  EXPECT_EQ(a["items"], b["items"]);
  // The worker count is not part of the configuration record.
  EXPECT_EQ(a["config_hash"], b["config_hash"]);
}

TEST_F(CliTest, ReadsJsonLinesInput) {
  const std::string input = Write(
      "items.jsonl",
      "{\"x\":[1,1,1,1,1,1,1,1],\"scores\":[8,7,6,5,4,3,2,1]}\n"
      "\n"
      "{\"x\":[1,2,3,4,5,6,7,8],\"scores\":[1,2,3,4,5,6,7,8],"
      "\"top_fraction\":0.5}\n");
  const Json j = InvokeJson({"certify", "--input", input, "--model", "and"});
  ASSERT_EQ(j["items"].size(), 2u);
  EXPECT_EQ(j["items"][0]["mask"], "11000000");
  EXPECT_EQ(j["items"][1]["mask"], "00001111");
}

TEST_F(CliTest, CsvFormat) {
  const CliRun r = Invoke({"certify", "--demo", "2", "--format", "csv"});
  ASSERT_EQ(r.code, kExitOk);
  std::istringstream lines(r.out);
  std::string header;
  std::getline(lines, header);
  EXPECT_EQ(header,
            "item,n,k,radius,effective_radius,kind,tau_hat,samples,stable,"
            "verdict,evaluations");
  int rows = 0;
  for (std::string l; std::getline(lines, l);) ++rows;
  EXPECT_EQ(rows, 2);
}

TEST_F(CliTest, ExitCodes) {
  EXPECT_EQ(Invoke({"certify", "--demo", "2", "--epsilon", "0"}).code,
            kExitConfig);
  EXPECT_EQ(Invoke({"certify"}).code, kExitConfig);
  EXPECT_EQ(Invoke({"nonsense"}).code, kExitConfig);
  EXPECT_EQ(Invoke({"certify", "--demo", "2", "--model", "cube"}).code,
            kExitConfig);
  EXPECT_EQ(Invoke({"curve", "--demo", "2", "--radii", "3,2"}).code,
            kExitConfig);
  EXPECT_EQ(Invoke({"certify", "--input", Path("missing.jsonl")}).code,
            kExitIo);
  const std::string bad = Write("bad.jsonl", "{\"x\": [1, 2\n");
  const CliRun r = Invoke({"certify", "--input", bad});
  EXPECT_EQ(r.code, kExitIo);
  EXPECT_NE(r.err.find("bad.jsonl:1"), std::string::npos);
  const std::string ragged =
      Write("ragged.jsonl", "{\"x\":[1,1],\"scores\":[1]}\n");
  EXPECT_EQ(Invoke({"certify", "--input", ragged}).code, kExitIo);
  EXPECT_EQ(Invoke({"certify", "--demo", "1", "--out",
                    Path("no/such/dir/out.json")})
                .code,
            kExitIo);
  EXPECT_EQ(Invoke({"certify", "--help"}).code, kExitOk);
}

TEST_F(CliTest, SmoothAtLambdaOneMatchesCertify) {
  const Json cert = InvokeJson({"certify", "--demo", "4", "--features", "12",
                                "--radius", "2", "--seed", "9"});
  const Json sm = InvokeJson({"smooth", "--demo", "4", "--features", "12",
                              "--radius", "2", "--seed", "9", "--lambda",
                              "1.0"});
  ASSERT_EQ(sm["rows"].size(), 4u);
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_EQ(sm["rows"][i]["report"]["tau_hat"],
              cert["items"][i]["report"]["tau_hat"]);
    EXPECT_EQ(sm["rows"][i]["heuristic"], false);
  }
}

TEST_F(CliTest, SmoothEvaluationCount) {
  // Per item: 151 certificate evaluations and one smoothed prediction, each
  // costing one evaluation at λ = 1 and --mc-samples evaluations otherwise.
  const Json j = InvokeJson({"smooth", "--demo", "2", "--features", "10",
                             "--lambda", "1,0.5", "--mc-samples", "4"});
  EXPECT_EQ(j["evaluations"], 2 * (151 + 1) + 2 * (151 + 1) * 4);
  EXPECT_EQ(j["per_lambda"].size(), 2u);
  EXPECT_EQ(j["rows"][2]["heuristic"], true);
}

TEST_F(CliTest, SmoothDefaultGrid) {
  const Json j = InvokeJson({"smooth", "--demo", "1", "--features", "8",
                             "--mc-samples", "2"});
  std::vector<double> grid;
  for (const auto& e : j["per_lambda"]) grid.push_back(e["lambda"]);
  EXPECT_EQ(grid, (std::vector<double>{1.0, 0.9, 0.75, 0.5, 0.25}));
}

TEST_F(CliTest, SpectrumOfAnd) {
  const Json j = InvokeJson({"spectrum", "--function", "and2"});
  EXPECT_EQ(j["fourier"], (std::vector<double>{0.25, -0.25, -0.25, 0.25}));
  EXPECT_EQ(j["monotone"], (std::vector<double>{0.0, 0.0, 0.0, 1.0}));
  EXPECT_TRUE(j["all_checks_ok"].get<bool>());
  const CliRun csv = Invoke({"spectrum", "--function", "and2", "--format", "csv"});
  EXPECT_EQ(csv.out,
            "subset_bitmask,degree,coefficient\n0,0,0.25\n1,1,-0.25\n"
            "2,1,-0.25\n3,2,0.25\n");
}

TEST_F(CliTest, SpectrumOfModelAndRandom) {
  Json j = InvokeJson({"spectrum", "--function", "random", "--features", "8",
                       "--lambda", "0.3"});
  EXPECT_TRUE(j["all_checks_ok"].get<bool>());
  EXPECT_EQ(j["fourier"].size(), 256u);
  j = InvokeJson({"spectrum", "--function", "model", "--demo", "1",
                  "--features", "6"});
  EXPECT_TRUE(j["all_checks_ok"].get<bool>());
  EXPECT_EQ(j["evaluations"], 1 + 64);
}

TEST_F(CliTest, BiseRecord) {
  const Json j = InvokeJson({"bise", "--demo", "2", "--features", "8",
                             "--step", "2", "--m", "50"});
  const auto& ins = j["items"][0]["insertion"];
  EXPECT_EQ(ins["k"], (std::vector<int>{2, 4, 6, 8}));
  EXPECT_TRUE(ins.contains("bounds"));
  EXPECT_EQ(j["summary"]["indicator"],
            "g(alpha) = 1 iff f(x * alpha) predicts the same as f(x)");
  const Json exact = InvokeJson({"bise", "--demo", "1", "--features", "8",
                                 "--exact"});
  EXPECT_FALSE(exact["items"][0]["insertion"].contains("bounds"));
}

TEST_F(CliTest, RankStabIdentityIsZero) {
  const Json j = InvokeJson({"rankstab", "--demo", "3", "--features", "8",
                             "--perturb", "none", "--trials", "5", "--m",
                             "20"});
  EXPECT_EQ(j["mean_percent"], 0.0);
  EXPECT_EQ(j["pool_size"], 8);
  const Json w = InvokeJson({"rankstab", "--demo", "3", "--features", "8",
                             "--perturb", "window:8", "--trials", "5",
                             "--metric", "insertion-test"});
  EXPECT_GE(w["mean_percent"].get<double>(), 0.0);
  EXPECT_EQ(Invoke({"rankstab", "--demo", "1", "--features", "8", "--perturb",
                    "window:9"})
                .code,
            kExitConfig);
}

TEST_F(CliTest, ExternalModel) {
  const std::string model =
      std::string("external:") + STABCERT_FAKE_SERVER + " ok 8";
  const Json j = InvokeJson({"certify", "--model", model, "--demo", "2",
                             "--features", "8", "--workers", "2"});
  EXPECT_EQ(j["model"]["n"], 8);
  EXPECT_EQ(j["evaluations"], 2 * 151);
  EXPECT_EQ(Invoke({"certify", "--model",
                    std::string("external:") + STABCERT_FAKE_SERVER +
                        " bad-handshake",
                    "--demo", "1"})
                .code,
            kExitIo);
}

}  // namespace
}  // namespace stabcert::cli
