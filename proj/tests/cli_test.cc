// Copyright 2026 The ginsign Authors.
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

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <fstream>
#include <string>

#include <nlohmann/json.hpp>

#include "support/paths.h"

namespace ginsign {
namespace {

struct Result {
  std::string out;
  int status = -1;
};

// Runs the CLI through the shell; stderr is folded into the output when
// `merge_stderr` is set.
Result Cli(const std::string &args, bool merge_stderr = false, const std::string &env = "") {
  std::string cmd = env + " '" + std::string(GINSIGN_CLI_PATH) + "' " + args + (merge_stderr ? " 2>&1" : " 2>/dev/null");
  Result r;
  FILE *pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  std::array<char, 4096> buf;
  std::size_t n;
  while ((n = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
  int raw = pclose(pipe);
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return r;
}

std::string Sigs() { return "--sig '" + (testing::DataDir() / "signatures").string() + "'"; }
std::string Corpus() { return "--data '" + (testing::DataDir() / "corpus" / "fixture.jsonl").string() + "'"; }

TEST(CliTest, PrefixListsPredicates) {
  auto r = Cli("prefix --sig '" + testing::SignaturePath("warehouse").string() + "'");
  ASSERT_EQ(r.status, 0);
  EXPECT_EQ(r.out.rfind("deliver\npickup\nsearch\n", 0), 0u);
}

TEST(CliTest, ParseReportsErrorOffset) {
  auto ok = Cli("parse 'F a & G b'");
  EXPECT_EQ(ok.status, 0);
  EXPECT_EQ(ok.out, "(F (a)) & (G (b))\n");
  auto bad = Cli("parse 'F (a &'", true);
  EXPECT_EQ(bad.status, 1);
  EXPECT_NE(bad.out.find("offset 6"), std::string::npos) << bad.out;
}

TEST(CliTest, CheckEquivWitness) {
  auto r = Cli("check-equiv --k 6 'F p' 'G p'");
  ASSERT_EQ(r.status, 0);
  auto doc = nlohmann::json::parse(r.out);
  EXPECT_FALSE(doc["equivalent"].get<bool>());
  EXPECT_TRUE(doc.contains("witness"));
  auto same = nlohmann::json::parse(Cli("check-equiv --k 6 'F F p' 'F p'").out);
  EXPECT_TRUE(same["equivalent"].get<bool>());
}

TEST(CliTest, BudgetLine) {
  auto r = Cli("budget --sig '" + testing::SignaturePath("warehouse").string() + "'");
  EXPECT_EQ(r.out, "warehouse\tflat=322\thierarchical=87\n");
}

TEST(CliTest, TraceMode) {
  auto path = std::filesystem::temp_directory_path() / "ginsign_cli_trace.json";
  std::ofstream(path) << R"({"prefix": [], "loop": [["p"], []]})";
  EXPECT_EQ(Cli("eval --trace '" + path.string() + "' 'G F p'").out, "true\n");
  EXPECT_EQ(Cli("eval --trace '" + path.string() + "' 'G p'").out, "false\n");
  std::filesystem::remove(path);
}

TEST(CliTest, EvalIsByteIdenticalAcrossWorkers) {
  const std::string args = "eval " + Sigs() + " " + Corpus() + " --scorer lexical --format json";
  auto one = Cli(args, false, "GINSIGN_WORKERS=1");
  ASSERT_EQ(one.status, 0);
  EXPECT_EQ(Cli(args, false, "GINSIGN_WORKERS=8").out, one.out);
  EXPECT_EQ(Cli(args + " --workers 3").out, one.out);
  auto table = "eval " + Sigs() + " " + Corpus() + " --scorer oracle --format table";
  EXPECT_EQ(Cli(table, false, "GINSIGN_WORKERS=1").out, Cli(table, false, "GINSIGN_WORKERS=8").out);
}

TEST(CliTest, UnknownScorerFails) {
  auto r = Cli("eval " + Sigs() + " " + Corpus() + " --scorer telepathy", true);
  EXPECT_EQ(r.status, 1);
  EXPECT_NE(r.out.find("telepathy"), std::string::npos) << r.out;
}

}  // namespace
}  // namespace ginsign
