// Copyright 2026 The spata Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "spata/cli.h"

#include <sstream>
#include <string>
#include <vector>

#include "gtest/gtest.h"
#include "spata/card_io.h"
#include "test_util.h"

namespace spata {
namespace {

using testing::read_text;
using testing::TempDir;
using testing::write_text;

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "spata");
  std::vector<const char*> argv;
  for (const std::string& a : args) argv.push_back(a.c_str());
  std::ostringstream out;
  std::ostringstream err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string sample_csv() {
  std::string text = "x,y,proto,label\n";
  for (int i = 0; i < 60; ++i) {
    text += std::to_string(i % 7) + "." + std::to_string(i % 3) + "," +
            std::to_string((i * 37) % 11) + "," +
            (i % 4 == 0 ? "udp" : "tcp") + "," + (i % 2 ? "A" : "B") + "\n";
  }
  return text;
}

class CliTest : public ::testing::Test {
 protected:
  CliTest() : dir_("cli") { write_text(dir_ / "d.csv", sample_csv()); }
  std::string path(const std::string& name) const {
    return (dir_ / name).string();
  }
  TempDir dir_;
};

TEST_F(CliTest, AnalyzeWritesArtifacts) {
  const Result r = run({"analyze", "--input", path("d.csv"), "--label", "label",
                        "--out", path("card.json"), "--projected", path("p.csv"),
                        "--markdown", path("card.md"), "--svg", path("p.svg")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("rows: 60"), std::string::npos);
  EXPECT_NE(r.out.find("time total:"), std::string::npos);
  EXPECT_NO_THROW(import_card_json(path("card.json")));
  EXPECT_EQ(read_text(path("p.csv")).rfind("x,y,proto=tcp,proto=udp,label\n", 0),
            0u);
  EXPECT_NE(read_text(path("card.md")).find("# Pattern card"), std::string::npos);
  EXPECT_NE(read_text(path("p.svg")).find("<svg"), std::string::npos);
}

TEST_F(CliTest, AnalyzeRejectsBadConfig) {
  Result r = run({"analyze", "--input", path("d.csv"), "--label", "label",
                  "--out", path("c.json"), "--bins", "8"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("bins must be odd and >= 3"), std::string::npos);
  r = run({"analyze", "--input", path("d.csv"), "--label", "label", "--out",
           path("c.json"), "--levels", "0"});
  EXPECT_EQ(r.code, 2);
  r = run({"analyze", "--input", path("d.csv"), "--out", path("c.json")});
  EXPECT_EQ(r.code, 2);
  r = run({"analyze", "--input", path("d.csv"), "--label", "label", "--out",
           path("c.json"), "--min-frequency", "1.5"});
  EXPECT_EQ(r.code, 2);
  r = run({"analyze", "--label", "label", "--out", path("c.json")});
  EXPECT_EQ(r.code, 2);
  r = run({"frobnicate"});
  EXPECT_EQ(r.code, 2);
  EXPECT_FALSE(std::filesystem::exists(path("c.json")));
}

TEST_F(CliTest, AnalyzeDataErrors) {
  Result r = run({"analyze", "--input", path("missing.csv"), "--label", "label",
                  "--out", path("c.json")});
  EXPECT_EQ(r.code, 1);
  r = run({"analyze", "--input", path("d.csv"), "--label", "nope", "--out",
           path("c.json")});
  EXPECT_EQ(r.code, 1);
  write_text(dir_ / "gap.csv", "x,label\n1,A\n,B\n3,A\n");
  r = run({"analyze", "--input", path("gap.csv"), "--label", "label", "--out",
           path("c.json")});
  EXPECT_EQ(r.code, 1);
  r = run({"analyze", "--input", path("gap.csv"), "--label", "label", "--out",
           path("c.json"), "--missing-as-out-of-domain"});
  EXPECT_EQ(r.code, 0) << r.err;
}

TEST_F(CliTest, ThreadCountDoesNotChangeOutput) {
  for (const char* t : {"1", "3"}) {
    const Result r = run({"analyze", "--input", path("d.csv"), "--label",
                          "label", "--out", path(std::string("c") + t + ".json"),
                          "--projected", path(std::string("p") + t + ".csv"),
                          "--threads", t});
    ASSERT_EQ(r.code, 0) << r.err;
  }
  EXPECT_EQ(read_text(path("c1.json")), read_text(path("c3.json")));
  EXPECT_EQ(read_text(path("p1.csv")), read_text(path("p3.csv")));
}

TEST_F(CliTest, ProjectRoundTripAndMismatch) {
  ASSERT_EQ(run({"analyze", "--input", path("d.csv"), "--label", "label",
                 "--out", path("card.json"), "--projected", path("p.csv")})
                .code,
            0);
  Result r = run({"project", "--card", path("card.json"), "--input",
                  path("d.csv"), "--label", "label", "--out", path("q.csv")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(read_text(path("p.csv")), read_text(path("q.csv")));
  EXPECT_NE(r.out.find("out-of-domain cells: 0"), std::string::npos);

  write_text(dir_ / "new.csv", "x,y,proto\n100,1,tcp\n");
  r = run({"project", "--card", path("card.json"), "--input", path("new.csv"),
           "--out", path("n.csv")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("out-of-domain cells: 1"), std::string::npos) << r.out;
  EXPECT_EQ(read_text(path("n.csv")).substr(0, 25), "x,y,proto=tcp,proto=udp\n0");

  write_text(dir_ / "short.csv", "x,proto\n1,tcp\n");
  r = run({"project", "--card", path("card.json"), "--input", path("short.csv"),
           "--out", path("s.csv")});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("'y'"), std::string::npos) << r.err;
}

TEST_F(CliTest, StatsOnToyCard) {
  export_card_json(testing::toy_card(), dir_ / "toy.json");
  Result r = run({"stats", "--card", path("toy.json"), "--class", "A"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("2 unique combinations"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("54 3"), std::string::npos) << r.out;

  r = run({"stats", "--card", path("toy.json"), "--feature", "f0"});
  ASSERT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("feature f0"), std::string::npos);
  EXPECT_EQ(r.out.find("feature f1"), std::string::npos);

  r = run({"stats", "--card", path("toy.json")});
  ASSERT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("overlap fraction"), std::string::npos);

  EXPECT_EQ(run({"stats", "--card", path("toy.json"), "--class", "Q"}).code, 2);
  EXPECT_EQ(run({"stats", "--card", path("toy.json"), "--feature", "q"}).code, 2);
  EXPECT_EQ(run({"stats", "--card", path("nope.json")}).code, 1);
}

TEST_F(CliTest, PlotHonorsSizeAndIsStable) {
  export_card_json(testing::toy_card(), dir_ / "toy.json");
  for (const char* name : {"a.svg", "b.svg"}) {
    ASSERT_EQ(run({"plot", "--card", path("toy.json"), "--out", path(name),
                   "--width", "1600", "--height", "900"})
                  .code,
              0);
  }
  const std::string svg = read_text(path("a.svg"));
  EXPECT_NE(svg.find("width=\"1600\" height=\"900\""), std::string::npos);
  EXPECT_EQ(svg, read_text(path("b.svg")));
  EXPECT_EQ(run({"plot", "--card", path("toy.json"), "--out", path("c.svg"),
                 "--width", "0"})
                .code,
            2);
}

TEST_F(CliTest, SplitIsDeterministic) {
  for (const char* tag : {"1", "2"}) {
    const Result r = run({"split", "--input", path("d.csv"), "--label", "label",
                          "--test-fraction", "0.3", "--seed", "7", "--train-out",
                          path(std::string("tr") + tag + ".csv"), "--test-out",
                          path(std::string("te") + tag + ".csv")});
    ASSERT_EQ(r.code, 0) << r.err;
  }
  EXPECT_EQ(read_text(path("tr1.csv")), read_text(path("tr2.csv")));
  EXPECT_EQ(read_text(path("te1.csv")), read_text(path("te2.csv")));
  const std::string test = read_text(path("te1.csv"));
  EXPECT_EQ(std::count(test.begin(), test.end(), '\n'), 19);  // header + 9 + 9

  EXPECT_EQ(run({"split", "--input", path("d.csv"), "--label", "label",
                 "--test-fraction", "1.2", "--train-out", path("x"),
                 "--test-out", path("y")})
                .code,
            2);
  EXPECT_EQ(run({"split", "--input", path("d.csv"), "--label", "nope",
                 "--train-out", path("x"), "--test-out", path("y")})
                .code,
            1);
}

}  // namespace
}  // namespace spata
