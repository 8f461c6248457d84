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

#include "spata/card_io.h"

#include <charconv>
#include <cmath>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "gtest/gtest.h"
#include "json.hpp"
#include "spata/errors.h"
#include "test_util.h"

namespace spata {
namespace {

using testing::code;
using testing::TempDir;
using testing::toy_card;

std::string replace_once(std::string text, const std::string& from,
                         const std::string& to) {
  const std::size_t at = text.find(from);
  EXPECT_NE(at, std::string::npos) << from;
  if (at != std::string::npos) text.replace(at, from.size(), to);
  return text;
}

PatternCard real_card(unsigned seed = 4) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(3.0, 2.0);
  std::vector<double> a(120);
  std::vector<double> b(120);
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < a.size(); ++i) {
    a[i] = normal(rng);
    b[i] = std::round(normal(rng) * 10) / 10;
    labels.push_back(i % 3 == 0 ? "attack" : "benign");
  }
  const Dataset d({"a", "b \"quoted\""}, {a, b}, labels);
  const Projection p = project_dataset(d, BinSpec(9), 4);
  return build_pattern_card(p.projected, p.model, 0.01);
}

TEST(FormatRealTest, ShortestRoundTrip) {
  EXPECT_EQ(format_real(0.1), "0.1");
  EXPECT_EQ(format_real(-0.0), "0");
  EXPECT_EQ(format_real(5.5), "5.5");
  EXPECT_EQ(format_real(1e300), "1e+300");
  EXPECT_THROW(format_real(NAN), DataError);
  EXPECT_THROW(format_real(INFINITY), DataError);
  for (double x : {1.0 / 3.0, 2.8722813232690143, -1e-310, 123456789.125}) {
    const std::string text = format_real(x);
    double back = 0.0;
    std::from_chars(text.data(), text.data() + text.size(), back);
    EXPECT_EQ(back, x) << text;
  }
}

TEST(CardJsonTest, ToyCardCombinations) {
  const std::string json = card_to_json(toy_card());
  EXPECT_NE(json.find("{\"codes\":[\"54\",\"3\"],\"count\":2,"
                      "\"overlap_classes\":1}"),
            std::string::npos)
      << json;
  EXPECT_NE(json.find("{\"label\":\"A\",\"n_instances\":3,\"combinations\":["
                      "{\"codes\":[\"46\",\"3\"],\"count\":1,\"overlap_classes\":1},"
                      "{\"codes\":[\"54\",\"3\"],\"count\":2,\"overlap_classes\":1}]}"),
            std::string::npos)
      << json;
  EXPECT_NE(json.find("\"version\":\"spata-card/1\""), std::string::npos);
  EXPECT_NE(json.find("\"per_class_counts\":{\"A\":2,\"B\":1},\"overlap_classes\":2"),
            std::string::npos)
      << json;
  // Parses as ordinary JSON.
  const auto doc = nlohmann::json::parse(json);
  EXPECT_EQ(doc["classes"].size(), 2u);
  EXPECT_EQ(doc["config"]["bins"], 9);
}

TEST(CardJsonTest, DeterministicAndCanonical) {
  const PatternCard card = real_card();
  const std::string first = card_to_json(card);
  EXPECT_EQ(first, card_to_json(real_card()));
  const PatternCard back = card_from_json(first);
  EXPECT_EQ(back, card);
  EXPECT_EQ(card_to_json(back), first);
}

TEST(CardJsonTest, FileRoundTripPreservesTrees) {
  TempDir dir("cardio");
  const PatternCard card = real_card(9);
  export_card_json(card, dir / "card.json");
  const PatternCard back = import_card_json(dir / "card.json");
  ASSERT_EQ(back.model.trees.size(), card.model.trees.size());
  for (std::size_t j = 0; j < card.model.trees.size(); ++j) {
    EXPECT_EQ(back.model.trees[j], card.model.trees[j]);
  }
  export_card_json(back, dir / "again.json");
  EXPECT_EQ(testing::read_text(dir / "card.json"),
            testing::read_text(dir / "again.json"));
}

TEST(CardJsonTest, RequiresLabels) {
  PatternCard empty;
  EXPECT_THROW(card_to_json(empty), DataError);
}

TEST(CardJsonTest, RejectsUnknownVersion) {
  const std::string json = replace_once(card_to_json(toy_card()),
                                        "spata-card/1", "spata-card/99");
  try {
    card_from_json(json);
    FAIL();
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("spata-card/99"), std::string::npos);
  }
}

TEST(CardJsonTest, RejectsCountMismatch) {
  const std::string json = replace_once(card_to_json(toy_card()),
                                        "\"n_instances\":3", "\"n_instances\":4");
  EXPECT_THROW(card_from_json(json), DataError);
}

TEST(CardJsonTest, RejectsMalformedInput) {
  const std::string good = card_to_json(toy_card());
  EXPECT_THROW(card_from_json("{"), DataError);
  EXPECT_THROW(card_from_json("[]"), DataError);
  EXPECT_THROW(card_from_json(replace_once(good, "\"bins\":9", "\"bins\":8")),
               DataError);
  EXPECT_THROW(card_from_json(replace_once(good, "\"54\",\"3\"", "\"5x\",\"3\"")),
               DataError);
  EXPECT_THROW(card_from_json(replace_once(good, "\"overlap_classes\":1}",
                                           "\"overlap_classes\":2}")),
               DataError);
  EXPECT_THROW(card_from_json(replace_once(good, "\"count\":2", "\"count\":-2")),
               DataError);
}

TEST(CardJsonTest, RejectsInconsistentTree) {
  const PatternCard card = real_card();
  nlohmann::json doc = nlohmann::json::parse(card_to_json(card));
  auto& root = doc["features"][0]["tree"];
  ASSERT_FALSE(root["children"].empty());
  const std::string key = root["children"].begin().key();

  auto broken = doc;
  broken["features"][0]["tree"]["children"][key]["min"] =
      root["max"].get<double>() + 1;
  EXPECT_THROW(card_from_json(broken.dump()), DataError);

  broken = doc;
  broken["features"][0]["tree"]["children"]["12"] =
      root["children"][key];
  EXPECT_THROW(card_from_json(broken.dump()), DataError);

  broken = doc;
  broken["features"][0]["tree"]["std"] = -1.0;
  EXPECT_THROW(card_from_json(broken.dump()), DataError);
}

TEST(CardJsonTest, KeysMustBeInCanonicalOrder) {
  nlohmann::ordered_json doc =
      nlohmann::ordered_json::parse(card_to_json(toy_card()));
  nlohmann::ordered_json swapped;
  for (const char* key : {"version", "config", "classes", "features", "code_stats"}) {
    swapped[key] = doc[key];
  }
  EXPECT_THROW(card_from_json(swapped.dump()), DataError);

  nlohmann::ordered_json extra = doc;
  extra["comment"] = "hi";
  EXPECT_THROW(card_from_json(extra.dump()), DataError);

  nlohmann::ordered_json missing = doc;
  missing.erase("code_stats");
  EXPECT_THROW(card_from_json(missing.dump()), DataError);

  nlohmann::ordered_json scalar = doc;
  scalar["features"][0] = 3;
  EXPECT_THROW(card_from_json(scalar.dump()), DataError);

  // Whitespace does not matter.
  EXPECT_EQ(card_from_json(doc.dump(2)), toy_card());
}

TEST(CardJsonTest, MissingFile) {
  EXPECT_THROW(import_card_json("/nonexistent/card.json"), DataError);
}

TEST(ProjectedCsvTest, LabeledRow) {
  const ProjectedDataset p = ProjectedDataset::from_rows(
      {"a", "b", "c"}, {{code("463"), code("374"), code("854")}},
      std::vector<std::string>{"k1"});
  std::ostringstream out;
  write_projected_csv(p, 9, out);
  EXPECT_EQ(out.str(), "a,b,c,label\n463,374,854,k1\n");
}

TEST(ProjectedCsvTest, OutOfDomainAndWideBins) {
  const ProjectedDataset p = ProjectedDataset::from_rows(
      {"x", "y"}, {{Code{{0}}, Code{{10, 3}}}}, std::nullopt);
  std::ostringstream out;
  write_projected_csv(p, 11, out);
  EXPECT_EQ(out.str(), "x,y\n0,10.3\n");
}

TEST(MarkdownCardTest, ToyCardTable) {
  const std::string md = render_markdown_card(toy_card());
  EXPECT_NE(md.find("| A | 3 | 2 | 1 | 0 |"), std::string::npos) << md;
  EXPECT_NE(md.find("| B | 1 | 1 | 1 | 0 |"), std::string::npos) << md;
  EXPECT_EQ(md, render_markdown_card(toy_card()));
}

TEST(MarkdownCardTest, SingleClassHasNoOverlap) {
  const ProjectedDataset p = ProjectedDataset::from_rows(
      {"f"}, {{code("1")}, {code("2")}}, std::vector<std::string>{"z", "z"});
  const PatternCard card = build_pattern_card(p, testing::leaf_model({"f"}));
  const std::string md = render_markdown_card(card);
  EXPECT_NE(md.find("more than one class: 0.0000"), std::string::npos) << md;
}

}  // namespace
}  // namespace spata
