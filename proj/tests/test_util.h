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

#ifndef SPATA_TESTS_TEST_UTIL_H_
#define SPATA_TESTS_TEST_UTIL_H_

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "spata/card_io.h"
#include "spata/pattern.h"
#include "spata/projection.h"

namespace spata::testing {

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("spata_" + tag + "_" + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  std::filesystem::path operator/(const std::string& name) const {
    return path_ / name;
  }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

inline void write_text(const std::filesystem::path& path,
                       const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

inline std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline Code code(const std::string& text, int bins = 9) {
  return parse_code(text, bins);
}

// A model whose trees are single leaves; enough for cards built from
// hand-written codes.
inline PatternModel leaf_model(std::vector<std::string> names, int bins = 9,
                               int levels = 8) {
  PatternModel model;
  model.spec = BinSpec(bins);
  model.depth_limit = levels;
  model.feature_names = std::move(names);
  for (std::size_t j = 0; j < model.feature_names.size(); ++j) {
    FeatureStats root;
    root.min = 0.0;
    root.max = 1.0;
    root.mean = 0.5;
    root.std = 0.5;
    root.count = 2;
    model.trees.emplace_back(model.spec, levels, root);
  }
  return model;
}

// A:{("54","3")x2, ("46","3")x1}, B:{("54","7")x1}
inline PatternCard toy_card() {
  std::vector<Combination> rows = {
      {code("54"), code("3")},
      {code("46"), code("3")},
      {code("54"), code("7")},
      {code("54"), code("3")},
  };
  ProjectedDataset projected = ProjectedDataset::from_rows(
      {"f0", "f1"}, rows, std::vector<std::string>{"A", "A", "B", "A"});
  return build_pattern_card(projected, leaf_model({"f0", "f1"}));
}

}  // namespace spata::testing

#endif  // SPATA_TESTS_TEST_UTIL_H_
