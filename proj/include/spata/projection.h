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

#ifndef SPATA_PROJECTION_H_
#define SPATA_PROJECTION_H_

// Recursive projection of numeric features into hierarchical bin codes.
//
// A FeatureTree is built once per feature: the root holds the statistics of
// the full column, and each non-empty bin whose subdomain is a strict subset
// of the node domain gets a child built from the ordered subvector of values
// that fall into it. A value's code is the sequence of bin numbers visited
// while walking down the tree.

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "spata/binning.h"
#include "spata/dataset.h"

namespace spata {

inline constexpr int kDefaultLevels = 8;
inline constexpr int kDefaultBins = 9;

// Hierarchical bin code, one digit per level. A 0 digit can only be last.
struct Code {
  std::vector<BinNumber> digits;

  auto operator<=>(const Code&) const = default;
  bool operator==(const Code&) const = default;

  bool out_of_domain() const {
    return !digits.empty() && digits.back() == kOutOfDomain;
  }
};

// "463" when bins <= 9, otherwise digits joined by '.' ("10.3").
std::string format_code(const Code& code, int bins);
// Inverse of format_code. Throws DataError on malformed text.
Code parse_code(std::string_view text, int bins);

using Combination = std::vector<Code>;

class FeatureTree {
 public:
  using NodeId = std::uint32_t;
  static constexpr NodeId kNoNode = 0xffffffffu;

  struct Node {
    FeatureStats stats;
    NodeId parent = kNoNode;
    BinNumber bin_in_parent = 0;
    int depth = 1;  // root is depth 1
  };

  // Leaf-only tree with the given root statistics.
  FeatureTree(BinSpec spec, int depth_limit, const FeatureStats& root);

  const BinSpec& spec() const { return spec_; }
  int depth_limit() const { return depth_limit_; }
  std::size_t size() const { return nodes_.size(); }

  NodeId root() const { return 0; }
  const Node& node(NodeId id) const { return nodes_[id]; }
  const FeatureStats& stats(NodeId id) const { return nodes_[id].stats; }
  std::span<const double> cuts(NodeId id) const;
  std::vector<BinInterval> intervals(NodeId id) const;

  // Child reached through `bin`, or kNoNode.
  NodeId child(NodeId id, BinNumber bin) const;
  bool is_leaf(NodeId id) const;

  // Appends a child under `parent` for `bin`. Throws DataError if the bin is
  // out of range, already taken, or the depth limit would be exceeded.
  NodeId add_child(NodeId parent, BinNumber bin, const FeatureStats& stats);

  // Bin path from the root down to (and excluding) node `id`.
  std::vector<BinNumber> path(NodeId id) const;

  // Terminal position of a value: the last node visited and the digit
  // emitted there. Identifies the code uniquely within this tree.
  struct Walk {
    NodeId node;
    BinNumber digit;
  };
  Walk walk(double x) const;

  bool operator==(const FeatureTree& other) const;

 private:
  BinSpec spec_;
  int depth_limit_;
  std::vector<Node> nodes_;
  std::vector<double> cuts_;       // (bins - 1) per node
  std::vector<NodeId> children_;   // bins per node, kNoNode if absent
};

// Recursively builds the tree of `values` (non-empty, finite). A child is
// created for every bin with at least one value whose subdomain differs
// from the node domain, up to `depth_limit` levels. Constant subvectors
// become leaves that map to the center bin.
FeatureTree build_feature_tree(std::span<const double> values,
                               const BinSpec& spec, int depth_limit);

// Code of x: bins along the walk, terminated by 0 if x leaves the domain of
// any visited node. Non-finite x gives [0].
Code rmap_value(double x, const FeatureTree& tree);

// Everything needed to re-project new data without the source dataset.
struct PatternModel {
  BinSpec spec{kDefaultBins};
  int depth_limit = kDefaultLevels;
  std::vector<std::string> feature_names;
  std::vector<FeatureTree> trees;

  bool operator==(const PatternModel&) const = default;
};

using CodeId = std::uint32_t;

// A dataset rewritten as codes. Codes are interned per feature: each
// feature owns a sorted codebook and cells hold indices into it, so ordering
// cells by id is the same as ordering the codes lexicographically.
class ProjectedDataset {
 public:
  ProjectedDataset() = default;
  ProjectedDataset(std::vector<std::string> feature_names,
                   std::vector<std::vector<Code>> codebooks,
                   std::vector<CodeId> cells,
                   std::optional<std::vector<std::string>> labels);

  // Convenience constructor from explicit rows of codes.
  static ProjectedDataset from_rows(
      std::vector<std::string> feature_names,
      const std::vector<Combination>& rows,
      std::optional<std::vector<std::string>> labels);

  std::size_t n_rows() const { return n_rows_; }
  std::size_t n_features() const { return feature_names_.size(); }
  const std::vector<std::string>& feature_names() const {
    return feature_names_;
  }
  const std::optional<std::vector<std::string>>& labels() const {
    return labels_;
  }
  const std::vector<Code>& codebook(std::size_t feature) const {
    return codebooks_[feature];
  }
  const std::vector<std::vector<Code>>& codebooks() const {
    return codebooks_;
  }

  std::span<const CodeId> row_ids(std::size_t row) const {
    return {cells_.data() + row * n_features(), n_features()};
  }
  CodeId id(std::size_t row, std::size_t feature) const {
    return cells_[row * n_features() + feature];
  }
  const Code& code(std::size_t row, std::size_t feature) const {
    return codebooks_[feature][id(row, feature)];
  }
  Combination combination(std::size_t row) const;

  // Compares codes cell by cell (and labels), not interning details.
  bool operator==(const ProjectedDataset& other) const;

 private:
  std::vector<std::string> feature_names_;
  std::vector<std::vector<Code>> codebooks_;
  std::vector<CodeId> cells_;  // row-major, n_rows x n_features
  std::optional<std::vector<std::string>> labels_;
  std::size_t n_rows_ = 0;
};

struct Projection {
  PatternModel model;
  ProjectedDataset projected;
};

// Builds one tree per feature from its full column and projects every cell.
// Missing cells (NaN) are excluded from the trees and project to "0".
// Throws DataError for an empty dataset or an all-missing column.
Projection project_dataset(const Dataset& dataset, const BinSpec& spec,
                           int depth_limit, unsigned threads = 1);

// Projects `dataset` against stored trees. Feature names must match the
// model exactly and in order; otherwise throws DataError.
ProjectedDataset project_with_model(const PatternModel& model,
                                    const Dataset& dataset,
                                    unsigned threads = 1);

}  // namespace spata

#endif  // SPATA_PROJECTION_H_
