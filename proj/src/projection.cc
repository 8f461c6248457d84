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

#include "spata/projection.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <utility>

#include "spata/errors.h"
#include "spata/parallel.h"

namespace spata {
namespace {

// Relative tolerance for comparing interval endpoints against the node
// domain when deciding whether a bin still narrows it.
constexpr double kDomainTolerance = 1e-12;

bool nearly_equal(double a, double b) {
  if (a == b) return true;
  return std::abs(a - b) <=
         kDomainTolerance * std::max(std::abs(a), std::abs(b));
}

}  // namespace

std::string format_code(const Code& code, int bins) {
  std::string text;
  if (bins <= 9) {
    text.reserve(code.digits.size());
    for (BinNumber d : code.digits) text.push_back(static_cast<char>('0' + d));
    return text;
  }
  for (std::size_t i = 0; i < code.digits.size(); ++i) {
    if (i > 0) text.push_back('.');
    text += std::to_string(code.digits[i]);
  }
  return text;
}

Code parse_code(std::string_view text, int bins) {
  auto fail = [&] {
    return DataError("malformed code '" + std::string(text) + "' for " +
                     std::to_string(bins) + " bins");
  };
  Code code;
  if (text.empty()) throw fail();
  if (bins <= 9) {
    for (char c : text) {
      if (c < '0' || c > '9') throw fail();
      code.digits.push_back(static_cast<BinNumber>(c - '0'));
    }
  } else {
    std::size_t start = 0;
    while (true) {
      const std::size_t dot = text.find('.', start);
      const std::string_view part =
          text.substr(start, dot == std::string_view::npos ? dot : dot - start);
      unsigned value = 0;
      auto [ptr, ec] =
          std::from_chars(part.data(), part.data() + part.size(), value);
      if (part.empty() || ec != std::errc() ||
          ptr != part.data() + part.size() || value > 0xffffu) {
        throw fail();
      }
      code.digits.push_back(static_cast<BinNumber>(value));
      if (dot == std::string_view::npos) break;
      start = dot + 1;
    }
  }
  for (std::size_t i = 0; i < code.digits.size(); ++i) {
    if (code.digits[i] > bins) throw fail();
    if (code.digits[i] == kOutOfDomain && i + 1 != code.digits.size()) {
      throw fail();
    }
  }
  return code;
}

FeatureTree::FeatureTree(BinSpec spec, int depth_limit,
                         const FeatureStats& root)
    : spec_(spec), depth_limit_(depth_limit) {
  if (depth_limit < 1) throw ConfigError("levels must be >= 1");
  nodes_.push_back(Node{root, kNoNode, 0, 1});
  const std::vector<double> root_cuts = bin_cuts(root, spec_);
  cuts_.assign(root_cuts.begin(), root_cuts.end());
  children_.assign(static_cast<std::size_t>(spec_.bins()), kNoNode);
}

std::span<const double> FeatureTree::cuts(NodeId id) const {
  const auto width = static_cast<std::size_t>(spec_.bins() - 1);
  return {cuts_.data() + id * width, width};
}

std::vector<BinInterval> FeatureTree::intervals(NodeId id) const {
  return subdomain_bounds(nodes_[id].stats, spec_);
}

FeatureTree::NodeId FeatureTree::child(NodeId id, BinNumber bin) const {
  if (bin < 1 || bin > spec_.bins()) return kNoNode;
  return children_[id * static_cast<std::size_t>(spec_.bins()) + bin - 1];
}

bool FeatureTree::is_leaf(NodeId id) const {
  const auto b = static_cast<std::size_t>(spec_.bins());
  const auto first = children_.begin() + static_cast<std::ptrdiff_t>(id * b);
  return std::all_of(first, first + static_cast<std::ptrdiff_t>(b),
                     [](NodeId c) { return c == kNoNode; });
}

FeatureTree::NodeId FeatureTree::add_child(NodeId parent, BinNumber bin,
                                           const FeatureStats& stats) {
  if (parent >= nodes_.size()) throw DataError("unknown parent node");
  if (bin < 1 || bin > spec_.bins()) {
    throw DataError("child bin " + std::to_string(bin) + " out of range");
  }
  if (nodes_[parent].depth >= depth_limit_) {
    throw DataError("tree deeper than the level limit");
  }
  const auto b = static_cast<std::size_t>(spec_.bins());
  NodeId& slot = children_[parent * b + bin - 1];
  if (slot != kNoNode) {
    throw DataError("duplicate child for bin " + std::to_string(bin));
  }
  if (nodes_.size() >= kNoNode) throw DataError("feature tree too large");
  const auto id = static_cast<NodeId>(nodes_.size());
  slot = id;
  nodes_.push_back(Node{stats, parent, bin, nodes_[parent].depth + 1});
  const std::vector<double> node_cuts = bin_cuts(stats, spec_);
  cuts_.insert(cuts_.end(), node_cuts.begin(), node_cuts.end());
  children_.resize(children_.size() + b, kNoNode);
  return id;
}

std::vector<BinNumber> FeatureTree::path(NodeId id) const {
  std::vector<BinNumber> bins;
  for (NodeId at = id; nodes_[at].parent != kNoNode; at = nodes_[at].parent) {
    bins.push_back(nodes_[at].bin_in_parent);
  }
  std::reverse(bins.begin(), bins.end());
  return bins;
}

FeatureTree::Walk FeatureTree::walk(double x) const {
  NodeId at = root();
  while (true) {
    const BinNumber bin = map_value(x, nodes_[at].stats, cuts(at), spec_);
    if (bin == kOutOfDomain) return {at, kOutOfDomain};
    const NodeId next = child(at, bin);
    if (next == kNoNode) return {at, bin};
    at = next;
  }
}

bool FeatureTree::operator==(const FeatureTree& other) const {
  if (!(spec_ == other.spec_) || depth_limit_ != other.depth_limit_ ||
      nodes_.size() != other.nodes_.size() || children_ != other.children_) {
    return false;
  }
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const Node& a = nodes_[i];
    const Node& b = other.nodes_[i];
    if (!(a.stats == b.stats) || a.parent != b.parent ||
        a.bin_in_parent != b.bin_in_parent || a.depth != b.depth) {
      return false;
    }
  }
  return true;
}

namespace {

class TreeGrower {
 public:
  TreeGrower(FeatureTree& tree, std::span<const double> values)
      : tree_(tree),
        work_(values.begin(), values.end()),
        scratch_(values.size()),
        bins_(values.size()) {}

  void grow() { grow(tree_.root(), 0, work_.size()); }

 private:
  void grow(FeatureTree::NodeId id, std::size_t begin, std::size_t end) {
    const FeatureTree::Node& node = tree_.node(id);
    if (node.depth >= tree_.depth_limit() || node.stats.std == 0.0) return;

    const BinSpec& spec = tree_.spec();
    const FeatureStats stats = node.stats;
    const std::span<const double> cuts = tree_.cuts(id);
    const auto b = static_cast<std::size_t>(spec.bins());

    // Stable counting sort of the node's values by bin.
    std::vector<std::size_t> offsets(b + 2, 0);
    for (std::size_t i = begin; i < end; ++i) {
      bins_[i] = map_value(work_[i], stats, cuts, spec);
      ++offsets[bins_[i] + 1];
    }
    for (std::size_t s = 1; s < offsets.size(); ++s) {
      offsets[s] += offsets[s - 1];
    }
    std::vector<std::size_t> fill(offsets.begin(), offsets.end() - 1);
    for (std::size_t i = begin; i < end; ++i) {
      scratch_[begin + fill[bins_[i]]++] = work_[i];
    }
    std::copy(scratch_.begin() + static_cast<std::ptrdiff_t>(begin),
              scratch_.begin() + static_cast<std::ptrdiff_t>(end),
              work_.begin() + static_cast<std::ptrdiff_t>(begin));

    const std::vector<BinInterval> intervals = subdomain_bounds(stats, spec);
    for (std::size_t s = 1; s <= b; ++s) {
      const std::size_t lo = begin + offsets[s];
      const std::size_t hi = begin + offsets[s + 1];
      if (lo == hi) continue;
      const BinInterval& iv = intervals[s - 1];
      if (nearly_equal(iv.lower, stats.min) &&
          nearly_equal(iv.upper, stats.max)) {
        continue;  // bin spans the whole node domain
      }
      const FeatureStats child_stats = feature_stats(
          std::span<const double>(work_.data() + lo, hi - lo));
      const FeatureTree::NodeId child =
          tree_.add_child(id, static_cast<BinNumber>(s), child_stats);
      grow(child, lo, hi);
    }
  }

  FeatureTree& tree_;
  std::vector<double> work_;
  std::vector<double> scratch_;
  std::vector<BinNumber> bins_;
};

struct ColumnCodes {
  std::vector<Code> codebook;
  std::vector<CodeId> ids;
};

ColumnCodes project_column(const FeatureTree& tree,
                           std::span<const double> column) {
  const std::size_t stride = static_cast<std::size_t>(tree.spec().bins()) + 1;
  constexpr CodeId kUnset = std::numeric_limits<CodeId>::max();
  std::vector<CodeId> slot(tree.size() * stride, kUnset);
  std::vector<std::size_t> keys(column.size());
  std::vector<std::size_t> distinct;
  for (std::size_t i = 0; i < column.size(); ++i) {
    const FeatureTree::Walk w = tree.walk(column[i]);
    const std::size_t key = w.node * stride + w.digit;
    keys[i] = key;
    if (slot[key] == kUnset) {
      slot[key] = 0;
      distinct.push_back(key);
    }
  }

  std::vector<std::pair<Code, std::size_t>> entries;
  entries.reserve(distinct.size());
  for (std::size_t key : distinct) {
    const auto node = static_cast<FeatureTree::NodeId>(key / stride);
    Code code{tree.path(node)};
    code.digits.push_back(static_cast<BinNumber>(key % stride));
    entries.emplace_back(std::move(code), key);
  }
  std::sort(entries.begin(), entries.end());

  ColumnCodes out;
  out.codebook.reserve(entries.size());
  for (std::size_t k = 0; k < entries.size(); ++k) {
    slot[entries[k].second] = static_cast<CodeId>(k);
    out.codebook.push_back(std::move(entries[k].first));
  }
  out.ids.resize(column.size());
  for (std::size_t i = 0; i < column.size(); ++i) out.ids[i] = slot[keys[i]];
  return out;
}

ProjectedDataset assemble(std::vector<std::string> names,
                          std::vector<ColumnCodes> columns,
                          std::size_t n_rows,
                          std::optional<std::vector<std::string>> labels) {
  const std::size_t m = columns.size();
  std::vector<CodeId> cells(n_rows * m);
  std::vector<std::vector<Code>> codebooks(m);
  for (std::size_t j = 0; j < m; ++j) {
    for (std::size_t i = 0; i < n_rows; ++i) {
      cells[i * m + j] = columns[j].ids[i];
    }
    codebooks[j] = std::move(columns[j].codebook);
  }
  return ProjectedDataset(std::move(names), std::move(codebooks),
                          std::move(cells), std::move(labels));
}

}  // namespace

FeatureTree build_feature_tree(std::span<const double> values,
                               const BinSpec& spec, int depth_limit) {
  FeatureTree tree(spec, depth_limit, feature_stats(values));
  TreeGrower(tree, values).grow();
  return tree;
}

Code rmap_value(double x, const FeatureTree& tree) {
  const FeatureTree::Walk w = tree.walk(x);
  Code code{tree.path(w.node)};
  code.digits.push_back(w.digit);
  return code;
}

ProjectedDataset::ProjectedDataset(
    std::vector<std::string> feature_names,
    std::vector<std::vector<Code>> codebooks, std::vector<CodeId> cells,
    std::optional<std::vector<std::string>> labels)
    : feature_names_(std::move(feature_names)),
      codebooks_(std::move(codebooks)),
      cells_(std::move(cells)),
      labels_(std::move(labels)) {
  const std::size_t m = feature_names_.size();
  if (codebooks_.size() != m) {
    throw DataError("one codebook per feature required");
  }
  if (m > 0) {
    if (cells_.size() % m != 0) throw DataError("ragged projected cells");
    n_rows_ = cells_.size() / m;
  } else {
    n_rows_ = labels_ ? labels_->size() : 0;
  }
  if (labels_ && labels_->size() != n_rows_) {
    throw DataError("projected labels do not match row count");
  }
  for (const std::vector<Code>& book : codebooks_) {
    if (std::adjacent_find(book.begin(), book.end(),
                           [](const Code& a, const Code& b) {
                             return !(a < b);
                           }) != book.end()) {
      throw DataError("codebook is not strictly sorted");
    }
  }
  for (std::size_t k = 0; k < cells_.size(); ++k) {
    if (cells_[k] >= codebooks_[k % m].size()) {
      throw DataError("projected cell refers to an unknown code");
    }
  }
}

ProjectedDataset ProjectedDataset::from_rows(
    std::vector<std::string> feature_names,
    const std::vector<Combination>& rows,
    std::optional<std::vector<std::string>> labels) {
  const std::size_t m = feature_names.size();
  std::vector<std::vector<Code>> codebooks(m);
  for (const Combination& row : rows) {
    if (row.size() != m) {
      throw DataError("combination width does not match feature count");
    }
    for (std::size_t j = 0; j < m; ++j) codebooks[j].push_back(row[j]);
  }
  for (std::vector<Code>& book : codebooks) {
    std::sort(book.begin(), book.end());
    book.erase(std::unique(book.begin(), book.end()), book.end());
  }
  std::vector<CodeId> cells;
  cells.reserve(rows.size() * m);
  for (const Combination& row : rows) {
    for (std::size_t j = 0; j < m; ++j) {
      const auto it = std::lower_bound(codebooks[j].begin(),
                                       codebooks[j].end(), row[j]);
      cells.push_back(static_cast<CodeId>(it - codebooks[j].begin()));
    }
  }
  return ProjectedDataset(std::move(feature_names), std::move(codebooks),
                          std::move(cells), std::move(labels));
}

Combination ProjectedDataset::combination(std::size_t row) const {
  Combination out;
  out.reserve(n_features());
  for (std::size_t j = 0; j < n_features(); ++j) out.push_back(code(row, j));
  return out;
}

bool ProjectedDataset::operator==(const ProjectedDataset& other) const {
  if (feature_names_ != other.feature_names_ || n_rows_ != other.n_rows_ ||
      labels_ != other.labels_) {
    return false;
  }
  for (std::size_t i = 0; i < n_rows_; ++i) {
    for (std::size_t j = 0; j < n_features(); ++j) {
      if (code(i, j) != other.code(i, j)) return false;
    }
  }
  return true;
}

Projection project_dataset(const Dataset& dataset, const BinSpec& spec,
                           int depth_limit, unsigned threads) {
  if (depth_limit < 1) throw ConfigError("levels must be >= 1");
  if (dataset.n_rows() == 0) throw DataError("cannot project an empty dataset");
  const std::size_t m = dataset.n_features();

  std::vector<std::optional<FeatureTree>> trees(m);
  std::vector<ColumnCodes> columns(m);
  parallel_for(m, threads, [&](std::size_t j) {
    const std::vector<double>& column = dataset.column(j);
    std::vector<double> present;
    present.reserve(column.size());
    for (double v : column) {
      if (!std::isnan(v)) present.push_back(v);
    }
    if (present.empty()) {
      throw DataError("feature '" + dataset.feature_names()[j] +
                      "' has no values");
    }
    trees[j].emplace(build_feature_tree(present, spec, depth_limit));
    columns[j] = project_column(*trees[j], column);
  });

  Projection out;
  out.model.spec = spec;
  out.model.depth_limit = depth_limit;
  out.model.feature_names = dataset.feature_names();
  out.model.trees.reserve(m);
  for (auto& tree : trees) out.model.trees.push_back(std::move(*tree));
  out.projected = assemble(dataset.feature_names(), std::move(columns),
                           dataset.n_rows(), dataset.labels());
  return out;
}

ProjectedDataset project_with_model(const PatternModel& model,
                                    const Dataset& dataset, unsigned threads) {
  if (dataset.feature_names() != model.feature_names) {
    std::string message = "feature mismatch between data and model:";
    for (const std::string& name : model.feature_names) {
      if (std::find(dataset.feature_names().begin(),
                    dataset.feature_names().end(),
                    name) == dataset.feature_names().end()) {
        message += " missing '" + name + "'";
      }
    }
    for (const std::string& name : dataset.feature_names()) {
      if (std::find(model.feature_names.begin(), model.feature_names.end(),
                    name) == model.feature_names.end()) {
        message += " unexpected '" + name + "'";
      }
    }
    if (message.back() == ':') message += " same names in a different order";
    throw DataError(message);
  }
  const std::size_t m = model.trees.size();
  std::vector<ColumnCodes> columns(m);
  parallel_for(m, threads, [&](std::size_t j) {
    columns[j] = project_column(model.trees[j], dataset.column(j));
  });
  return assemble(dataset.feature_names(), std::move(columns),
                  dataset.n_rows(), dataset.labels());
}

}  // namespace spata
