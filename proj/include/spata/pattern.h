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

#ifndef SPATA_PATTERN_H_
#define SPATA_PATTERN_H_

// Per-class statistics over a projected dataset: unique combinations and
// their counts, per-feature code counts, and how many classes share each
// code or combination.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "spata/projection.h"

namespace spata {

struct ClassRows {
  std::string label;
  std::vector<std::size_t> rows;  // ascending row indices
};

// Rows grouped by label, classes in label_less order. Throws DataError if
// the dataset has no labels.
std::vector<ClassRows> class_partition(const ProjectedDataset& projected);

// Distinct combinations stored as a flat table of code ids (width ids per
// entry), sorted lexicographically.
class ComboTable {
 public:
  ComboTable() = default;
  explicit ComboTable(std::size_t width) : width_(width) {}

  std::size_t width() const { return width_; }
  std::size_t size() const { return counts_.size(); }
  std::span<const CodeId> ids(std::size_t k) const {
    return {ids_.data() + k * width_, width_};
  }
  std::size_t count(std::size_t k) const { return counts_[k]; }
  const std::vector<std::size_t>& counts() const { return counts_; }

  void push_back(std::span<const CodeId> ids, std::size_t count);

  bool operator==(const ComboTable&) const = default;

 private:
  std::size_t width_ = 0;
  std::vector<CodeId> ids_;
  std::vector<std::size_t> counts_;
};

// Unique combinations among `rows` with occurrence counts.
ComboTable unique_combinations(const ProjectedDataset& projected,
                               std::span<const std::size_t> rows);

struct CodeCount {
  CodeId code;
  std::size_t count;

  bool operator==(const CodeCount&) const = default;
};

// Per feature, the codes present in `rows` with counts, ascending by code.
std::vector<std::vector<CodeCount>> code_counts(
    const ProjectedDataset& projected, std::span<const std::size_t> rows);

// Number of classes containing each code: result[j][code id] for every id
// of feature j's codebook (0 where no class has it). `per_class[k][j]` is
// the set of codes of class k at feature j.
std::vector<std::vector<std::uint32_t>> code_overlaps(
    std::span<const std::vector<std::vector<CodeCount>>> per_class,
    std::span<const std::size_t> codebook_sizes);

// Number of classes containing each unique combination: result[k][c] for
// entry c of per_class[k].
std::vector<std::vector<std::uint32_t>> combo_overlaps(
    std::span<const ComboTable> per_class);

struct CodeStat {
  CodeId code;
  std::size_t count;        // occurrences in this class
  std::uint32_t overlap;    // classes sharing this code at this feature

  bool operator==(const CodeStat&) const = default;
};

struct ClassPattern {
  std::string label;
  std::size_t n_instances = 0;
  ComboTable combinations;
  std::vector<std::uint32_t> combination_overlaps;  // per combination
  std::vector<std::vector<CodeStat>> code_stats;    // per feature

  bool operator==(const ClassPattern&) const = default;
};

struct PatternCard {
  PatternModel model;
  std::vector<std::vector<Code>> codebooks;  // per feature, sorted
  std::vector<ClassPattern> classes;         // label_less order
  double min_frequency = 0.0;

  std::size_t n_rows() const;
  std::size_t n_features() const { return model.feature_names.size(); }
  std::size_t n_classes() const { return classes.size(); }

  const Code& code(std::size_t feature, CodeId id) const {
    return codebooks[feature][id];
  }

  bool operator==(const PatternCard&) const = default;
};

// Composes the operations above. `projected` must carry labels and match
// the model's features.
PatternCard build_pattern_card(const ProjectedDataset& projected,
                               const PatternModel& model,
                               double min_frequency = 0.0,
                               unsigned threads = 1);

// Throws DataError if a card violates count conservation, overlap bounds,
// or overlap consistency.
void validate_card(const PatternCard& card);

}  // namespace spata

#endif  // SPATA_PATTERN_H_
