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

#include "spata/pattern.h"

#include <algorithm>
#include <numeric>
#include <unordered_map>

#include "spata/dataset.h"
#include "spata/errors.h"
#include "spata/parallel.h"

namespace spata {
namespace {

bool ids_less(std::span<const CodeId> a, std::span<const CodeId> b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

bool ids_equal(std::span<const CodeId> a, std::span<const CodeId> b) {
  return std::equal(a.begin(), a.end(), b.begin(), b.end());
}

}  // namespace

void ComboTable::push_back(std::span<const CodeId> ids, std::size_t count) {
  if (ids.size() != width_) throw DataError("combination width mismatch");
  ids_.insert(ids_.end(), ids.begin(), ids.end());
  counts_.push_back(count);
}

std::vector<ClassRows> class_partition(const ProjectedDataset& projected) {
  if (!projected.labels()) {
    throw DataError("pattern statistics require class labels");
  }
  const std::vector<std::string>& labels = *projected.labels();
  std::vector<std::string> classes = sorted_classes(labels);
  std::unordered_map<std::string_view, std::size_t> index;
  std::vector<ClassRows> out(classes.size());
  for (std::size_t k = 0; k < classes.size(); ++k) {
    out[k].label = std::move(classes[k]);
    index[out[k].label] = k;
  }
  for (std::size_t i = 0; i < labels.size(); ++i) {
    out[index.at(labels[i])].rows.push_back(i);
  }
  return out;
}

ComboTable unique_combinations(const ProjectedDataset& projected,
                               std::span<const std::size_t> rows) {
  std::vector<std::size_t> order(rows.begin(), rows.end());
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return ids_less(projected.row_ids(a), projected.row_ids(b));
  });
  ComboTable table(projected.n_features());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t end = i + 1;
    while (end < order.size() &&
           ids_equal(projected.row_ids(order[i]), projected.row_ids(order[end]))) {
      ++end;
    }
    table.push_back(projected.row_ids(order[i]), end - i);
    i = end;
  }
  return table;
}

std::vector<std::vector<CodeCount>> code_counts(
    const ProjectedDataset& projected, std::span<const std::size_t> rows) {
  std::vector<std::vector<CodeCount>> out(projected.n_features());
  for (std::size_t j = 0; j < projected.n_features(); ++j) {
    std::vector<std::size_t> dense(projected.codebook(j).size(), 0);
    for (std::size_t i : rows) ++dense[projected.id(i, j)];
    for (std::size_t c = 0; c < dense.size(); ++c) {
      if (dense[c] > 0) out[j].push_back({static_cast<CodeId>(c), dense[c]});
    }
  }
  return out;
}

std::vector<std::vector<std::uint32_t>> code_overlaps(
    std::span<const std::vector<std::vector<CodeCount>>> per_class,
    std::span<const std::size_t> codebook_sizes) {
  std::vector<std::vector<std::uint32_t>> overlaps(codebook_sizes.size());
  for (std::size_t j = 0; j < codebook_sizes.size(); ++j) {
    overlaps[j].assign(codebook_sizes[j], 0);
  }
  for (const auto& features : per_class) {
    for (std::size_t j = 0; j < features.size(); ++j) {
      for (const CodeCount& cc : features[j]) {
        if (cc.count > 0) ++overlaps[j].at(cc.code);
      }
    }
  }
  return overlaps;
}

std::vector<std::vector<std::uint32_t>> combo_overlaps(
    std::span<const ComboTable> per_class) {
  struct Entry {
    std::uint32_t table;
    std::size_t index;
  };
  std::vector<Entry> entries;
  std::vector<std::vector<std::uint32_t>> out(per_class.size());
  for (std::size_t k = 0; k < per_class.size(); ++k) {
    out[k].assign(per_class[k].size(), 0);
    for (std::size_t c = 0; c < per_class[k].size(); ++c) {
      entries.push_back({static_cast<std::uint32_t>(k), c});
    }
  }
  auto ids_of = [&](const Entry& e) {
    return per_class[e.table].ids(e.index);
  };
  std::sort(entries.begin(), entries.end(), [&](const Entry& a, const Entry& b) {
    if (ids_less(ids_of(a), ids_of(b))) return true;
    if (ids_less(ids_of(b), ids_of(a))) return false;
    return a.table < b.table;
  });
  for (std::size_t i = 0; i < entries.size();) {
    std::size_t end = i + 1;
    while (end < entries.size() && ids_equal(ids_of(entries[i]), ids_of(entries[end]))) {
      ++end;
    }
    // Distinct tables only: a table never repeats a combination.
    std::size_t classes = 1;
    for (std::size_t e = i + 1; e < end; ++e) {
      if (entries[e].table != entries[e - 1].table) ++classes;
    }
    for (std::size_t e = i; e < end; ++e) {
      out[entries[e].table][entries[e].index] =
          static_cast<std::uint32_t>(classes);
    }
    i = end;
  }
  return out;
}

std::size_t PatternCard::n_rows() const {
  std::size_t n = 0;
  for (const ClassPattern& c : classes) n += c.n_instances;
  return n;
}

PatternCard build_pattern_card(const ProjectedDataset& projected,
                               const PatternModel& model,
                               double min_frequency, unsigned threads) {
  if (projected.feature_names() != model.feature_names) {
    throw DataError("projected dataset does not match the model's features");
  }
  const std::vector<ClassRows> partition = class_partition(projected);
  const std::size_t n_classes = partition.size();

  std::vector<ComboTable> combos(n_classes);
  std::vector<std::vector<std::vector<CodeCount>>> counts(n_classes);
  parallel_for(n_classes, threads, [&](std::size_t k) {
    combos[k] = unique_combinations(projected, partition[k].rows);
    counts[k] = code_counts(projected, partition[k].rows);
  });

  std::vector<std::size_t> sizes;
  for (const auto& book : projected.codebooks()) sizes.push_back(book.size());
  const auto code_overlap = code_overlaps(counts, sizes);
  auto combo_overlap = combo_overlaps(combos);

  PatternCard card;
  card.model = model;
  card.codebooks = projected.codebooks();
  card.min_frequency = min_frequency;
  card.classes.resize(n_classes);
  for (std::size_t k = 0; k < n_classes; ++k) {
    ClassPattern& cls = card.classes[k];
    cls.label = partition[k].label;
    cls.n_instances = partition[k].rows.size();
    cls.combinations = std::move(combos[k]);
    cls.combination_overlaps = std::move(combo_overlap[k]);
    cls.code_stats.resize(projected.n_features());
    for (std::size_t j = 0; j < projected.n_features(); ++j) {
      for (const CodeCount& cc : counts[k][j]) {
        cls.code_stats[j].push_back(
            {cc.code, cc.count, code_overlap[j][cc.code]});
      }
    }
  }
  return card;
}

void validate_card(const PatternCard& card) {
  auto corrupt = [](const std::string& why) {
    return DataError("corrupt card: " + why);
  };
  const std::size_t m = card.n_features();
  if (card.model.trees.size() != m || card.codebooks.size() != m) {
    throw corrupt("feature, tree and codebook counts differ");
  }
  if (card.classes.empty()) throw corrupt("no classes");
  const auto n_classes = static_cast<std::uint32_t>(card.classes.size());

  for (std::size_t k = 0; k < card.classes.size(); ++k) {
    const ClassPattern& cls = card.classes[k];
    const std::string where = "class '" + cls.label + "'";
    if (k > 0 && !label_less(card.classes[k - 1].label, cls.label)) {
      throw corrupt("classes not in label order at " + where);
    }
    if (cls.n_instances == 0) throw corrupt(where + " has no instances");
    const ComboTable& table = cls.combinations;
    if (table.width() != m) throw corrupt(where + " combination width");
    if (cls.combination_overlaps.size() != table.size()) {
      throw corrupt(where + " overlap list length");
    }
    if (cls.code_stats.size() != m) throw corrupt(where + " code stats width");

    std::size_t total = 0;
    std::vector<std::unordered_map<CodeId, std::size_t>> derived(m);
    for (std::size_t c = 0; c < table.size(); ++c) {
      if (table.count(c) == 0) throw corrupt(where + " zero combination count");
      if (c > 0 && !ids_less(table.ids(c - 1), table.ids(c))) {
        throw corrupt(where + " combinations not sorted or not unique");
      }
      const std::uint32_t overlap = cls.combination_overlaps[c];
      if (overlap < 1 || overlap > n_classes) {
        throw corrupt(where + " combination overlap out of range");
      }
      total += table.count(c);
      for (std::size_t j = 0; j < m; ++j) {
        const CodeId id = table.ids(c)[j];
        if (id >= card.codebooks[j].size()) throw corrupt(where + " unknown code");
        derived[j][id] += table.count(c);
      }
    }
    if (total != cls.n_instances) {
      throw corrupt(where + ": combination counts sum to " +
                    std::to_string(total) + ", expected " +
                    std::to_string(cls.n_instances));
    }

    for (std::size_t j = 0; j < m; ++j) {
      const std::vector<CodeStat>& stats = cls.code_stats[j];
      std::size_t feature_total = 0;
      for (std::size_t s = 0; s < stats.size(); ++s) {
        if (s > 0 && stats[s - 1].code >= stats[s].code) {
          throw corrupt(where + " code stats not sorted");
        }
        if (stats[s].overlap < 1 || stats[s].overlap > n_classes) {
          throw corrupt(where + " code overlap out of range");
        }
        auto it = derived[j].find(stats[s].code);
        if (it == derived[j].end() || it->second != stats[s].count) {
          throw corrupt(where + " code counts disagree with combinations at '" +
                        card.model.feature_names[j] + "'");
        }
        feature_total += stats[s].count;
      }
      if (feature_total != cls.n_instances || stats.size() != derived[j].size()) {
        throw corrupt(where + " code counts do not sum to the class size at '" +
                      card.model.feature_names[j] + "'");
      }
    }
  }

  // Overlaps must agree with a recount.
  std::vector<ComboTable> tables;
  std::vector<std::vector<std::vector<CodeCount>>> counts;
  for (const ClassPattern& cls : card.classes) {
    tables.push_back(cls.combinations);
    auto& features = counts.emplace_back(m);
    for (std::size_t j = 0; j < m; ++j) {
      for (const CodeStat& s : cls.code_stats[j]) {
        features[j].push_back({s.code, s.count});
      }
    }
  }
  std::vector<std::size_t> sizes;
  for (const auto& book : card.codebooks) sizes.push_back(book.size());
  const auto code_overlap = code_overlaps(counts, sizes);
  const auto combo_overlap = combo_overlaps(tables);
  for (std::size_t k = 0; k < card.classes.size(); ++k) {
    const ClassPattern& cls = card.classes[k];
    if (cls.combination_overlaps != combo_overlap[k]) {
      throw corrupt("combination overlaps inconsistent in class '" +
                    cls.label + "'");
    }
    for (std::size_t j = 0; j < m; ++j) {
      for (const CodeStat& s : cls.code_stats[j]) {
        if (s.overlap != code_overlap[j][s.code]) {
          throw corrupt("code overlaps inconsistent in class '" + cls.label +
                        "'");
        }
      }
    }
  }
}

}  // namespace spata
