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

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <memory>
#include <ostream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "json.hpp"
#include "spata/csv.h"
#include "spata/dataset.h"
#include "spata/errors.h"

namespace spata {
namespace {

using Json = nlohmann::json;

std::string json_string(std::string_view text) {
  try {
    return Json(std::string(text)).dump();
  } catch (const Json::exception& e) {
    throw DataError("cannot encode '" + std::string(text) +
                    "' as JSON: " + e.what());
  }
}

// Accumulates output and hands it to the stream in large chunks.
class Sink {
 public:
  explicit Sink(std::ostream& out) : out_(out) { buffer_.reserve(1 << 20); }
  ~Sink() { flush(); }

  Sink& operator<<(std::string_view text) {
    buffer_.append(text);
    if (buffer_.size() >= (1u << 20)) flush();
    return *this;
  }
  Sink& operator<<(char c) {
    buffer_.push_back(c);
    return *this;
  }
  Sink& operator<<(std::size_t value) {
    char digits[24];
    auto [ptr, ec] = std::to_chars(digits, digits + sizeof(digits), value);
    buffer_.append(digits, ptr);
    return *this;
  }
  void flush() {
    out_.write(buffer_.data(), static_cast<std::streamsize>(buffer_.size()));
    buffer_.clear();
  }

 private:
  std::ostream& out_;
  std::string buffer_;
};

void write_node(Sink& out, const FeatureTree& tree, FeatureTree::NodeId id) {
  const FeatureStats& s = tree.stats(id);
  out << "{\"mean\":" << format_real(s.mean) << ",\"std\":" << format_real(s.std)
      << ",\"min\":" << format_real(s.min) << ",\"max\":" << format_real(s.max)
      << ",\"count\":" << s.count << ",\"children\":{";
  bool first = true;
  for (int bin = 1; bin <= tree.spec().bins(); ++bin) {
    const FeatureTree::NodeId child =
        tree.child(id, static_cast<BinNumber>(bin));
    if (child == FeatureTree::kNoNode) continue;
    if (!first) out << ',';
    first = false;
    out << '"' << std::to_string(bin) << "\":";
    write_node(out, tree, child);
  }
  out << "}}";
}

[[noreturn]] void schema_error(const std::string& what) {
  throw DataError("corrupt card: " + what);
}

const Json& member(const Json& object, const char* key) {
  if (!object.is_object()) schema_error(std::string("expected an object around '") + key + "'");
  auto it = object.find(key);
  if (it == object.end()) schema_error(std::string("missing key '") + key + "'");
  return *it;
}

double real_member(const Json& object, const char* key) {
  const Json& v = member(object, key);
  if (!v.is_number()) schema_error(std::string("'") + key + "' is not a number");
  const double value = v.get<double>();
  if (!std::isfinite(value)) schema_error(std::string("'") + key + "' is not finite");
  return value;
}

std::size_t count_member(const Json& object, const char* key) {
  const Json& v = member(object, key);
  if (!v.is_number_unsigned()) {
    schema_error(std::string("'") + key + "' is not a non-negative integer");
  }
  return v.get<std::size_t>();
}

std::string string_member(const Json& object, const char* key) {
  const Json& v = member(object, key);
  if (!v.is_string()) schema_error(std::string("'") + key + "' is not a string");
  return v.get<std::string>();
}

const Json& array_member(const Json& object, const char* key) {
  const Json& v = member(object, key);
  if (!v.is_array()) schema_error(std::string("'") + key + "' is not an array");
  return v;
}

FeatureStats read_stats(const Json& node) {
  FeatureStats s;
  s.mean = real_member(node, "mean");
  s.std = real_member(node, "std");
  s.min = real_member(node, "min");
  s.max = real_member(node, "max");
  s.count = count_member(node, "count");
  if (s.count == 0 || s.std < 0.0 || s.min > s.max || s.mean < s.min ||
      s.mean > s.max || ((s.std == 0.0) != (s.min == s.max))) {
    schema_error("inconsistent node statistics");
  }
  return s;
}

void read_children(const Json& node, FeatureTree& tree,
                   FeatureTree::NodeId id) {
  const Json& children = member(node, "children");
  if (!children.is_object()) schema_error("'children' is not an object");
  if (children.empty()) return;

  const FeatureStats parent = tree.stats(id);
  if (parent.std == 0.0) schema_error("constant node with children");
  std::vector<std::pair<int, const Json*>> ordered;
  for (auto it = children.begin(); it != children.end(); ++it) {
    int bin = 0;
    const std::string& key = it.key();
    auto [ptr, ec] = std::from_chars(key.data(), key.data() + key.size(), bin);
    if (ec != std::errc() || ptr != key.data() + key.size() ||
        std::to_string(bin) != key || bin < 1 || bin > tree.spec().bins()) {
      schema_error("invalid child bin '" + key + "'");
    }
    ordered.emplace_back(bin, &it.value());
  }
  std::sort(ordered.begin(), ordered.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });

  const std::vector<BinInterval> intervals = tree.intervals(id);
  std::size_t total = 0;
  for (const auto& [bin, child_json] : ordered) {
    const FeatureStats stats = read_stats(*child_json);
    const BinInterval& iv = intervals[static_cast<std::size_t>(bin - 1)];
    if (!iv.contains(stats.min) || !iv.contains(stats.max)) {
      schema_error("child domain outside its parent bin");
    }
    total += stats.count;
    const FeatureTree::NodeId child =
        tree.add_child(id, static_cast<BinNumber>(bin), stats);
    read_children(*child_json, tree, child);
  }
  if (total > parent.count) schema_error("children hold more values than parent");
}

}  // namespace

std::string format_real(double value) {
  if (!std::isfinite(value)) throw DataError("cannot serialize a non-finite real");
  if (value == 0.0) return "0";
  char digits[32];
  auto [ptr, ec] = std::to_chars(digits, digits + sizeof(digits), value);
  return std::string(digits, ptr);
}

void write_card_json(const PatternCard& card, std::ostream& stream) {
  if (card.classes.empty()) {
    throw DataError("a pattern card requires labeled data (no classes)");
  }
  const int bins = card.model.spec.bins();
  const std::size_t m = card.n_features();

  std::vector<std::vector<std::string>> code_text(m);
  for (std::size_t j = 0; j < m; ++j) {
    for (const Code& code : card.codebooks[j]) {
      code_text[j].push_back(json_string(format_code(code, bins)));
    }
  }
  std::vector<std::string> labels;
  for (const ClassPattern& cls : card.classes) labels.push_back(json_string(cls.label));

  Sink out(stream);
  out << "{\n\"version\":" << json_string(kCardVersion) << ",\n";
  out << "\"config\":{\"bins\":" << static_cast<std::size_t>(bins)
      << ",\"levels\":" << static_cast<std::size_t>(card.model.depth_limit)
      << ",\"min_frequency\":" << format_real(card.min_frequency)
      << ",\"tool_version\":" << json_string(SPATA_VERSION) << "},\n";

  out << "\"features\":[";
  for (std::size_t j = 0; j < m; ++j) {
    out << (j == 0 ? "\n" : ",\n") << "{\"name\":"
        << json_string(card.model.feature_names[j]) << ",\"tree\":";
    write_node(out, card.model.trees[j], card.model.trees[j].root());
    out << '}';
  }
  out << "\n],\n";

  out << "\"classes\":[";
  for (std::size_t k = 0; k < card.classes.size(); ++k) {
    const ClassPattern& cls = card.classes[k];
    out << (k == 0 ? "\n" : ",\n") << "{\"label\":" << labels[k]
        << ",\"n_instances\":" << cls.n_instances << ",\"combinations\":[";
    for (std::size_t c = 0; c < cls.combinations.size(); ++c) {
      if (c > 0) out << ',';
      out << "{\"codes\":[";
      const auto ids = cls.combinations.ids(c);
      for (std::size_t j = 0; j < m; ++j) {
        if (j > 0) out << ',';
        out << code_text[j][ids[j]];
      }
      out << "],\"count\":" << cls.combinations.count(c)
          << ",\"overlap_classes\":"
          << static_cast<std::size_t>(cls.combination_overlaps[c]) << '}';
    }
    out << "]}";
  }
  out << "\n],\n";

  out << "\"code_stats\":[";
  bool first = true;
  for (std::size_t j = 0; j < m; ++j) {
    const std::string feature = json_string(card.model.feature_names[j]);
    std::vector<std::size_t> cursor(card.classes.size(), 0);
    for (CodeId id = 0; id < card.codebooks[j].size(); ++id) {
      std::string counts;
      std::uint32_t overlap = 0;
      for (std::size_t k = 0; k < card.classes.size(); ++k) {
        const std::vector<CodeStat>& stats = card.classes[k].code_stats[j];
        std::size_t& at = cursor[k];
        if (at < stats.size() && stats[at].code == id) {
          if (!counts.empty()) counts += ',';
          counts += labels[k];
          counts += ':';
          counts += std::to_string(stats[at].count);
          overlap = stats[at].overlap;
          ++at;
        }
      }
      if (overlap == 0) continue;
      out << (first ? "\n" : ",\n") << "{\"feature\":" << feature
          << ",\"code\":" << code_text[j][id] << ",\"per_class_counts\":{"
          << counts << "},\"overlap_classes\":"
          << static_cast<std::size_t>(overlap) << '}';
      first = false;
    }
  }
  out << "\n]\n}\n";
}

std::string card_to_json(const PatternCard& card) {
  std::ostringstream out;
  write_card_json(card, out);
  return std::move(out).str();
}

void export_card_json(const PatternCard& card,
                      const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  write_card_json(card, out);
  out.flush();
  if (!out) throw DataError("failed writing '" + path.string() + "'");
}

namespace {

// Builds small JSON values from SAX events but hands selected elements to
// the importer as soon as they are complete, then drops them. Keeps memory
// proportional to the card rather than to its DOM.
class StreamingBuilder {
 public:
  using Callback = std::function<void(int, const Json&)>;
  enum Stream { kFeature, kCombination, kClass, kCodeStat };

  StreamingBuilder(Callback on_element, std::function<void(const std::string&)> on_top_key)
      : on_element_(std::move(on_element)), on_top_key_(std::move(on_top_key)) {}

  const Json& root() const { return root_; }

  bool null() { return scalar(Json(nullptr)); }
  bool boolean(bool v) { return scalar(Json(v)); }
  bool number_integer(Json::number_integer_t v) { return scalar(Json(v)); }
  bool number_unsigned(Json::number_unsigned_t v) { return scalar(Json(v)); }
  bool number_float(Json::number_float_t v, const Json::string_t&) {
    return scalar(Json(v));
  }
  bool string(Json::string_t& v) { return scalar(Json(std::move(v))); }
  bool binary(Json::binary_t&) { schema_error("binary values are not allowed"); }

  bool start_object(std::size_t) { return open(Json::object()); }
  bool start_array(std::size_t) { return open(Json::array()); }
  bool end_object() { return close(); }
  bool end_array() { return close(); }

  bool key(Json::string_t& k) {
    pending_key_ = k;
    if (frames_.size() == 1) on_top_key_(k);
    return true;
  }

  bool parse_error(std::size_t, const std::string&,
                   const nlohmann::detail::exception& e) {
    throw DataError(std::string("card is not valid JSON: ") + e.what());
  }

 private:
  struct Frame {
    Json* value;
    std::string segment;  // key in parent, or "[]" for array elements
  };

  std::string next_segment() const {
    if (frames_.empty()) return "";
    return frames_.back().value->is_array() ? "[]" : pending_key_;
  }

  Json* attach(Json value) {
    if (frames_.empty()) {
      root_ = std::move(value);
      return &root_;
    }
    Json& parent = *frames_.back().value;
    if (parent.is_array()) {
      parent.push_back(std::move(value));
      return &parent.back();
    }
    Json& slot = parent[pending_key_];
    slot = std::move(value);
    return &slot;
  }

  int stream_of(const std::string& last) const {
    // Path segments below the root, including the completed element.
    std::vector<const std::string*> path;
    for (std::size_t i = 1; i < frames_.size(); ++i) path.push_back(&frames_[i].segment);
    path.push_back(&last);
    auto is = [&](std::initializer_list<const char*> expect) {
      if (path.size() != expect.size()) return false;
      std::size_t i = 0;
      for (const char* e : expect) {
        if (*path[i++] != e) return false;
      }
      return true;
    };
    if (is({"features", "[]"})) return kFeature;
    if (is({"classes", "[]", "combinations", "[]"})) return kCombination;
    if (is({"classes", "[]"})) return kClass;
    if (is({"code_stats", "[]"})) return kCodeStat;
    return -1;
  }

  bool scalar(Json value) {
    const std::string segment = next_segment();
    const int stream = frames_.empty() ? -1 : stream_of(segment);
    if (stream >= 0) {
      on_element_(stream, value);  // rejects the non-object
      return true;
    }
    attach(std::move(value));
    return true;
  }

  bool open(Json value) {
    std::string segment = next_segment();
    Json* slot = attach(std::move(value));
    frames_.push_back({slot, std::move(segment)});
    return true;
  }

  bool close() {
    Frame done = std::move(frames_.back());
    frames_.pop_back();
    if (frames_.empty()) return true;
    const int stream = stream_of(done.segment);
    if (stream < 0) return true;
    on_element_(stream, *done.value);
    Json& parent = *frames_.back().value;
    if (parent.is_array()) {
      parent.erase(parent.size() - 1);
    } else {
      parent.erase(done.segment);
    }
    return true;
  }

  Callback on_element_;
  std::function<void(const std::string&)> on_top_key_;
  Json root_;
  std::vector<Frame> frames_;
  std::string pending_key_;
};

class CardImporter {
 public:
  template <typename Input>
  PatternCard run(Input&& input) {
    StreamingBuilder builder(
        [this](int stream, const Json& value) { element(stream, value); },
        [this](const std::string& key) { top_key(key); });
    builder_ = &builder;
    try {
      Json::sax_parse(std::forward<Input>(input), &builder);
    } catch (const Json::exception& e) {
      throw DataError(std::string("card is not valid JSON: ") + e.what());
    } catch (const ConfigError& e) {
      schema_error(e.what());
    }
    if (!builder.root().is_object()) schema_error("top level is not an object");
    if (next_key_ != std::size(kKeys)) {
      schema_error(std::string("missing key '") + kKeys[next_key_] + "'");
    }
    return finish();
  }

 private:
  static constexpr const char* kKeys[] = {"version", "config", "features",
                                          "classes", "code_stats"};

  void top_key(const std::string& key) {
    // Keys must appear in canonical order; each stage relies on the
    // previous one being complete.
    if (next_key_ == 1) check_version();
    if (next_key_ == 2) read_config();
    if (next_key_ == 3) feature_count_ = card_.model.feature_names.size();
    if (next_key_ >= std::size(kKeys) || key != kKeys[next_key_]) {
      if (next_key_ == 0 && builder_->root().empty()) {
        schema_error("missing key 'version'");
      }
      schema_error("unexpected key '" + key + "' (card keys must be " +
                   "version, config, features, classes, code_stats)");
    }
    ++next_key_;
  }

  void check_version() {
    const std::string version = string_member(builder_->root(), "version");
    if (version != kCardVersion) {
      throw DataError("unsupported card version '" + version +
                      "' (expected '" + std::string(kCardVersion) + "')");
    }
  }

  void read_config() {
    const Json& config = member(builder_->root(), "config");
    const std::size_t bins = count_member(config, "bins");
    const std::size_t levels = count_member(config, "levels");
    const double min_frequency = real_member(config, "min_frequency");
    if (bins < 3 || bins % 2 == 0 || bins > 0xffff) schema_error("invalid 'bins'");
    if (levels < 1 || levels > 0xffff) schema_error("invalid 'levels'");
    if (min_frequency < 0.0 || min_frequency >= 1.0) {
      schema_error("invalid 'min_frequency'");
    }
    card_.model.spec = BinSpec(static_cast<int>(bins));
    card_.model.depth_limit = static_cast<int>(levels);
    card_.min_frequency = min_frequency;
  }

  void element(int stream, const Json& value) {
    if (!value.is_object()) schema_error("expected an object in array");
    switch (stream) {
      case StreamingBuilder::kFeature: feature(value); break;
      case StreamingBuilder::kCombination: combination(value); break;
      case StreamingBuilder::kClass: class_done(value); break;
      default: code_stat(value); break;
    }
  }

  void feature(const Json& value) {
    std::string name = string_member(value, "name");
    if (!feature_index_.emplace(name, card_.model.feature_names.size()).second) {
      schema_error("duplicate feature '" + name + "'");
    }
    const Json& root = member(value, "tree");
    FeatureTree tree(card_.model.spec, card_.model.depth_limit, read_stats(root));
    read_children(root, tree, tree.root());
    card_.model.feature_names.push_back(std::move(name));
    card_.model.trees.push_back(std::move(tree));
    interned_.emplace_back();
    texts_.emplace_back();
  }

  CodeId intern(std::size_t j, const Json& value) {
    if (!value.is_string()) schema_error("code is not a string");
    const std::string& text = value.get_ref<const std::string&>();
    auto [it, fresh] =
        interned_[j].emplace(text, static_cast<CodeId>(texts_[j].size()));
    if (fresh) texts_[j].push_back(text);
    return it->second;
  }

  void combination(const Json& value) {
    const Json& codes = array_member(value, "codes");
    if (codes.size() != feature_count_) schema_error("combination width mismatch");
    for (std::size_t j = 0; j < feature_count_; ++j) {
      pending_.ids.push_back(intern(j, codes[j]));
    }
    pending_.counts.push_back(count_member(value, "count"));
    const std::size_t overlap = count_member(value, "overlap_classes");
    if (overlap > 0xffffffffu) schema_error("overlap out of range");
    pending_.overlaps.push_back(static_cast<std::uint32_t>(overlap));
  }

  void class_done(const Json& value) {
    array_member(value, "combinations");
    pending_.label = string_member(value, "label");
    pending_.n_instances = count_member(value, "n_instances");
    if (!class_index_.emplace(pending_.label, classes_.size()).second) {
      schema_error("duplicate class '" + pending_.label + "'");
    }
    classes_.push_back(std::move(pending_));
    classes_.back().stats.resize(feature_count_);
    pending_ = PendingClass{};
  }

  void code_stat(const Json& value) {
    auto f = feature_index_.find(string_member(value, "feature"));
    if (f == feature_index_.end()) schema_error("code stats for unknown feature");
    const std::size_t j = f->second;
    const CodeId id = intern(j, member(value, "code"));
    const std::size_t overlap = count_member(value, "overlap_classes");
    if (overlap > 0xffffffffu) schema_error("overlap out of range");
    const Json& counts = member(value, "per_class_counts");
    if (!counts.is_object() || counts.empty()) {
      schema_error("'per_class_counts' must be a non-empty object");
    }
    for (auto it = counts.begin(); it != counts.end(); ++it) {
      auto k = class_index_.find(it.key());
      if (k == class_index_.end()) {
        schema_error("code stats for unknown class '" + it.key() + "'");
      }
      if (!it.value().is_number_unsigned()) schema_error("invalid code count");
      classes_[k->second].stats[j].push_back(
          {id, it.value().get<std::size_t>(), static_cast<std::uint32_t>(overlap)});
    }
  }

  PatternCard finish() {
    const std::size_t m = feature_count_;
    const auto levels = static_cast<std::size_t>(card_.model.depth_limit);
    const int bins = card_.model.spec.bins();

    // Sorted codebooks and the mapping from first-seen order to final ids.
    std::vector<std::vector<CodeId>> remap(m);
    card_.codebooks.resize(m);
    for (std::size_t j = 0; j < m; ++j) {
      std::vector<std::pair<Code, CodeId>> entries;
      entries.reserve(texts_[j].size());
      for (CodeId t = 0; t < texts_[j].size(); ++t) {
        Code code = parse_code(texts_[j][t], bins);
        if (code.digits.size() > levels) schema_error("code longer than 'levels'");
        entries.emplace_back(std::move(code), t);
      }
      interned_[j] = {};
      texts_[j] = {};
      std::sort(entries.begin(), entries.end());
      remap[j].resize(entries.size());
      for (std::size_t c = 0; c < entries.size(); ++c) {
        if (c > 0 && entries[c - 1].first == entries[c].first) {
          schema_error("code written in two forms");
        }
        remap[j][entries[c].second] = static_cast<CodeId>(c);
        card_.codebooks[j].push_back(std::move(entries[c].first));
      }
    }

    std::vector<CodeId> ids(m);
    for (PendingClass& pending : classes_) {
      ClassPattern cls;
      cls.label = std::move(pending.label);
      cls.n_instances = pending.n_instances;
      cls.combinations = ComboTable(m);
      for (std::size_t c = 0; c < pending.counts.size(); ++c) {
        for (std::size_t j = 0; j < m; ++j) {
          ids[j] = remap[j][pending.ids[c * m + j]];
        }
        cls.combinations.push_back(ids, pending.counts[c]);
      }
      cls.combination_overlaps = std::move(pending.overlaps);
      pending.ids = {};
      for (std::size_t j = 0; j < m; ++j) {
        for (CodeStat& s : pending.stats[j]) s.code = remap[j][s.code];
        std::sort(pending.stats[j].begin(), pending.stats[j].end(),
                  [](const CodeStat& a, const CodeStat& b) { return a.code < b.code; });
      }
      cls.code_stats = std::move(pending.stats);
      card_.classes.push_back(std::move(cls));
    }
    classes_.clear();
    validate_card(card_);
    return std::move(card_);
  }

  struct PendingClass {
    std::string label;
    std::size_t n_instances = 0;
    std::vector<CodeId> ids;  // first-seen ids, row-major
    std::vector<std::size_t> counts;
    std::vector<std::uint32_t> overlaps;
    std::vector<std::vector<CodeStat>> stats;
  };

  StreamingBuilder* builder_ = nullptr;
  std::size_t next_key_ = 0;
  std::size_t feature_count_ = 0;
  PatternCard card_;
  std::unordered_map<std::string, std::size_t> feature_index_;
  std::unordered_map<std::string, std::size_t> class_index_;
  std::vector<std::unordered_map<std::string, CodeId>> interned_;
  std::vector<std::vector<std::string>> texts_;
  PendingClass pending_;
  std::vector<PendingClass> classes_;
};

}  // namespace

PatternCard card_from_json(std::string_view text) {
  return CardImporter().run(text);
}

PatternCard import_card_json(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) {
    throw DataError("card file '" + path.string() + "' does not exist");
  }
  std::unique_ptr<std::FILE, int (*)(std::FILE*)> file(
      std::fopen(path.c_str(), "rb"), &std::fclose);
  if (!file) throw DataError("cannot read '" + path.string() + "'");
  return CardImporter().run(file.get());
}

void write_projected_csv(const ProjectedDataset& projected, int bins,
                         std::ostream& stream) {
  const std::size_t m = projected.n_features();
  std::vector<std::vector<std::string>> cells(m);
  for (std::size_t j = 0; j < m; ++j) {
    for (const Code& code : projected.codebook(j)) {
      cells[j].push_back(format_code(code, bins));
    }
  }

  std::ostringstream line;
  std::vector<std::string> header = projected.feature_names();
  if (projected.labels()) header.emplace_back("label");
  write_csv_record(line, header);
  Sink out(stream);
  out << line.str();

  for (std::size_t i = 0; i < projected.n_rows(); ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      if (j > 0) out << ',';
      out << cells[j][projected.id(i, j)];
    }
    if (projected.labels()) {
      if (m > 0) out << ',';
      line.str("");
      write_csv_field(line, (*projected.labels())[i]);
      out << line.str();
    }
    out << '\n';
  }
}

void export_projected_csv(const ProjectedDataset& projected, int bins,
                          const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  write_projected_csv(projected, bins, out);
  out.flush();
  if (!out) throw DataError("failed writing '" + path.string() + "'");
}

namespace {

std::string escape_cell(std::string_view text) {
  std::string out;
  for (char c : text) {
    if (c == '|') out += "\\|";
    else if (c == '\n' || c == '\r') out += ' ';
    else out += c;
  }
  return out;
}

std::string fraction(std::size_t part, std::size_t whole) {
  if (whole == 0) return "0";
  char digits[32];
  const double value = static_cast<double>(part) / static_cast<double>(whole);
  auto [ptr, ec] = std::to_chars(digits, digits + sizeof(digits), value,
                                 std::chars_format::fixed, 4);
  return std::string(digits, ptr);
}

}  // namespace

std::string render_markdown_card(const PatternCard& card) {
  const int bins = card.model.spec.bins();
  const std::size_t m = card.n_features();
  std::ostringstream md;

  md << "# Pattern card\n\n";
  md << "## Dataset summary\n\n";
  md << "| property | value |\n|---|---|\n";
  md << "| rows | " << card.n_rows() << " |\n";
  md << "| features | " << m << " |\n";
  md << "| classes | " << card.n_classes() << " |\n";
  md << "| bins (b) | " << bins << " |\n";
  md << "| levels (L) | " << card.model.depth_limit << " |\n";
  md << "| min category frequency | " << format_real(card.min_frequency)
     << " |\n\n";

  // A combination "overlaps" when at least one of its codes is shared with
  // another class; "shared" when the whole tuple is.
  md << "## Classes\n\n";
  md << "| class | instances | unique combinations | overlapping | shared |\n";
  md << "|---|---|---|---|---|\n";
  std::size_t all_combos = 0;
  std::size_t all_shared = 0;
  for (const ClassPattern& cls : card.classes) {
    std::vector<std::unordered_set<CodeId>> shared_codes(m);
    for (std::size_t j = 0; j < m; ++j) {
      for (const CodeStat& s : cls.code_stats[j]) {
        if (s.overlap > 1) shared_codes[j].insert(s.code);
      }
    }
    std::size_t overlapping = 0;
    std::size_t shared = 0;
    for (std::size_t c = 0; c < cls.combinations.size(); ++c) {
      const auto ids = cls.combinations.ids(c);
      bool any = false;
      for (std::size_t j = 0; j < m && !any; ++j) {
        any = shared_codes[j].count(ids[j]) > 0;
      }
      if (any) ++overlapping;
      if (cls.combination_overlaps[c] > 1) ++shared;
    }
    all_combos += cls.combinations.size();
    all_shared += shared;
    md << "| " << escape_cell(cls.label) << " | " << cls.n_instances << " | "
       << cls.combinations.size() << " | " << overlapping << " | " << shared
       << " |\n";
  }
  md << '\n';

  md << "## Most frequent combinations\n\n";
  for (const ClassPattern& cls : card.classes) {
    md << "### " << escape_cell(cls.label) << "\n\n";
    md << "| combination | count | classes sharing it |\n|---|---|---|\n";
    std::vector<std::size_t> order(cls.combinations.size());
    for (std::size_t c = 0; c < order.size(); ++c) order[c] = c;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return cls.combinations.count(a) > cls.combinations.count(b);
    });
    if (order.size() > 10) order.resize(10);
    for (std::size_t c : order) {
      const auto ids = cls.combinations.ids(c);
      md << "| ";
      for (std::size_t j = 0; j < m; ++j) {
        if (j > 0) md << ", ";
        md << format_code(card.code(j, ids[j]), bins);
      }
      md << " | " << cls.combinations.count(c) << " | "
         << cls.combination_overlaps[c] << " |\n";
    }
    md << '\n';
  }

  md << "## Overlap summary\n\n";
  md << "Fraction of unique combinations present in more than one class: "
     << fraction(all_shared, all_combos) << " (" << all_shared << " of "
     << all_combos << ").\n\n";

  md << "## Features\n\n";
  md << "| feature | distinct codes | codes shared by classes |\n|---|---|---|\n";
  for (std::size_t j = 0; j < m; ++j) {
    std::unordered_set<CodeId> shared;
    for (const ClassPattern& cls : card.classes) {
      for (const CodeStat& s : cls.code_stats[j]) {
        if (s.overlap > 1) shared.insert(s.code);
      }
    }
    md << "| " << escape_cell(card.model.feature_names[j]) << " | "
       << card.codebooks[j].size() << " | " << shared.size() << " |\n";
  }
  md << '\n';

  md << "## Disclosure\n\n"
     << "The card stores, for every node of every feature tree, the count, "
        "minimum, maximum, mean and standard deviation of the values in that "
        "subdomain so data can be re-projected. Deeper levels describe "
        "smaller groups of values more precisely; review the level setting "
        "before publishing.\n";
  return md.str();
}

}  // namespace spata
