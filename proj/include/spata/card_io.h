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

#ifndef SPATA_CARD_IO_H_
#define SPATA_CARD_IO_H_

// Canonical serialization of pattern cards and projected datasets.
//
// Card JSON layout (keys always in this order):
//   version      "spata-card/1"
//   config       {bins, levels, min_frequency, tool_version}
//   features     [{name, tree}], tree node =
//                {mean, std, min, max, count, children: {bin: node}}
//   classes      [{label, n_instances,
//                  combinations: [{codes, count, overlap_classes}]}]
//   code_stats   [{feature, code, per_class_counts: {label: count},
//                  overlap_classes}]
// Reals use the shortest decimal that round-trips. Entries of the four
// top-level arrays are one per line; everything else is compact.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>

#include "spata/pattern.h"
#include "spata/projection.h"

namespace spata {

inline constexpr std::string_view kCardVersion = "spata-card/1";

void write_card_json(const PatternCard& card, std::ostream& out);
std::string card_to_json(const PatternCard& card);
// Throws DataError on I/O failure or a card without classes.
void export_card_json(const PatternCard& card,
                      const std::filesystem::path& path);

// Parses and fully validates a card. Throws DataError on a schema or
// version mismatch or any invariant violation.
PatternCard card_from_json(std::string_view text);
PatternCard import_card_json(const std::filesystem::path& path);

// Header is the feature names plus "label" when labels are present; one row
// per instance with codes rendered by format_code.
void write_projected_csv(const ProjectedDataset& projected, int bins,
                         std::ostream& out);
void export_projected_csv(const ProjectedDataset& projected, int bins,
                          const std::filesystem::path& path);

// Human-readable data card summary in Markdown.
std::string render_markdown_card(const PatternCard& card);

// Shortest round-trip decimal for a finite double; -0 is written as 0.
std::string format_real(double value);

}  // namespace spata

#endif  // SPATA_CARD_IO_H_
