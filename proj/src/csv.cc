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

#include "spata/csv.h"

#include <fstream>
#include <sstream>

#include "spata/errors.h"

namespace spata {

CsvReader::CsvReader(std::string_view text) : text_(text) {
  // Skip a UTF-8 byte order mark.
  if (text_.substr(0, 3) == "\xEF\xBB\xBF") pos_ = 3;
}

bool CsvReader::next(std::vector<std::string_view>& fields) {
  fields.clear();
  unescaped_.clear();
  if (pos_ >= text_.size()) return false;
  record_line_ = line_;

  const std::size_t n = text_.size();
  while (true) {
    if (pos_ < n && text_[pos_] == '"') {
      const std::size_t start_line = line_;
      ++pos_;
      const std::size_t begin = pos_;
      bool escaped = false;
      while (true) {
        if (pos_ >= n) {
          throw DataError("unterminated quoted field starting on line " +
                          std::to_string(start_line));
        }
        const char c = text_[pos_];
        if (c == '"') {
          if (pos_ + 1 < n && text_[pos_ + 1] == '"') {
            escaped = true;
            pos_ += 2;
            continue;
          }
          break;
        }
        if (c == '\n') ++line_;
        ++pos_;
      }
      std::string_view raw = text_.substr(begin, pos_ - begin);
      ++pos_;  // closing quote
      if (escaped) {
        std::string value;
        value.reserve(raw.size());
        for (std::size_t i = 0; i < raw.size(); ++i) {
          value.push_back(raw[i]);
          if (raw[i] == '"') ++i;
        }
        unescaped_.push_back(std::move(value));
        fields.emplace_back(unescaped_.back());
      } else {
        fields.push_back(raw);
      }
      // Tolerate stray characters between the closing quote and separator.
      while (pos_ < n && text_[pos_] != ',' && text_[pos_] != '\n') ++pos_;
    } else {
      const std::size_t begin = pos_;
      while (pos_ < n && text_[pos_] != ',' && text_[pos_] != '\n') ++pos_;
      std::string_view raw = text_.substr(begin, pos_ - begin);
      if (!raw.empty() && raw.back() == '\r' &&
          (pos_ >= n || text_[pos_] == '\n')) {
        raw.remove_suffix(1);
      }
      fields.push_back(raw);
    }

    if (pos_ >= n) return true;
    if (text_[pos_] == ',') {
      ++pos_;
      continue;
    }
    ++pos_;  // '\n'
    ++line_;
    return true;
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return std::move(buffer).str();
}

void write_csv_field(std::ostream& out, std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) {
    out << field;
    return;
  }
  out << '"';
  for (char c : field) {
    if (c == '"') out << '"';
    out << c;
  }
  out << '"';
}

void write_csv_record(std::ostream& out, std::span<const std::string> fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i > 0) out << ',';
    write_csv_field(out, fields[i]);
  }
  out << '\n';
}

void write_csv_record(std::ostream& out,
                      std::span<const std::string_view> fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i > 0) out << ',';
    write_csv_field(out, fields[i]);
  }
  out << '\n';
}

}  // namespace spata
