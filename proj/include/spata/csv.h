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

#ifndef SPATA_CSV_H_
#define SPATA_CSV_H_

// Minimal RFC-4180 reader/writer: comma separator, double-quote quoting
// with "" escapes, LF or CRLF record ends.

#include <cstddef>
#include <deque>
#include <filesystem>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace spata {

class CsvReader {
 public:
  explicit CsvReader(std::string_view text);

  // Reads the next record into `fields`. The views stay valid until the next
  // call. Returns false at end of input. Throws DataError on an unterminated
  // quoted field.
  bool next(std::vector<std::string_view>& fields);

  // 1-based line number where the last returned record started.
  std::size_t line() const { return record_line_; }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t record_line_ = 0;
  std::deque<std::string> unescaped_;
};

// Reads a whole file into memory. Throws DataError if it cannot be opened.
std::string read_file(const std::filesystem::path& path);

void write_csv_field(std::ostream& out, std::string_view field);
void write_csv_record(std::ostream& out, std::span<const std::string> fields);
void write_csv_record(std::ostream& out,
                      std::span<const std::string_view> fields);

}  // namespace spata

#endif  // SPATA_CSV_H_
