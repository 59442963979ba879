#pragma once

// Minimal RFC-4180 style reader shared by the CSV loaders.

#include <cstddef>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace hospstay::csv {

class Reader {
 public:
  /// Reads the header row immediately; an empty stream gives an empty header.
  explicit Reader(std::istream& in);

  const std::vector<std::string>& header() const { return header_; }

  /// Fills `row` with the next non-blank record. Returns false at end of input.
  bool next(std::vector<std::string>& row);

  /// 1-based line number of the record last returned (the header is line 1).
  std::size_t row_number() const { return row_number_; }

 private:
  bool read_record(std::vector<std::string>& fields);

  std::istream& in_;
  std::vector<std::string> header_;
  std::size_t line_ = 0;
  std::size_t row_number_ = 0;
};

std::optional<std::size_t> column_index(const std::vector<std::string>& header,
                                        std::string_view name);

/// Parses a finite real; throws Error(Data) naming the row and column.
double parse_real(const std::string& text, std::size_t row, std::string_view column);
long long parse_integer(const std::string& text, std::size_t row, std::string_view column);

/// Quotes a field when it contains a delimiter, quote or newline.
std::string escape(std::string_view field);

}  // namespace hospstay::csv
