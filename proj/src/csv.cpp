#include "csv.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>

#include "hospstay/error.hpp"

namespace hospstay::csv {

namespace {

std::string trim(std::string s) {
  auto not_space = [](unsigned char c) { return c != ' ' && c != '\t' && c != '\r'; };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

std::string where(std::size_t row, std::string_view column) {
  return "row " + std::to_string(row) + ", column '" + std::string(column) + "'";
}

}  // namespace

Reader::Reader(std::istream& in) : in_(in) {
  read_record(header_);
  for (auto& h : header_) h = trim(h);
  // Tolerate a UTF-8 byte-order mark.
  if (!header_.empty() && header_[0].rfind("\xEF\xBB\xBF", 0) == 0) header_[0].erase(0, 3);
}

bool Reader::read_record(std::vector<std::string>& fields) {
  fields.clear();
  std::string line;
  if (!std::getline(in_, line)) return false;
  ++line_;
  row_number_ = line_;

  std::string field;
  bool quoted = false;
  for (std::size_t i = 0;; ++i) {
    if (i == line.size()) {
      if (quoted) {
        // Quoted newline: continue with the next physical line.
        std::string more;
        if (!std::getline(in_, more)) break;
        ++line_;
        field.push_back('\n');
        line += more;
        --i;
        continue;
      }
      break;
    }
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(field);
      field.clear();
    } else {
      field.push_back(c);
    }
  }
  if (!field.empty() && field.back() == '\r') field.pop_back();
  fields.push_back(field);
  return true;
}

bool Reader::next(std::vector<std::string>& row) {
  while (read_record(row)) {
    const bool blank = std::all_of(row.begin(), row.end(), [](const std::string& f) {
      return trim(f).empty();
    });
    if (blank) continue;
    for (auto& f : row) f = trim(f);
    row.resize(std::max(row.size(), header_.size()));
    return true;
  }
  return false;
}

std::optional<std::size_t> column_index(const std::vector<std::string>& header,
                                        std::string_view name) {
  auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) return std::nullopt;
  return static_cast<std::size_t>(it - header.begin());
}

double parse_real(const std::string& text, std::size_t row, std::string_view column) {
  // strtod rather than from_chars: libstdc++ 11 lacks the floating overloads.
  const char* begin = text.c_str();
  char* end = nullptr;
  const double value = std::strtod(begin, &end);
  if (text.empty() || end != begin + text.size() || !std::isfinite(value)) {
    fail(ErrorKind::Data, where(row, column) + ": expected a number, got '" + text + "'");
  }
  return value;
}

long long parse_integer(const std::string& text, std::size_t row, std::string_view column) {
  long long value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size()) {
    fail(ErrorKind::Data, where(row, column) + ": expected an integer, got '" + text + "'");
  }
  return value;
}

std::string escape(std::string_view field) {
  if (field.find_first_of(",\"\n") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

}  // namespace hospstay::csv
